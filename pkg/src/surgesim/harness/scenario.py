"""
Declarative scenario files.

A scenario is one flat TOML document naming the model and its parameters, with
optional tables for the wider experiments (``[sweep]``, ``[fit]``, ``[heatmap]``) and
an ``[expect]`` table holding the acceptance numbers the run must meet::

    name = "spill-over surge"
    model = "theory"
    lambda = 30
    mu = 50
    d0_surge = 1000
    d0_nonsurge = 200
    k = 0.005
    horizon = 65

    [expect]
    tau_s = 32
    tau_n = 29
    surge_type = "spill_over"

Unknown keys are rejected, and every constraint of the model's parameters is checked
at parse time, so a typo or an invalid market fails before anything runs.
"""
import tomllib
from enum import StrEnum
from pathlib import Path
from typing import Any, List, Optional, Self, Tuple

from pydantic import Field, ValidationError, model_validator

from ..analysis import SweepQuantity
from ..dynamics import DEFAULT_TOL, SurgeType, TheoryParams
from ..errors import ScenarioError
from ..market import AgentParams, PricingConfig, TruncatedNormalSpec
from ..model import BaseModelNoExtra
from ..stochastic import ArrivalKind, ArrivalProcess, StochasticParams
from ..streams import MAX_SEED

__all__ = [
    'ModelKind',
    'OutputFormat',
    'Direction',
    'MonotoneSpec',
    'Expectations',
    'SweepSpec',
    'FitSpec',
    'HeatmapSpec',
    'OutputOptions',
    'Scenario',
    'parse_scenario',
    'load_scenario',
]


class ModelKind(StrEnum):
    THEORY = 'theory'
    STOCHASTIC = 'stochastic'
    AGENT = 'agent'
    AGENT_NSB = 'agent_nsb'


class OutputFormat(StrEnum):
    CSV = 'csv'
    JSON = 'json'


class Direction(StrEnum):
    INCREASING = 'increasing'
    DECREASING = 'decreasing'


class MonotoneSpec(BaseModelNoExtra):
    """
    A sweep quantity that must move in one direction across the sweep's points, in
    the order of ``values``::

        [[expect.monotone]]
        quantity = "tau_s"
        direction = "decreasing"
        strict = true

    Attributes:
        quantity (SweepQuantity): Tracked per-point quantity.
        direction (Direction): Required direction.
        strict (bool): Whether equal neighbouring values fail.
    """
    quantity: SweepQuantity
    direction: Direction
    strict: bool = False


class Expectations(BaseModelNoExtra):
    """
    Acceptance numbers embedded in a scenario; only the keys present are checked.

    Windows are closed ``[lower, upper]`` pairs. For multi-seed runs, window checks
    apply to the mean over seeds.
    """
    tau_s: Optional[int] = None
    tau_n: Optional[int] = None
    tau_s_steps: Optional[int] = None
    tau_n_steps: Optional[int] = None
    peak_tau: Optional[int] = None
    surge_type: Optional[SurgeType] = None
    inversion_time: Optional[int] = None
    no_inversion: Optional[bool] = None
    bounds_hold: Optional[bool] = None
    converged: Optional[bool] = None
    tau_s_window: Optional[Tuple[float, float]] = None
    tau_n_window: Optional[Tuple[float, float]] = None
    convergence_window: Optional[Tuple[float, float]] = None
    rel_diff_window: Optional[Tuple[float, float]] = None
    surge_types: Optional[List[SurgeType]] = None
    k_window: Optional[Tuple[float, float]] = None
    max_rel_diff_pct: Optional[float] = None
    monotone: Optional[List[MonotoneSpec]] = None


class SweepSpec(BaseModelNoExtra):
    """
    Attributes:
        parameter (str | List[str]): Swept parameter name(s); several names are
            varied together, one tuple of values per point.
        values (List[Any]): Values of the sweep, in evaluation order.
    """
    parameter: str | List[str]
    values: List[Any] = Field(min_length=1)


class FitSpec(BaseModelNoExtra):
    k_min: float = Field(1e-4, ge=0)
    k_max: float = Field(1e-2, gt=0)
    grid_size: int = Field(50, ge=2)

    @model_validator(mode='after')
    def validate_range(self) -> Self:
        if self.k_min >= self.k_max:
            raise ValueError('requires k_min < k_max')

        return self


class HeatmapSpec(BaseModelNoExtra):
    d_mean: List[float] = Field(min_length=1)
    d_std: List[float] = Field(min_length=1)
    horizon: int = Field(500, ge=1)


class OutputOptions(BaseModelNoExtra):
    format: OutputFormat = OutputFormat.CSV
    path: Optional[str] = None


class Scenario(BaseModelNoExtra):
    """
    One experiment: a model, its parameters and what to do with it.

    Field names follow the model parameters (``lambda``, ``mu``, ``d0_surge``,
    ``d0_nonsurge``, ``k``, ...). ``seeds`` runs the scenario once per seed; otherwise
    ``seed`` is used.
    """
    name: str
    model: ModelKind
    lam: float = Field(alias='lambda')
    mu: float
    d0_surge: float
    d0_nonsurge: float
    k: Optional[float] = None
    horizon: Optional[int] = None
    tol: float = DEFAULT_TOL
    seed: int = Field(0, ge=0, le=MAX_SEED)
    seeds: Optional[List[int]] = None
    arrivals: ArrivalKind = ArrivalKind.POISSON
    cost_dist: Optional[TruncatedNormalSpec] = None
    wtp_dist: Optional[TruncatedNormalSpec] = None
    pricing: Optional[PricingConfig] = None
    stop_on_clear: bool = True
    expect: Optional[Expectations] = None
    sweep: Optional[SweepSpec] = None
    fit: Optional[FitSpec] = None
    heatmap: Optional[HeatmapSpec] = None
    output: OutputOptions = OutputOptions()

    @model_validator(mode='after')
    def validate_required(self) -> Self:
        if self.model in (ModelKind.THEORY, ModelKind.STOCHASTIC) and self.k is None:
            raise ValueError(f"model '{self.model}' requires k")
        if self.is_agent and self.cost_dist is None:
            raise ValueError(f"model '{self.model}' requires cost_dist")
        if self.is_agent and self.k is not None:
            raise ValueError(f"model '{self.model}' does not take k")
        if self.seeds is not None and not self.seeds:
            raise ValueError('requires at least one seed in seeds')

        return self

    @property
    def is_agent(self) -> bool:
        return self.model in (ModelKind.AGENT, ModelKind.AGENT_NSB)

    @property
    def run_seeds(self) -> List[int]:
        return list(self.seeds) if self.seeds else [self.seed]

    def theory_params(self) -> TheoryParams:
        return TheoryParams(
            lam=self.lam,
            mu=self.mu,
            d0_surge=self.d0_surge,
            d0_nonsurge=self.d0_nonsurge,
            k=self.k if self.k is not None else 0.0,
            horizon=self.horizon,
            tol=self.tol
        )

    def stochastic_params(self, seed: Optional[int] = None) -> StochasticParams:
        base = self.theory_params()
        return StochasticParams(
            base=base,
            demand_process=ArrivalProcess(kind=self.arrivals, mean=base.lam),
            supply_process=ArrivalProcess(kind=self.arrivals, mean=base.mu),
            seed=self.seed if seed is None else seed
        )

    def agent_params(self, seed: Optional[int] = None) -> AgentParams:
        optional = dict(wtp_dist=self.wtp_dist, pricing=self.pricing)
        return AgentParams(
            lam=self.lam,
            mu=self.mu,
            d0_surge=self.d0_surge,
            d0_nonsurge=self.d0_nonsurge,
            horizon=self.horizon,
            seed=self.seed if seed is None else seed,
            cost_dist=self.cost_dist,
            strategic=self.model == ModelKind.AGENT,
            stop_on_clear=self.stop_on_clear,
            **{key: value for key, value in optional.items() if value is not None}
        )

    def params(self, seed: Optional[int] = None) -> TheoryParams | StochasticParams | AgentParams:
        """Model parameters for one run of the scenario."""
        if self.model == ModelKind.THEORY:
            return self.theory_params()
        if self.model == ModelKind.STOCHASTIC:
            return self.stochastic_params(seed)

        return self.agent_params(seed)

    def with_seed(self, seed: int) -> Self:
        """
        Copy running only `seed`.

        Raises:
            ValidationError: If `seed` is not an unsigned 64-bit integer.
        """
        return self.__class__.model_validate(
            self.model_dump(by_alias=True) | dict(seed=seed, seeds=None)
        )


def _format_errors(err: ValidationError) -> List[str]:
    errors = []
    for detail in err.errors():
        location = '.'.join(str(part) for part in detail['loc'])
        message = detail['msg'].removeprefix('Value error, ')
        errors.append(f"{location}: {message}" if location else message)

    return errors


def parse_scenario(text: str) -> Scenario:
    """
    Parses and fully validates scenario text.

    Raises:
        ScenarioError: With one entry per offending field, or the violated rule.
    """
    try:
        document = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        raise ScenarioError([f"invalid TOML: {err}"]) from err

    name = document.get('name') if isinstance(document.get('name'), str) else None
    try:
        scenario = Scenario.model_validate(document)
        scenario.params()
    except ValidationError as err:
        raise ScenarioError(_format_errors(err), scenario=name) from err

    return scenario


def load_scenario(path: str | Path) -> Scenario:
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as err:
        raise ScenarioError([f"cannot read {path}: {err.strerror}"]) from err

    return parse_scenario(text)
