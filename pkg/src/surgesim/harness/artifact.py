"""
Run artifacts and their serialization.

Every command produces an artifact: the echoed scenario, the command's results and
provenance metadata. Artifacts serialize to JSON (the full model) or to a CSV table
with a header row. Floats are written with 17 significant digits so both formats
round-trip exactly.
"""
import csv
import io
from datetime import UTC, datetime
from typing import Any, ClassVar, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import Field

from .. import __version__
from ..analysis import FitResult, HeatmapCell, SweepPoint
from ..dynamics import BoundsReport, Trajectory
from ..market import MarketRun
from ..model import FrozenModel
from .scenario import OutputFormat, Scenario

__all__ = [
    'ArtifactMetadata',
    'TrajectoryRow',
    'SeedOutcome',
    'Artifact',
    'RunArtifact',
    'AuditArtifact',
    'SweepArtifact',
    'FitArtifact',
    'HeatmapArtifact',
    'trajectory_rows',
    'market_rows',
    'format_cell',
    'emit',
]

CSV_FLOAT_FORMAT = '.17g'


class ArtifactMetadata(FrozenModel):
    command: str
    seeds: List[int]
    tool_version: str = __version__
    created_at: datetime = Field(default_factory=lambda: datetime.now(UTC))


class TrajectoryRow(FrozenModel):
    """One time step; market columns stay empty for fluid and stochastic runs."""
    t: int
    d_s: float
    d_ns: float
    p_s: Optional[float] = None
    p_ns: Optional[float] = None
    delta_p: Optional[float] = None
    moved: Optional[int] = None
    matched_s: Optional[int] = None
    matched_ns: Optional[int] = None
    r_s: Optional[int] = None
    r_ns: Optional[int] = None


class SeedOutcome(FrozenModel):
    """
    Per-seed summary of a run.

    Fluid and stochastic runs fill ``tau_s``/``tau_n``; agent runs fill the market
    fields, and strategic agent runs also carry the difference to their benchmark.
    """
    seed: int
    converged: bool
    tau_s: Optional[int] = None
    tau_n: Optional[int] = None
    convergence_time: Optional[int] = None
    mean_delta_p: Optional[float] = None
    max_delta_p: Optional[float] = None
    total_moved: Optional[int] = None
    rel_diff_pct: Optional[float] = None


class Artifact(FrozenModel):
    CSV_COLUMNS: ClassVar[Tuple[str, ...]] = ()

    scenario: Scenario
    metadata: ArtifactMetadata

    def csv_rows(self) -> List[Sequence[Any]]:
        raise NotImplementedError


class RunArtifact(Artifact):
    """
    Result of the ``run`` command.

    Attributes:
        rows (List[TrajectoryRow]): Trajectory of the first seed, sorted by ``t``.
        report (Optional[BoundsReport]): Bound audit of a converged fluid run.
        outcomes (List[SeedOutcome]): One summary per seed, in seed order.
        converged (bool): Whether every run converged.
    """
    CSV_COLUMNS: ClassVar[Tuple[str, ...]] = (
        't', 'd_s', 'd_ns', 'p_s', 'p_ns', 'delta_p',
        'moved', 'matched_s', 'matched_ns', 'r_s', 'r_ns'
    )

    rows: List[TrajectoryRow]
    report: Optional[BoundsReport] = None
    outcomes: List[SeedOutcome]
    converged: bool

    def _mean(self, field: str) -> Optional[float]:
        values = [getattr(outcome, field) for outcome in self.outcomes]
        if not values or any(value is None for value in values):
            return None

        return float(np.mean(values))

    @property
    def mean_tau_s(self) -> Optional[float]:
        return self._mean('tau_s')

    @property
    def mean_tau_n(self) -> Optional[float]:
        return self._mean('tau_n')

    @property
    def mean_convergence_time(self) -> Optional[float]:
        return self._mean('convergence_time')

    @property
    def mean_rel_diff_pct(self) -> Optional[float]:
        return self._mean('rel_diff_pct')

    def csv_rows(self) -> List[Sequence[Any]]:
        return [
            tuple(getattr(row, column) for column in self.CSV_COLUMNS)
            for row in self.rows
        ]


class AuditArtifact(Artifact):
    CSV_COLUMNS: ClassVar[Tuple[str, ...]] = ('quantity', 'observed', 'lower', 'upper', 'ok')

    report: BoundsReport

    def csv_rows(self) -> List[Sequence[Any]]:
        report = self.report
        windows = [
            ('tau_s', report.tau_s_observed, report.tau_s_bounds.lower, report.tau_s_bounds.upper),
            ('tau_n', report.tau_n_observed, report.tau_n_bounds.lower, report.tau_n_bounds.upper),
            ('clearing_time', report.clearing_time, 0, report.clearing_bound),
        ]
        return [
            (name, observed, lower, upper, lower <= observed <= upper)
            for name, observed, lower, upper in windows
        ] + [
            ('tau_s_steps', report.tau_s_steps, None, None, None),
            ('tau_n_steps', report.tau_n_steps, None, None, None),
            ('peak_tau', report.peak_tau_observed, None, None, None),
            ('inversion_time', report.inversion_time, None, None, None),
            ('surge_type', report.surge_type, None, None, None),
            ('violations', len(report.violations), 0, 0, report.ok),
        ]


class SweepArtifact(Artifact):
    CSV_COLUMNS: ClassVar[Tuple[str, ...]] = (
        'value', 'surge_type', 'tau_s', 'tau_n', 'peak_tau', 'inversion_time', 'violations',
        'sa_convergence_time', 'nsb_convergence_time', 'sa_mean_delta_p', 'nsb_mean_delta_p',
        'rel_diff_pct', 'error'
    )

    parameters: List[str]
    points: List[SweepPoint]

    def csv_rows(self) -> List[Sequence[Any]]:
        rows = []
        for point in self.points:
            value = point.value
            if isinstance(value, (list, tuple)):
                value = ';'.join(format_cell(item) for item in value)
            report, comparison = point.report, point.comparison
            rows.append((
                value,
                report.surge_type if report else None,
                report.tau_s_observed if report else None,
                report.tau_n_observed if report else None,
                report.peak_tau_observed if report else None,
                report.inversion_time if report else None,
                len(report.violations) if report else None,
                comparison.strategic.convergence_time if comparison else None,
                comparison.benchmark.convergence_time if comparison else None,
                comparison.strategic.mean_delta_p if comparison else None,
                comparison.benchmark.mean_delta_p if comparison else None,
                comparison.rel_diff_pct if comparison else None,
                point.error
            ))

        return rows


class FitArtifact(Artifact):
    CSV_COLUMNS: ClassVar[Tuple[str, ...]] = ('seed', 'k_star', 'objective')

    results: List[FitResult]

    @property
    def mean_k_star(self) -> float:
        return float(np.mean([result.k_star for result in self.results]))

    def csv_rows(self) -> List[Sequence[Any]]:
        return [
            (seed, result.k_star, result.objective)
            for seed, result in zip(self.metadata.seeds, self.results)
        ]


class HeatmapArtifact(Artifact):
    CSV_COLUMNS: ClassVar[Tuple[str, ...]] = ('d_mean', 'd_std', 'rel_diff_pct')

    cells: List[List[HeatmapCell]]

    def csv_rows(self) -> List[Sequence[Any]]:
        return [
            (cell.d_mean, cell.d_std, cell.rel_diff_pct)
            for row in self.cells
            for cell in row
        ]


def trajectory_rows(trajectory: Trajectory) -> List[TrajectoryRow]:
    return [
        TrajectoryRow(t=state.t, d_s=state.d_s, d_ns=state.d_ns)
        for state in trajectory.states
    ]


def market_rows(run: MarketRun) -> List[TrajectoryRow]:
    return [
        TrajectoryRow(
            t=record.t, d_s=record.d_s, d_ns=record.d_ns,
            p_s=record.p_s, p_ns=record.p_ns, delta_p=record.delta_p,
            moved=record.moved, matched_s=record.matched_s, matched_ns=record.matched_ns,
            r_s=record.r_s, r_ns=record.r_ns
        )
        for record in run.records
    ]


def format_cell(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return format(value, CSV_FLOAT_FORMAT)

    return str(value)


def emit(artifact: Artifact, output_format: OutputFormat | str = OutputFormat.CSV) -> str:
    """
    Serializes an artifact.

    Args:
        artifact: Any command artifact.
        output_format: ``csv`` for the header plus one line per row, ``json`` for the
            whole artifact.

    Returns:
        The serialized text, newline terminated.
    """
    if OutputFormat(output_format) == OutputFormat.JSON:
        return artifact.model_dump_json(by_alias=True, indent=2) + '\n'

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(artifact.CSV_COLUMNS)
    writer.writerows(
        [format_cell(value) for value in row] for row in artifact.csv_rows()
    )
    return buffer.getvalue()
