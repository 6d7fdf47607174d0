import argparse
import sys
from concurrent.futures import Executor, ProcessPoolExecutor
from contextlib import ExitStack
from pathlib import Path
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from .config import SurgeSimEnv
from .errors import ExpectationError, NotConvergedError, ScenarioError
from .harness import (
    Artifact,
    OutputFormat,
    RunArtifact,
    Scenario,
    emit,
    load_scenario,
    run,
    run_audit,
    run_fit,
    run_heatmap,
    run_sweep,
    verify,
)
from .logutils import enable_log_context
from .model import BaseModelNoExtra

__all__ = [
    'EXIT_OK',
    'EXIT_INVALID_SCENARIO',
    'EXIT_EXPECTATION_FAILED',
    'EXIT_NOT_CONVERGED',
    'SurgeSimCliParams',
    'SurgeSimCli',
    'build_parser',
    'main',
]

EXIT_OK = 0
EXIT_INVALID_SCENARIO = 1
EXIT_EXPECTATION_FAILED = 2
EXIT_NOT_CONVERGED = 3


class SurgeSimCliParams(BaseModelNoExtra):
    command: str
    scenario: str
    seed: Optional[int] = None
    out: Optional[str] = None
    format: Optional[OutputFormat] = None


class SurgeSimCli:
    """
    Runs one command over one scenario file and writes its artifact.

    Output goes to ``--out`` (or the scenario's ``output.path``), else to stdout; logs
    go to stderr so the emitted table stays clean.
    """

    def __init__(self, cli_params: SurgeSimCliParams, cli_env: SurgeSimEnv):
        self._cli_params = cli_params
        self._cli_env = cli_env

    def _executor(self, stack: ExitStack) -> Optional[Executor]:
        if self._cli_env.SURGESIM_WORKERS <= 1:
            return None

        self._cli_env.setvars()
        return stack.enter_context(
            ProcessPoolExecutor(max_workers=self._cli_env.SURGESIM_WORKERS)
        )

    def _handle_run(self, scenario: Scenario) -> Artifact:
        return run(scenario)

    def _handle_audit(self, scenario: Scenario) -> Artifact:
        return run_audit(scenario)

    def _handle_fit(self, scenario: Scenario) -> Artifact:
        return run_fit(scenario)

    def _handle_sweep(self, scenario: Scenario) -> Artifact:
        with ExitStack() as stack:
            return run_sweep(scenario, executor=self._executor(stack))

    def _handle_heatmap(self, scenario: Scenario) -> Artifact:
        with ExitStack() as stack:
            return run_heatmap(scenario, executor=self._executor(stack))

    def _load(self) -> Scenario:
        scenario = load_scenario(self._cli_params.scenario)
        if self._cli_params.seed is None:
            return scenario

        try:
            return scenario.with_seed(self._cli_params.seed)
        except ValidationError as err:
            raise ScenarioError(
                [f"--seed: {detail['msg']}" for detail in err.errors()], scenario.name
            ) from err

    def _write(self, scenario: Scenario, artifact: Artifact):
        output_format = self._cli_params.format or scenario.output.format
        text = emit(artifact, output_format)
        if out := self._cli_params.out or scenario.output.path:
            Path(out).write_text(text, encoding='utf-8')
        else:
            sys.stdout.write(text)

    def handle_command(self) -> int:
        """
        Returns:
            The process exit code.
        """
        command_actions: Dict[str, Callable[[Scenario], Artifact]] = {
            'run': self._handle_run,
            'audit': self._handle_audit,
            'fit-k': self._handle_fit,
            'sweep': self._handle_sweep,
            'heatmap': self._handle_heatmap,
        }
        try:
            scenario = self._load()
            artifact = command_actions[self._cli_params.command](scenario)
        except ScenarioError as exc:
            print(f"Error: {exc}", file=sys.stderr)
            return EXIT_INVALID_SCENARIO
        except NotConvergedError as exc:
            print(f"Error: {exc}", file=sys.stderr)
            return EXIT_NOT_CONVERGED

        self._write(scenario, artifact)
        if isinstance(artifact, RunArtifact) and not artifact.converged:
            print(
                f"Error: scenario '{scenario.name}' did not converge within its horizon",
                file=sys.stderr
            )
            return EXIT_NOT_CONVERGED

        try:
            verify(artifact)
        except ExpectationError as exc:
            print(f"Error: {exc}", file=sys.stderr)
            return EXIT_EXPECTATION_FAILED

        return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='surgesim',
        usage='surgesim [options] <command> <scenario>\nUse help or -h to see details',
        description='Simulates the dissipation of a ride-sharing demand surge',
        add_help=True
    )
    parser.add_argument(
        '--seed',
        type=int,
        default=None,
        help='Master seed. Overrides the seed(s) of the scenario'
    )
    parser.add_argument(
        '--out',
        default=None,
        help='Output file. Overrides output.path of the scenario; stdout by default'
    )
    parser.add_argument(
        '--format',
        choices=[output_format.value for output_format in OutputFormat],
        default=None,
        help='Output format. Overrides output.format of the scenario'
    )

    subparsers = parser.add_subparsers(dest='command', required=True)
    subcommand_help = {
        'run': 'simulates the scenario once per seed and emits the trajectory',
        'sweep': 'evaluates the scenario over the values of its [sweep] table',
        'fit-k': 'fits the fluid move-rate multiplier k to the scenario',
        'heatmap': 'maps the strategic price-gap improvement over move-cost distributions',
        'audit': 'checks a fluid trajectory against its closed-form bounds',
    }
    for subcommand, help_text in subcommand_help.items():
        parser_command = subparsers.add_parser(subcommand, help=help_text)
        parser_command.add_argument('scenario', help='Path to the TOML scenario file')

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    cli_env = SurgeSimEnv()
    enable_log_context(cli_env.log_level, cli_env.SURGESIM_LOG_PREFIX)

    args = build_parser().parse_args(argv)
    cli = SurgeSimCli(SurgeSimCliParams(**vars(args)), cli_env)
    return cli.handle_command()


if __name__ == '__main__':
    sys.exit(main())
