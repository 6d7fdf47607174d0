import json
import tomllib

import pytest

from surgesim.cli import EXIT_OK, main
from surgesim.harness import load_scenario
from surgesim_test import scenario_paths


def command_for(path) -> str:
    document = tomllib.loads(path.read_text(encoding='utf-8'))
    for table, command in (('sweep', 'sweep'), ('fit', 'fit-k'), ('heatmap', 'heatmap')):
        if table in document:
            return command

    return 'run'


@pytest.mark.parametrize('path', scenario_paths(), ids=lambda path: path.stem)
def test_shipped_scenario_meets_expectations(path, tmp_path):
    out = tmp_path / f"{path.stem}.csv"
    assert main(['--out', str(out), command_for(path), str(path)]) == EXIT_OK
    assert out.read_text(encoding='utf-8').count('\n') >= 2


@pytest.mark.parametrize(
    'name', ['theory_spill_over', 'theory_localized', 'theory_inversion']
)
def test_theory_scenarios_pass_audit(name, scenarios_dir, tmp_path):
    out = tmp_path / f"{name}.json"
    path = scenarios_dir / f"{name}.toml"
    assert main(['--format', 'json', '--out', str(out), 'audit', str(path)]) == EXIT_OK
    report = json.loads(out.read_text(encoding='utf-8'))['report']
    assert report['violations'] == []


def test_plotted_step_counts(scenarios_dir, tmp_path):
    out = tmp_path / 'spill_over.json'
    path = scenarios_dir / 'theory_spill_over.toml'
    assert main(['--format', 'json', '--out', str(out), 'run', str(path)]) == EXIT_OK
    report = json.loads(out.read_text(encoding='utf-8'))['report']
    assert (report['tau_s_steps'], report['tau_n_steps']) == (33, 30)


def test_stochastic_runs_stay_near_fluid_times(scenarios_dir, tmp_path):
    out = tmp_path / 'stochastic.json'
    path = scenarios_dir / 'stochastic_spill_over.toml'
    assert main(['--format', 'json', '--out', str(out), 'run', str(path)]) == EXIT_OK
    outcomes = json.loads(out.read_text(encoding='utf-8'))['outcomes']
    assert len(outcomes) == len(load_scenario(path).run_seeds)
    assert all(outcome['converged'] for outcome in outcomes)


@pytest.mark.parametrize('name', ['stochastic_spill_over', 'stochastic_localized'])
def test_stochastic_scenarios_pass_audit(name, scenarios_dir, tmp_path):
    out = tmp_path / f"{name}.json"
    path = scenarios_dir / f"{name}.toml"
    assert main(['--format', 'json', '--out', str(out), 'audit', str(path)]) == EXIT_OK
    report = json.loads(out.read_text(encoding='utf-8'))['report']
    assert report['violations'] == []
    assert report['tau_s_bounds']['lower'] <= report['tau_s_observed'] \
        <= report['tau_s_bounds']['upper']
