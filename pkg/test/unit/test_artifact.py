import json

from surgesim.harness import (
    AuditArtifact,
    OutputFormat,
    RunArtifact,
    emit,
    format_cell,
    parse_scenario,
    run,
    run_audit,
)


class TestFormatCell:
    def test_values(self):
        assert format_cell(None) == ''
        assert format_cell(True) == 'true'
        assert format_cell(False) == 'false'
        assert format_cell(3) == '3'
        assert format_cell(0.1) == '0.10000000000000001'
        assert format_cell(900.0) == '900'
        assert format_cell('spill_over') == 'spill_over'


class TestEmit:
    def test_run_csv(self, spill_over_text):
        artifact = run(parse_scenario(spill_over_text))
        lines = emit(artifact).splitlines()
        assert lines[0] == ','.join(RunArtifact.CSV_COLUMNS)
        assert lines[1] == '0,1000,200,,,,,,,,'
        assert lines[2] == '1,900,260,,,,,,,,'
        assert lines[-1].startswith('32,0,0,')
        assert len(lines) == 1 + 33

    def test_agent_csv_fills_market_columns(self, small_agent_text):
        artifact = run(parse_scenario(small_agent_text))
        lines = emit(artifact, 'csv').splitlines()
        first_step = lines[2].split(',')
        assert len(first_step) == len(RunArtifact.CSV_COLUMNS)
        assert all(first_step)

    def test_json_round_trip(self, spill_over_text):
        artifact = run(parse_scenario(spill_over_text))
        text = emit(artifact, OutputFormat.JSON)
        document = json.loads(text)
        assert document['scenario']['lambda'] == 30
        assert document['metadata']['command'] == 'run'
        assert document['report']['tau_s_observed'] == 32
        assert RunArtifact.model_validate_json(text) == artifact

    def test_audit_csv(self, spill_over_text):
        artifact = run_audit(parse_scenario(spill_over_text))
        assert isinstance(artifact, AuditArtifact)
        lines = emit(artifact).splitlines()
        assert lines[0] == 'quantity,observed,lower,upper,ok'
        assert lines[1] == 'tau_s,32,8,50,true'
        assert lines[2] == 'tau_n,29,10,60,true'
        assert lines[3] == 'clearing_time,32,0,60,true'
        assert 'surge_type,spill_over,,,' in lines
        assert lines[-1] == 'violations,0,0,0,true'


class TestRunArtifact:
    def test_means(self, spill_over_text):
        text = spill_over_text.replace('"theory"', '"stochastic"') + 'seeds = [0, 1, 2]\n'
        artifact = run(parse_scenario(text))
        assert artifact.metadata.seeds == [0, 1, 2]
        assert len(artifact.outcomes) == 3
        assert artifact.report is None
        assert artifact.mean_tau_s == sum(o.tau_s for o in artifact.outcomes) / 3
        assert artifact.mean_rel_diff_pct is None
