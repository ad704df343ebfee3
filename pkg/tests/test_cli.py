import json
import os

import pytest

from whichpath import cli, sweep

MINIMAL = """\
# small EM superposition, slow recombination
scenario.field_kind = "electromagnetic"
scenario.q_A = 0.5
scenario.d = 1
scenario.D = 100
scenario.T_A = 80
scenario.T_B = 80
basis.n_modes = 512
"""


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_report_minimal(tmp_path):
    out = tmp_path / "report.json"
    assert cli.main(["report", write(tmp_path, MINIMAL), "-o", str(out)]) == cli.EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["d_alice"] < 0.01
    assert payload["regime"] == "BobBlind_AliceCoherent"
    assert payload["config"]["scenario"]["T_A"] == 80


def test_report_protocol_violation_exits_zero(tmp_path, capsys):
    code = cli.main(["report", write(tmp_path, MINIMAL), "--set", "scenario.T_B=200"])
    assert code == cli.EXIT_OK
    captured = capsys.readouterr()
    assert json.loads(captured.out)["regime"] == "ProtocolViolated"
    assert "protocol" in captured.err


def test_report_csv_has_config_line(tmp_path, capsys):
    assert cli.main(["report", write(tmp_path, MINIMAL), "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# config: {")
    assert lines[1].startswith("field_kind,moment,d_alice")
    assert len(lines) == 3


def test_malformed_key_reports_position(tmp_path, capsys):
    cfg = write(tmp_path, "scenario.D = 100\n  scenario.bogus = 1\n", "bad.cfg")
    assert cli.main(["report", cfg]) == cli.EXIT_CONFIG
    assert "bad.cfg:2:3" in capsys.readouterr().err


def test_missing_equals(tmp_path, capsys):
    assert cli.main(["report", write(tmp_path, "scenario.D 100\n")]) == cli.EXIT_CONFIG
    assert ":1:1" in capsys.readouterr().err


@pytest.mark.parametrize("override", ["audit.trials=0", "audit.squeeze_bound=0.5",
                                      "audit.max_modes=65", "scenario.D=-1"])
def test_invalid_values_are_config_errors(tmp_path, override):
    assert cli.main(["audit", write(tmp_path, MINIMAL), "--set", override]) == cli.EXIT_CONFIG


def test_underresolved_history_exit_code(tmp_path, capsys):
    code = cli.main(["report", write(tmp_path, MINIMAL), "--set", "history.samples_per_ramp=10"])
    assert code == cli.EXIT_RESOLUTION
    assert "resolution" in capsys.readouterr().err


def test_missing_file_is_config_error(tmp_path):
    assert cli.main(["report", str(tmp_path / "nope.cfg")]) == cli.EXIT_CONFIG


def test_audit_seeded_runs_are_identical(tmp_path):
    cfg = write(tmp_path, MINIMAL + "audit.trials = 200\naudit.seed = 3\n")
    out = tmp_path / "audit.json"
    assert cli.main(["audit", cfg, "-o", str(out)]) == 0
    first = out.read_bytes()
    assert cli.main(["audit", cfg, "-o", str(out)]) == 0
    assert out.read_bytes() == first
    payload = json.loads(first)
    assert payload["passed"] and payload["trials"] == 200


def test_default_audit_passes(tmp_path, capsys):
    assert cli.main(["audit", write(tmp_path, MINIMAL)]) == cli.EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["trials"] == 10_000
    assert payload["worst_margin"] >= -1e-10


def test_audit_failure_exit_code(tmp_path, monkeypatch):
    real = cli.random_audit

    def broken(**kw):
        s = real(**kw)
        return type(s)(**{**s.__dict__, "violations": 1, "worst_margin": -1.0})

    monkeypatch.setattr(cli, "random_audit", broken)
    cfg = write(tmp_path, MINIMAL + "audit.trials = 5\n")
    assert cli.main(["audit", cfg]) == cli.EXIT_AUDIT


def test_writes_only_the_configured_path(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = write(tmp_path, MINIMAL + 'sweep.axis1 = "T_A log 10 90 3"\n'
                'output.path = "rows.csv"\n')
    before = set(os.listdir(tmp_path))
    assert cli.main(["sweep", cfg]) == 0
    assert set(os.listdir(tmp_path)) - before == {"rows.csv"}
    lines = (tmp_path / "rows.csv").read_text().splitlines()
    assert lines[0].startswith("# config:")
    assert len(lines) == 2 + 3


def test_sweep_jsonl(tmp_path, capsys):
    cfg = write(tmp_path, MINIMAL + 'sweep.axis1 = "T_A log 10 90 3"\nsweep.outputs = "snr, regime"\n')
    assert cli.main(["sweep", cfg, "--format", "json"]) == 0
    records = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert "config" in records[0]
    assert [r["T_A"] for r in records[1:]] == pytest.approx([10, 30, 90])


def test_sweep_without_axis_is_config_error(tmp_path):
    assert cli.main(["sweep", write(tmp_path, MINIMAL)]) == cli.EXIT_CONFIG


def test_interrupt_leaves_truncation_marker(tmp_path, monkeypatch):
    real = sweep.iter_sweep

    def interrupted(spec, workers=1):
        for i, row in enumerate(real(spec, workers)):
            if i == 2:
                raise KeyboardInterrupt
            yield row

    monkeypatch.setattr(cli, "iter_sweep", interrupted)
    out = tmp_path / "rows.csv"
    cfg = write(tmp_path, MINIMAL + 'sweep.axis1 = "T_A log 10 90 5"\nsweep.outputs = "snr"\n')
    assert cli.main(["sweep", cfg, "-o", str(out)]) == cli.EXIT_INTERRUPTED
    lines = out.read_text().splitlines()
    assert lines[-1] == "# truncated: interrupted after 2 of 5 rows"
    assert len(lines) == 2 + 2 + 1


def test_set_overrides_and_workers_env(tmp_path, monkeypatch):
    cfg = write(tmp_path, MINIMAL + 'sweep.axis1 = "T_A log 10 90 3"\nsweep.outputs = "snr"\n')
    out = tmp_path / "rows.csv"
    assert cli.main(["sweep", cfg, "-o", str(out), "--set", "scenario.q_A=2"]) == 0
    serial = out.read_bytes()
    monkeypatch.setenv(cli.WORKERS_ENV, "2")
    assert cli.main(["sweep", cfg, "-o", str(out), "--set", "scenario.q_A=2"]) == 0
    assert out.read_bytes() == serial
    assert '"q_A":2' in serial.decode().splitlines()[0]
    monkeypatch.setenv(cli.WORKERS_ENV, "zero")
    assert cli.main(["sweep", cfg]) == cli.EXIT_CONFIG


def test_regime_map_json_boundary(tmp_path, capsys):
    cfg = write(tmp_path, MINIMAL)
    assert cli.main(["regime-map", cfg, "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["rows"]) == 41 * 41
    assert payload["boundary"]
    for pt in payload["boundary"]:
        assert pt["moment"] == pytest.approx(100.0 ** 3 / pt["T_B"] ** 2, rel=1e-12)


@pytest.mark.parametrize("cmd,fmt", [("report", "json"), ("report", "csv"),
                                     ("sweep", "csv"), ("sweep", "json")])
def test_byte_identical_outputs(tmp_path, cmd, fmt):
    cfg = write(tmp_path, MINIMAL + 'sweep.axis1 = "T_A log 10 90 3"\n')
    # the output path is echoed with the config, so both runs must share it
    out = tmp_path / "result.out"
    assert cli.main([cmd, cfg, "--format", fmt, "-o", str(out)]) == 0
    first = out.read_bytes()
    assert cli.main([cmd, cfg, "--format", fmt, "-o", str(out)]) == 0
    assert out.read_bytes() == first
