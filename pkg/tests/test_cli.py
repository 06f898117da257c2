import json

import pytest

from phgrasp import cli
from phgrasp.cli import format_table, main, ordering_report, parse_param
from phgrasp.exceptions import ConfigError
from phgrasp.verify import CheckResult

SHORT = ["--t-end", "1.0"]


def test_run_with_plots(tmp_path, capsys):
    assert main(["run", "presets/rigid_restlength", "--plot", "--out", str(tmp_path)] + SHORT) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "rigid_restlength.csv" in names
    assert [n for n in names if n.endswith(".svg")] == ["rigid_restlength_force.svg",
                                                        "rigid_restlength_position.svg"]
    metrics = json.loads((tmp_path / "rigid_restlength.metrics.json").read_text())
    assert set(metrics) >= {"contact_time", "impact_force", "settling_time", "steady_state_error"}
    assert "rigid_restlength" in capsys.readouterr().out


def test_run_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["run", "compliant_hogan", "--out", str(d)] + SHORT) == 0
    assert (a / "compliant_hogan.csv").read_bytes() == (b / "compliant_hogan.csv").read_bytes()


def test_zero_step_rejected(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["run", "rigid_hogan", "--dt", "0", "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("name: x\nplant: {model: gripper}\ncontroller: {type: magic}\n"
                   "contact: {mode: rigid}\n")
    assert main(["run", str(bad), "--out", str(tmp_path)]) == 2
    assert "config error" in capsys.readouterr().err
    assert main(["run", "no_such_preset", "--out", str(tmp_path)]) == 2
    assert main(["run", "rigid_hogan", "--dt", "0.01", "--out", str(tmp_path)]) == 2


def test_divergence_exit_code(tmp_path, capsys):
    div = tmp_path / "div.yaml"
    div.write_text("name: div\nplant: {model: gripper}\n"
                   "controller: {type: hogan, K_Hp: 1000000.0, K_Hd: 1.0}\n"
                   "contact: {mode: rigid}\n"
                   "integrator: {method: semi-implicit-euler, dt: 0.01, t_end: 3}\n")
    assert main(["run", str(div), "--out", str(tmp_path)]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_compare_prints_ordering(capsys):
    assert main(["compare", "presets/rigid_*", "--workers", "3"] + SHORT) == 0
    out = capsys.readouterr().out
    for name in ("rigid_hogan", "rigid_hogan_fe", "rigid_restlength"):
        assert name in out
    assert "impact ordering restlength < hogan+fe < hogan [rigid]" in out


def test_compare_identical_rows(capsys):
    assert main(["compare", "rigid_hogan", "rigid_hogan"] + SHORT) == 0
    rows = [l for l in capsys.readouterr().out.splitlines() if l.startswith("rigid_hogan")]
    assert len(rows) == 2 and rows[0] == rows[1]


def test_sweep(tmp_path, capsys):
    assert main(["sweep", "compliant_restlength", "--param", "contact.body.m_c=0.05,0.1,0.2",
                 "--out", str(tmp_path)] + SHORT) == 0
    out = capsys.readouterr().out
    assert "contact.body.m_c" in out
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0].startswith("scenario,contact.body.m_c,contact_time")
    assert len(lines) == 4


def test_sweep_bad_param():
    assert main(["sweep", "rigid_hogan", "--param", "nonsense"]) == 2
    with pytest.raises(ConfigError):
        parse_param("a.b=")
    assert parse_param("contact.rigid_stiffness=20,50") == ("contact.rigid_stiffness", [20, 50])


def test_verify_exit_codes(monkeypatch, capsys):
    import phgrasp.verify as verify
    ok = [CheckResult("1", "first", True, "fine"), CheckResult("2", "second", True, "fine")]
    monkeypatch.setattr(verify, "run_all", lambda: ok)
    assert main(["verify"]) == 0
    assert "2/2 criteria passed" in capsys.readouterr().out
    monkeypatch.setattr(verify, "run_all", lambda: ok + [CheckResult("3", "third", False, "no")])
    assert main(["verify"]) == 4
    out = capsys.readouterr().out
    assert "FAIL" in out and "failing: 3" in out


def test_ordering_report():
    rows = [{"contact": "rigid", "controller": c, "impact_force": f}
            for c, f in (("restlength", 0.1), ("hogan+fe", 0.4), ("hogan", 0.6))]
    assert ordering_report(rows)[0].endswith(": ok")
    rows[0]["impact_force"] = 0.5
    assert ordering_report(rows)[0].endswith(": violated")
    rows[2]["impact_force"] = None
    assert "undetermined (no contact in: hogan)" in ordering_report(rows)[0]


def test_format_table():
    text = format_table([{"a": 1.23456789, "b": None}], ("a", "b"))
    assert text.splitlines()[2].split() == ["1.23457", "-"]
