import json
import math

import pytest

from main import main
from src.commands.common import EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK

ROTATING = ["--field", "r", "--b0", "1", "--b3", "0.8", "--omega", "2"]


def run_json(capsys, argv):
    assert main(argv) == EXIT_OK
    return json.loads(capsys.readouterr().out)


def test_missing_omega_is_an_input_error(capsys):
    assert main(["simulate", "--field", "r", "--b0", "1"]) == EXIT_INPUT
    err = capsys.readouterr().err
    assert "❌" in err
    assert "usage:" in err


def test_unknown_flag_exits_with_input_code():
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--bogus"])
    assert info.value.code == EXIT_INPUT


def test_simulate_writes_a_reproducible_table(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["simulate", *ROTATING, "--periods", "1", "--samples", "200"]
    assert main([*argv, "--out", str(first)]) == EXIT_OK
    assert main([*argv, "--out", str(second)]) == EXIT_OK
    lines = first.read_text().splitlines()
    assert lines[0] == "t,s1,s2,s3,q,p,H"
    assert len(lines) == 202
    assert first.read_bytes() == second.read_bytes()


def test_simulate_summary(capsys):
    summary = run_json(capsys, ["simulate", *ROTATING, "--periods", "1", "--json"])
    assert summary["samples"] == 201
    assert summary["t_max"] == pytest.approx(math.pi)
    assert summary["field"]["variant"] == "rotating"


def test_unwritable_output_is_an_input_error(tmp_path):
    out = tmp_path / "missing" / "a.csv"
    assert main(["simulate", *ROTATING, "--periods", "1", "--out", str(out)]) == EXIT_INPUT


def test_commensurability(capsys):
    summary = run_json(capsys, ["commensurability", "--b0", "1", "--b3", "44.5", "--omega", "89"])
    assert (summary["numerator"], summary["denominator"]) == (2, 89)
    assert summary["classification"] == "rational(2/89)"


def test_config_file_fills_defaults(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"b0": 1.0, "b3": 44.5, "omega": 89.0}))
    summary = run_json(capsys, ["commensurability", "--config", str(config)])
    assert summary["denominator"] == 89


def test_config_file_with_unknown_key(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"b0": 1.0, "colour": "red"}))
    assert main(["commensurability", "--omega", "2", "--config", str(config)]) == EXIT_INPUT


def test_strobe_summary(capsys):
    summary = run_json(
        capsys, ["strobe", *ROTATING, "--ic", "0.5", "1.0", "--ic", "-0.2", "3.0", "--periods", "5", "--json"]
    )
    assert [o["q0"] for o in summary["orbits"]] == [0.5, -0.2]
    assert "commensurability" in summary


def test_not_predict_with_verification(capsys):
    reports = run_json(capsys, ["not", "predict", "--b0", "1", "--b3", "1", "--omega", "2", "--verify"])
    assert [r["case"] for r in reports] == [2]
    assert reports[0]["verified"] is True
    assert reports[0]["t_not"] == pytest.approx(math.pi / 2.0)


def test_not_detect(capsys):
    summary = run_json(
        capsys, ["not", "detect", "--b0", "1", "--b3", "1", "--omega", "2", "--q0", "1", "--p0", "0", "--json"]
    )
    assert summary["achieved"] is True
    assert summary["t_star"] == pytest.approx(math.pi / 2.0, abs=1e-6)
    assert summary["first_hit"] == pytest.approx(math.pi / 2.0, abs=1e-6)


def test_fit_gamma_on_a_fixed_point_is_a_numerical_error(capsys):
    argv = ["fit-gamma", "--field", "r", "--b0", "1", "--b3", "1", "--omega", "2", "--q0", "0", "--p0", "0"]
    assert main([*argv, "--periods", "20"]) == EXIT_NUMERICAL
    assert "❌ Numerical failure" in capsys.readouterr().err


def test_expansion_table(capsys):
    assert main(["expansion", "--omega", "2", "--n-max", "3"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,A_n,B_n"
    assert len(lines) == 5
    assert lines[1].startswith("0,")


def test_expansion_json(capsys):
    summary = run_json(capsys, ["expansion", "--omega", "2", "--n-max", "2", "--json"])
    assert summary["A"][2] == pytest.approx(4.0 * math.pi / 8.0)
    assert summary["B"][0] == pytest.approx(math.pi)


def test_geometry(capsys):
    summary = run_json(capsys, ["geometry", "--vector", "-2", "0", "0", "--q0", "0", "--p0", str(math.pi / 2)])
    assert summary["precession"]["psi"] == pytest.approx(math.pi / 2)
    assert summary["not_rule"]["perpendicular"] is True


def test_geometry_outside_the_not_rule(capsys):
    summary = run_json(capsys, ["geometry", "--vector", "1", "1", "1"])
    assert summary["not_rule"]["applicable"] is False
