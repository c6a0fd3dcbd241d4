import csv
import io
import json
import math
import subprocess
import sys

import pytest

from entanglekit import cli
from entanglekit.stateio import dump_state
from entanglekit.schmidt import SchmidtVector
from entanglekit.states import from_schmidt_coefficients, maximally_mixed, singlet

SUBCOMMANDS = ("schmidt", "convert", "measure", "ppt", "distill", "dilute", "teleport", "axioms", "thermo-map")


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, obj in {
        "singlet": singlet(),
        "psi1": from_schmidt_coefficients([0.4, 0.4, 0.1, 0.1]),
        "psi2": SchmidtVector([0.5, 0.25, 0.25]),
        "eta": SchmidtVector([0.6, 0.4]),
        "mixed": maximally_mixed((2, 2)),
        "rank2": SchmidtVector([0.8, 0.2]),
    }.items():
        p = tmp_path / f"{name}.json"
        dump_state(obj, p)
        paths[name] = str(p)
    return paths


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_schmidt_singlet(capsys, files):
    rep = run_json(capsys, "schmidt", files["singlet"])
    assert rep["coeffs"] == [0.5, 0.5]
    assert rep["schema"] == "entanglekit.schmidt/1"


def test_convert_check(capsys, files):
    rep = run_json(capsys, "convert", "check", files["psi1"], files["psi2"])
    assert rep["classification"] == "incomparable"
    assert rep["witness_k"]["forward"] == 2


def test_convert_other_actions(capsys, files):
    assert run_json(capsys, "convert", "prob", files["psi1"], files["psi2"])["forward"] == pytest.approx(0.8)
    probe = run_json(capsys, "convert", "probe", files["rank2"], files["singlet"], "--schedule", "1-4")
    assert probe["accessible"] is False and len(probe["points"]) == 4
    bounds = run_json(capsys, "convert", "bounds", files["rank2"], "--n", "100")
    assert (bounds["lower"], bounds["upper"]) == (0.32, 1.0)
    cat = run_json(capsys, "convert", "catalyst", files["psi1"], files["psi2"], "--eta", files["eta"])
    assert cat["catalytic"] is True and cat["direct"] is False
    found = run_json(capsys, "convert", "catalyst", files["psi1"], files["psi2"], "--grid", "100")
    assert found["catalyst"] is not None
    mj = run_json(capsys, "convert", "meet-join", files["psi1"], files["psi2"])
    assert mj["source"] == pytest.approx([0.4, 0.35, 0.15, 0.1])


def test_measure_kinds(capsys, files):
    assert run_json(capsys, "measure", files["singlet"], "--kind", "es")["value"] == 1.0
    assert run_json(capsys, "measure", files["singlet"], "--kind", "rates") == {
        "schema": "entanglekit.measure/1", "E_D": 1.0, "E_C": 1.0}
    eof = run_json(capsys, "measure", files["mixed"], "--kind", "eof", "--restarts", "2")
    assert eof["method"] == "convex_roof" and abs(eof["value"]) < 1e-6
    temp = run_json(capsys, "measure", "--kind", "temperature", "--ec", "1", "--ed", "0.4", "--se", "0.6")
    assert temp["temperature"] == pytest.approx(1.0)


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "measure", "--kind", "ree", str(tmp_path / "missing.json"))
    assert code == 2
    assert "file not found" in err


def test_validation_errors_name_invariant(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dims": [2, 2], "amplitudes": [1, 1, 0, 0]}))
    code, _, err = run(capsys, "schmidt", str(bad))
    assert code == 2 and "unit Euclidean norm" in err
    code, _, err = run(capsys, "measure", str(bad), "--kind", "temperature")
    assert code == 2
    code, _, err = run(capsys, "measure", "--kind", "temperature", "--ec", "1", "--ed", "0.4", "--se", "0")
    assert code == 2 and "S_e" in err
    code, _, err = run(capsys, "ppt", str(tmp_path / "bad.json"), "--tol", "nonsense=1")
    assert code == 2 and "unknown tolerance" in err


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["teleport", "--alpha", "1", "--beta", "0", "--bogus"])
    assert exc.value.code == 2


def test_internal_error_exit_code(capsys, monkeypatch, files):
    def boom(args, tol):
        raise RuntimeError("kaput")

    parser = cli.build_parser()
    monkeypatch.setattr(cli, "build_parser", lambda: parser)
    parser._subparsers._group_actions[0].choices["ppt"].set_defaults(func=boom)
    code, _, err = run(capsys, "ppt", files["singlet"])
    assert code == 1 and "internal error" in err


def test_ppt_and_tolerance_override(capsys, files):
    rep = run_json(capsys, "ppt", files["singlet"])
    assert rep["min_pt_eigenvalue"] == -0.5 and rep["separability"] == "entangled"
    rep = run_json(capsys, "ppt", files["singlet"], "--tol", "ppt=0.6")
    assert rep["is_ppt"] is True


def test_protocol_commands(capsys):
    d = run_json(capsys, "distill", "--alpha-sq", "0.5", "--n", "2", "--shots", "5", "--delta", "0.1")
    assert d["p_k"] == {"0": 0.25, "1": 0.5, "2": 0.25}
    assert len(d["samples"]) == 5 and "typical_set" in d
    assert run_json(capsys, "dilute", "--alpha-sq", "0.4", "--n", "1")["cost_bits"] == 0.0
    t = run_json(capsys, "teleport", "--alpha", "0.6", "--beta", "0.8")
    assert all(o["fidelity"] == 1.0 and o["probability"] == 0.25 for o in t["outcomes"])
    s = run_json(capsys, "teleport", "--alpha", "0.6", "--beta", "0.8", "--sample", "--seed", "3")
    assert s["seed"] == 3


def test_csv_series(capsys):
    code, out, _ = run(capsys, "distill", "--alpha-sq", "0.3", "--n", "10", "--series", "10,100,1000", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["n"]) for r in rows] == [10, 100, 1000]
    rates = [float(r["yield_per_copy"]) for r in rows]
    assert rates == sorted(rates)


def test_thermo_map_csv(capsys):
    code, out, _ = run(capsys, "thermo-map", "--count", "20", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 20 and set(rows[0]) == {"log2_dim", "entropy"}
    assert all(float(r["entropy"]) <= float(r["log2_dim"]) for r in rows)


def test_axioms_commands(capsys):
    rep = run_json(capsys, "axioms", "run", "--axiom", "A4.4", "--trials", "20")
    assert rep["reports"][0]["status"] == "violated"
    irr = run_json(capsys, "axioms", "irreversibility", "--pairs", "5", "--n-max", "5", "--m-max", "5")
    assert irr["nontrivial_reversible"] == []
    mono = run_json(capsys, "axioms", "monotone", "--pairs", "50")
    assert mono["violations"] == 0


def test_pretty_format(capsys, files):
    code, out, _ = run(capsys, "schmidt", files["singlet"], "--format", "pretty")
    assert code == 0
    assert "rank: 2" in out.splitlines()


def test_numbers_at_twelve_digits(capsys):
    rep = run_json(capsys, "dilute", "--alpha-sq", "0.3", "--n", "7")
    for key in ("cost_per_copy", "entropy_per_copy"):
        digits = repr(rep[key]).replace("0.", "", 1).lstrip("0")
        assert len(digits.replace(".", "")) <= 12


def test_byte_identical_reports(capsys, files):
    argv = ("axioms", "run", "--axiom", "A4.5a", "--trials", "50", "--seed", "11")
    first = run(capsys, *argv)[1]
    assert first == run(capsys, *argv)[1]
    argv = ("measure", files["mixed"], "--kind", "ree", "--restarts", "2", "--seed", "5")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


@pytest.mark.parametrize("name", SUBCOMMANDS)
def test_help_text(capsys, name):
    with pytest.raises(SystemExit) as exc:
        cli.main([name, "--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "--seed" in out and "--format" in out
    assert len(out.split("\n\n")[1].strip()) > 20


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "entanglekit", "schmidt", files["rank2"]],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["entropy"] == pytest.approx(0.721928094887, abs=1e-12)
    assert math.isclose(sum(json.loads(proc.stdout)["coeffs"]), 1.0)
