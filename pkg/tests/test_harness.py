import json

import numpy as np
import pytest

from lowrankfb.errors import ModelFileError, UnstableA
from lowrankfb.harness.cli import main
from lowrankfb.harness.modelio import dumps, load_model, parse_number, rf_from_json, rf_to_json
from lowrankfb.harness.simulate import SimConfig, eigenvalue_ratio, simulate, spectral_check, write_csv
from lowrankfb.ratcore import RationalMatrix
from lowrankfb.ssreal import Realization

from _support import FIXTURES, rf


# model files

def test_parse_number_expressions():
    assert parse_number("3/2") == 1.5
    assert parse_number("-1/sqrt(2)") == pytest.approx(-2 ** -0.5)
    assert parse_number(4) == 4.0
    for bad in ("__import__('os')", "2**", True, None, "x + 1"):
        with pytest.raises(ModelFileError):
            parse_number(bad)


def test_load_fixture():
    mf = load_model(FIXTURES / "section3.json")
    assert mf.realization.A.shape == (2, 2)
    assert mf.labels == ["u", "y"]
    assert mf.extra["gamma"] == 10


@pytest.mark.parametrize("data,exc", [
    ({"A": [[0.5]], "B": [[1]], "C": [[1]]}, ModelFileError),
    ({"A": [[0.5, 0]], "B": [[1]], "C": [[1]], "D": [[0]]}, ModelFileError),
    ({"A": [[0.5]], "B": [[1], [2]], "C": [[1]], "D": [[0]]}, ModelFileError),
    ({"A": [[0.5]], "B": [[1]], "C": [[1, 2], [3]], "D": [[0], [0]]}, ModelFileError),
    ({"A": [[0.5]], "B": [[1]], "C": [[1]], "D": [[0]], "labels": ["a", "b"]}, ModelFileError),
    ({"A": [[1.5]], "B": [[1]], "C": [[1]], "D": [[0]]}, UnstableA),
])
def test_model_errors(data, exc):
    with pytest.raises(exc):
        load_model(data)


def test_unreadable_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ModelFileError):
        load_model(p)


def test_rational_json_round_trip():
    r = rf([26, -27], [4, -14])
    back = rf_from_json(json.loads(json.dumps(rf_to_json(r))))
    z = np.array([0.3, 1j, -2.0])
    assert np.allclose(back(z), r(z), rtol=1e-12)


def test_dumps_is_deterministic():
    rep = {"b": 1.0, "a": [np.float64(0.1), 2]}
    assert dumps(rep) == dumps(dict(reversed(list(rep.items()))))


# simulation

def test_seed_reproducibility():
    R = load_model(FIXTURES / "section5a.json").realization
    cfg = SimConfig(T=2000, burn_in=100, seed=7)
    a, b = simulate(R, cfg), simulate(R, cfg)
    assert np.array_equal(a, b)
    assert a.shape == (2000, 2)
    c = simulate(R, SimConfig(T=2000, burn_in=100, seed=8))
    assert not np.array_equal(a, c)


def test_zero_input_gives_zero_paths():
    R = Realization([[0.5, 0.1], [0.0, 0.2]], np.zeros((2, 1)), [[1, 0], [0, 1]], np.zeros((2, 1)))
    out = simulate(R, SimConfig(T=500, burn_in=10, seed=1))
    assert np.all(out == 0)


def test_simconfig_invariants():
    for kw in ({"T": 0}, {"T": 100, "burn_in": 100}, {"burn_in": -1}, {"windows": 0}):
        with pytest.raises(ValueError):
            SimConfig(**kw)


def test_unstable_model_refused():
    with pytest.raises(UnstableA):
        simulate(Realization([[1.0]], [[1.0]], [[1.0]], [[0.0]]), SimConfig(T=100, burn_in=0))


def test_white_noise_spectrum_is_flat():
    R = Realization(np.zeros((0, 0)), np.zeros((0, 2)), np.zeros((2, 0)), np.eye(2))
    cfg = SimConfig(T=2 ** 15, burn_in=0, seed=3)
    chk = spectral_check(simulate(R, cfg), RationalMatrix.identity(2), cfg)
    assert chk.passed and chk.max_relative_deviation < 0.15


def test_wrong_density_is_detected():
    R = Realization(np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), np.eye(1))
    cfg = SimConfig(T=2 ** 14, burn_in=0, seed=3)
    chk = spectral_check(simulate(R, cfg), RationalMatrix.constant(np.array([[2.0]])), cfg)
    assert not chk.passed


def test_eigenvalue_ratio_of_rank_one_data():
    rng = np.random.default_rng(0)
    x = rng.normal(size=1000)
    assert eigenvalue_ratio(np.c_[x, 2 * x]) < 1e-12


def test_csv_layout(tmp_path):
    p = tmp_path / "paths.csv"
    write_csv(p, np.array([[1 / 3, 2.0], [-1e-20, 5]]), ["u", "y"])
    lines = p.read_text().splitlines()
    assert lines[0] == "u,y"
    assert lines[1] == "0.333333333333,2"
    assert len(lines) == 3


# command line

def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_analyze(capsys):
    code, out, _ = _run(["analyze", str(FIXTURES / "section5a.json"), "--all-orderings"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "PASS"
    assert len(rep["orderings"]) == 2 and rep["any_stable"] is False


def test_cli_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["analyze", str(FIXTURES / "example1.json"), "--all-orderings", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_simulate_writes_csv(tmp_path, capsys):
    csv = tmp_path / "p.csv"
    rep_path = tmp_path / "r.json"
    code = main(["simulate", str(FIXTURES / "section5a.json"), "--T", "4096", "--seed", "5", "--burn-in", "100",
                 "--out", str(csv), "--report", str(rep_path)])
    assert code == 0
    lines = csv.read_text().splitlines()
    assert len(lines) == 4097
    rep = json.loads(rep_path.read_text())
    assert rep["rng"] == "numpy.random.PCG64" and rep["seed"] == 5


def test_cli_synthesize(capsys):
    code, out, _ = _run(["synthesize", str(FIXTURES / "section3.json")], capsys)
    assert code == 0
    assert json.loads(out)["status"] == "PASS"


def test_cli_input_errors(tmp_path, capsys):
    code, _, err = _run(["analyze", str(tmp_path / "missing.json")], capsys)
    assert code == 1 and "ModelFileError" in err
    unstable = tmp_path / "u.json"
    unstable.write_text(json.dumps({"A": [[2]], "B": [[1]], "C": [[1], [1]], "D": [[0], [0]]}))
    code, _, err = _run(["analyze", str(unstable)], capsys)
    assert code == 1 and "UnstableA" in err
    code, _, err = _run(["analyze", str(FIXTURES / "section5a.json"), "--ordering", "9"], capsys)
    assert code == 1
    code, _, err = _run(["synthesize", str(FIXTURES / "example1.json")], capsys)
    assert code == 1 and "UnsupportedSynthesis" in err


def test_cli_failed_check_exit_code(monkeypatch, capsys):
    from lowrankfb.harness import report
    monkeypatch.setitem(report.TOLERANCES, "left_kernel", -1.0)
    code, out, _ = _run(["analyze", str(FIXTURES / "section5a.json"), "--all-orderings"], capsys)
    assert code == 2
    rep = json.loads(out)
    assert rep["status"] == "FAILED" and rep["failures"]
