import csv

import numpy as np
import pytest

from qbound import experiments as ex
from qbound.qobjects import RandomSource, random_channel, random_unitary


def test_spec_validation():
    with pytest.raises(ValueError):
        ex.ExperimentSpec("nope")
    with pytest.raises(ValueError):
        ex.ExperimentSpec("submult", samples=0)


def test_reproducible_bit_identical():
    a = ex.exp_qubit_crosscheck(samples=5, seed=3)
    b = ex.exp_qubit_crosscheck(samples=5, seed=3)
    assert a.rows == b.rows
    c = ex.exp_qubit_crosscheck(samples=5, seed=4)
    assert a.rows != c.rows


def test_csv_schema(tmp_path):
    res = ex.run_experiment(ex.ExperimentSpec("state_tightness", samples=3, seed=1,
                                              output_path=str(tmp_path / "out.csv")))
    with open(tmp_path / "out.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["sample", "dim", "lambda_min", "distance", "expected", "error",
                       "scan_max", "scan_excess"]
    assert len(rows) == 1 + len(res.rows) == 7
    # floats are written at full precision
    assert float(rows[1][2]) == res.rows[0]["lambda_min"]


def documented_columns():
    """Parse the CSV column table in the experiments module docstring."""
    table = ex.__doc__.split("CSV columns")[1].split("\n", 2)[2]
    cols, current = {}, None
    for line in table.splitlines():
        if not line.strip():
            continue
        if not line.startswith(" "):
            current, line = line.split(None, 1)
            cols[current] = []
        cols[current] += [c.strip() for c in line.split(",") if c.strip()]
    return cols


def test_documented_columns_match():
    doc = documented_columns()
    assert set(doc) == set(ex.EXPERIMENTS)
    for name, kwargs in [("qubit_crosscheck", {"samples": 1}), ("submult", {"samples": 1}),
                         ("product_depolarizing", {"samples": 1}), ("max_boundariness", {"samples": 10}),
                         ("state_tightness", {"samples": 1}), ("lemma_R", {"samples": 1, "starts": 3})]:
        assert doc[name] == ex.EXPERIMENTS[name](**kwargs).columns, name
    assert doc["polytope_maps"] == ex.exp_polytope_maps(10).columns


def test_state_tightness_examples():
    from qbound import linalg
    from qbound.boundariness import b_state

    rep = b_state(np.eye(2) / 2)
    assert abs(linalg.trace_norm(np.eye(2) / 2 - rep.optimizer) - 1) < 1e-15
    rho = np.diag([0.9, 0.1])
    rep = b_state(rho)
    # 2x2 arithmetic: rho - |1><1| = diag(0.9, -0.9)
    assert abs(linalg.trace_norm(rho - rep.optimizer) - 1.8) < 1e-15
    assert np.abs(rep.optimizer - np.diag([0, 1])).max() < 1e-15
    res = ex.exp_state_tightness(samples=10, seed=2)
    assert res.passed and res.statistics["max_scan_excess"] <= 1e-9


def test_max_boundariness_small():
    res = ex.exp_max_boundariness(samples=20, seed=1)
    assert res.passed
    fixtures = [r for r in res.rows if r["fixture"]]
    assert {r["kind"] for r in fixtures} == {"state", "povm", "channel"}
    assert res.statistics["max_ratio_perturbed_depolarizing"] < 1


def test_submult_and_product():
    res = ex.exp_submultiplicativity(samples=3, seed=7)
    assert res.passed
    assert set(res.statistics["gap"]) == {"min", "mean", "max"}
    assert abs(res.statistics["depolarizing_fixture_b"] - 1 / 16) < 1e-9
    res = ex.exp_product_depolarizing(samples=2, seed=7)
    assert res.passed
    kinds = {r["kind"]: r for r in res.rows}
    assert abs(kinds["depolarizing"]["b_EF"] - 1 / 16) < 1e-9
    assert abs(kinds["near_identity"]["b_EF"] - kinds["near_identity"]["b_E"] / 4) < 1e-5
    assert ex.exp_product_depolarizing(samples=1, seed=0, d_F=3).passed
    with pytest.raises(ValueError):
        ex.exp_product_depolarizing(samples=1, d_F=4)


def test_product_deviation():
    A = random_unitary(2, RandomSource(1))
    B = random_unitary(2, RandomSource(2))
    assert ex.product_deviation(np.kron(A, B), (2, 2)) < 1e-14
    cnot = np.eye(4)[[0, 1, 3, 2]]
    assert ex.product_deviation(cnot, (2, 2)) > 0.5


def test_lemma_R_examples():
    value, theta, _ = ex.maximize_over_R(np.eye(4), starts=3, rng=RandomSource(0))
    assert abs(value - 1) < 1e-6
    assert abs(np.linalg.norm(ex.schmidt_vector(theta)) - 1) < 1e-6
    F = random_channel(2, None, RandomSource(4))
    D = np.linalg.inv(F.choi)
    value, theta, start = ex.maximize_over_R(D, starts=1, rng=RandomSource(1), initial_mu=[0.3, 0.3])
    assert value > start
    res = ex.exp_lemma_R(samples=2, seed=0, starts=10)
    assert res.passed


def test_polytope_maps(tmp_path):
    path = tmp_path / "maps.csv"
    res = ex.exp_polytope_maps(10, csv_path=str(path))
    assert res.passed
    assert all(r["b"] <= r["m"] + 1e-10 for r in res.rows)
    corner = [r for r in res.rows if r["shape"] == "triangle" and (r["x"], r["y"]) == (0.0, 0.0)][0]
    assert abs(corner["b"]) < 1e-9 and abs(corner["m"]) < 1e-9
    assert abs(res.statistics["max_b_square"] - 0.5) < 1e-10
    with open(path, encoding="utf-8") as fh:
        assert fh.readline().strip() == "shape,x,y,b,m"
    with pytest.raises(ValueError):
        ex.exp_polytope_maps(5)
