import json
from importlib import resources

import numpy as np
import pytest

from qbound import convex_base, io
from qbound.boundariness import b_channel, b_povm, b_state, boundariness
from qbound.errors import DimensionMismatch, ValidationError
from qbound.qobjects import (
    Povm,
    QuantumChannel,
    QuantumState,
    RandomSource,
    random_channel,
    random_povm,
    random_state,
)


def fixture(name):
    return json.loads(resources.files("qbound").joinpath("fixtures", name).read_text())


def test_matrix_roundtrip_exact(rng):
    M = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    text = json.dumps(io.matrix_to_json(M))
    assert np.array_equal(io.matrix_from_json(json.loads(text)), M)


def test_matrix_errors():
    with pytest.raises(DimensionMismatch):
        io.matrix_from_json({"rows": 2, "cols": 2, "data": [[1, 0]]})
    with pytest.raises(ValidationError):
        io.matrix_from_json({"rows": 2})


def test_object_roundtrips():
    src = RandomSource(1)
    for obj in (random_state(3, src), random_povm(2, 3, src), random_channel(2, None, src)):
        back = io.from_json(json.dumps(io.to_json(obj)))
        assert type(back) is type(obj)
    ch = random_channel(2, 2, src)
    back = io.from_json(io.channel_to_json(ch, repr="kraus"))
    assert np.abs(back.choi - ch.choi).max() < 1e-12
    B = convex_base.square()
    got = io.from_json(io.polytope_to_json(B, B.lift([0.5, 0.5])))
    assert isinstance(got, tuple) and np.array_equal(got[0].vertices, B.vertices)


def test_from_json_validates():
    bad_state = {"kind": "state", "dim": 2, "rho": io.matrix_to_json(np.eye(2))}
    with pytest.raises(ValidationError):
        io.from_json(bad_state)
    with pytest.raises(ValidationError):
        io.from_json({"kind": "banana"})
    with pytest.raises(DimensionMismatch):
        io.from_json({"kind": "state", "dim": 3, "rho": io.matrix_to_json(np.eye(2) / 2)})


def test_fixtures_load():
    dep = io.from_json(fixture("depol2.json"))
    assert np.abs(dep.choi - np.eye(4) / 4).max() < 1e-15
    assert abs(boundariness(io.from_json(fixture("depol3.json")), method="iterative").b - 1 / 9) < 1e-9
    assert io.from_json(fixture("identity2.json")).kraus is not None
    for k in range(1, 10):
        F = io.from_json(fixture(f"erasure_p{k}.json"))
        p = k / 10
        assert np.abs(F.choi - np.diag([p, p, 1 - p, 1 - p]) / 2).max() < 1e-15
    assert isinstance(io.from_json(fixture("mixed_state2.json")), QuantumState)
    assert isinstance(io.from_json(fixture("trivial_povm3.json")), Povm)
    B, y = io.from_json(fixture("triangle_centroid.json"))
    assert abs(boundariness((B, y)).b - 1 / 3) < 1e-10


def test_report_json():
    rep = b_channel(io.from_json(fixture("depol2.json")))
    out = json.loads(json.dumps(io.report_to_json(rep)))
    assert out["b"] == rep.b
    assert out["method"] == "iterative"
    assert out["optimizer"]["rows"] == 2
    assert len(out["objective_history"]) >= 1
    assert "weight_crosscheck" in out["residuals"]
    m = random_povm(2, 3, RandomSource(2))
    assert json.loads(json.dumps(io.report_to_json(b_povm(m))))["witness_index"] == b_povm(m).witness
    s = io.report_to_json(b_state(np.eye(2) / 2))
    assert s["b"] == 0.5 and s["complement"]["rows"] == 2


def test_report_floats_roundtrip():
    rep = b_state(random_state(3, RandomSource(8)))
    out = json.loads(json.dumps(io.report_to_json(rep)))
    assert out["b"] == rep.b
    assert np.array_equal(io.matrix_from_json(out["optimizer"]), rep.optimizer)


def test_dump_and_load(tmp_path):
    ch = QuantumChannel(np.eye(4) / 4)
    path = tmp_path / "ch.json"
    io.dump(io.to_json(ch), path)
    assert np.array_equal(io.load(path).choi, ch.choi)
