import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from qbound import convex_base as cb
from qbound import lp
from qbound.errors import DegenerateBase, LPInfeasible, LPUnbounded, NotMember

TRI = cb.triangle()
SQ = cb.square()


def line_exit(y, x, halfspaces):
    """Largest t with (y - t x)/(1 - t) inside {z : a.z <= c} (analytic, for 2-D polytopes)."""
    # z(t) = y + s (y - x) with s = t/(1-t); exit at the smallest admissible s
    d = y - x
    s_max = np.inf
    for a, c in halfspaces:
        rate = a @ d
        if rate > 1e-15:
            s_max = min(s_max, (c - a @ y) / rate)
    return s_max / (1 + s_max)


TRI_HALFSPACES = [(np.array([-1.0, 0]), 0.0), (np.array([0, -1.0]), 0.0), (np.array([1.0, 1.0]), 1.0)]
SQ_HALFSPACES = [(np.array([-1.0, 0]), 0.0), (np.array([0, -1.0]), 0.0),
                 (np.array([1.0, 0]), 1.0), (np.array([0, 1.0]), 1.0)]


# ---------------------------------------------------------------- simplex


def test_simplex_matches_linprog(rng):
    for _ in range(30):
        m, n = 3, 6
        A = rng.normal(size=(m, n))
        x0 = rng.uniform(0, 1, size=n)
        b = A @ x0
        c = rng.uniform(0.1, 1, size=n)
        ours = lp.simplex(c, A, b)
        ref = linprog(c, A_eq=A, b_eq=b, bounds=[(0, None)] * n, method="highs")
        assert abs(ours.value - ref.fun) < 1e-9
        assert np.abs(A @ ours.x - b).max() < 1e-9
        # dual feasibility and strong duality
        assert (c - A.T @ ours.dual).min() > -1e-9
        assert abs(b @ ours.dual - ref.fun) < 1e-9
        assert np.abs(ours.dual - ref.eqlin.marginals).max() < 1e-7


def test_simplex_infeasible_and_unbounded():
    with pytest.raises(LPInfeasible):
        lp.simplex([0, 0], [[1, 1]], [-1])
    with pytest.raises(LPUnbounded):
        lp.simplex([-1, 0], [[1, -1]], [0])
    with pytest.raises(LPUnbounded):
        lp.simplex_leq([1, 0], [[0, 1]], [1])


def test_simplex_leq_matches_linprog(rng):
    for _ in range(20):
        A = rng.normal(size=(5, 3))
        b = rng.uniform(0.5, 2, size=5)
        c = rng.normal(size=3)
        A = np.vstack([A, np.eye(3)])
        b = np.concatenate([b, np.ones(3)])
        ours = lp.simplex_leq(c, A, b)
        ref = linprog(-c, A_ub=A, b_ub=b, bounds=[(0, None)] * 3, method="highs")
        assert abs(ours.value + ref.fun) < 1e-9


# ---------------------------------------------------------------- base


def test_polytope_construction_checks():
    with pytest.raises(DegenerateBase):
        cb.PolytopeBase([[1, 0], [1, 1]], [0.5, 0])
    with pytest.raises(DegenerateBase):
        cb.PolytopeBase.from_affine([[0, 0], [1, 0], [0, 1], [0.2, 0.2]])
    with pytest.raises(DegenerateBase):
        cb.PolytopeBase.from_affine([[0, 0], [1, 0], [2, 0]])


def test_polytope_json_roundtrip():
    text = json.dumps(SQ.to_json())
    B = cb.PolytopeBase.from_json(text)
    assert np.array_equal(B.vertices, SQ.vertices)
    assert json.loads(text)["dim"] == 3


def test_contains_examples():
    assert cb.contains(TRI, TRI.lift([1 / 3, 1 / 3]), 1e-9) is cb.Membership.INTERIOR
    assert cb.contains(TRI, TRI.lift([0.5, 0.5]), 1e-9) is cb.Membership.BOUNDARY
    assert cb.contains(TRI, TRI.lift([1, 1]), 1e-9) is cb.Membership.OUTSIDE
    assert cb.contains(SQ, SQ.lift([1, 0]), 1e-9) is cb.Membership.BOUNDARY
    with pytest.raises(ValueError):
        cb.contains(TRI, TRI.lift([0.2, 0.2]), 0.0)


def test_weight_t_examples():
    c = TRI.lift([1 / 3, 1 / 3])
    assert cb.weight_t(TRI, c, c) == 1.0
    expected = line_exit(np.array([1 / 3, 1 / 3]), np.array([0.0, 0.0]), TRI_HALFSPACES)
    assert abs(expected - 1 / 3) < 1e-15
    assert abs(cb.weight_t(TRI, c, TRI.vertex(0)) - expected) < 1e-11
    expected = line_exit(np.array([0.5, 0.5]), np.array([0.0, 0.0]), SQ_HALFSPACES)
    assert abs(cb.weight_t(SQ, SQ.lift([0.5, 0.5]), SQ.vertex(0)) - expected) < 1e-11


def test_weight_t_not_member():
    with pytest.raises(NotMember):
        cb.weight_t(TRI, TRI.lift([1, 1]), TRI.vertex(0))


def test_weight_t_line_exit_oracle(rng):
    for B, hs, sample in [(TRI, TRI_HALFSPACES, lambda: rng.dirichlet([1, 1, 1])[1:]),
                          (SQ, SQ_HALFSPACES, lambda: rng.uniform(0, 1, size=2))]:
        for _ in range(10):
            y, x = sample(), sample()
            t = cb.weight_t(B, B.lift(y), B.lift(x))
            assert abs(t - line_exit(y, x, hs)) <= cb.WEIGHT_TOL


def test_boundariness_examples():
    b, k = cb.boundariness_polytope(TRI, TRI.lift([1 / 3, 1 / 3]))
    assert abs(b - 1 / 3) < 1e-10 and k == 0
    for i in range(3):
        assert abs(cb.boundariness_polytope(TRI, TRI.vertex(i))[0]) <= cb.WEIGHT_TOL
    assert abs(cb.boundariness_polytope(SQ, SQ.lift([0.5, 0.5]))[0] - 0.5) < 1e-10


def test_base_norm_examples():
    assert cb.base_norm_polytope(TRI, np.zeros(3)) == 0.0
    assert abs(cb.base_norm_polytope(TRI, TRI.vertex(0) - TRI.vertex(1)) - 2) < 1e-12
    _, g = cb.base_norm_dual(TRI, TRI.vertex(0) - TRI.vertex(1))
    vals = TRI.vertices @ g
    assert abs(vals[0] - 1) < 1e-12 and abs(vals[1]) < 1e-12
    u = TRI.lift([1 / 3, 1 / 3]) - TRI.vertex(0)
    assert abs(cb.base_norm_polytope(TRI, u) - 4 / 3) < 1e-9


def test_base_norm_errors():
    with pytest.raises(LPInfeasible):
        cb.base_norm_polytope(TRI, np.array([1.0, 0, 0]))
    with pytest.raises(LPInfeasible):
        cb.base_norm_dual(SQ, SQ.vertex(0))


def test_max_base_distance_examples():
    d, _ = cb.max_base_distance(TRI, TRI.lift([1 / 3, 1 / 3]))
    assert abs(d - 4 / 3) < 1e-9
    assert abs(cb.max_base_distance(TRI, TRI.lift([0.5, 0.5]))[0] - 2) < 1e-9
    assert abs(cb.max_base_distance(SQ, SQ.lift([0.5, 0.5]))[0] - 1) < 1e-9


def test_mixedness_examples():
    assert abs(cb.mixedness_polytope(TRI, TRI.lift([1 / 3, 1 / 3])) - 2 / 3) < 1e-10
    assert abs(cb.mixedness_polytope(TRI, TRI.vertex(1))) <= cb.WEIGHT_TOL
    assert abs(cb.mixedness_polytope(SQ, SQ.lift([0.5, 0.5])) - 0.5) < 1e-10


def test_base_norm_primal_dual_random(rng):
    pent = cb.PolytopeBase.from_affine([[np.cos(a), np.sin(a)] for a in 2 * np.pi * np.arange(5) / 5])
    for B in (TRI, SQ, pent):
        for _ in range(10):
            w1 = rng.dirichlet(np.ones(B.n_vertices))
            w2 = rng.dirichlet(np.ones(B.n_vertices))
            u = 3.0 * (w1 - w2) @ B.vertices
            primal, _, _ = cb.base_norm_primal(B, u)
            dual, _ = cb.base_norm_dual(B, u)
            assert abs(primal - dual) < 1e-9


points = st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)).filter(lambda w: sum(w) > 1e-3)


@settings(max_examples=25, deadline=None)
@given(points)
def test_triangle_invariants(w):
    w = np.array(w) / sum(w)
    y = w @ TRI.vertices
    b, k = cb.boundariness_polytope(TRI, y)
    m = cb.mixedness_polytope(TRI, y)
    assert -1e-12 <= b <= 0.5 + 1e-12
    assert b <= m + 1e-10
    # weight = b(y) implies the vertex is at base-norm distance 2(1 - b)
    assert abs(cb.base_norm_polytope(TRI, TRI.vertex(k) - y) - 2 * (1 - b)) < 1e-9
    if cb.contains(TRI, y) is cb.Membership.INTERIOR:
        for v in TRI.vertices:
            t = cb.weight_t(TRI, y, v)
            z = cb.residual_point(y, v, t)
            # dividing by 1 - t amplifies roundoff in t; below 1e-6 the
            # amplified error can exceed the boundary band
            if 1 - t >= 1e-6:
                assert cb.contains(TRI, z) is cb.Membership.BOUNDARY
            else:
                assert cb.contains(TRI, z) is not cb.Membership.INTERIOR


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_square_invariants(x, y):
    p = SQ.lift([x, y])
    b, k = cb.boundariness_polytope(SQ, p)
    assert b <= cb.mixedness_polytope(SQ, p) + 1e-10
    assert abs(cb.base_norm_polytope(SQ, SQ.vertex(k) - p) - 2 * (1 - b)) < 1e-9


def test_weight_t_paths_against_line_exit(rng):
    """Both the certified LP path and the bisection fallback track the analytic exit."""
    for B, hs in ((TRI, TRI_HALFSPACES), (SQ, SQ_HALFSPACES)):
        for _ in range(10):
            y = rng.dirichlet(np.ones(B.n_vertices)) @ B.vertices
            x = rng.dirichlet(np.ones(B.n_vertices) * 0.3) @ B.vertices
            exact = line_exit(y[1:], x[1:], hs)
            assert abs(cb.weight_t(B, y, x) - exact) <= cb.WEIGHT_TOL
            # bisection resolution is limited by the LP feasibility tolerance
            assert abs(cb._bisect_weight(B, y, x, 0.0, 1.0) - exact) <= 1e-10


def test_weight_t_dual_certificate():
    y, x = TRI.lift([0.2, 0.3]), TRI.vertex(1)
    t, h = cb._parametric_weight(TRI, y, x)
    # barycentric coordinates of (0.2, 0.3) are (0.5, 0.2, 0.3); t is the weight on vertex 1
    assert abs(t - 0.2) < 1e-12
    assert (TRI.vertices @ h).min() > -1e-12 and h @ x > 1 - 1e-12
    assert abs(h @ y - t) < 1e-12
    assert cb._certifies_upper(TRI, y, x, t, h)
    assert not cb._certifies_upper(TRI, y, x, t - 1e-6, h)


def test_weight_t_near_one():
    w = np.array([0.5, 1.192092896e-07, 1e-09])
    w /= w.sum()
    y = w @ TRI.vertices
    for k in range(3):
        assert abs(cb.weight_t(TRI, y, TRI.vertex(k)) - w[k]) <= cb.WEIGHT_TOL
