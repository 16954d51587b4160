"""Weight function, boundariness, mixedness and base norm for polytope bases.

A :class:`PolytopeBase` is the compact convex base of a polyhedral cone,
given by its vertices together with the order-unit functional ``e`` that
equals one on the base. Points are vectors in the ambient space of the cone;
use :meth:`PolytopeBase.from_affine` and :meth:`PolytopeBase.lift` to work
with ordinary affine coordinates instead.

Every quantity is computed from LP membership and LP duality only, so the
results are exact up to the simplex tolerance.
"""
import enum
import json
from dataclasses import dataclass

import numpy as np

from . import lp
from .errors import DegenerateBase, LPInfeasible, NotMember

BASE_TOL = 1e-12
BOUNDARY_BAND = 1e-9
WEIGHT_TOL = 1e-11
BISECTION_STEPS = 60
# Feasibility slack for the weight-function oracle. Overshooting the true
# weight by dt leaves a residual of only dt times the rate at which the line
# leaves the base, so this sits near the roundoff floor rather than at lp.TOL.
CERT_TOL = 1e-14
# relative roundoff allowed when checking an LP dual certificate
DUAL_ROUNDOFF = 1e-13


class Membership(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True, eq=False)
class PolytopeBase:
    vertices: np.ndarray
    order_unit: np.ndarray

    def __post_init__(self):
        V = np.array(self.vertices, dtype=float)
        e = np.array(self.order_unit, dtype=float).reshape(-1)
        if V.ndim != 2 or V.shape[1] != e.size:
            raise DegenerateBase(f"vertices {V.shape} do not match order unit of length {e.size}")
        if not np.all(np.isfinite(V)) or not np.all(np.isfinite(e)):
            raise DegenerateBase("non-finite vertex or order-unit entries")
        off = np.abs(V @ e - 1.0)
        if off.max() > BASE_TOL:
            raise DegenerateBase(f"<e, v> deviates from 1 by {off.max():.3e}")
        # the cone over the base must be full-dimensional
        if np.linalg.matrix_rank(V, tol=1e-10) < e.size:
            raise DegenerateBase("vertices do not span the ambient space")
        V.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "vertices", V)
        object.__setattr__(self, "order_unit", e)
        # each vertex must be extremal
        for i in range(V.shape[0]):
            others = np.delete(V, i, axis=0)
            if others.shape[0] and _feasible_combination(others, V[i]):
                raise DegenerateBase(f"vertex {i} is a convex combination of the others")

    @property
    def ambient_dim(self):
        return self.vertices.shape[1]

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @classmethod
    def from_affine(cls, points):
        """Base whose vertices are affine points ``p`` lifted to ``(1, p)``."""
        P = np.asarray(points, dtype=float)
        V = np.hstack([np.ones((P.shape[0], 1)), P])
        e = np.zeros(V.shape[1])
        e[0] = 1.0
        return cls(V, e)

    def lift(self, point):
        """Ambient coordinates of an affine point, for bases built by ``from_affine``."""
        p = np.asarray(point, dtype=float).reshape(-1)
        return np.concatenate([[1.0], p])

    def vertex(self, i):
        return self.vertices[i].copy()

    def to_json(self):
        return {
            "dim": int(self.ambient_dim),
            "vertices": self.vertices.tolist(),
            "order_unit": self.order_unit.tolist(),
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        base = cls(obj["vertices"], obj["order_unit"])
        if int(obj["dim"]) != base.ambient_dim:
            raise DegenerateBase(f"dim={obj['dim']} but vertices have length {base.ambient_dim}")
        return base


def triangle():
    return PolytopeBase.from_affine([[0, 0], [1, 0], [0, 1]])


def square():
    return PolytopeBase.from_affine([[0, 0], [1, 0], [1, 1], [0, 1]])


def _feasible_combination(V, p, tol=lp.TOL):
    """Is ``p`` a convex combination of the rows of ``V``?"""
    n = V.shape[0]
    A = np.vstack([V.T, np.ones((1, n))])
    b = np.concatenate([p, [1.0]])
    return lp.feasible(A, b, tol=tol)


def _as_point(B, p):
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size != B.ambient_dim:
        raise ValueError(f"point of length {p.size} in ambient dimension {B.ambient_dim}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point has non-finite entries")
    return p


def interior_margin(B, p):
    """Largest ``s`` such that ``p`` has a representation with all weights >= s.

    Returns ``None`` if ``p`` is not in the base. Writing the weights as
    ``s + mu_i`` with ``mu >= 0`` gives a standard-form LP in ``(mu, s)``.
    """
    p = _as_point(B, p)
    V = B.vertices
    n = V.shape[0]
    A = np.zeros((B.ambient_dim + 1, n + 1))
    A[:-1, :n] = V.T
    A[:-1, n] = V.sum(axis=0)
    A[-1, :n] = 1.0
    A[-1, n] = n
    b = np.concatenate([p, [1.0]])
    c = np.zeros(n + 1)
    c[n] = -1.0
    try:
        res = lp.simplex(c, A, b)
    except LPInfeasible:
        return None
    return float(res.x[n])


def is_member(B, p):
    return _feasible_combination(B.vertices, _as_point(B, p))


def contains(B, p, tol=BOUNDARY_BAND):
    """Classify ``p`` as interior, boundary or outside of the base.

    A member point is on the boundary exactly when it cannot be written with
    strictly positive weight on every vertex, i.e. when some nonzero
    functional of the dual cone vanishes on it.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = interior_margin(B, p)
    if s is None:
        return Membership.OUTSIDE
    return Membership.BOUNDARY if s <= tol else Membership.INTERIOR


def _require_member(B, p, name):
    p = _as_point(B, p)
    if not is_member(B, p):
        raise NotMember(f"{name} is not in the base")
    return p


def _residual_feasible(B, y, x, t, tol=CERT_TOL):
    """Is ``(y - t x)/(1 - t)`` in the base?

    Tested as ``y - t x`` lying in the cone over the vertices; the order unit
    then fixes the scale to ``1 - t`` automatically. Avoiding the division
    keeps the test accurate when ``t`` is close to one.
    """
    return lp.feasible(B.vertices.T, y - t * x, tol=tol)


def _bisect_weight(B, y, x, lo, hi):
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if _residual_feasible(B, y, x, mid):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15:
            break
    return lo


def _parametric_weight(B, y, x):
    """``max t`` subject to ``y = t x + sum_i lam_i v_i`` with ``lam, t >= 0``.

    Returns ``(t, h)`` where ``h`` is the LP dual up to sign: a functional
    with ``<h, v> >= 0`` on every vertex and ``<h, x> >= 1``, so that
    ``<h, y>`` bounds every admissible ``t`` from above. ``None`` if the LP
    fails.
    """
    V = B.vertices
    n = V.shape[0]
    A = np.hstack([V.T, x[:, None]])
    c = np.zeros(n + 1)
    c[n] = -1.0
    try:
        res = lp.simplex(c, A, y)
    except LPInfeasible:
        return None
    return float(np.clip(res.x[n], 0.0, 1.0)), -res.dual


def _certifies_upper(B, y, x, t, h):
    # the vertex weights of any decomposition sum to 1 - t <= 1, so each
    # violation below shifts the implied bound by at most its own size;
    # evaluating <h, .> itself costs roundoff proportional to |h|
    noise = DUAL_ROUNDOFF * max(1.0, np.abs(h).max())
    slack = max(0.0, -float((B.vertices @ h).min()), 1.0 - float(h @ x))
    return slack <= noise and float(h @ y) - t <= WEIGHT_TOL + noise


def weight_t(B, y, x):
    """Largest ``t`` with ``(y - t x)/(1 - t)`` in the base.

    A single parametric LP proposes ``t``. It is accepted when the membership
    oracle confirms the residual at ``t`` and the LP dual certifies that no
    larger ``t`` is admissible; otherwise the answer comes from plain
    bisection on membership.
    """
    y = _require_member(B, y, "y")
    x = _require_member(B, x, "x")
    if np.abs(y - x).max() <= WEIGHT_TOL:
        return 1.0
    found = _parametric_weight(B, y, x)
    if found is None:
        return _bisect_weight(B, y, x, 0.0, 1.0)
    t, h = found
    if _residual_feasible(B, y, x, t, tol=lp.TOL) and _certifies_upper(B, y, x, t, h):
        return t
    return _bisect_weight(B, y, x, 0.0, 1.0)


def residual_point(y, x, t):
    """The point ``z`` with ``y = t x + (1 - t) z``."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    return (y - t * x) / (1.0 - t)


def vertex_weights(B, y):
    y = _require_member(B, y, "y")
    return np.array([weight_t(B, y, v) for v in B.vertices])


def boundariness_polytope(B, y):
    """Boundariness of ``y`` and the vertex attaining it (lowest index on ties)."""
    w = vertex_weights(B, y)
    # lowest index among weights tied with the minimum to solver precision
    k = int(np.flatnonzero(w <= w.min() + WEIGHT_TOL)[0])
    return float(w[k]), k


def mixedness_polytope(B, y):
    """One minus the largest weight any vertex can carry in a decomposition of ``y``."""
    w = vertex_weights(B, y)
    return float(1.0 - w.max())


def _check_difference(B, u):
    u = _as_point(B, u)
    if abs(B.order_unit @ u) > 1e-9 * max(1.0, np.abs(u).max()):
        raise LPInfeasible("vector is not a difference of base points (<e, u> != 0)")
    return u


def base_norm_dual(B, u):
    """``max 2<g, u>`` over functionals with ``0 <= <g, v> <= 1`` on every vertex."""
    u = _check_difference(B, u)
    V = B.vertices
    n = B.ambient_dim
    # g = gp - gm, both >= 0
    A = np.vstack([np.hstack([V, -V]), np.hstack([-V, V])])
    b = np.concatenate([np.ones(V.shape[0]), np.zeros(V.shape[0])])
    c = np.concatenate([u, -u])
    res = lp.simplex_leq(c, A, b)
    g = res.x[:n] - res.x[n:]
    return 2.0 * res.value, g


def base_norm_primal(B, u):
    """``min lambda + mu`` with ``u = lambda b1 - mu b2`` for base points ``b1, b2``."""
    u = _check_difference(B, u)
    V = B.vertices
    m = V.shape[0]
    A = np.hstack([V.T, -V.T])
    c = np.ones(2 * m)
    res = lp.simplex(c, A, u)
    return res.value, res.x[:m], res.x[m:]


def base_norm_polytope(B, u, agreement_tol=1e-9):
    """Base norm of a difference vector, solved as both primal and dual LP."""
    dual, _ = base_norm_dual(B, u)
    primal, _, _ = base_norm_primal(B, u)
    if abs(dual - primal) > agreement_tol * max(1.0, abs(primal)):
        raise RuntimeError(f"base-norm LP duality gap {abs(dual - primal):.3e}")
    return primal


def max_base_distance(B, y, check_tol=1e-9):
    """Largest base-norm distance from ``y`` to a vertex, and that vertex."""
    y = _require_member(B, y, "y")
    dist = np.array([base_norm_polytope(B, v - y) for v in B.vertices])
    k = int(np.flatnonzero(dist >= dist.max() - 1e-10)[0])
    b, _ = boundariness_polytope(B, y)
    if abs(dist[k] - 2.0 * (1.0 - b)) > check_tol:
        raise RuntimeError(f"max distance {dist[k]!r} != 2(1 - b) = {2 * (1 - b)!r}")
    return float(dist[k]), k
