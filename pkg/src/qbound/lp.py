"""Small dense two-phase simplex solver.

Intended for the tiny programs that arise from polytope bases (tens of
variables). Bland's rule is used for both entering and leaving variables, so
the method cannot cycle.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import LPInfeasible, LPUnbounded

TOL = 1e-11


@dataclass
class LPResult:
    x: np.ndarray
    value: float
    iterations: int
    dual: Optional[np.ndarray] = None


def _pivot(T, row, col):
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])


def _run(T, basis, ncols, tol, max_iter):
    """Minimize the objective stored in the last row of tableau ``T``.

    Only columns ``< ncols`` may enter. The last row holds reduced costs,
    its last entry is minus the current objective value.
    """
    m = T.shape[0] - 1
    it = 0
    while True:
        cost = T[-1, :ncols]
        entering = np.flatnonzero(cost < -tol)
        if entering.size == 0:
            return it
        col = int(entering[0])
        colvals = T[:m, col]
        pos = np.flatnonzero(colvals > tol)
        if pos.size == 0:
            raise LPUnbounded("objective is unbounded")
        ratios = T[pos, -1] / colvals[pos]
        best = ratios.min()
        ties = pos[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(T, row, col)
        basis[row] = col
        it += 1
        if it > max_iter:
            raise RuntimeError("simplex iteration limit reached")


def _phase_one(A, b, tol, max_iter):
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    # artificial variables n..n+m-1
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    it = _run(T, basis, n + m, tol, max_iter)
    scale = max(1.0, np.abs(b).max(initial=0.0))
    return T, basis, it, -T[-1, -1] <= tol * scale


def feasible(A_eq, b_eq, tol=TOL, max_iter=10_000):
    """Does ``A_eq x = b_eq`` have a solution with ``x >= 0``?"""
    A = np.array(A_eq, dtype=float)
    b = np.array(b_eq, dtype=float)
    return _phase_one(A, b, tol, max_iter)[3]


def simplex(c, A_eq, b_eq, tol=TOL, max_iter=10_000):
    """Solve ``min c.x  s.t.  A_eq x = b_eq, x >= 0``.

    Raises ``LPInfeasible`` or ``LPUnbounded``. Feasibility is accepted when
    the phase-one residual is at most ``tol`` times the scale of ``b_eq``.
    The result carries the dual vector ``g`` of the final basis, so that
    ``c - A_eq.T g >= 0`` and ``b_eq.g`` equals the optimum at optimality.
    """
    c = np.asarray(c, dtype=float)
    A0 = np.asarray(A_eq, dtype=float)
    A = A0.copy()
    b = np.array(b_eq, dtype=float)
    m, n = A.shape
    T, basis, it, ok = _phase_one(A, b, tol, max_iter)
    if not ok:
        raise LPInfeasible(f"phase-one residual {-T[-1, -1]:.3e}")

    # drive remaining artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n:
            cand = np.flatnonzero(np.abs(T[r, :n]) > tol)
            if cand.size:
                _pivot(T, r, int(cand[0]))
                basis[r] = int(cand[0])
                keep.append(r)
        else:
            keep.append(r)
    T2 = np.zeros((len(keep) + 1, n + 1))
    T2[:-1, :n] = T[keep, :n]
    T2[:-1, -1] = T[keep, -1]
    basis = [basis[r] for r in keep]

    # phase two
    T2[-1, :n] = c
    for r, j in enumerate(basis):
        if T2[-1, j] != 0.0:
            T2[-1] -= T2[-1, j] * T2[r]
    it += _run(T2, basis, n, tol, max_iter)
    x = np.zeros(n)
    for r, j in enumerate(basis):
        x[j] = T2[r, -1]
    x = np.clip(x, 0.0, None)
    # redundant rows carry zero dual
    dual = np.zeros(m)
    dual[keep] = np.linalg.lstsq(A0[keep][:, basis].T, c[basis], rcond=None)[0]
    return LPResult(x=x, value=float(c @ x), iterations=it, dual=dual)


def simplex_leq(c, A_ub, b_ub, tol=TOL, max_iter=10_000):
    """Solve ``max c.x  s.t.  A_ub x <= b_ub, x >= 0`` with ``b_ub >= 0``.

    The slack basis is feasible at the origin so phase one is skipped.
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A_ub, dtype=float)
    b = np.asarray(b_ub, dtype=float)
    if np.any(b < 0):
        raise ValueError("simplex_leq requires a non-negative right-hand side")
    m, n = A.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -c
    basis = list(range(n, n + m))
    it = _run(T, basis, n + m, tol, max_iter)
    x = np.zeros(n + m)
    for r, j in enumerate(basis):
        x[j] = T[r, -1]
    x = np.clip(x[:n], 0.0, None)
    return LPResult(x=x, value=float(c @ x), iterations=it)
