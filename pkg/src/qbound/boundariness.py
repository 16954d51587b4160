"""Boundariness of states, POVMs and channels, with the optimal decompositions.

For a point ``y`` of a convex base the weight function is

    t_y(x) = sup{ t : (y - t x) / (1 - t) in the base },

and the boundariness ``b(y)`` is its infimum over ``x``. Every routine here
returns a :class:`BoundarinessReport` that carries the minimizing element
(``optimizer``) and the boundary element ``complement`` with

    y = b * optimizer + (1 - b) * complement.

States and POVMs have spectral closed forms. For an interior channel ``F``
the minimization runs over unitary channels only:

    b(F) = d / max_U <<U| J_F^{-1} |U>>,

which is computed exactly for qubits (via the magic basis) and for erasure
channels, and by a monotone ascent over unitaries in general.
"""
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import convex_base, linalg
from .errors import NotInterior, NotPSD, NotQubit, ValidationError, ValidationFailed
from .qobjects import (
    Povm,
    QuantumChannel,
    QuantumState,
    RandomSource,
    concentrated_povm,
    magic_basis,
    random_unitary,
    unitary_channel,
    weyl_unitaries,
)

INTERIOR_TOL = 1e-10
BOUNDARY_TOL = 1e-8
PSD_TOL = 1e-9
RECON_TOL = 1e-9
CROSSCHECK_TOL = 1e-7
DISAGREEMENT_TOL = 1e-6
MIN_HAAR_SEEDS = 8


@dataclass
class OptimizerConfig:
    """Settings for the multi-start ascent over unitaries.

    ``restarts`` counts all starting points. With the ``weyl_plus_haar``
    strategy the ``d^2`` Weyl unitaries come first, followed by
    ``max(restarts - d^2, 8)`` Haar-random unitaries.
    """

    restarts: int = 16
    max_iters: int = 500
    rel_tol: float = 1e-12
    seed: int = 0
    seed_strategy: str = "weyl_plus_haar"

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.seed_strategy not in ("weyl_plus_haar", "haar_only"):
            raise ValueError(f"unknown seed strategy {self.seed_strategy!r}")


@dataclass
class BoundarinessReport:
    b: float
    optimizer: Any
    complement: Any = None
    method: str = "closed_form"
    kind: str = ""
    iterations: int = 0
    restarts_used: int = 0
    objective_history: list = field(default_factory=list)
    residuals: dict = field(default_factory=dict)
    converged: bool = True
    flags: list = field(default_factory=list)
    witness: Any = None


@dataclass
class RadiusResult:
    """Outcome of :func:`entangled_radius_iterative`.

    ``r`` is the best value of ``(1/d) <<U|A|U>>`` found and ``U`` the
    unitary attaining it. ``history`` belongs to the winning start;
    ``histories`` holds every start, in seed order.
    """

    r: float
    U: np.ndarray
    history: list
    iterations: int
    restarts_used: int
    finals: list
    histories: list
    converged: bool
    best_seed: int

    @property
    def spread(self):
        return (max(self.finals) - min(self.finals)) / max(self.finals)

    def __iter__(self):
        return iter((self.r, self.U))


# ------------------------------------------------------------------ states, POVMs


def b_state(state):
    """Boundariness of a density matrix: its smallest eigenvalue.

    The optimizer is the pure state on the corresponding eigenvector, which is
    also the state farthest from ``rho`` in trace norm.
    """
    if not isinstance(state, QuantumState):
        state = QuantumState(state)
    w, V = linalg.herm_eig(state.rho)
    b = float(max(w[0], 0.0))
    phi = V[:, 0]
    x = np.outer(phi, phi.conj())
    G = (state.rho - b * x) / (1.0 - b)
    G = (G + G.conj().T) / 2
    gmin = linalg.lambda_min(G)
    return BoundarinessReport(
        b=b,
        optimizer=x,
        complement=G,
        kind="state",
        witness=phi,
        residuals={
            "reconstruction": float(np.abs(state.rho - b * x - (1 - b) * G).max()),
            "complement_lambda_min": gmin,
        },
    )


def mixedness_state(state):
    """``1 - lambda_max(rho)``: the largest weight of a pure state is its top eigenvalue."""
    if not isinstance(state, QuantumState):
        state = QuantumState(state)
    return float(1.0 - linalg.lambda_max(state.rho))


def b_povm(povm):
    """Boundariness of a POVM: smallest eigenvalue over all effects.

    The optimizer is the trivial POVM concentrated on the outcome ``j*``
    whose effect has that eigenvalue.
    """
    if not isinstance(povm, Povm):
        povm = Povm(povm)
    mins = [linalg.lambda_min(E) for E in povm.effects]
    j = int(np.argmin(mins))
    b = float(max(mins[j], 0.0))
    d, n = povm.dim, povm.n_outcomes
    x = concentrated_povm(d, n, j).effects
    G = [(E - b * X) / (1.0 - b) for E, X in zip(povm.effects, x)]
    G = [(g + g.conj().T) / 2 for g in G]
    recon = max(np.abs(E - b * X - (1 - b) * g).max() for E, X, g in zip(povm.effects, x, G))
    return BoundarinessReport(
        b=b,
        optimizer=list(x),
        complement=G,
        kind="povm",
        witness=j,
        residuals={
            "reconstruction": float(recon),
            "complement_lambda_min": min(linalg.lambda_min(g) for g in G),
        },
    )


# ---------------------------------------------------------------------- channels


def _interior_inverse(ch):
    w, V = linalg.herm_eig(ch.choi)
    if w[0] <= INTERIOR_TOL:
        raise NotInterior(f"Choi matrix is singular (lambda_min = {w[0]:.3e})")
    return (V / w) @ V.conj().T


def is_boundary(ch, tol=BOUNDARY_TOL):
    return linalg.lambda_min(ch.choi) <= tol


def weight_t_channel(F, E):
    """Largest weight of channel ``E`` in a decomposition of interior channel ``F``.

    Equals ``1 / lambda_1(J_F^{-1} J_E)``, evaluated through the Hermitian
    form ``sqrt(J_E) J_F^{-1} sqrt(J_E)``.
    """
    Finv = _interior_inverse(F)
    S = linalg.sqrtm_psd(E.choi)
    lam = linalg.lambda_max(S @ Finv @ S)
    return float(min(1.0, 1.0 / lam))


def _channel_objective(A, U):
    x = linalg.me_vec(U)
    return float(np.real(x.conj() @ A @ x)) / U.shape[0]


def _seed_unitaries(d, cfg):
    rng = RandomSource(cfg.seed)
    seeds = []
    if cfg.seed_strategy == "weyl_plus_haar":
        seeds.extend(weyl_unitaries(d))
        n_haar = max(cfg.restarts - d * d, MIN_HAAR_SEEDS)
    else:
        n_haar = cfg.restarts
    for k in range(n_haar):
        seeds.append(random_unitary(d, rng.child(k)))
    return seeds


def _ascend(A, U, d, max_iters, rel_tol):
    """Linearize the quadratic form and jump to the best unitary, repeatedly.

    Since ``A`` is positive the objective is convex in ``vec(U)``, so every
    step is non-decreasing.
    """
    f = _channel_objective(A, U)
    history = [f]
    converged = False
    for _ in range(max_iters):
        M = linalg.me_unvec(A @ linalg.me_vec(U))
        V = linalg.polar_unitary(M)
        g = _channel_objective(A, V)
        if g < f:
            # roundoff at the fixed point
            converged = True
            break
        U, f_old, f = V, f, g
        history.append(f)
        if f - f_old <= rel_tol * abs(f):
            converged = True
            break
    return U, history, converged


def entangled_radius_iterative(A, cfg=None):
    """Maximize ``(1/d) <<U|A|U>>`` over unitaries by multi-start ascent.

    This is the largest value of ``<psi|A|psi>`` over maximally entangled
    unit vectors ``psi``. The best start wins; ties go to the earliest seed.
    """
    cfg = cfg or OptimizerConfig()
    A = linalg.hermitian_part(A)
    if linalg.lambda_min(A) < -PSD_TOL * max(1.0, np.abs(A).max()):
        raise NotPSD("matrix is not positive semidefinite")
    d = int(round(np.sqrt(A.shape[0])))
    if d * d != A.shape[0]:
        raise ValueError("matrix size must be a perfect square")
    best = None
    finals, histories = [], []
    iterations = 0
    all_converged = True
    for k, U0 in enumerate(_seed_unitaries(d, cfg)):
        U, hist, conv = _ascend(A, U0, d, cfg.max_iters, cfg.rel_tol)
        iterations += len(hist) - 1
        all_converged &= conv
        finals.append(hist[-1])
        histories.append(hist)
        if best is None or hist[-1] > best[0]:
            best = (hist[-1], U, hist, k)
    r, U, hist, k = best
    return RadiusResult(
        r=r,
        U=U,
        history=hist,
        iterations=iterations,
        restarts_used=len(finals),
        finals=finals,
        histories=histories,
        converged=all_converged,
        best_seed=k,
    )


def _complement_channel(F, JU, b):
    d = F.dim
    JG = (F.choi - b * JU) / (1.0 - b)
    JG = (JG + JG.conj().T) / 2
    residuals = {
        "reconstruction": float(np.abs(F.choi - b * JU - (1 - b) * JG).max()),
        "complement_lambda_min": linalg.lambda_min(JG),
        "complement_marginal": float(
            np.abs(linalg.partial_trace(JG, (d, d), 1) - np.eye(d) / d).max()
        ),
    }
    return JG, residuals


def _channel_report(F, b, U, method, Finv):
    d = F.dim
    x = linalg.me_vec(U)
    JU = np.outer(x, x.conj()) / d
    JG, residuals = _complement_channel(F, JU, b)
    residuals["unitarity"] = float(np.abs(U.conj().T @ U - np.eye(d)).max())
    residuals["weight_crosscheck"] = abs(weight_t_channel(F, QuantumChannel(JU)) - b)
    weyl_bound = d * d / float(np.trace(Finv).real)
    residuals["weyl_bound_gap"] = weyl_bound - b
    flags = []
    if residuals["complement_lambda_min"] > BOUNDARY_TOL:
        flags.append("complement_not_boundary")
    if residuals["weight_crosscheck"] > CROSSCHECK_TOL:
        flags.append("weight_crosscheck_failed")
    if b > weyl_bound + RECON_TOL:
        flags.append("weyl_bound_violated")
    return BoundarinessReport(
        b=b, optimizer=U, complement=JG, method=method, kind="channel",
        residuals=residuals, flags=flags,
    )


def b_channel(F, cfg=None):
    """Boundariness of an interior channel by ascent over unitaries.

    The reported ``b`` is ``d / <<U|J_F^{-1}|U>>`` for the best unitary
    found, so it is always a certified upper bound on the true value.
    """
    cfg = cfg or OptimizerConfig()
    Finv = _interior_inverse(F)
    res = entangled_radius_iterative(Finv, cfg)
    b = 1.0 / res.r
    rep = _channel_report(F, b, res.U, "iterative", Finv)
    rep.iterations = res.iterations
    rep.restarts_used = res.restarts_used
    rep.objective_history = list(res.history)
    rep.converged = res.converged
    rep.residuals["restart_spread"] = res.spread
    rep.witness = res
    if res.spread > DISAGREEMENT_TOL:
        rep.flags.append("restarts_disagree")
    if not res.converged:
        rep.flags.append("not_converged")
    if cfg.seed_strategy == "weyl_plus_haar" and "weyl_bound_violated" in rep.flags:
        raise ValidationFailed("Weyl trace bound violated despite Weyl seeding")
    return rep


def magic_eigenproblem(Finv):
    """Real symmetric matrix ``W^dag A W + (W^dag A W)^T`` for a 4x4 Hermitian ``A``."""
    W = magic_basis()
    M = W.conj().T @ Finv @ W
    S = M + M.T
    if np.abs(S.imag).max() > 1e-9 * max(1.0, np.abs(S).max()):
        raise ValidationFailed("magic-basis matrix is not real")
    S = S.real
    return (S + S.T) / 2


def b_channel_qubit(F):
    """Closed-form boundariness of an interior qubit channel.

    ``b = 2 / lambda_1(S)`` with ``S`` from :func:`magic_eigenproblem`; the
    optimal unitary is ``sqrt(2) W v`` unvectorized, ``v`` the leading
    eigenvector of ``S``.
    """
    if F.dim != 2:
        raise NotQubit(f"expected a qubit channel, got d = {F.dim}")
    Finv = _interior_inverse(F)
    S = magic_eigenproblem(Finv)
    w, V = np.linalg.eigh(S)
    v = V[:, -1]
    v = v * np.sign(v[np.argmax(np.abs(v))])
    b = 2.0 / w[-1]
    U = linalg.me_unvec(np.sqrt(2) * magic_basis() @ v)
    if not linalg.is_unitary(U, 1e-8):
        raise ValidationFailed("magic-basis eigenvector does not give a unitary")
    rep = _channel_report(F, float(b), U, "magic_basis", Finv)
    rep.residuals["leading_gap"] = float(w[-1] - w[-2])
    return rep


def b_erasure(sigma):
    """``1 / tr(sigma^{-1})``; every unitary is optimal, identity is returned."""
    if not isinstance(sigma, QuantumState):
        sigma = QuantumState(sigma)
    w = linalg.eigvalsh(sigma.rho)
    if w[0] <= INTERIOR_TOL:
        raise NotInterior(f"sigma is singular (lambda_min = {w[0]:.3e})")
    b = float(1.0 / np.sum(1.0 / w))
    d = sigma.dim
    F = QuantumChannel(np.kron(sigma.rho, np.eye(d)) / d)
    JU = unitary_channel(np.eye(d)).choi
    JG, residuals = _complement_channel(F, JU, b)
    return BoundarinessReport(
        b=b, optimizer=np.eye(d, dtype=complex), complement=JG, kind="channel",
        residuals=residuals,
    )


def boundariness(obj, method="auto", cfg=None):
    """Dispatch on the object type.

    ``method`` is ``auto`` (closed form where one exists), ``exact`` (closed
    form or error) or ``iterative`` (force the unitary ascent for channels).
    """
    if isinstance(obj, QuantumState):
        return b_state(obj)
    if isinstance(obj, Povm):
        return b_povm(obj)
    if isinstance(obj, QuantumChannel):
        if method == "iterative":
            return b_channel(obj, cfg)
        if obj.dim == 2:
            return b_channel_qubit(obj)
        if method == "exact":
            raise NotQubit("no closed form for channels with d > 2; use method='iterative'")
        return b_channel(obj, cfg)
    if isinstance(obj, tuple) and len(obj) == 2 and isinstance(obj[0], convex_base.PolytopeBase):
        return b_polytope(*obj)
    raise TypeError(f"cannot compute boundariness of {type(obj).__name__}")


def b_polytope(B, y):
    """Report wrapper around :func:`convex_base.boundariness_polytope`."""
    y = np.asarray(y, dtype=float)
    b, k = convex_base.boundariness_polytope(B, y)
    x = B.vertex(k)
    z = convex_base.residual_point(y, x, b) if b < 1 else x
    return BoundarinessReport(
        b=b, optimizer=x, complement=z, kind="polytope", witness=k,
        residuals={"reconstruction": float(np.abs(y - b * x - (1 - b) * z).max())},
    )


# -------------------------------------------------------------- decompositions


def _check_valid(build):
    try:
        build()
    except (ValidationError, NotPSD) as exc:
        raise ValidationFailed(f"complement is not a valid element: {exc}") from None


def decompose(y, report):
    """Return a verified triple ``(x, G, b)`` with ``y = b x + (1 - b) G``.

    ``G`` is checked to be a boundary element of the relevant set; failure
    raises :class:`ValidationFailed`.
    """
    b, x, G = report.b, report.optimizer, report.complement
    if isinstance(y, QuantumState):
        resid = np.abs(y.rho - b * x - (1 - b) * G).max()
        _check_valid(lambda: QuantumState(G).validate(PSD_TOL))
        boundary = linalg.lambda_min(G) <= BOUNDARY_TOL
    elif isinstance(y, Povm):
        resid = max(np.abs(E - b * X - (1 - b) * g).max() for E, X, g in zip(y.effects, x, G))
        _check_valid(lambda: Povm(G).validate(PSD_TOL, PSD_TOL))
        boundary = min(linalg.lambda_min(g) for g in G) <= BOUNDARY_TOL
    elif isinstance(y, QuantumChannel):
        d = y.dim
        xv = linalg.me_vec(x)
        JU = np.outer(xv, xv.conj()) / d
        resid = np.abs(y.choi - b * JU - (1 - b) * G).max()
        _check_valid(lambda: QuantumChannel(G).validate(PSD_TOL))
        boundary = linalg.lambda_min(G) <= BOUNDARY_TOL
        if not linalg.is_unitary(x, 1e-8):
            raise ValidationFailed("channel optimizer is not unitary")
    elif isinstance(y, tuple) and isinstance(y[0], convex_base.PolytopeBase):
        B, p = y
        p = np.asarray(p, dtype=float)
        resid = np.abs(p - b * x - (1 - b) * G).max()
        boundary = convex_base.contains(B, G) == convex_base.Membership.BOUNDARY
    else:
        raise TypeError(f"cannot decompose {type(y).__name__}")
    if resid > RECON_TOL:
        raise ValidationFailed(f"reconstruction residual {resid:.3e}")
    if not boundary:
        raise ValidationFailed("complement is not a boundary element")
    return x, G, b
