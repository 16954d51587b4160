"""Quantum states, POVMs and channels in Choi form.

Choi matrices use the (output, input) subsystem order:

    J_E = (E (x) id)[Psi+],   Psi+ = (1/d) sum_{jk} |jj><kk|,

so ``J`` has unit trace and ``tr_1 J = I/d``. A Kraus operator ``A``
contributes ``(1/d) me_vec(A) me_vec(A)^dag``.
"""
import hashlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    InvalidChoi,
    NotTracePreserving,
    SingularMarginal,
    SingularNormalizer,
    ValidationError,
)

PSD_TOL = 1e-9
MARGINAL_FLOOR = 1e-12
RNG_ALGORITHM = "numpy.random.Generator(PCG64)"


def _check_hermitian(M, name, tol):
    asym = np.abs(M - M.conj().T).max()
    if asym > tol:
        raise ValidationError(f"{name} is not Hermitian (|M - M^dag|_max = {asym:.3e})")


@dataclass(frozen=True, eq=False)
class QuantumState:
    rho: np.ndarray

    def __post_init__(self):
        rho = linalg.as_matrix(self.rho, square=True)
        object.__setattr__(self, "rho", rho)
        self.validate()

    @property
    def dim(self):
        return self.rho.shape[0]

    def validate(self, tol=1e-10):
        _check_hermitian(self.rho, "rho", tol)
        lmin = np.linalg.eigvalsh((self.rho + self.rho.conj().T) / 2)[0]
        if lmin < -tol:
            raise ValidationError(f"rho is not positive (lambda_min = {lmin:.3e})")
        tr = np.trace(self.rho)
        if abs(tr - 1) > tol:
            raise ValidationError(f"rho does not have unit trace (tr = {tr.real:.12g})")


@dataclass(frozen=True, eq=False)
class Povm:
    effects: tuple

    def __post_init__(self):
        effects = tuple(linalg.as_matrix(E, square=True) for E in self.effects)
        if len(effects) < 1:
            raise ValidationError("a POVM needs at least one effect")
        if len({E.shape for E in effects}) != 1:
            raise DimensionMismatch("effects have different shapes")
        object.__setattr__(self, "effects", effects)
        self.validate()

    @property
    def dim(self):
        return self.effects[0].shape[0]

    @property
    def n_outcomes(self):
        return len(self.effects)

    def validate(self, tol=1e-10, sum_tol=1e-9):
        for j, E in enumerate(self.effects):
            _check_hermitian(E, f"effect {j}", tol)
            w = np.linalg.eigvalsh((E + E.conj().T) / 2)
            if w[0] < -tol or w[-1] > 1 + tol:
                raise ValidationError(f"effect {j} has spectrum outside [0, 1]: [{w[0]:.3e}, {w[-1]:.3e}]")
        dev = np.abs(sum(self.effects) - np.eye(self.dim)).max()
        if dev > sum_tol:
            raise ValidationError(f"effects do not sum to the identity (deviation {dev:.3e})")


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """Channel on a ``d``-level system stored as its Choi matrix."""

    choi: np.ndarray
    kraus: Optional[tuple] = field(default=None)

    def __post_init__(self):
        J = linalg.as_matrix(self.choi, square=True)
        d = int(round(np.sqrt(J.shape[0])))
        if d * d != J.shape[0]:
            raise DimensionMismatch(f"Choi matrix of size {J.shape[0]} is not d^2 x d^2")
        object.__setattr__(self, "choi", J)
        if self.kraus is not None:
            object.__setattr__(self, "kraus", tuple(linalg.as_matrix(A, square=True) for A in self.kraus))
        self.validate()

    @property
    def dim(self):
        return int(round(np.sqrt(self.choi.shape[0])))

    def validate(self, tol=PSD_TOL):
        J, d = self.choi, self.dim
        try:
            _check_hermitian(J, "Choi matrix", tol)
        except ValidationError as exc:
            raise InvalidChoi(str(exc)) from None
        lmin = np.linalg.eigvalsh((J + J.conj().T) / 2)[0]
        if lmin < -tol:
            raise InvalidChoi(f"Choi matrix is not positive (lambda_min = {lmin:.3e})")
        tr = np.trace(J)
        if abs(tr - 1) > 1e-10:
            raise InvalidChoi(f"Choi matrix does not have unit trace (tr = {tr.real:.12g})")
        dev = np.abs(linalg.partial_trace(J, (d, d), 1) - np.eye(d) / d).max()
        if dev > tol:
            raise NotTracePreserving(f"tr_1 J deviates from I/d by {dev:.3e}")
        if self.kraus is not None:
            closure = sum(A.conj().T @ A for A in self.kraus)
            dev = np.abs(closure - np.eye(d)).max()
            if dev > tol:
                raise NotTracePreserving(f"Kraus operators violate sum A^dag A = I by {dev:.3e}")
            dev = np.abs(_choi_of_kraus(self.kraus, d) - J).max()
            if dev > tol:
                raise InvalidChoi(f"Kraus operators do not reproduce the Choi matrix ({dev:.3e})")

    def apply(self, rho):
        """``E(rho) = d tr_2[J (I (x) rho^T)]``."""
        d = self.dim
        rho = np.asarray(getattr(rho, "rho", rho), dtype=complex)
        T = self.choi.reshape(d, d, d, d)
        return d * np.einsum("ijkl,jl->ik", T, rho)


class RandomSource:
    """Seeded random stream.

    Wraps numpy's PCG64 generator. Child sources for parallel tasks are
    derived as ``seed' = sha256(seed, index)`` truncated to 64 bits.
    """

    algorithm = RNG_ALGORITHM

    def __init__(self, seed=0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.gen = np.random.Generator(np.random.PCG64(self.seed))

    def child(self, index):
        return RandomSource(derive_seed(self.seed, index))

    def normal(self, size):
        return self.gen.standard_normal(size)

    def complex_normal(self, shape):
        return (self.gen.standard_normal(shape) + 1j * self.gen.standard_normal(shape)) / np.sqrt(2)


def derive_seed(seed, index):
    h = hashlib.sha256(f"{int(seed)}:{int(index)}".encode()).digest()
    return int.from_bytes(h[:8], "little")


def _rng(rng):
    if isinstance(rng, RandomSource):
        return rng
    return RandomSource(0 if rng is None else rng)


# ----------------------------------------------------------------- constructors


def max_ent_projector(d):
    v = np.eye(d, dtype=complex).reshape(-1)
    return np.outer(v, v) / d


def _choi_of_kraus(kraus, d):
    J = np.zeros((d * d, d * d), dtype=complex)
    for A in kraus:
        v = linalg.me_vec(A)
        J += np.outer(v, v.conj())
    return J / d


def choi_from_kraus(kraus, d=None):
    kraus = [linalg.as_matrix(A, square=True) for A in kraus]
    if d is None:
        d = kraus[0].shape[0]
    if any(A.shape != (d, d) for A in kraus):
        raise DimensionMismatch(f"Kraus operators must be {d}x{d}")
    dev = np.abs(sum(A.conj().T @ A for A in kraus) - np.eye(d)).max()
    if dev > PSD_TOL:
        raise NotTracePreserving(f"sum A^dag A deviates from I by {dev:.3e}")
    return QuantumChannel(_choi_of_kraus(kraus, d), kraus=tuple(kraus))


def kraus_from_choi(ch, threshold=1e-10):
    """Kraus operators from the spectral decomposition of ``d * J``."""
    if not isinstance(ch, QuantumChannel):
        ch = QuantumChannel(ch)
    d = ch.dim
    w, V = linalg.herm_eig(d * ch.choi)
    ops = []
    for k in range(len(w) - 1, -1, -1):
        if w[k] > threshold:
            ops.append(np.sqrt(w[k]) * linalg.me_unvec(V[:, k]))
    if not ops:
        raise InvalidChoi("Choi matrix has no eigenvalue above threshold")
    return ops


def unitary_channel(U):
    U = linalg.as_matrix(U, square=True)
    return choi_from_kraus([U])


def identity_channel(d):
    return unitary_channel(np.eye(d))


def erasure_channel(sigma):
    """Channel that replaces every input by ``sigma``; Choi matrix ``sigma (x) I / d``."""
    if not isinstance(sigma, QuantumState):
        sigma = QuantumState(sigma)
    d = sigma.dim
    return QuantumChannel(np.kron(sigma.rho, np.eye(d)) / d)


def depolarizing_channel(d):
    """Completely depolarizing channel, i.e. erasure to ``I/d``."""
    return erasure_channel(np.eye(d) / d)


def mix_channels(channels, weights):
    weights = np.asarray(weights, dtype=float)
    J = sum(w * ch.choi for w, ch in zip(weights, channels))
    return QuantumChannel(J)


def tensor_channels(E, F):
    """Choi matrix of ``E (x) F`` on the joint system.

    ``J_E (x) J_F`` lives on (B, A, B', A'); it is reordered to
    (B, B', A, A') so the result has the usual (output, input) layout.
    """
    dE, dF = E.dim, F.dim
    J = np.kron(E.choi, F.choi)
    J = linalg.permute_subsystems(J, (dE, dE, dF, dF), (0, 2, 1, 3))
    return QuantumChannel(J)


def weyl_unitaries(d):
    """The ``d^2`` shift-and-multiply unitaries ``Z^p W^q``, ordered by ``(p, q)``."""
    shift = np.roll(np.eye(d), 1, axis=0).astype(complex)
    omega = np.exp(2j * np.pi / d)
    phase = np.diag(omega ** np.arange(d))
    out = []
    for p in range(d):
        Zp = np.linalg.matrix_power(shift, p)
        for q in range(d):
            out.append(Zp @ np.linalg.matrix_power(phase, q))
    return out


def magic_basis():
    s = 1 / np.sqrt(2)
    return s * np.array(
        [
            [0, 0, 1, 1j],
            [-1, 1j, 0, 0],
            [1, 1j, 0, 0],
            [0, 0, 1, -1j],
        ],
        dtype=complex,
    )


# ---------------------------------------------------------------------- sampling


def random_unitary(d, rng=None):
    """Haar unitary from the QR decomposition of a complex Ginibre matrix."""
    rng = _rng(rng)
    G = rng.complex_normal((d, d))
    Q, R = np.linalg.qr(G)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def _inv_sqrt(H, floor, exc):
    w, V = np.linalg.eigh((H + H.conj().T) / 2)
    if w[0] <= floor:
        raise exc(f"smallest eigenvalue {w[0]:.3e} below floor {floor:g}")
    return (V / np.sqrt(w)) @ V.conj().T


def random_channel(d, rank=None, rng=None, max_tries=100):
    """Random channel with Choi rank ``rank`` (default ``d^2``).

    ``G`` is a ``d^2 x rank`` Ginibre matrix, ``K = G G^dag`` and the input
    marginal ``rho = tr_1 K`` is normalized away.
    """
    rng = _rng(rng)
    rank = d * d if rank is None else rank
    if not 1 <= rank <= d * d:
        raise ValueError(f"rank must be in [1, {d * d}]")
    for _ in range(max_tries):
        G = rng.complex_normal((d * d, rank))
        K = G @ G.conj().T
        rho = linalg.partial_trace(K, (d, d), 1)
        try:
            S = _inv_sqrt(rho, MARGINAL_FLOOR, SingularMarginal)
        except SingularMarginal:
            continue
        N = np.kron(np.eye(d), S)
        J = N @ K @ N / d
        return QuantumChannel((J + J.conj().T) / 2)
    raise SingularMarginal("could not sample an invertible marginal")


def random_state(d, rng=None):
    rng = _rng(rng)
    G = rng.complex_normal((d, d))
    R = G @ G.conj().T
    R = R / np.trace(R).real
    return QuantumState((R + R.conj().T) / 2)


def random_pure_state(d, rng=None):
    rng = _rng(rng)
    v = rng.complex_normal(d)
    v /= np.linalg.norm(v)
    return QuantumState(np.outer(v, v.conj()))


def random_povm(d, n, rng=None, max_tries=100):
    rng = _rng(rng)
    if n < 2:
        raise ValueError("a random POVM needs at least two outcomes")
    for _ in range(max_tries):
        P = [(lambda G: G @ G.conj().T)(rng.complex_normal((d, d))) for _ in range(n)]
        try:
            S = _inv_sqrt(sum(P), MARGINAL_FLOOR, SingularNormalizer)
        except SingularNormalizer:
            continue
        effects = []
        for E in P:
            E = S @ E @ S
            effects.append((E + E.conj().T) / 2)
        return Povm(effects)
    raise SingularNormalizer("could not sample an invertible normalizer")


def trivial_povm(d, n):
    return Povm([np.eye(d) / n for _ in range(n)])


def concentrated_povm(d, n, j):
    """Trivial POVM that always returns outcome ``j``."""
    return Povm([np.eye(d) if k == j else np.zeros((d, d)) for k in range(n)])


def is_boundary_channel(ch, tol=1e-8):
    return linalg.lambda_min(ch.choi) <= tol
