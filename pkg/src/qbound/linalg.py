"""Dense complex linear algebra used throughout qbound.

Matrices are plain ``numpy.ndarray`` objects with complex dtype. Tensor
products follow ``numpy.kron`` ordering: in ``kron(A, B)`` the factor ``A``
is subsystem 1. For Choi matrices subsystem 1 is the channel output.

The vectorization used everywhere is

    me_vec(U) = (U (x) I) sum_j |j>|j>,

i.e. the component at composite index ``k*d + j`` is ``U[k, j]``. This is a
row-major flatten.
"""
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NonFinite, NonHermitian

HERMITIAN_RTOL = 1e-10


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def as_matrix(M, square=False):
    """Convert to a finite 2-D complex array, raising on NaN/Inf."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFinite("matrix has NaN or Inf entries")
    return A


def hermitian_part(H, rtol=HERMITIAN_RTOL):
    """Check ``H`` is Hermitian up to a relative tolerance and return (H + H^dag)/2."""
    A = as_matrix(H, square=True)
    scale = np.abs(A).max() if A.size else 0.0
    asym = np.abs(A - A.conj().T).max() if A.size else 0.0
    if asym > rtol * max(scale, 1e-300):
        raise NonHermitian(f"|H - H^dag|_max = {asym:.3e} exceeds {rtol:g} * |H|_max")
    return (A + A.conj().T) / 2


def herm_eig(H, rtol=HERMITIAN_RTOL):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    The input is symmetrized before decomposition so results do not depend on
    roundoff in the anti-Hermitian part.
    """
    A = hermitian_part(H, rtol)
    values, vectors = np.linalg.eigh(A)
    return EigenDecomposition(values, vectors)


def eigvalsh(H, rtol=HERMITIAN_RTOL):
    return np.linalg.eigvalsh(hermitian_part(H, rtol))


def lambda_min(H):
    return float(eigvalsh(H)[0])


def lambda_max(H):
    return float(eigvalsh(H)[-1])


def psd_function(H, fn, rtol=HERMITIAN_RTOL):
    """Apply ``fn`` to the spectrum of a Hermitian matrix."""
    w, V = herm_eig(H, rtol)
    return (V * fn(w)) @ V.conj().T


def sqrtm_psd(H):
    return psd_function(H, lambda w: np.sqrt(np.clip(w, 0.0, None)))


def kron(A, B):
    return np.kron(as_matrix(A), as_matrix(B))


def partial_trace(M, dims, which):
    """Trace out subsystem ``which`` (1 or 2) of a bipartite operator.

    ``dims = (d1, d2)`` with subsystem 1 the left factor of ``kron``.
    """
    d1, d2 = dims
    M = as_matrix(M, square=True)
    if M.shape[0] != d1 * d2:
        raise DimensionMismatch(f"matrix of size {M.shape[0]} does not match dims {dims}")
    T = M.reshape(d1, d2, d1, d2)
    if which == 1:
        return np.einsum("ijik->jk", T)
    if which == 2:
        return np.einsum("ijkj->ik", T)
    raise ValueError(f"which must be 1 or 2, got {which!r}")


def permute_subsystems(M, dims, perm):
    """Reorder the tensor factors of a square operator.

    ``perm[k]`` is the index of the input factor placed at position ``k``.
    """
    dims = list(dims)
    n = len(dims)
    M = as_matrix(M, square=True)
    T = M.reshape(dims + dims)
    T = T.transpose(list(perm) + [n + p for p in perm])
    size = int(np.prod(dims))
    return T.reshape(size, size)


def me_vec(U):
    U = as_matrix(U, square=True)
    return U.reshape(-1).copy()


def me_unvec(x):
    x = np.asarray(x, dtype=complex).reshape(-1)
    d = int(round(np.sqrt(x.size)))
    if d * d != x.size:
        raise DimensionMismatch(f"vector length {x.size} is not a perfect square")
    return x.reshape(d, d).copy()


def _fix_phases(U, Vh):
    # largest-magnitude entry of each left singular vector made real positive
    idx = np.argmax(np.abs(U), axis=0)
    ph = U[idx, np.arange(U.shape[1])]
    ph = ph / np.abs(ph)
    return U * ph.conj(), Vh * ph[:, None]


def polar_unitary(M):
    """Unitary factor of the polar decomposition of a square matrix.

    Returns the unitary maximizing ``Re tr(U^dag M)``; the maximum equals the
    sum of singular values of ``M``.
    """
    M = as_matrix(M, square=True)
    U, _, Vh = np.linalg.svd(M)
    U, Vh = _fix_phases(U, Vh)
    return U @ Vh


def trace_norm(M):
    return float(np.linalg.svd(as_matrix(M), compute_uv=False).sum())


def is_unitary(U, tol=1e-10):
    U = as_matrix(U, square=True)
    return np.abs(U.conj().T @ U - np.eye(U.shape[0])).max() <= tol
