"""Dense complex linear algebra for desk-scale quantum states (d <= 1024)."""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotHermitian

HERMITIAN_TOL = 1e-10
EIGENVALUE_TOL = 1e-9
CLAMP_TOL = 1e-8


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d array, got shape {a.shape}")
    return a


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.all(np.abs(a - a.conj().T) <= tol))


def kron(a, b) -> np.ndarray:
    """Kronecker product; ``a`` indexes the most significant block."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*factors) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, as_matrix(f))
    return out


def hermitian_eigenvalues(m) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, sorted descending.

    Raises:
        NotHermitian: if ``m`` is not square or fails the symmetry check.
    """
    a = as_matrix(m)
    if not is_hermitian(a):
        raise NotHermitian("matrix is not Hermitian within %.0e" % HERMITIAN_TOL)
    # symmetrize away the sub-tolerance antihermitian part
    vals = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    return vals[::-1].copy()


def clamp_spectrum(values, tol: float = CLAMP_TOL) -> np.ndarray:
    """Zero out small negative eigenvalues caused by round-off."""
    v = np.array(values, dtype=float)
    if v.size and v.min() < -tol:
        raise ValueError(f"eigenvalue {v.min():.3e} below clamp tolerance -{tol:.0e}")
    v[v < 0] = 0.0
    return v


def trace_product(a, b) -> complex:
    """Tr(a @ b) without forming the product."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0] or a.shape[0] != b.shape[1]:
        raise DimensionMismatch(f"cannot trace product of {a.shape} and {b.shape}")
    return complex(np.einsum("ij,ji->", a, b))
