"""Dense matrix kernel.

Matrices are plain 2-D float64 numpy arrays; vectors are 1-D arrays.  The
vectorisation operator stacks columns, so that

    tr(A X B X^T) = vec(X)^T (B^T kron A) vec(X)

holds regardless of numpy's row-major storage.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .errors import (
    DimensionMismatch,
    IllConditioned,
    NotPositiveDefinite,
    NotSquare,
    NotSymmetric,
)

SYMMETRY_RTOL = 1e-10
PD_RTOL = 1e-10
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class SpdCertificate:
    """Evidence that a matrix is symmetric positive definite."""

    min_eigenvalue: float
    condition_estimate: float

    @property
    def max_eigenvalue(self):
        return self.min_eigenvalue * self.condition_estimate


def as_matrix(m, name="matrix"):
    """Coerce ``m`` to a finite 2-D float array (scalars become 1x1)."""
    a = np.array(m, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if a.size == 0:
        raise DimensionMismatch(f"{name} must be non-empty")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def as_vector(v, dim=None, name="vector"):
    a = np.array(v, dtype=float).reshape(-1)
    if dim is not None and a.shape != (dim,):
        raise DimensionMismatch(f"{name} must have length {dim}, got {a.size}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def symmetry_tolerance(m):
    return SYMMETRY_RTOL * (1.0 + np.max(np.abs(m)))


def is_symmetric(m):
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.T)) <= symmetry_tolerance(m)


def symmetrize(m):
    return 0.5 * (m + m.T)


def cholesky_check(m, name="matrix"):
    """Validate that ``m`` is symmetric positive definite.

    The matrix must be symmetric to within ``1e-10 * (1 + max|m_ij|)``.  It is
    accepted when the Cholesky factorisation succeeds *and* the smallest
    eigenvalue exceeds ``1e-10`` times the largest eigenvalue magnitude, so
    numerically singular matrices are rejected rather than certified.

    Returns
    -------
    SpdCertificate

    Raises
    ------
    NotSquare, NotSymmetric, NotPositiveDefinite
    """
    m = as_matrix(m, name)
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"{name} is {m.shape[0]}x{m.shape[1]}, expected square")
    if not is_symmetric(m):
        raise NotSymmetric(f"{name} is not symmetric within tolerance")
    s = symmetrize(m)
    _, info = lapack.dpotrf(s, lower=True)
    if info > 0:
        raise NotPositiveDefinite(
            f"{name} is not positive definite: nonpositive pivot at index {info - 1}",
            index=info - 1,
        )
    eig = np.linalg.eigvalsh(s)
    lo, hi = eig[0], np.max(np.abs(eig))
    if not lo > PD_RTOL * hi:
        raise NotPositiveDefinite(
            f"{name} is not positive definite within tolerance (min eigenvalue {lo:.3e})"
        )
    return SpdCertificate(min_eigenvalue=float(lo), condition_estimate=float(eig[-1] / lo))


def eig_extremes(m):
    """(min, max) eigenvalue of a symmetric matrix."""
    eig = np.linalg.eigvalsh(symmetrize(as_matrix(m)))
    return float(eig[0]), float(eig[-1])


def min_eigenvalue(m):
    return eig_extremes(m)[0]


def max_eigenvalue(m):
    return eig_extremes(m)[1]


def kron(a, b):
    """Kronecker product; block (i, j) of the result is ``a[i, j] * b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def vec(m):
    """Column-stacking vectorisation, returned as a 1-D array."""
    return as_matrix(m).reshape(-1, order="F")


def unvec(v, rows, cols=None):
    cols = rows if cols is None else cols
    return np.asarray(v, dtype=float).reshape(rows, cols, order="F")


def frobenius_norm(m):
    return float(np.linalg.norm(m, "fro"))


def two_norm(v):
    return float(np.linalg.norm(np.asarray(v, dtype=float).reshape(-1)))


def condition_estimate(a):
    return float(np.linalg.cond(a))


def _check_conditioning(a, name):
    a = as_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise NotSquare(f"{name} is {a.shape[0]}x{a.shape[1]}, expected square")
    cond = condition_estimate(a)
    if not cond < MAX_CONDITION:
        raise IllConditioned(f"{name} has condition estimate {cond:.3e}", condition=cond)
    return a


def solve(a, b):
    """Solve ``a x = b``; ``b`` may be a vector or a matrix."""
    a = _check_conditioning(a, "coefficient matrix")
    b = np.asarray(b, dtype=float)
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"cannot solve {a.shape} system with rhs {b.shape}")
    return np.linalg.solve(a, b)


def inverse(a, name="matrix"):
    a = _check_conditioning(a, name)
    return np.linalg.inv(a)


def random_spd(dim, seed, ridge=1.0):
    """Seeded SPD matrix ``G G^T + ridge I`` with ``G`` standard normal."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if not ridge > 0:
        raise ValueError("ridge must be > 0")
    g = np.random.default_rng(seed).standard_normal((dim, dim))
    return symmetrize(g @ g.T) + ridge * np.eye(dim)
