"""Trace-AMSE risk of the combined estimator and its derivatives."""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, MNotSpd

FD_BASE_STEP = np.finfo(float).eps ** (1.0 / 3.0)


@dataclass(frozen=True)
class ConvexityCertificate:
    hessian_min_eigenvalue: float
    m_min_eigenvalue: float
    omega_inv_min_eigenvalue: float


def _weights(spec, w):
    w = linalg.as_matrix(w, "w")
    if w.shape != (spec.dim, spec.dim):
        raise DimensionMismatch(f"w has shape {w.shape}, expected ({spec.dim}, {spec.dim})")
    return w


def combined_bias(spec, w):
    """Asymptotic bias (I - W) b1 + W b2 of the combined estimator."""
    w = _weights(spec, w)
    m = spec.model
    return m.b1 - w @ m.b1 + w @ m.b2


def amse(spec, w):
    """AMSE matrix of the combination ``(I - W) theta1 + W theta2``."""
    w = _weights(spec, w)
    m = spec.model
    iw = np.eye(spec.dim) - w
    out = (
        iw @ m.v1 @ iw.T
        + w @ m.v2 @ w.T
        + iw @ m.c @ w.T
        + w @ m.c.T @ iw.T
    )
    bias = combined_bias(spec, w)
    out = out + np.outer(bias, bias)
    return linalg.symmetrize(out)


def risk(spec, w):
    """Scalar risk ``tr(omega^-1 AMSE(W))``."""
    return float(np.sum(spec.omega_inv * amse(spec, w)))


def gradient(spec, w):
    """Matrix gradient of :func:`risk`.

    Expanding the AMSE around W gives

        grad R(W) = 2 omega^-1 (C - V1 + W M + b1 delta_b^T)

    which vanishes only at the unique minimiser.
    """
    w = _weights(spec, w)
    m = spec.model
    inner = m.c - m.v1 + w @ spec.m_matrix + np.outer(m.b1, spec.delta_b)
    return 2.0 * spec.omega_inv @ inner


def central_difference(f, x, step=None):
    """Entrywise central-difference gradient of a scalar function of a matrix.

    ``step`` may be a scalar, an array shaped like ``x``, or ``None`` for the
    default ``cbrt(eps) * (1 + |x_ij|)``.
    """
    x = np.asarray(x, dtype=float)
    if step is None:
        h = FD_BASE_STEP * (1.0 + np.abs(x))
    else:
        h = np.broadcast_to(np.asarray(step, dtype=float), x.shape)
    if np.any(h <= 0):
        raise ValueError("finite-difference step must be > 0")
    g = np.empty_like(x)
    for idx in np.ndindex(x.shape):
        xp = x.copy()
        xm = x.copy()
        xp[idx] += h[idx]
        xm[idx] -= h[idx]
        g[idx] = (f(xp) - f(xm)) / (2.0 * h[idx])
    return g


def fd_gradient(spec, w, step=None):
    """Finite-difference oracle for :func:`gradient`."""
    w = _weights(spec, w)
    return central_difference(lambda x: risk(spec, x), w, step)


def convexity_certificate(spec):
    m_min = linalg.min_eigenvalue(spec.m_matrix)
    oi_min = linalg.min_eigenvalue(spec.omega_inv)
    h_min = linalg.min_eigenvalue(2.0 * linalg.kron(spec.m_matrix, spec.omega_inv))
    if not (m_min > 0 and oi_min > 0 and h_min > 0):
        raise MNotSpd(f"Hessian is not positive definite (min eigenvalue {h_min:.3e})")
    return ConvexityCertificate(
        hessian_min_eigenvalue=h_min,
        m_min_eigenvalue=m_min,
        omega_inv_min_eigenvalue=oi_min,
    )


def hessian(spec):
    """Hessian of the risk in ``vec(W)`` coordinates, ``2 (M kron omega^-1)``.

    The risk is quadratic so this does not depend on W.  Returns the dense
    K^2 x K^2 matrix and a :class:`ConvexityCertificate`.
    """
    h = 2.0 * linalg.kron(spec.m_matrix, spec.omega_inv)
    return h, convexity_certificate(spec)
