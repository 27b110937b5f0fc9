"""Invertible affine reparameterisations of weight space.

A map ``T(W) = A W B + K`` with invertible ``A`` and ``B`` sends weights in
one coordinate chart to another.  An objective ``R`` in the original chart
becomes ``R2(W2) = R(T^-1(W2))`` in the new one, and gradients transform as

    grad R(W) = A^T grad R2(T(W)) B^T.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg, risk as _risk
from .errors import DimensionMismatch, IllConditioned

FORM_A = "A"
FORM_B = "B"
GENERAL = "general"


@dataclass(frozen=True, eq=False)
class AffineMap:
    a: np.ndarray
    b: np.ndarray
    k_off: np.ndarray

    def __post_init__(self):
        a = linalg.as_matrix(self.a, "A")
        b = linalg.as_matrix(self.b, "B")
        k_off = linalg.as_matrix(self.k_off, "K")
        n = a.shape[0]
        for name, m in (("A", a), ("B", b), ("K", k_off)):
            if m.shape != (n, n):
                raise DimensionMismatch(f"{name} has shape {m.shape}, expected ({n}, {n})")
        for name, m in (("A", a), ("B", b)):
            cond = linalg.condition_estimate(m)
            if not cond < linalg.MAX_CONDITION:
                raise IllConditioned(
                    f"affine map factor {name} is not safely invertible (cond {cond:.3e})",
                    condition=cond,
                )
        for name, m in (("a", a), ("b", b), ("k_off", k_off)):
            m.setflags(write=False)
            object.__setattr__(self, name, m)

    @property
    def dim(self):
        return self.a.shape[0]

    def __call__(self, w):
        return apply(self, w)


def identity_map(dim):
    eye = np.eye(dim)
    return AffineMap(eye, eye, np.zeros((dim, dim)))


def form_b_map(dim):
    """The involution ``W -> I - W`` relating the two standard charts."""
    eye = np.eye(dim)
    return AffineMap(-eye, eye, eye)


def apply(t, w):
    w = linalg.as_matrix(w, "w")
    if w.shape != t.a.shape:
        raise DimensionMismatch(f"w has shape {w.shape}, map acts on {t.a.shape}")
    return t.a @ w @ t.b + t.k_off


def invert(t):
    """Inverse map ``W2 -> A^-1 (W2 - K) B^-1``."""
    a_inv = linalg.inverse(t.a, "A")
    b_inv = linalg.inverse(t.b, "B")
    return AffineMap(a_inv, b_inv, -a_inv @ t.k_off @ b_inv)


def compose(outer, inner):
    """The map ``W -> outer(inner(W))``."""
    if outer.dim != inner.dim:
        raise DimensionMismatch("cannot compose maps of different dimension")
    return AffineMap(
        outer.a @ inner.a,
        inner.b @ outer.b,
        outer.a @ inner.k_off @ outer.b + outer.k_off,
    )


def transform_gradient(t, grad_at_image):
    """Pull a gradient back through ``t``: ``A^T G B^T``.

    If ``grad_at_image`` is the gradient of ``R2`` at ``T(W)`` the result is
    the gradient of ``R2 o T`` at ``W``.
    """
    g = linalg.as_matrix(grad_at_image, "gradient")
    if g.shape != t.a.shape:
        raise DimensionMismatch(f"gradient has shape {g.shape}, map acts on {t.a.shape}")
    return t.a.T @ g @ t.b.T


def random_affine_map(dim, rng, max_condition=1e2):
    """Random well-conditioned map with ``A, B = I + 0.5 G``."""
    eye = np.eye(dim)

    def factor():
        while True:
            m = eye + 0.5 * rng.standard_normal((dim, dim))
            if linalg.condition_estimate(m) < max_condition:
                return m

    a = factor()
    b = factor()
    return AffineMap(a, b, rng.standard_normal((dim, dim)))


class Chart:
    """A coordinate chart on the set of affine combinations of two estimators.

    ``transform`` maps Form-A weights (the coefficient on ``theta2``) to this
    chart's weights.  In any chart, ``W`` corresponds to the combination
    ``(I - T^-1(W)) theta1 + T^-1(W) theta2``.
    """

    def __init__(self, tag, transform):
        self.tag = tag
        self.transform = transform
        self.inverse = invert(transform)

    @classmethod
    def form_a(cls, dim):
        return cls(FORM_A, identity_map(dim))

    @classmethod
    def form_b(cls, dim):
        chart = cls(FORM_B, form_b_map(dim))
        # Form B is its own inverse
        assert np.array_equal(chart.inverse.a, chart.transform.a)
        assert np.array_equal(chart.inverse.k_off, chart.transform.k_off)
        return chart

    @classmethod
    def general(cls, transform):
        return cls(GENERAL, transform)

    @classmethod
    def from_tag(cls, tag, dim):
        tag = tag.upper()
        if tag == FORM_A:
            return cls.form_a(dim)
        if tag == FORM_B:
            return cls.form_b(dim)
        raise ValueError(f"unknown chart {tag!r}")

    @property
    def dim(self):
        return self.transform.dim

    def to_base(self, w):
        return apply(self.inverse, w)

    def from_base(self, w):
        return apply(self.transform, w)

    def combination_matrices(self, w):
        """``(A1, A2)`` with ``A1 + A2 = I`` such that theta = A1 theta1 + A2 theta2."""
        a2 = self.to_base(w)
        return np.eye(self.dim) - a2, a2

    def __repr__(self):
        return f"Chart({self.tag!r}, dim={self.dim})"


class PullbackRisk:
    """The risk expressed in the coordinates of an affine map.

    Values are computed by substitution, ``R(T^-1(W2))``; gradients use the
    transformation law applied through the inverse map.
    """

    def __init__(self, spec, transform):
        if transform.dim != spec.dim:
            raise DimensionMismatch("map dimension does not match the risk")
        self.spec = spec
        self.transform = transform
        self.inverse = invert(transform)

    @property
    def dim(self):
        return self.spec.dim

    def value(self, w2):
        return _risk.risk(self.spec, apply(self.inverse, w2))

    def gradient(self, w2):
        base_grad = _risk.gradient(self.spec, apply(self.inverse, w2))
        return transform_gradient(self.inverse, base_grad)

    def fd_gradient(self, w2, step=None):
        return _risk.central_difference(self.value, linalg.as_matrix(w2), step)

    def __call__(self, w2):
        return self.value(w2)


def pullback_risk(spec, t):
    return PullbackRisk(spec, t)


def chart_risk(spec, chart):
    return PullbackRisk(spec, chart.transform)


def pullback_hessian(spec, t):
    """Hessian of the pulled-back risk in ``vec`` coordinates.

    With ``vec(W1) = J vec(W2) + const`` and ``J = B^-T kron A^-1`` the
    Hessian is ``J^T H J``.
    """
    inv = invert(t)
    jac = linalg.kron(inv.b.T, inv.a)
    h, _ = _risk.hessian(spec)
    return linalg.symmetrize(jac.T @ h @ jac)
