"""The two-estimator combination problem.

Everything is expressed in the sqrt(N)-scaled asymptotic regime: ``v1``,
``v2`` and ``c`` are the blocks of the joint asymptotic covariance of the
scaled errors, and ``b1``, ``b2`` are the scaled asymptotic biases.
"""

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    AssumptionA1Violated,
    AssumptionA2Violated,
    DimensionMismatch,
    MetaEquivError,
    MNotSpd,
    OmegaNotSpd,
)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class JointModel:
    v1: np.ndarray
    v2: np.ndarray
    c: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    sigma: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return self.v1.shape[0]


@dataclass(frozen=True, eq=False)
class RiskSpec:
    """A validated model together with the risk weighting matrix.

    ``lam = delta_b delta_b^T`` and ``m_matrix = v1 + v2 - c - c^T + lam``
    are computed once here; the risk is quadratic in the weights and these
    are its only problem-dependent coefficients.
    """

    model: JointModel
    omega: np.ndarray
    omega_inv: np.ndarray = field(repr=False)
    delta_b: np.ndarray = field(repr=False)
    lam: np.ndarray = field(repr=False)
    m_matrix: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return self.model.dim


def assemble_sigma(v1, v2, c):
    return np.block([[v1, c], [c.T, v2]])


def build_model(v1, v2, c, b1=None, b2=None):
    """Assemble and validate a :class:`JointModel`.

    Raises ``AssumptionA1Violated`` if either variance block is not SPD and
    ``AssumptionA2Violated`` if the joint covariance is not SPD.
    """
    v1 = linalg.as_matrix(v1, "v1")
    k = v1.shape[0]
    v2 = linalg.as_matrix(v2, "v2")
    c = linalg.as_matrix(c, "c")
    for name, m in (("v1", v1), ("v2", v2), ("c", c)):
        if m.shape != (k, k):
            raise DimensionMismatch(f"{name} has shape {m.shape}, expected ({k}, {k})")
    b1 = np.zeros(k) if b1 is None else linalg.as_vector(b1, k, "b1")
    b2 = np.zeros(k) if b2 is None else linalg.as_vector(b2, k, "b2")

    for name, m in (("v1", v1), ("v2", v2)):
        try:
            linalg.cholesky_check(m, name)
        except MetaEquivError as exc:
            raise AssumptionA1Violated(f"assumption A1 violated: {exc}", which=name) from exc

    v1, v2 = linalg.symmetrize(v1), linalg.symmetrize(v2)
    sigma = assemble_sigma(v1, v2, c)
    model = JointModel(
        v1=_frozen(v1), v2=_frozen(v2), c=_frozen(c),
        b1=_frozen(b1), b2=_frozen(b2), sigma=_frozen(sigma),
    )
    validate_assumptions(model)
    return model


def validate_assumptions(model):
    """Certificate that the joint covariance is SPD (assumption A2)."""
    try:
        return linalg.cholesky_check(model.sigma, "sigma")
    except MetaEquivError as exc:
        raise AssumptionA2Violated(f"assumption A2 violated: {exc}") from exc


def build_risk_spec(model, omega=None):
    """Attach the weighting matrix (identity by default) and cache M."""
    k = model.dim
    omega = np.eye(k) if omega is None else linalg.as_matrix(omega, "omega")
    if omega.shape != (k, k):
        raise DimensionMismatch(f"omega has shape {omega.shape}, expected ({k}, {k})")
    try:
        linalg.cholesky_check(omega, "omega")
    except MetaEquivError as exc:
        raise OmegaNotSpd(f"omega is not SPD: {exc}") from exc
    omega = linalg.symmetrize(omega)
    omega_inv = linalg.symmetrize(linalg.inverse(omega, "omega"))

    delta_b = model.b2 - model.b1
    lam = np.outer(delta_b, delta_b)
    m = model.v1 + model.v2 - model.c - model.c.T + lam
    m = linalg.symmetrize(m)
    try:
        linalg.cholesky_check(m, "M")
    except MetaEquivError as exc:
        # unreachable in exact arithmetic when A2 holds
        raise MNotSpd(f"M is not SPD: {exc}") from exc
    return RiskSpec(
        model=model, omega=_frozen(omega), omega_inv=_frozen(omega_inv),
        delta_b=_frozen(delta_b), lam=_frozen(lam), m_matrix=_frozen(m),
    )


def make_spec(v1, v2, c, b1=None, b2=None, omega=None):
    """Shorthand for ``build_risk_spec(build_model(...), omega)``."""
    return build_risk_spec(build_model(v1, v2, c, b1, b2), omega)


def canonical_spec():
    """The K=1 instance v1=2, v2=1, c=0.5, no bias, omega=1."""
    return make_spec([[2.0]], [[1.0]], [[0.5]])
