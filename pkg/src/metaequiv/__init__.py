"""Optimal affine combination of two estimators under trace-AMSE risk,
with numerical checks that the optimum does not depend on the chosen
affine parameterisation of the weights."""

from .errors import *  # noqa: F401,F403
from .linalg import SpdCertificate, cholesky_check, kron, random_spd, vec
from .model import (
    JointModel,
    RiskSpec,
    build_model,
    build_risk_spec,
    canonical_spec,
    make_spec,
    validate_assumptions,
)
from .reparam import AffineMap, Chart, PullbackRisk, pullback_risk, transform_gradient
from . import harness, linalg, model, reparam, risk, solver  # noqa: F401
from .solver import (
    CombinedEstimate,
    SolveResult,
    combine,
    solve,
    solve_closed_form,
    solve_iterative,
)

__version__ = "0.1.0"
