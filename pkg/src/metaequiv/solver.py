"""Minimisers of the (possibly reparameterised) risk, and estimator combination."""

from dataclasses import dataclass, field

import numpy as np

from . import linalg, risk as _risk
from .errors import DimensionMismatch, MaxIterationsExceeded, NonFiniteEncountered
from .reparam import Chart, PullbackRisk, transform_gradient

CLOSED_FORM = "closed"
ITERATIVE = "iterative"
METHODS = (CLOSED_FORM, ITERATIVE)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class SolveResult:
    w_opt: np.ndarray
    risk_at_opt: float
    grad_norm_at_opt: float
    iterations: int
    method: str
    history: tuple = field(default=(), repr=False)


@dataclass(frozen=True, eq=False)
class CombinedEstimate:
    theta_star: np.ndarray
    chart: Chart
    w_used: np.ndarray


def base_minimiser(spec):
    """Form-A minimiser ``(V1 - C - b1 delta_b^T) M^-1``."""
    m = spec.model
    rhs = m.v1 - m.c - np.outer(m.b1, spec.delta_b)
    # W M = rhs with M symmetric
    return linalg.solve(spec.m_matrix, rhs.T).T


def solve_closed_form(spec, chart=None):
    """Exact minimiser of the risk in ``chart`` (Form A by default).

    The base-chart solution is transported into the requested chart with the
    chart's affine map; the minimiser of a strictly convex objective moves
    with the coordinates.
    """
    chart = Chart.form_a(spec.dim) if chart is None else chart
    _risk.convexity_certificate(spec)
    w = chart.from_base(base_minimiser(spec))
    evaluator = PullbackRisk(spec, chart.transform)
    value = evaluator.value(w)
    return SolveResult(
        w_opt=w,
        risk_at_opt=value,
        grad_norm_at_opt=linalg.frobenius_norm(evaluator.gradient(w)),
        iterations=0,
        method=CLOSED_FORM,
        history=(value,),
    )


def solve_normal_equations(evaluator, refine_steps=2):
    """Minimise a quadratic objective by solving its first-order condition.

    The gradient of a quadratic is affine in the weights, so K^2 + 1
    gradient evaluations determine it exactly.  This is independent of any
    knowledge of how the objective was built.  A few steps of iterative
    refinement recover accuracy lost to conditioning of the linear system.
    """
    k = evaluator.dim
    n = k * k
    g0 = linalg.vec(evaluator.gradient(np.zeros((k, k))))
    jac = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        jac[:, j] = linalg.vec(evaluator.gradient(linalg.unvec(e, k))) - g0
    jac = linalg.symmetrize(jac)
    w = linalg.unvec(linalg.solve(jac, -g0), k)
    for _ in range(refine_steps):
        w = w - linalg.unvec(linalg.solve(jac, linalg.vec(evaluator.gradient(w))), k)
    value = evaluator.value(w)
    return SolveResult(
        w_opt=w,
        risk_at_opt=value,
        grad_norm_at_opt=linalg.frobenius_norm(evaluator.gradient(w)),
        iterations=0,
        method=CLOSED_FORM,
        history=(value,),
    )


def _line_search(f, grad, x, fx, gx, p, c1=1e-4, c2=0.1, max_trials=60):
    """Strong-Wolfe line search, zooming by secant steps on the slope.

    Once ``f`` changes by less than its rounding error the sufficient-decrease
    test cannot discriminate, so any step within that band counts as a
    decrease and acceptance is decided by the slope alone.  Returns
    ``(alpha, f_new, g_new)`` or ``None`` on failure.
    """
    dphi0 = float(np.dot(gx, p))
    noise = 8.0 * _EPS * (abs(fx) + 1.0)
    lo, dlo = 0.0, dphi0
    hi = dhi = None
    alpha = 1.0
    for _ in range(max_trials):
        xn = x + alpha * p
        fn = f(xn)
        if not np.isfinite(fn):
            hi, dhi = alpha, None
            alpha = 0.5 * (lo + alpha)
            continue
        gn = grad(xn)
        dphi = float(np.dot(gn, p))
        sufficient = fn <= fx + c1 * alpha * dphi0 or fn - fx <= noise
        if sufficient and abs(dphi) <= c2 * abs(dphi0):
            return alpha, fn, gn
        if not sufficient or dphi >= 0:
            hi, dhi = alpha, dphi
        else:
            lo, dlo = alpha, dphi
        if hi is None:
            # slope still negative: extrapolate the secant, at most x4
            trial = lo - dlo * (lo - 0.0) / (dlo - dphi0) if dlo > dphi0 else np.inf
            alpha = float(min(max(trial, 1.5 * lo), 4.0 * lo))
        else:
            width = hi - lo
            if dhi is not None and dhi > dlo:
                trial = lo - dlo * width / (dhi - dlo)
            else:
                trial = lo + 0.5 * width
            alpha = float(np.clip(trial, lo + 0.1 * width, hi - 0.1 * width))
    return None


def solve_iterative(evaluator, w0=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                    stationarity=None):
    """BFGS descent on an objective exposing ``value`` and ``gradient``.

    Stops when ``stationarity(gradient)`` is at most ``tol``; by default that
    is the Frobenius norm of the gradient.  For a badly conditioned chart the
    gradient cannot be driven below its own rounding floor, and measuring it
    in better-scaled coordinates (see :func:`base_chart_stationarity`) gives
    an attainable test.  The default start is ``W = 0``.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    k = evaluator.dim
    w0 = np.zeros((k, k)) if w0 is None else linalg.as_matrix(w0, "w0")
    if w0.shape != (k, k):
        raise DimensionMismatch(f"w0 has shape {w0.shape}, expected ({k}, {k})")

    def f(x):
        return evaluator.value(linalg.unvec(x, k))

    def grad(x):
        return linalg.vec(evaluator.gradient(linalg.unvec(x, k)))

    if stationarity is None:
        def measure(g):
            return float(np.linalg.norm(g))
    else:
        def measure(g):
            return float(stationarity(linalg.unvec(g, k)))

    x = linalg.vec(w0)
    fx = f(x)
    gx = grad(x)
    n = x.size
    h_inv = np.eye(n)
    history = [fx]
    it = 0
    gnorm = measure(gx)
    while gnorm > tol:
        if it >= max_iter:
            raise MaxIterationsExceeded(
                f"no convergence after {max_iter} iterations (gradient norm {gnorm:.3e})",
                w_last=linalg.unvec(x, k), grad_norm=gnorm,
            )
        if not (np.isfinite(fx) and np.all(np.isfinite(gx))):
            raise NonFiniteEncountered(f"non-finite objective or gradient at iteration {it}")
        p = -h_inv @ gx
        if np.dot(p, gx) >= 0:
            h_inv = np.eye(n)
            p = -gx
        step = _line_search(f, grad, x, fx, gx, p)
        if step is None and not np.array_equal(p, -gx):
            h_inv = np.eye(n)
            p = -gx
            step = _line_search(f, grad, x, fx, gx, p)
        if step is None:
            raise MaxIterationsExceeded(
                f"line search stalled at iteration {it} (gradient norm {gnorm:.3e})",
                w_last=linalg.unvec(x, k), grad_norm=gnorm,
            )
        alpha, fn, gn = step
        s = alpha * p
        y = gn - gx
        x, fx, gx = x + s, fn, gn
        it += 1
        history.append(fx)
        gnorm = measure(gx)

        sy = float(np.dot(s, y))
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            if it == 1:
                h_inv = (sy / float(np.dot(y, y))) * np.eye(n)
            rho = 1.0 / sy
            hy = h_inv @ y
            h_inv = (
                h_inv
                - rho * (np.outer(s, hy) + np.outer(hy, s))
                + (rho * rho * float(np.dot(y, hy)) + rho) * np.outer(s, s)
            )

    w = linalg.unvec(x, k)
    return SolveResult(
        w_opt=w,
        risk_at_opt=evaluator.value(w),
        grad_norm_at_opt=gnorm,
        iterations=it,
        method=ITERATIVE,
        history=tuple(history),
    )


def base_chart_stationarity(transform):
    """Gradient norm measured after pulling back through ``transform``.

    For ``R2 = R o T^-1`` this is the norm of the gradient of ``R`` at the
    corresponding base-chart point.
    """
    def measure(g):
        return linalg.frobenius_norm(transform_gradient(transform, g))
    return measure


def solve(spec, chart=None, method=CLOSED_FORM, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, w0=None):
    """Minimise the risk in ``chart`` by either method."""
    chart = Chart.form_a(spec.dim) if chart is None else chart
    if method == CLOSED_FORM:
        return solve_closed_form(spec, chart)
    if method == ITERATIVE:
        _risk.convexity_certificate(spec)
        return solve_iterative(
            PullbackRisk(spec, chart.transform), w0, tol, max_iter,
            stationarity=base_chart_stationarity(chart.transform),
        )
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def combine(theta1, theta2, chart, w):
    """Combined estimate for weights ``w`` expressed in ``chart``."""
    k = chart.dim
    theta1 = linalg.as_vector(theta1, k, "theta1")
    theta2 = linalg.as_vector(theta2, k, "theta2")
    w = linalg.as_matrix(w, "w")
    if w.shape != (k, k):
        raise DimensionMismatch(f"w has shape {w.shape}, expected ({k}, {k})")
    if chart.tag == "A":
        theta = theta1 - w @ theta1 + w @ theta2
    elif chart.tag == "B":
        theta = w @ theta1 + theta2 - w @ theta2
    else:
        a1, a2 = chart.combination_matrices(w)
        theta = a1 @ theta1 + a2 @ theta2
    return CombinedEstimate(theta_star=theta, chart=chart, w_used=w)
