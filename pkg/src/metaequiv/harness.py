"""Simulation harness: paired-chart verification runs, sweeps and reports."""

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import linalg, model, reparam, risk as _risk, solver
from .reparam import Chart

REPORT_COLUMNS = (
    "seed", "dim", "method",
    "weight_covariance_residual", "estimator_gap", "risk_gap",
    "grad_check_rel_err", "hessian_min_eig", "pass",
)
SWEEP_COLUMNS = ("w", "f", "g")
THREADS_ENV = "META_EQUIV_THREADS"


@dataclass(frozen=True)
class Thresholds:
    weight_covariance: float
    estimator_gap: float
    risk_gap: float
    grad_check: float = 1e-5

    @classmethod
    def for_method(cls, method):
        if method == solver.ITERATIVE:
            return cls(1e-6, 1e-5, 1e-10)
        if method == solver.CLOSED_FORM:
            return cls(1e-10, 1e-10, 1e-10)
        raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class VerificationReport:
    seed: int
    dim: int
    solver_method: str
    weight_covariance_residual: float
    estimator_gap: float
    risk_gap: float
    grad_check_rel_err: float
    hessian_min_eig: float
    passed: bool
    w_a_opt: np.ndarray = field(repr=False, compare=False)
    w_b_opt: np.ndarray = field(repr=False, compare=False)

    def row(self):
        return {
            "seed": self.seed, "dim": self.dim, "method": self.solver_method,
            "weight_covariance_residual": self.weight_covariance_residual,
            "estimator_gap": self.estimator_gap,
            "risk_gap": self.risk_gap,
            "grad_check_rel_err": self.grad_check_rel_err,
            "hessian_min_eig": self.hessian_min_eig,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class EquivarianceReport:
    """Per-map transport residuals ``||argmin R2 - T(argmin R)|| / (1 + ||T(argmin R)||)``
    and the gap between the combined estimates produced in each chart."""

    seed: int
    dim: int
    solver_method: str
    residuals: list
    estimator_gaps: list

    @property
    def max_residual(self):
        return max(self.residuals)

    @property
    def max_estimator_gap(self):
        return max(self.estimator_gaps)


@dataclass(frozen=True)
class SweepData:
    grid: np.ndarray
    f_values: np.ndarray
    g_values: np.ndarray
    mirror_values: np.ndarray = field(repr=False)

    @property
    def argmin_f(self):
        return float(self.grid[np.argmin(self.f_values)])

    @property
    def argmin_g(self):
        return float(self.grid[np.argmin(self.g_values)])

    @property
    def step(self):
        return float(self.grid[1] - self.grid[0])

    @property
    def mirror_residual(self):
        """Largest ``|g(w) - f(1 - w)|`` over the grid."""
        return float(np.max(np.abs(self.g_values - self.mirror_values)))

    @property
    def mirror_ok(self):
        return self.mirror_residual <= 1e-10 * (1.0 + float(np.max(np.abs(self.f_values))))

    @property
    def minima_ok(self):
        return abs(self.argmin_g - (1.0 - self.argmin_f)) <= self.step * (1.0 + 1e-9)


@dataclass(frozen=True)
class GradCheckResult:
    trials: int
    max_rel_err: float
    threshold: float

    @property
    def passed(self):
        return self.max_rel_err <= self.threshold


def random_spec(dim, seed):
    """Random instance: one SPD 2K x 2K covariance partitioned into blocks,
    omega = I and zero bias."""
    sigma = linalg.random_spd(2 * dim, seed, ridge=0.05 * 2 * dim)
    return model.make_spec(sigma[:dim, :dim], sigma[dim:, dim:], sigma[:dim, dim:])


def placeholder_estimates(dim):
    return np.arange(1.0, dim + 1.0), np.arange(dim + 1.0, 2.0 * dim + 1.0)


def relative_grad_error(analytic, numeric):
    return linalg.frobenius_norm(analytic - numeric) / (1.0 + linalg.frobenius_norm(analytic))


def grad_check(spec, trials=100, seed=0, gradient=None, step=None):
    """Compare an analytic gradient against central differences at random W."""
    gradient = _risk.gradient if gradient is None else gradient
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        w = rng.standard_normal((spec.dim, spec.dim))
        err = relative_grad_error(gradient(spec, w), _risk.fd_gradient(spec, w, step))
        worst = max(worst, err)
    return GradCheckResult(trials=trials, max_rel_err=worst, threshold=1e-5)


def fd_halving_ratio(f, grad, x, step):
    """Ratio of central-difference errors at ``step`` and ``step / 2``.

    A second-order scheme with dominant truncation error gives a ratio near 4.
    """
    x = np.asarray(x, dtype=float)
    exact = grad(x)
    e1 = linalg.frobenius_norm(_risk.central_difference(f, x, step) - exact)
    e2 = linalg.frobenius_norm(_risk.central_difference(f, x, 0.5 * step) - exact)
    return e1 / e2 if e2 > 0 else np.inf


def run_verification(dim, seed, method=solver.ITERATIVE, thresholds=None, spec=None,
                     theta1=None, theta2=None):
    """Solve the risk in Form A and Form B and measure the invariance residuals."""
    thresholds = Thresholds.for_method(method) if thresholds is None else thresholds
    spec = random_spec(dim, seed) if spec is None else spec
    dim = spec.dim
    default1, default2 = placeholder_estimates(dim)
    theta1 = default1 if theta1 is None else theta1
    theta2 = default2 if theta2 is None else theta2

    chart_a = Chart.form_a(dim)
    chart_b = Chart.form_b(dim)
    res_a = solver.solve(spec, chart_a, method)
    res_b = solver.solve(spec, chart_b, method)
    est_a = solver.combine(theta1, theta2, chart_a, res_a.w_opt)
    est_b = solver.combine(theta1, theta2, chart_b, res_b.w_opt)

    wcov = linalg.frobenius_norm(res_b.w_opt - (np.eye(dim) - res_a.w_opt))
    est_gap = linalg.two_norm(est_a.theta_star - est_b.theta_star)
    risk_gap = abs(res_a.risk_at_opt - res_b.risk_at_opt)
    w_probe = np.random.default_rng(seed).standard_normal((dim, dim))
    gerr = relative_grad_error(_risk.gradient(spec, w_probe), _risk.fd_gradient(spec, w_probe))
    _, cert = _risk.hessian(spec)

    passed = (
        wcov <= thresholds.weight_covariance
        and est_gap <= thresholds.estimator_gap
        and risk_gap <= thresholds.risk_gap
        and gerr <= thresholds.grad_check
        and cert.hessian_min_eigenvalue > 0
    )
    return VerificationReport(
        seed=seed, dim=dim, solver_method=method,
        weight_covariance_residual=wcov, estimator_gap=est_gap, risk_gap=risk_gap,
        grad_check_rel_err=gerr, hessian_min_eig=cert.hessian_min_eigenvalue,
        passed=bool(passed), w_a_opt=res_a.w_opt, w_b_opt=res_b.w_opt,
    )


def thread_count():
    raw = os.environ.get(THREADS_ENV)
    if raw:
        return max(1, int(raw))
    return min(8, os.cpu_count() or 1)


def run_batch(dim, seeds, method=solver.ITERATIVE, thresholds=None, workers=None, spec=None):
    """Verification reports for each seed, sorted by seed."""
    workers = thread_count() if workers is None else workers
    seeds = sorted(seeds)

    def one(seed):
        return run_verification(dim, seed, method, thresholds, spec=spec)

    if workers <= 1 or len(seeds) == 1:
        reports = [one(s) for s in seeds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(one, seeds))
    return sorted(reports, key=lambda r: r.seed)


def run_general_equivariance(dim, seed, n_maps=50, method=solver.CLOSED_FORM, spec=None):
    """Check that minimisers move with random affine reparameterisations.

    For each map T the pulled-back risk is minimised from scratch and the
    result compared with T applied to the base minimiser.  The combined
    estimate read off in the new chart is compared with the base one.
    """
    if n_maps < 1:
        raise ValueError("n_maps must be >= 1")
    spec = random_spec(dim, seed) if spec is None else spec
    dim = spec.dim
    theta1, theta2 = placeholder_estimates(dim)
    rng = np.random.default_rng([seed, 0x5EED])

    if method == solver.CLOSED_FORM:
        w_base = solver.base_minimiser(spec)
    else:
        w_base = solver.solve(spec, method=method).w_opt
    base_est = solver.combine(theta1, theta2, Chart.form_a(dim), w_base).theta_star

    residuals, gaps = [], []
    for _ in range(n_maps):
        t = reparam.random_affine_map(dim, rng)
        evaluator = reparam.pullback_risk(spec, t)
        if method == solver.CLOSED_FORM:
            w2 = solver.solve_normal_equations(evaluator).w_opt
        else:
            w2 = solver.solve_iterative(
                evaluator, stationarity=solver.base_chart_stationarity(t)
            ).w_opt
        target = reparam.apply(t, w_base)
        residuals.append(linalg.frobenius_norm(w2 - target) / (1.0 + linalg.frobenius_norm(target)))
        est = solver.combine(theta1, theta2, Chart.general(t), w2).theta_star
        gaps.append(linalg.two_norm(est - base_est))
    return EquivarianceReport(seed=seed, dim=dim, solver_method=method,
                              residuals=residuals, estimator_gaps=gaps)


def run_sweep(spec, grid_min=0.0, grid_max=1.0, n_points=1001):
    """Risk along the scalar line ``W = w I`` in Form A (f) and Form B (g)."""
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    eye = np.eye(spec.dim)
    form_b = reparam.chart_risk(spec, Chart.form_b(spec.dim))
    grid = np.linspace(grid_min, grid_max, n_points)
    f = np.array([_risk.risk(spec, w * eye) for w in grid])
    g = np.array([form_b.value(w * eye) for w in grid])
    mirror = np.array([_risk.risk(spec, (1.0 - w) * eye) for w in grid])
    return SweepData(grid=grid, f_values=f, g_values=g, mirror_values=mirror)


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_reports_csv(reports, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for r in reports:
        row = r.row()
        writer.writerow([_fmt(row[c]) for c in REPORT_COLUMNS])


def write_sweep_csv(sweep, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for w, f, g in zip(sweep.grid, sweep.f_values, sweep.g_values):
        writer.writerow([_fmt(w), _fmt(f), _fmt(g)])


def summarize(reports):
    """Largest value of each residual over ``reports``."""
    keys = ("weight_covariance_residual", "estimator_gap", "risk_gap", "grad_check_rel_err")
    out = {k: max(getattr(r, k) for r in reports) for k in keys}
    out["hessian_min_eig"] = min(r.hessian_min_eig for r in reports)
    out["passed"] = sum(r.passed for r in reports)
    out["total"] = len(reports)
    return out
