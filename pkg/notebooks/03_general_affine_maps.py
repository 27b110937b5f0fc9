"""
Arbitrary affine reparameterisations
====================================

Any invertible map T(W) = A W B + K can serve as a chart.  Minimising the
risk in the new coordinates lands on T applied to the original minimiser,
and reading the estimate off through the chart gives the same estimate.
"""

import numpy as np

from metaequiv import harness, linalg, reparam, risk, solver
from metaequiv.reparam import Chart

spec = harness.random_spec(3, seed=0)
rng = np.random.default_rng(1)
t = reparam.random_affine_map(3, rng)

w_base = solver.solve_closed_form(spec).w_opt
ev = reparam.pullback_risk(spec, t)
w_new = solver.solve_iterative(ev, stationarity=solver.base_chart_stationarity(t)).w_opt
print("||argmin R2 - T(argmin R)|| =", linalg.frobenius_norm(w_new - reparam.apply(t, w_base)))

# gradients obey grad R(W) = A^T grad R2(T(W)) B^T
w = rng.standard_normal((3, 3))
lhs = risk.gradient(spec, w)
rhs = reparam.transform_gradient(t, ev.gradient(reparam.apply(t, w)))
print("gradient law residual:", linalg.frobenius_norm(lhs - rhs))

theta1, theta2 = harness.placeholder_estimates(3)
print(solver.combine(theta1, theta2, Chart.form_a(3), w_base).theta_star)
print(solver.combine(theta1, theta2, Chart.general(t), w_new).theta_star)

rep = harness.run_general_equivariance(3, seed=0, n_maps=50)
print("50 maps, worst relative residual:", rep.max_residual)
