"""
Combining two scalar estimators
===============================

The smallest instance: two estimators of one parameter with asymptotic
variances 2 and 1 and covariance 0.5.  We find the optimal weight in both
standard charts and check that they pick the same combined estimate.
"""

import numpy as np

from metaequiv import model, risk, solver
from metaequiv.reparam import Chart

spec = model.canonical_spec()

# Form A weights theta2, Form B weights theta1
res_a = solver.solve_closed_form(spec, Chart.form_a(1))
res_b = solver.solve_closed_form(spec, Chart.form_b(1))
print("Form A optimum:", res_a.w_opt[0, 0], "risk", res_a.risk_at_opt)
print("Form B optimum:", res_b.w_opt[0, 0], "risk", res_b.risk_at_opt)

# the weights differ, the estimate does not
theta1, theta2 = [1.0], [3.0]
print("Form A estimate:", solver.combine(theta1, theta2, Chart.form_a(1), res_a.w_opt).theta_star)
print("Form B estimate:", solver.combine(theta1, theta2, Chart.form_b(1), res_b.w_opt).theta_star)

# the same answer by brute force on a fine grid
grid = np.linspace(-1, 2, 300_001)
values = [risk.risk(spec, [[w]]) for w in grid[::1000]]
print("coarse grid minimiser:", grid[::1000][int(np.argmin(values))])

# the risk is quadratic with curvature 4 everywhere
hess, cert = risk.hessian(spec)
print("Hessian:", hess, "certificate:", cert)
