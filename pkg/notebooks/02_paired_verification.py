"""
Paired Form A / Form B runs
===========================

Random K=3 problems, optimised in both charts with the iterative solver
from W = 0.  The three residuals are the weight covariance gap, the distance
between the two combined estimates and the difference of the minimum risks.
"""

from metaequiv import harness, solver

reports = harness.run_batch(dim=3, seeds=range(20), method=solver.ITERATIVE)
for r in reports[:5]:
    print(r.seed, f"{r.weight_covariance_residual:.2e}", f"{r.estimator_gap:.2e}", f"{r.risk_gap:.2e}")

summary = harness.summarize(reports)
print("worst over 20 seeds:", summary)

# closed form gets to rounding level
closed = harness.summarize(harness.run_batch(dim=3, seeds=range(20), method=solver.CLOSED_FORM))
print("closed form:", closed)
