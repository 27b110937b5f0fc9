"""
Risk along the scalar line
==========================

Restrict the weights to W = w I.  In Form A the risk is f(w) = R(wI); in
Form B it is g(w) = f(1 - w), a mirror image.  The data can be plotted with
any tool; here we write it to CSV and report the two minimisers.
"""

import io

from metaequiv import harness, model

sweep = harness.run_sweep(model.canonical_spec(), 0.0, 1.0, 1001)
print("argmin f:", sweep.argmin_f, "argmin g:", sweep.argmin_g)
print("mirror residual:", sweep.mirror_residual)

buf = io.StringIO()
harness.write_sweep_csv(sweep, buf)
print(buf.getvalue().splitlines()[:4])
