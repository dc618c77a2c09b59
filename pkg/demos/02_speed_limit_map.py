"""
Where the evolution runs at its speed limit
===========================================

Sweep tau_QSL / tau over the plane of x = omega (tau - t_D) and
alpha = N g0 / (2 omega).  In the overdamped band (large alpha) the ratio
sits near one, while for alpha << 1 the fast precession makes the actual
path much longer than the geodesic and the ratio drops towards zero.  The
long-format table is what the ``srlab sweep`` command writes.
"""

import numpy as np

from srlab.cli import SweepSpec, cmd_sweep
from srlab.meanfield import ModelParams, l1_coherence
from srlab.qsl import coherence_sign, qsl_ratio_from_coherence

spec = SweepSpec(quantity="qsl_ratio", x_start=-2, x_end=4, x_count=7, alpha_start=1e-2, alpha_end=1e2, alpha_count=5)
table = cmd_sweep(spec)

x = table.column("x")
y = table.column("y")
v = table.column("value")

# pivot into a small grid for reading; missing cells are the forbidden tau <= 0 corner
xs, ys = np.unique(x), np.unique(y)
grid = np.full((len(ys), len(xs)), np.nan)
for xi, yi, vi in zip(x, y, v):
    grid[np.searchsorted(ys, yi), np.searchsorted(xs, xi)] = vi

print("alpha \\ x " + " ".join(f"{xv:>7.1f}" for xv in xs))
for yv, row in zip(ys, grid):
    print(f"{yv:>9.3g} " + " ".join("    ---" if np.isnan(r) else f"{r:7.4f}" for r in row))

# the same ratio from the initial and final coherences alone
p = ModelParams.from_alpha(0.3, 10**6)
tau = p.t_delay + 1.5
c0, ct = l1_coherence(0.0, p), l1_coherence(tau, p)
print(f"C(0) = {c0:.3e}, C(tau) = {ct:.4f}, ratio = {qsl_ratio_from_coherence(c0, ct, coherence_sign(tau, p), p, tau):.6f}")
