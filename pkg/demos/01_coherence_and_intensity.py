"""
Coherence and the superradiant burst
====================================

The mean-field atom starts almost fully excited, swings through the equator
of the Bloch sphere at the delay time t_D and relaxes to the ground state.
Its l1-coherence is a sech bump centred on t_D, and squaring it gives the
emitted intensity in units of its maximum.
"""

import numpy as np

from srlab.meanfield import ModelParams, intensity, l1_coherence, max_intensity, n_particle_coherence

# a million atoms, collective rate N g0 = 2 (alpha = 1 at omega = 1)
params = ModelParams.from_alpha(1.0, 10**6)
print(f"t_D = {params.t_delay:.4f}, Imax = {params.i_max:.4e}")

# sample the burst on the dimensionless axis omega (t - t_D)
x = np.linspace(-4, 4, 9)
t = params.t_delay + x / params.omega
c = l1_coherence(t, params)
ratio = intensity(t, params) / max_intensity(params)

print(f"{'x':>5} {'C':>12} {'C^2':>12} {'I/Imax':>12}")
for row in zip(x, c, c**2, ratio):
    print("{:5.1f} {:12.6e} {:12.6e} {:12.6e}".format(*row))

# coherence is maximal at t_D whatever alpha is
for alpha in (0.01, 1.0, 100.0):
    p = ModelParams.from_alpha(alpha, 10**6)
    print(f"alpha={alpha:>6}: C(t_D) = {l1_coherence(p.t_delay, p)}")

# the N-atom product state carries (1 + C)^N - 1 of coherence; it is huge
# at t_D even though each atom holds at most C = 1
for n in (2, 10, 100):
    print(f"N={n:>3}: C_N(t_D) = {n_particle_coherence(1.0, n):.4e}")
