"""The asymptotic spreading speed s* from the semi-wave problem.

The slope q(s) = V_s'(0) of the predator semi-wave decreases in s, and s* is
where the front condition mu*rho*q(s) = s holds. Printing q(s) next to the
line s/(mu*rho) shows the unique crossing.

Run with ``python demos/semi_wave.py``.
"""

import numpy as np

from lesliefront.model import Parameters
from lesliefront.waves import asymptotic_speed, semi_wave_slope, solve_semi_wave

for mu in (0.1, 1.0, 10.0):
    p = Parameters(delta=0.5, alpha=0.5, kappa=1.0, D=1.0, mu=mu)
    print(f"mu = {mu:5.1f}: s* = {asymptotic_speed(p):.8f}")

p = Parameters(delta=0.5, alpha=0.5, kappa=1.0, D=1.0)
s_star = asymptotic_speed(p)
print("\n    s      q(s)     s/(mu rho)")
for s in np.linspace(0.0, 1.8, 10):
    print(f"  {s:5.2f}  {semi_wave_slope(p.D, p.kappa, p.alpha, s):.6f}  {s / (p.mu * p.rho):.6f}")

sol = solve_semi_wave(p.D, p.kappa, p.alpha, s_star)
print(f"\nprofile at s*: V'(0) = {sol.slope_at_origin:.8f}, V(far) = {sol.far_field:.8f}, "
      f"residual = {sol.residual:.1e}")
