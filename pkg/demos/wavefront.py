"""Monotone travelling fronts of the comparison equations.

At speeds at or above the minimal wave speed max(2, 2*sqrt(D*kappa)) each
logistic comparison equation carries a monotone front. Below it the profile
oscillates around zero and the solver reports that no monotone front exists.

Run with ``python demos/wavefront.py``.
"""

from lesliefront.errors import NoMonotoneFrontError
from lesliefront.waves import solve_wavefront

D, kappa, M1, alpha = 1.0, 1.0, 1.0, 0.5
for s in (2.0, 3.0, 1.8):
    try:
        prof = solve_wavefront(D, kappa, M1, alpha, s)
    except NoMonotoneFrontError as exc:
        print(f"s = {s}: {exc}")
        continue
    print(f"s = {s}: U from {prof.U[0]:.6f} to {prof.U[-1]:.1e}, V from {prof.V[0]:.6f} to {prof.V[-1]:.1e}, "
          f"residuals {prof.residual_u:.1e} / {prof.residual_v:.1e}")
