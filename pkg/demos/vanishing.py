"""Vanishing when the front coefficient mu is small.

For h0 = 1 < pi/2 and mu below the computable threshold mu_lower the front
stalls under h0*(1 + eps) and both species decay to zero. Raising mu above
mu_bar flips the outcome to spreading.

Run with ``python demos/vanishing.py``.
"""

from lesliefront.dichotomy import EarlyExit, classify, thresholds
from lesliefront.model import Parameters, make_initial_profile
from lesliefront.solver import SolverConfig, run

base = Parameters(delta=0.5, alpha=0.5, kappa=1.0, D=1.0)
ip = make_initial_profile("cosine", 1.0, 1.0, h0=1.0)
th = thresholds(base, ip)
print(f"h* = {th.h_star:.4f}  eps = {th.eps:.4f}  mu_lower = {th.mu_lower:.3e}  mu_bar = {th.mu_bar:.4f}")

cfg = SolverConfig(N=200, t_max=100.0)
for label, mu in (("0.5 * mu_lower", 0.5 * th.mu_lower), ("2 * mu_bar", 2 * th.mu_bar)):
    p = base.replace(mu=mu)
    t_p = thresholds(p, ip)
    traj = run(p, ip, cfg, stop=EarlyExit(t_p))
    rep = classify(traj, t_p)
    print(f"mu = {label:15s} -> {rep.verdict.value:9s} at t = {rep.time:7.2f}, "
          f"h = {traj.h[-1]:.5f}, |u|+|v| = {traj.u_sup[-1] + traj.v_sup[-1]:.2e}")
print(f"vanishing fronts stay below h0*(1 + eps) = {th.front_cap:.4f}")
