"""Spreading on a habitat that starts above the critical radius.

With h0 = 2 > pi/2 the front cannot stay bounded, so the populations settle
on the coexistence state (u*, v*) = (0.5, 1) behind a front that advances at
a speed between the semi-wave speed s* and the minimal wave speed.

Run with ``python demos/spreading.py``.
"""

from lesliefront.dichotomy import classify, speed_estimate, thresholds
from lesliefront.model import Parameters, equilibria, make_initial_profile
from lesliefront.solver import SolverConfig, run
from lesliefront.waves import asymptotic_speed, minimal_wave_speed

p = Parameters(delta=0.5, alpha=0.5, kappa=1.0, D=1.0, mu=1.0, rho=1.0)
ip = make_initial_profile("cosine", amp_u=0.5, amp_v=0.5, h0=2.0)
th = thresholds(p, ip)
print(f"critical radius h* = {th.h_star:.5f}, initial radius h0 = {ip.h0}")

traj = run(p, ip, SolverConfig(N=200, t_max=150.0))
rep = classify(traj, th)
us, vs = equilibria(p).e_star
print(f"verdict: {rep.verdict.value} (rule {rep.rule}, t = {rep.time})")
print(f"u(150, 0) = {traj.u_center[-1]:.6f} vs u* = {us}")
print(f"v(150, 0) = {traj.v_center[-1]:.6f} vs v* = {vs}")

for t in (0, 25, 50, 100, 150):
    i = int(round(t / 0.1))
    print(f"  t = {traj.t[i]:6.1f}  h = {traj.h[i]:9.4f}  h' = {traj.hprime[i]:.4f}")

s_star, s_min = asymptotic_speed(p), minimal_wave_speed(p)
est = speed_estimate(traj, s_star, s_min)
print(f"front speed ~ {est['slope']:.4f}, bracket [s*, s_min] = [{s_star:.4f}, {s_min:.1f}]")
