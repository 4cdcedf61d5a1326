"""Acceptance criteria; each test prints one PASS/FAIL line in the terminal summary."""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from lesliefront.dichotomy import Verdict, classify, speed_estimate, thresholds
from lesliefront.harness import parse_sweep, read_trajectory_csv, run_sweep
from lesliefront.model import Parameters, apriori_bounds, make_initial_profile, squeeze_limits
from lesliefront.solver import SolverConfig, Trajectory, ode_envelopes, run
from lesliefront.spectral import EigenProblemSpec, critical_diffusivity, critical_length, principal_eigenvalue
from lesliefront.waves import asymptotic_speed, minimal_wave_speed, semi_wave_slope, speed_function

BENCH_CFG = """\
delta = 0.5
alpha = 0.5
kappa = 1
Dratio = 1
mu = 1
rho = 1
h0 = 2
profile.kind = cosine
profile.amp_u = 0.5
profile.amp_v = 0.5
N = 200
t_max = 150
"""


def detail(request, text):
    request.node.user_properties.append(("detail", text))


@pytest.mark.criterion(1, "spreading convergence to (u*, v*) by T=150")
def test_criterion_01_spreading_convergence(request, bench_params):
    ip = make_initial_profile("cosine", 0.5, 0.5, h0=2.0)
    t0 = time.perf_counter()
    traj = run(bench_params, ip, SolverConfig(N=200, t_max=150.0))
    elapsed = time.perf_counter() - t0
    eu, ev = abs(traj.u_center[-1] - 0.5), abs(traj.v_center[-1] - 1.0)
    detail(request, f"|u-0.5|={eu:.1e} |v-1|={ev:.1e} runtime={elapsed:.1f}s")
    assert traj.t[-1] == pytest.approx(150.0)
    assert eu < 5e-3 and ev < 5e-3
    assert elapsed < 60.0


@pytest.mark.criterion(2, "front speed inside [s*, s_min] with 5% margin")
def test_criterion_02_speed_bracket(request, spreading_run):
    p, _, traj = spreading_run
    s_star = asymptotic_speed(p)
    g = speed_function(p, s_star)
    est = speed_estimate(traj, s_star, minimal_wave_speed(p), margin=0.05)
    detail(request, f"slope={est['slope']:.4f} bracket=[{s_star:.6f}, 2] |g(s*)|={abs(g):.1e}")
    assert abs(g) < 1e-8
    assert est["within_bracket"]


@pytest.mark.criterion(3, "vanishing below the lower threshold")
def test_criterion_03_vanishing(request, vanishing_run):
    p, ip, th, traj = vanishing_run
    mass = traj.u_sup[-1] + traj.v_sup[-1]
    cap = th.front_cap + 1e-3
    detail(request, f"mu={p.mu:.3e} |u|+|v|={mass:.1e} h_inf={traj.h[-1]:.5f} cap={cap:.5f}")
    assert traj.t[-1] == pytest.approx(100.0)
    assert mass < 1e-3
    assert np.all(traj.h <= th.h_star)
    assert traj.h[-1] <= cap


@pytest.mark.criterion(4, "crossing certificate over a 5x5 (h0, mu) sweep")
def test_criterion_04_sweep_certificate(request, tmp_path):
    text = BENCH_CFG.replace("N = 200", "N = 100").replace("t_max = 150", "t_max = 50")
    text += "sweep.h0 = 0.5, 1.0, 1.4, 1.6, 2.0\nsweep.mu = 1e-5, 1e-4, 1e-2, 1, 10\n"
    spec = parse_sweep(text)
    rows, records = run_sweep(spec, out_dir=tmp_path)
    assert len(rows) == 25
    counts = {}
    for row, rec in zip(rows, records):
        cfg = spec.base.replace(h0=row["h0"], mu=row["mu"])
        th = thresholds(cfg.params, cfg.profile, cfg.theta)
        data = read_trajectory_csv(rec.trajectory_file)
        t, h = np.array(data["t"]), np.array(data["h"])
        cross = np.nonzero(h > th.h_star)[0]
        verdict = row["verdict"]
        counts[verdict] = counts.get(verdict, 0) + 1
        where = f"h0={row['h0']} mu={row['mu']}"
        if cross.size:
            assert verdict == "Spreading", where
            assert rec.classification["time"] == t[cross[0]], where
            # every extension of the trajectory past the crossing stays Spreading
            full = Trajectory(rows=list(zip(*(data[k] for k in data))))
            for k in range(cross[0] + 1, len(t) + 1, 25):
                assert classify(Trajectory(rows=full.rows[:k]), th).verdict is Verdict.SPREADING, where
        else:
            assert verdict != "Spreading", where
        if row["h0"] >= th.h_star:
            assert verdict == "Spreading", where
        else:
            if row["mu"] >= th.mu_bar:
                assert verdict == "Spreading", where
            if row["mu"] <= th.mu_lower:
                assert verdict == "Vanishing", where
            if verdict == "Undetermined":
                assert th.mu_lower < row["mu"] < th.mu_bar, where
    detail(request, ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))


@pytest.mark.criterion(5, "semi-wave slope, root residual and monotonicity")
def test_criterion_05_semi_wave(request, bench_params):
    p = bench_params
    s_star = asymptotic_speed(p)
    root = abs(p.mu * p.rho * semi_wave_slope(p.D, p.kappa, p.alpha, s_star) - s_star)
    errs = [abs(semi_wave_slope(D, k, a, 0.0) - a * math.sqrt(k / (3 * D)))
            for D, k, a in ((1, 1, 1), (4, 1, 2), (0.5, 2, 0.7))]
    speeds = np.linspace(0.0, 0.95 * 2 * math.sqrt(p.D * p.kappa), 20)
    slopes = np.array([semi_wave_slope(p.D, p.kappa, p.alpha, s) for s in speeds])
    detail(request, f"root={root:.1e} max s=0 error={max(errs):.1e}")
    assert root < 1e-8
    assert max(errs) < 1e-6
    assert np.all(np.diff(slopes) < 0)


@pytest.mark.criterion(6, "eigenvalue identities and sign trichotomy on a 10^3 grid")
def test_criterion_06_eigenvalues(request):
    g = np.linspace(0.1, 10.0, 10)
    worst = 0.0
    for d in g:
        for a in g:
            Ls = critical_length(d, a)
            for L in g:
                ds = critical_diffusivity(a, L)
                worst = max(worst, abs(principal_eigenvalue(EigenProblemSpec(ds, a, L))),
                            abs(principal_eigenvalue(EigenProblemSpec(d, a, Ls))))
                s = principal_eigenvalue(EigenProblemSpec(d, a, L))
                if not (math.isclose(d, ds, rel_tol=1e-12) or math.isclose(L, Ls, rel_tol=1e-12)):
                    assert np.sign(s) == np.sign(ds - d) == np.sign(L - Ls)
    detail(request, f"max |sigma| at critical values={worst:.1e}")
    assert worst < 1e-12


@pytest.mark.criterion(7, "a priori bounds and logistic envelopes")
def test_criterion_07_apriori_bounds(request, spreading_run, vanishing_run):
    p1, ip1, t1 = spreading_run
    p3, ip3, _, t3 = vanishing_run
    msgs = []
    for p, ip, traj in ((p1, ip1, t1), (p3, ip3, t3)):
        b = apriori_bounds(p, ip)
        e = traj.extremes
        assert e["u_max"] <= b.M1 + 1e-8
        assert e["v_max"] <= b.M2 + 1e-8
        assert 0 < e["hprime_min"] and e["hprime_max"] <= b.Lambda + 1e-8
        ub, vb = ode_envelopes(p, ip.u_sup, ip.v_sup, traj.t)
        assert np.all(traj.u_sup <= ub + 1e-8) and np.all(traj.v_sup <= vb + 1e-8)
        msgs.append(f"h' in [{e['hprime_min']:.1e}, {e['hprime_max']:.2e}] <= {b.Lambda:.2e}")
    detail(request, "; ".join(msgs))


@pytest.mark.criterion(8, "squeeze iteration contracts with ratio delta^2")
def test_criterion_08_squeeze(request):
    sq = squeeze_limits(Parameters(delta=0.5, alpha=0.5, kappa=1.0, D=1.0), 20)
    ratios = sq.contraction_ratios()
    err = max(abs(sq.u_upper[-1] - 0.5), abs(sq.u_lower[-1] - 0.5),
              abs(sq.v_upper[-1] - 1.0), abs(sq.v_lower[-1] - 1.0))
    detail(request, f"final error={err:.1e} ratios in [{ratios.min():.8f}, {ratios.max():.8f}]")
    assert sq.limits == pytest.approx((0.5, 1.0), abs=1e-15)
    assert err < 1e-10
    assert ratios.size >= 10 and np.all(np.abs(ratios - 0.25) < 1e-6)


@pytest.mark.criterion(9, "spatial Richardson order >= 1.8 at T=1")
def test_criterion_09_grid_convergence(request, bench_params):
    ip = make_initial_profile("cosine", 0.5, 0.5, h0=2.0)
    out = {}
    for N in (100, 200, 400):
        # a shared fixed step removes the time error from the differences
        traj = run(bench_params, ip, SolverConfig(N=N, t_max=1.0, dt_policy="fixed", dt=2.5e-4, output_dt=0.5))
        out[N] = (traj.h[-1], traj.u_center[-1])
    orders = [math.log2(abs(out[100][i] - out[200][i]) / abs(out[200][i] - out[400][i])) for i in range(2)]
    detail(request, f"order h={orders[0]:.3f} u(0)={orders[1]:.3f}")
    assert min(orders) >= 1.8


@pytest.mark.criterion(10, "repeated simulate runs write byte-identical trajectories")
def test_criterion_10_determinism(request, tmp_path):
    cfg = tmp_path / "bench.cfg"
    cfg.write_text(BENCH_CFG)
    files = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        res = subprocess.run([sys.executable, "-m", "lesliefront", "simulate", str(cfg), "--out", str(out),
                              "--quiet"], capture_output=True, text=True, check=False)
        assert res.returncode == 0, res.stderr
        (path,) = out.glob("traj_*.csv")
        files.append(path)
    assert files[0].name == files[1].name
    a, b = files[0].read_bytes(), files[1].read_bytes()
    rows = a.count(b"\n") - 1
    detail(request, f"{len(a)} bytes, {rows} rows")
    assert a == b
