import math

import numpy as np
import pytest
from scipy.integrate import solve_bvp
from scipy.optimize import brentq

from lesliefront.errors import DomainError, NoMonotoneFrontError, TruncationError
from lesliefront.model import Parameters
from lesliefront.waves import (
    asymptotic_speed,
    front_residual,
    minimal_wave_speed,
    semi_wave_slope,
    solve_semi_wave,
    solve_wavefront,
    speed_function,
)


def P(**kw):
    base = dict(delta=0.5, alpha=1.0, kappa=1.0, D=1.0, mu=1.0, rho=1.0)
    base.update(kw)
    return Parameters(**base)


def bvp_slope(s, D, kappa, alpha, L=30.0):
    """Semi-wave slope from a collocation solve of the two-point problem."""
    x = np.linspace(0.0, L, 400)
    w = math.sqrt(kappa / D)
    guess = np.vstack([alpha * np.tanh(w * x), alpha * w / np.cosh(w * x) ** 2])
    sol = solve_bvp(lambda _, y: np.vstack([y[1], (s * y[1] - kappa * y[0] * (1 - y[0] / alpha)) / D]),
                    lambda ya, yb: np.array([ya[0], yb[0] - alpha]), x, guess, tol=1e-10, max_nodes=200000)
    assert sol.success, sol.message
    return float(sol.sol(0.0)[1])


@pytest.mark.parametrize("D, kappa, smin", [(1, 1, 2), (4, 4, 8), (0.25, 1, 2)])
def test_minimal_wave_speed(D, kappa, smin):
    assert minimal_wave_speed(P(D=D, kappa=kappa)) == pytest.approx(smin, abs=1e-15)


@pytest.mark.parametrize("D, kappa, alpha", [(1, 1, 1), (4, 1, 2), (0.5, 2, 0.7)])
def test_standing_semi_wave_slope(D, kappa, alpha):
    # first integral at s = 0: D*V'(0)**2/2 = kappa*alpha**2/6
    assert semi_wave_slope(D, kappa, alpha, 0.0) == pytest.approx(alpha * math.sqrt(kappa / (3 * D)), abs=1e-9)


@pytest.mark.parametrize("s", [2.0, 2.5, -0.1])
def test_semi_wave_speed_gate(s):
    with pytest.raises(DomainError):
        semi_wave_slope(1.0, 1.0, 1.0, s)


def test_short_truncation_reported():
    with pytest.raises(TruncationError, match="L_trunc"):
        semi_wave_slope(1.0, 1.0, 1.0, 0.0, L_trunc=0.05)


@pytest.mark.parametrize("s", [0.0, 0.5, 1.2])
def test_semi_wave_profile(s):
    sol = solve_semi_wave(1.0, 1.0, 0.8, s)
    assert sol.V[0] == 0.0
    # strictly increasing until the tail saturates at alpha in floating point
    rising = sol.V[:-1] < 0.8 - 1e-12
    assert np.all(np.diff(sol.V)[rising] > 0) and np.all(np.diff(sol.V) >= 0)
    assert sol.slope_at_origin > 0
    assert abs(sol.far_field - 0.8) < 1e-6
    assert sol.residual < 1e-8
    assert sol.slope_at_origin == pytest.approx(semi_wave_slope(1.0, 1.0, 0.8, s), abs=1e-8)


def test_semi_wave_residual_against_independent_stencil():
    sol = solve_semi_wave(1.0, 1.0, 1.0, 0.7)
    x, V, dV = sol.x, sol.V, sol.dV
    h = x[1] - x[0]
    d2V = np.gradient(dV, h, edge_order=2)
    r = 0.7 * dV - d2V - V * (1 - V)
    assert np.max(np.abs(r[2:-2])) < 1e-5


def test_first_integral_along_standing_wave():
    D, kappa, alpha = 1.5, 0.8, 1.2
    sol = solve_semi_wave(D, kappa, alpha, 0.0)
    E = 0.5 * D * sol.dV ** 2 + kappa * (sol.V ** 2 / 2 - sol.V ** 3 / (3 * alpha))
    assert np.ptp(E) < 1e-8


@pytest.mark.parametrize("lam", [0.5, 3.0])
def test_slope_scales_with_alpha(lam):
    base = semi_wave_slope(1.0, 1.0, 1.0, 0.0)
    assert semi_wave_slope(1.0, 1.0, lam, 0.0) == pytest.approx(lam * base, abs=1e-9)


@pytest.mark.parametrize("s", [0.0, 1.0, 1.8])
def test_truncation_robustness(s):
    a = semi_wave_slope(1.0, 1.0, 1.0, s, L_trunc=25.0)
    b = semi_wave_slope(1.0, 1.0, 1.0, s, L_trunc=50.0)
    assert abs(a - b) < 1e-8


def test_slope_strictly_decreasing_in_speed():
    s = np.linspace(0.0, 1.9, 20)
    q = [semi_wave_slope(1.0, 1.0, 0.5, x) for x in s]
    assert np.all(np.diff(q) < 0)


@pytest.mark.parametrize("s", [0.3, 1.1])
def test_slope_matches_collocation(s):
    assert semi_wave_slope(1.0, 1.0, 1.0, s) == pytest.approx(bvp_slope(s, 1.0, 1.0, 1.0), abs=1e-7)


def test_speed_small_coefficient_limit():
    p = P(mu=0.01)
    s = asymptotic_speed(p)
    assert s == pytest.approx(0.01 / math.sqrt(3), rel=0.05)


def test_speed_against_collocation_oracle():
    p = P()
    ref = brentq(lambda s: bvp_slope(s, 1.0, 1.0, 1.0) - s, 0.01, 1.5, xtol=1e-12)
    assert asymptotic_speed(p) == pytest.approx(ref, abs=1e-6)


@pytest.mark.parametrize("kw", [dict(), dict(mu=10.0), dict(D=4.0, kappa=0.5, alpha=0.3, rho=2.0)])
def test_speed_root_and_ordering(kw):
    p = P(**kw)
    s = asymptotic_speed(p)
    assert abs(speed_function(p, s)) < 1e-8
    assert 0 < s < 2 * math.sqrt(p.D * p.kappa) <= minimal_wave_speed(p)


# --- wavefronts -------------------------------------------------------------------------


def test_wavefront_at_minimal_speed():
    prof = solve_wavefront(1.0, 1.0, 1.5, 0.5, 2.0)
    assert prof.limits == dict(U_left=1.0, V_left=2.0, U_right=0.0, V_right=0.0)
    assert np.all(np.diff(prof.U) < 0) and np.all(np.diff(prof.V) < 0)
    assert abs(prof.U[0] - 1.0) < 1e-6 and prof.U[-1] < 1e-6
    assert abs(prof.V[0] - 2.0) < 1e-6 and prof.V[-1] < 1e-6
    assert prof.residual_u < 1e-6 and prof.residual_v < 1e-6
    # normalisation: the crossing of half the left limit sits at xi = 0
    assert np.interp(0.0, prof.xi_u, prof.U) == pytest.approx(0.5, abs=1e-6)


def test_wavefront_translation_invariance():
    prof = solve_wavefront(1.0, 1.0, 1.0, 1.0, 2.5)
    r0 = front_residual(prof.xi_u, prof.U, 2.5, 1.0, 1.0, 1.0)
    r1 = front_residual(prof.xi_u + 3.7, prof.U, 2.5, 1.0, 1.0, 1.0)
    assert abs(r0 - r1) < 1e-10


def test_wavefront_faster_predator_diffusion():
    # D*kappa = 4 raises the predator threshold to 4
    prof = solve_wavefront(4.0, 1.0, 1.0, 0.5, 4.0)
    assert np.all(np.diff(prof.V) < 0) and prof.residual_v < 1e-6
    with pytest.raises(NoMonotoneFrontError):
        solve_wavefront(4.0, 1.0, 1.0, 0.5, 3.0)


@pytest.mark.parametrize("s", [1.9, 1.5])
def test_no_monotone_front_below_threshold(s):
    with pytest.raises(NoMonotoneFrontError, match="monotonicity"):
        solve_wavefront(1.0, 1.0, 1.0, 1.0, s)
