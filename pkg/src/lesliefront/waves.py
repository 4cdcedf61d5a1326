"""Travelling fronts and semi-waves.

The semi-wave ``V_s`` solves ``s*V' - D*V'' - kappa*V*(1 - V/alpha) = 0`` on
the half-line with ``V(0) = 0`` and ``V(+inf) = alpha``. Its slope at the
origin fixes the asymptotic speed ``s*`` through ``mu*rho*V_s*'(0) = s*``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import DomainError, NoMonotoneFrontError, TruncationError
from .model import Parameters, _require_positive

RTOL = 1e-12
ATOL = 1e-14


def minimal_wave_speed(p: Parameters) -> float:
    """``2*max(1, sqrt(D*kappa))``."""
    return 2.0 * max(1.0, math.sqrt(p.D * p.kappa))


def _fd6(w, dx):
    """Sixth-order central first derivative on interior nodes ``3..n-4``."""
    return (-w[:-6] + 9.0 * w[1:-5] - 45.0 * w[2:-4] + 45.0 * w[4:-2] - 9.0 * w[5:-1] + w[6:]) / (60.0 * dx)


# ---------------------------------------------------------------------------
# Semi-wave


@dataclass(frozen=True)
class SemiWaveSolution:
    """Semi-wave profile on ``[0, L_trunc]``.

    ``dV`` holds ``V'`` on the grid. ``residual`` is the max-norm ODE
    residual on the grid, with ``V''`` from a sixth-order difference of ``V'``.
    """

    s: float
    x: np.ndarray
    V: np.ndarray
    dV: np.ndarray
    slope_at_origin: float
    far_field: float
    residual: float


def _semi_wave_rhs(s, D, kappa, alpha):
    def rhs(x, y):
        V, W = y
        return [W, (s * W - kappa * V * (1.0 - V / alpha)) / D]
    return rhs


def _classify_shot(q, s, D, kappa, alpha, L):
    """+1 if the shot from ``(0, q)`` crosses ``alpha``, -1 if it turns back first, 0 if undecided by ``L``."""
    if q <= 0.0:
        return -1
    over = lambda x, y: y[0] - alpha          # noqa: E731
    over.terminal, over.direction = True, 1
    turn = lambda x, y: y[1]                  # noqa: E731
    turn.terminal, turn.direction = True, -1
    sol = solve_ivp(_semi_wave_rhs(s, D, kappa, alpha), (0.0, L), [0.0, q], method="DOP853",
                    rtol=RTOL, atol=ATOL, events=(over, turn))
    if sol.t_events[0].size:
        return 1
    if sol.t_events[1].size:
        return -1
    return 0


def _check_semi_wave_args(D, kappa, alpha, s):
    _require_positive(D=D, kappa=kappa, alpha=alpha)
    c0 = 2.0 * math.sqrt(D * kappa)
    if not (0.0 <= s < c0):
        raise DomainError(f"semi-wave speed must satisfy 0 <= s < 2*sqrt(D*kappa) = {c0:.6g}, got {s}",
                          field="s")


def semi_wave_slope(D: float, kappa: float, alpha: float, s: float, L_trunc: float | None = None,
                    tol: float = 1e-10) -> float:
    """``V_s'(0)`` by shooting on the initial slope with bisection.

    Shots that overshoot ``alpha`` have too large a slope, shots whose
    derivative vanishes below ``alpha`` too small; the bracket starts at
    ``[0, 2*alpha*sqrt(kappa/D)]``.

    Raises:
        DomainError: ``s`` outside ``[0, 2*sqrt(D*kappa))``.
        TruncationError: the upper shot is not resolved within ``L_trunc``.
    """
    _check_semi_wave_args(D, kappa, alpha, s)
    if L_trunc is None:
        L_trunc = 40.0 * math.sqrt(D / kappa)
    lo, hi = 0.0, 2.0 * alpha * math.sqrt(kappa / D)
    if _classify_shot(hi, s, D, kappa, alpha, L_trunc) != 1:
        raise TruncationError(f"upper shot V'(0)={hi:.4g} does not overshoot within L_trunc={L_trunc:.4g}; "
                              "increase L_trunc")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        c = _classify_shot(mid, s, D, kappa, alpha, L_trunc)
        if c == 0:
            return mid
        if c > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _manifold(s, D, kappa, alpha, z0=1e-7):
    """Stable manifold of the saddle ``(alpha, 0)`` as ``V' = Phi(z)``, ``z = alpha - V``.

    Seeded with the quadratic expansion ``Phi = a1*z + a2*z**2`` at small
    ``z`` and integrated in ``z`` up to ``alpha``, where ``Phi`` is ``V'(0)``.
    """
    a1 = (-s + math.sqrt(s * s + 4.0 * D * kappa)) / (2.0 * D)
    a2 = -kappa / (alpha * (3.0 * D * a1 + s))
    z0 = z0 * alpha

    def dWdz(z, w):
        V = alpha - z
        return [-(s * w[0] - kappa * V * (1.0 - V / alpha)) / (D * w[0])]

    sol = solve_ivp(dWdz, (z0, alpha), [a1 * z0 + a2 * z0 ** 2], method="DOP853",
                    rtol=RTOL, atol=ATOL, dense_output=True)

    def phi_z(z):
        if z <= z0:
            return a1 * z + a2 * z * z if z > 0 else 0.0
        return float(sol.sol(min(z, alpha))[0])

    return phi_z, float(sol.y[0, -1])


def solve_semi_wave(D: float, kappa: float, alpha: float, s: float, L_trunc: float | None = None,
                    n: int = 2001) -> SemiWaveSolution:
    """Semi-wave on ``[0, L_trunc]`` with slope from shooting.

    The profile follows ``V' = Phi(alpha - V)`` on the saddle's stable manifold,
    which is insensitive to the exponential instability that limits
    forward shooting in the far field.
    """
    if L_trunc is None:
        L_trunc = 40.0 * math.sqrt(D / kappa)
    q = semi_wave_slope(D, kappa, alpha, s, L_trunc)
    phi, _ = _manifold(s, D, kappa, alpha)
    x = np.linspace(0.0, L_trunc, n)
    # integrate ln(alpha - V) so that V approaches alpha from below without overshoot
    sol = solve_ivp(lambda _x, y: [-phi(math.exp(y[0])) * math.exp(-y[0])], (0.0, L_trunc),
                    [math.log(alpha)], method="DOP853", rtol=RTOL, atol=ATOL, t_eval=x)
    z = np.exp(sol.y[0])
    V = alpha - z
    dV = np.array([phi(zz) for zz in z])
    dx = x[1] - x[0]
    res = s * dV[3:-3] - D * _fd6(dV, dx) - kappa * V[3:-3] * (1.0 - V[3:-3] / alpha)
    return SemiWaveSolution(s=s, x=x, V=V, dV=dV, slope_at_origin=q, far_field=float(V[-1]),
                            residual=float(np.max(np.abs(res))))


def speed_function(p: Parameters, s: float, L_trunc: float | None = None) -> float:
    """``mu*rho*V_s'(0) - s``; positive below ``s*`` and negative above."""
    return p.mu * p.rho * semi_wave_slope(p.D, p.kappa, p.alpha, s, L_trunc) - s


def asymptotic_speed(p: Parameters, L_trunc: float | None = None, tol: float = 1e-10) -> float:
    """Unique root ``s*`` of ``mu*rho*V_s'(0) = s`` in ``(0, 2*sqrt(D*kappa))`` by bisection."""
    return _asymptotic_speed(p.D, p.kappa, p.alpha, p.mu * p.rho, L_trunc, tol)


@lru_cache(maxsize=256)
def _asymptotic_speed(D, kappa, alpha, mr, L_trunc, tol):
    p = Parameters(delta=1.0, alpha=alpha, kappa=kappa, D=D, mu=mr, rho=1.0)
    c0 = 2.0 * math.sqrt(p.D * p.kappa)
    lo = 0.0
    hi = 0.999 * c0
    while speed_function(p, hi, L_trunc) > 0:
        lo = hi
        hi = c0 - 0.1 * (c0 - hi)
        if c0 - hi < 1e-9 * c0:
            raise TruncationError("no sign change of the speed function below 2*sqrt(D*kappa)")
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if speed_function(p, mid, L_trunc) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Travelling wavefronts of the decoupled system


@dataclass(frozen=True)
class WavefrontProfile:
    """Decreasing fronts ``U: 1 -> 0`` and ``V: M1 + alpha -> 0`` at speed ``s``.

    Each profile is normalised to half its left limit at ``xi = 0``.
    """

    s: float
    xi_u: np.ndarray
    U: np.ndarray
    xi_v: np.ndarray
    V: np.ndarray
    limits: dict
    residual_u: float
    residual_v: float


def front_residual(xi, W, s, diff, rate, cap):
    """Max-norm residual of ``s*W' + diff*W'' + rate*W*(1 - W/cap)`` on interior nodes."""
    dx = xi[1] - xi[0]
    # fourth-order central differences on the interior
    W1 = (-W[4:] + 8 * W[3:-1] - 8 * W[1:-3] + W[:-4]) / (12 * dx)
    W2 = (-W[4:] + 16 * W[3:-1] - 30 * W[2:-2] + 16 * W[1:-3] - W[:-4]) / (12 * dx * dx)
    Wc = W[2:-2]
    return float(np.max(np.abs(s * W1 + diff * W2 + rate * Wc * (1.0 - Wc / cap))))


def _shoot_front(s, diff, rate, cap, eta=1e-9, floor=1e-10):
    """Integrate the unstable manifold of ``W = cap`` toward ``W = 0``.

    The exit from ``W = cap`` is integrated in the deviation ``d = cap - W``
    (so tolerances are relative to the small deviation, not to ``cap``)
    until ``W = cap/2``; from there ``W`` itself is integrated until it
    drops below ``floor*cap``. Both legs share the origin ``xi = 0`` at
    ``W = cap/2``.

    Returns:
        ``(head, tail, xi_start, xi_end)``: dense solutions in ``d`` for
        ``xi <= 0`` (parametrised by ``xi - xi_start``) and in ``W`` for
        ``xi >= 0``.

    Raises:
        NoMonotoneFrontError: ``W`` changes sign or turns upward.
    """
    disc = s * s - 4.0 * diff * rate
    lam = (-s + math.sqrt(s * s + 4.0 * diff * rate)) / (2.0 * diff)
    # slowest decay rate at W = 0 (real part when the rates are complex)
    decay = (s - math.sqrt(disc)) / (2.0 * diff) if disc >= 0 else s / (2.0 * diff)
    tol = dict(method="DOP853", rtol=1e-11, dense_output=True)

    half = lambda _x, y: y[0] - 0.5 * cap           # noqa: E731
    half.terminal = True
    d0 = eta * cap
    span = math.log(1.0 / eta) / lam + 50.0

    # leg 1 in d = cap - W, started on the unstable eigenvector
    def fwd_rhs(_x, y):
        d, p = y                                    # p = dd/dxi = -W'
        return [p, (-s * p + rate * d * (1.0 - d / cap)) / diff]

    turn_d = lambda _x, y: y[1]                     # noqa: E731
    turn_d.terminal, turn_d.direction = True, -1
    head = solve_ivp(fwd_rhs, (0.0, span), [d0, lam * d0], atol=1e-30 * cap, events=(half, turn_d), **tol)
    if head.t_events[1].size:
        raise NoMonotoneFrontError(f"profile loses monotonicity at speed s={s:.6g}")
    if not head.t_events[0].size:
        raise NoMonotoneFrontError(f"profile does not leave W = cap at speed s={s:.6g}")
    xi_half = head.t_events[0][0]
    W1 = head.y_events[0][0]

    def rhs(_x, y):
        W, P = y
        return [P, -(s * P + rate * W * (1.0 - W / cap)) / diff]

    neg = lambda _x, y: y[0]                        # noqa: E731
    neg.terminal, neg.direction = True, -1
    turn = lambda _x, y: y[1]                       # noqa: E731
    turn.terminal, turn.direction = True, 1
    span = 1.5 * math.log(1.0 / floor) / max(decay, 1e-3) + 10.0
    tail = solve_ivp(rhs, (0.0, span), [cap - W1[0], -W1[1]], atol=1e-25 * cap, events=(neg, turn), **tol)
    if tail.t_events[0].size or tail.t_events[1].size:
        raise NoMonotoneFrontError(f"profile loses monotonicity at speed s={s:.6g}")
    below = np.nonzero(tail.y[0] < floor * cap)[0]
    xi_end = tail.t[below[0]] if below.size else tail.t[-1]
    return head, tail, -xi_half, xi_end


def _front(s, diff, rate, cap, n):
    head, tail, xi_start, xi_end = _shoot_front(s, diff, rate, cap)
    xi = np.linspace(xi_start, xi_end, n)
    W = np.empty(n)
    left = xi < 0
    # head is parametrised by distance from the seed: xi = xi_start + x
    W[left] = cap - head.sol(xi[left] - xi_start)[0]
    W[~left] = tail.sol(xi[~left])[0]
    return xi, W


def solve_wavefront(D: float, kappa: float, M1: float, alpha: float, s: float, n: int = 4001) -> WavefrontProfile:
    """Monotone fronts of the two decoupled equations at speed ``s``.

    Shooting flags a sign change or upturn of either profile. Just below
    the thresholds the oscillation can lie beyond the resolved range, so
    ``s >= 2`` and ``s >= 2*sqrt(D*kappa)`` are also enforced directly.

    Raises:
        NoMonotoneFrontError: a profile is not monotone, or ``s`` is below a threshold.
    """
    _require_positive(D=D, kappa=kappa, M1=M1, alpha=alpha)
    K = M1 + alpha
    xi_u, U = _front(s, 1.0, 1.0, 1.0, n)
    xi_v, V = _front(s, D, kappa, K, n)
    if s < 2.0:
        raise NoMonotoneFrontError(f"prey front needs s >= 2, got {s}")
    if s < 2.0 * math.sqrt(D * kappa):
        raise NoMonotoneFrontError(f"predator front needs s >= 2*sqrt(D*kappa) = {2 * math.sqrt(D * kappa):.6g}")
    return WavefrontProfile(
        s=s, xi_u=xi_u, U=U, xi_v=xi_v, V=V,
        limits={"U_left": 1.0, "V_left": K, "U_right": 0.0, "V_right": 0.0},
        residual_u=front_residual(xi_u, U, s, 1.0, 1.0, 1.0),
        residual_v=front_residual(xi_v, V, s, D, kappa, K),
    )
