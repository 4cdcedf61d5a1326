"""Front-fixing finite-difference solver for the free-boundary system.

With ``y = x/h(t)`` the moving habitat ``[0, h(t)]`` becomes ``[0, 1]`` and
``U(t, y) = u(t, y*h(t))`` obeys::

    U_t = U_yy/h**2 + (y*h'/h)*U_y + f(U, V)
    V_t = D*V_yy/h**2 + (y*h'/h)*V_y + g(U, V)
    h'  = -(mu/h)*(U_y(t, 1) + rho*V_y(t, 1))

Diffusion is advanced implicitly (one tridiagonal solve per species),
advection and reaction explicitly, and the front by an explicit predictor
from the current boundary flux.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_banded

from .errors import DivergenceFault, DomainError, IntegrationFault, PreconditionError
from .model import (
    AprioriBounds,
    InitialProfile,
    Parameters,
    apriori_bounds,
    predator_kinetics,
    prey_kinetics,
    validate_h1,
    validate_initial_profile,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Local change of variables used near t = 0


def _ramp(s):
    # quintic smoothstep: 0 -> 1 with vanishing first and second derivatives at both ends
    return s ** 3 * (10.0 - 15.0 * s + 6.0 * s ** 2)


def _ramp_int(s):
    return s ** 4 * (2.5 - 3.0 * s + s ** 2)


def _ramp_d(s):
    return 30.0 * s ** 2 * (1.0 - s) ** 2


@dataclass(frozen=True)
class CutoffBump:
    """A ``C^3`` cutoff ``zeta`` centred on ``h0``.

    ``zeta = 1`` for ``|y - h0| <= h0/4`` and ``zeta = 0`` for
    ``|y - h0| >= h0/2``. On each transition band ``zeta' `` has a flat top
    joined by quintic ramps of relative width ``w``, so ``|zeta'|`` peaks at
    ``4/((1 - w)*h0)``; ``w = 0.25`` keeps it below ``6/h0``.
    """

    h0: float
    w: float = 0.25

    def _profile(self, tau):
        # S(tau): 0 -> 1 on [0, 1]; S' = c*B with B a plateau of height 1
        w, c = self.w, 1.0 / (1.0 - self.w)
        tau = np.clip(tau, 0.0, 1.0)
        S = np.empty_like(tau)
        dS = np.empty_like(tau)
        d2S = np.empty_like(tau)
        lo = tau < w
        hi = tau > 1.0 - w
        mid = ~(lo | hi)
        s = tau[lo] / w
        S[lo] = c * w * _ramp_int(s)
        dS[lo] = c * _ramp(s)
        d2S[lo] = c * _ramp_d(s) / w
        S[mid] = c * (w * 0.5 + (tau[mid] - w))
        dS[mid] = c
        d2S[mid] = 0.0
        s = (1.0 - tau[hi]) / w
        S[hi] = 1.0 - c * w * _ramp_int(s)
        dS[hi] = c * _ramp(s)
        d2S[hi] = -c * _ramp_d(s) / w
        return S, dS, d2S

    def __call__(self, y):
        """Return ``(zeta, zeta', zeta'')`` at ``y``."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        q = 0.25 * self.h0
        r = y - self.h0
        tau = (2.0 * q - np.abs(r)) / q
        S, dS, d2S = self._profile(tau)
        sgn = -np.sign(r)
        return S, dS * sgn / q, d2S / q ** 2


@dataclass(frozen=True)
class TransformCoefficients:
    zeta: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray


def transform_coefficients(h0, h, hprime, y, zeta=None) -> TransformCoefficients:
    """Coefficients of the system under ``x = y + zeta(y)*(h - h0)``.

    ``A = dy/dx``, ``B = d2y/dx2`` and ``C = dy/dt`` as functions of
    ``(h, y)``; the map is only invertible while ``|h - h0| <= h0/8``.

    Raises:
        DomainError: ``h`` outside the invertibility range.
    """
    if zeta is None:
        zeta = CutoffBump(h0)
    if abs(h - h0) > h0 / 8.0:
        raise DomainError(f"|h - h0| = {abs(h - h0):.4g} exceeds h0/8 = {h0 / 8:.4g}; map not invertible",
                          field="h")
    z, dz, d2z = zeta(y)
    dh = h - h0
    J = 1.0 + dz * dh
    return TransformCoefficients(zeta=z, A=1.0 / J, B=-d2z * dh / J ** 3, C=-hprime * z / J)


# ---------------------------------------------------------------------------
# Front-fixed time integration


@dataclass(frozen=True)
class SolverConfig:
    """Discretisation and run controls.

    Attributes:
        N: number of grid intervals on ``[0, 1]`` (nodes ``0..N``).
        t_max: integration horizon.
        dt_policy: ``"cfl"`` (``0.25*dy*h/max(1, |h'|)`` capped by ``dt_max``)
            or ``"fixed"`` (always ``dt``).
        output_dt: time between trajectory rows.
        snapshots: number of profile snapshots kept (spread over ``t_max``).
        flux_order: 2 (one-sided second order) or 1.
        right_bc: ``"dirichlet"`` for the free-boundary problem, ``"neumann"``
            for a fixed-domain auxiliary variant used in consistency checks.
    """

    N: int = 200
    t_max: float = 10.0
    dt_policy: str = "cfl"
    dt: float = 1e-3
    dt_max: float = 0.05
    output_dt: float = 0.1
    snapshots: int = 0
    flux_order: int = 2
    bound_tol: float = 1e-8
    right_bc: str = "dirichlet"

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 16:
            raise DomainError(f"N must be an integer >= 16, got {self.N}", field="N")
        for name in ("t_max", "dt", "dt_max", "output_dt", "bound_tol"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive", field=name)
        if self.dt_policy not in ("cfl", "fixed"):
            raise DomainError(f"unknown dt_policy {self.dt_policy!r}", field="dt_policy")
        if self.flux_order not in (1, 2):
            raise DomainError("flux_order must be 1 or 2", field="flux_order")
        if self.right_bc not in ("dirichlet", "neumann"):
            raise DomainError(f"unknown right_bc {self.right_bc!r}", field="right_bc")
        if self.snapshots < 0:
            raise DomainError("snapshots must be >= 0", field="snapshots")


@dataclass(frozen=True)
class MovingDomainState:
    """Solution at time ``t`` on the nodes ``y_j = j/N`` (``u[N] = v[N] = 0``)."""

    t: float
    h: float
    u: np.ndarray
    v: np.ndarray
    hprime: float

    @property
    def N(self) -> int:
        return self.u.size - 1

    @property
    def y(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.u.size)


def boundary_flux(state: MovingDomainState, p: Parameters, order: int = 2):
    """Front gradients ``(U_y(1), V_y(1))`` and the resulting ``h'``.

    Uses ``(U[N-2] - 4*U[N-1])/(2*dy)`` (with ``U[N] = 0``) for ``order=2``.
    """
    U, V = state.u, state.v
    N = U.size - 1
    if N < 3:
        raise PreconditionError("boundary flux needs at least 3 intervals")
    dy = 1.0 / N
    if order == 2:
        Uy = (U[N - 2] - 4.0 * U[N - 1] + 3.0 * U[N]) / (2.0 * dy)
        Vy = (V[N - 2] - 4.0 * V[N - 1] + 3.0 * V[N]) / (2.0 * dy)
    else:
        Uy = (U[N] - U[N - 1]) / dy
        Vy = (V[N] - V[N - 1]) / dy
    hp = -(p.mu / state.h) * (Uy + p.rho * Vy)
    return Uy, Vy, hp


class Stepper:
    """Reusable single-step integrator bound to one grid and parameter set."""

    def __init__(self, p: Parameters, cfg: SolverConfig, bounds: AprioriBounds | None = None):
        self.p = p
        self.cfg = cfg
        self.bounds = bounds
        N = cfg.N
        self.N = N
        self.dy = 1.0 / N
        self.y = np.linspace(0.0, 1.0, N + 1)
        self.neumann = cfg.right_bc == "neumann"
        # unknowns: nodes 0..N-1 (Dirichlet front) or 0..N (Neumann variant)
        self.m = N + 1 if self.neumann else N
        scale = max(bounds.M1, bounds.M2) if bounds is not None else 1.0
        self.neg_tol = 1e-12 * scale

    def dt_for(self, state: MovingDomainState) -> float:
        cfg = self.cfg
        if cfg.dt_policy == "fixed":
            return cfg.dt
        return min(cfg.dt_max, 0.25 * self.dy * state.h / max(1.0, abs(state.hprime)))

    def _banded(self, coef):
        m = self.m
        ab = np.empty((3, m))
        ab[0, :] = -coef
        ab[1, :] = 1.0 + 2.0 * coef
        ab[2, :] = -coef
        ab[0, 1] = -2.0 * coef          # reflected ghost node at y = 0
        if self.neumann:
            ab[2, m - 2] = -2.0 * coef  # reflected ghost node at y = 1
        return ab

    def _advect(self, W, a):
        # central first difference; W extends to node N (zero for Dirichlet)
        out = np.zeros(self.m)
        out[1:self.N] = a[1:self.N] * (W[2:] - W[:-2]) / (2.0 * self.dy)
        return out

    def advance(self, state: MovingDomainState, dt: float) -> MovingDomainState:
        p, N = self.p, self.N
        U, V, h = state.u, state.v, state.h
        hp = 0.0 if self.neumann else state.hprime
        h_new = h + dt * hp
        a = self.y * (hp / h)
        m = self.m
        rhs_u = U[:m] + dt * (self._advect(U, a) + prey_kinetics(U[:m], V[:m], p.delta))
        rhs_v = V[:m] + dt * (self._advect(V, a) + predator_kinetics(U[:m], V[:m], p.kappa, p.alpha))
        c = dt / (h_new ** 2 * self.dy ** 2)
        U_new = np.zeros(N + 1)
        V_new = np.zeros(N + 1)
        U_new[:m] = solve_banded((1, 1), self._banded(c), rhs_u, check_finite=False)
        V_new[:m] = solve_banded((1, 1), self._banded(p.D * c), rhs_v, check_finite=False)
        t_new = state.t + dt
        if not (np.all(np.isfinite(U_new)) and np.all(np.isfinite(V_new)) and math.isfinite(h_new)):
            raise DivergenceFault(f"non-finite values at t={t_new:.6g}; reduce the time step",
                                  quantity="state", time=t_new)
        for name, W in (("u", U_new), ("v", V_new)):
            wmin = W.min()
            if wmin < -self.neg_tol:
                raise IntegrationFault(f"negative {name} = {wmin:.3g} at t={t_new:.6g}",
                                       quantity=name, value=float(wmin), time=t_new)
            if wmin < 0.0:
                np.maximum(W, 0.0, out=W)
        new = MovingDomainState(t=t_new, h=h_new, u=U_new, v=V_new, hprime=0.0)
        if self.neumann:
            return new
        _, _, hp_new = boundary_flux(new, p, self.cfg.flux_order)
        new = replace(new, hprime=hp_new)
        self._check(new)
        return new

    def _check(self, s: MovingDomainState):
        hp = s.hprime
        N = self.N
        interior_positive = s.u[N - 1] > 0 or s.v[N - 1] > 0
        if hp < 0 or (hp == 0 and interior_positive):
            raise IntegrationFault(f"front speed h' = {hp:.3g} is not positive at t={s.t:.6g}",
                                   quantity="hprime", value=hp, time=s.t)
        b = self.bounds
        if b is None:
            return
        tol = self.cfg.bound_tol
        if hp > b.Lambda + tol:
            raise IntegrationFault(f"front speed h' = {hp:.6g} exceeds Lambda = {b.Lambda:.6g}",
                                   quantity="hprime", value=hp, time=s.t)
        umax, vmax = s.u.max(), s.v.max()
        if umax > b.M1 + tol:
            raise IntegrationFault(f"u = {umax:.6g} exceeds M1 = {b.M1:.6g}", quantity="u", value=umax, time=s.t)
        if vmax > b.M2 + tol:
            raise IntegrationFault(f"v = {vmax:.6g} exceeds M2 = {b.M2:.6g}", quantity="v", value=vmax, time=s.t)


def step(state: MovingDomainState, p: Parameters, cfg: SolverConfig,
         bounds: AprioriBounds | None = None, dt: float | None = None) -> MovingDomainState:
    """Advance one IMEX step; ``dt`` defaults to the configured policy."""
    if state.u.size != cfg.N + 1:
        raise PreconditionError(f"state has {state.u.size - 1} intervals but config expects N={cfg.N}")
    st = Stepper(p, cfg, bounds)
    return st.advance(state, st.dt_for(state) if dt is None else dt)


def initial_state(p: Parameters, ip: InitialProfile, cfg: SolverConfig) -> MovingDomainState:
    y = np.linspace(0.0, 1.0, cfg.N + 1)
    u, v = ip.evaluate(y * ip.h0)
    u = np.array(u, dtype=float)
    v = np.array(v, dtype=float)
    if cfg.right_bc == "dirichlet":
        u[-1] = 0.0
        v[-1] = 0.0
    s = MovingDomainState(t=0.0, h=ip.h0, u=u, v=v, hprime=0.0)
    if cfg.right_bc == "neumann":
        return s
    return replace(s, hprime=boundary_flux(s, p, cfg.flux_order)[2])


# ---------------------------------------------------------------------------
# Trajectories

TRAJECTORY_COLUMNS = ("t", "h", "hprime", "u_sup", "v_sup", "u_center", "v_center")


@dataclass
class Trajectory:
    """Time series of front and norm diagnostics, plus optional profile snapshots.

    ``extremes`` tracks, over every accepted step, the largest ``u`` and
    ``v`` values and the range of ``h'``.
    """

    rows: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    extremes: dict = field(default_factory=dict)
    h1_warning: bool = False
    stopped_early: bool = False
    steps: int = 0
    final_state: MovingDomainState | None = None
    u0_sup: float = 0.0
    v0_sup: float = 0.0

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        i = TRAJECTORY_COLUMNS.index(name)
        return np.array([r[i] for r in self.rows])

    @property
    def t(self):
        return self.column("t")

    @property
    def h(self):
        return self.column("h")

    @property
    def hprime(self):
        return self.column("hprime")

    @property
    def u_sup(self):
        return self.column("u_sup")

    @property
    def v_sup(self):
        return self.column("v_sup")

    @property
    def u_center(self):
        return self.column("u_center")

    @property
    def v_center(self):
        return self.column("v_center")

    def record(self, s: MovingDomainState):
        self.rows.append((s.t, s.h, s.hprime, float(s.u.max()), float(s.v.max()),
                          float(s.u[0]), float(s.v[0])))

    def _track(self, s: MovingDomainState):
        e = self.extremes
        if not e:
            e.update(u_max=-np.inf, v_max=-np.inf, hprime_min=np.inf, hprime_max=-np.inf, u_min=np.inf,
                     v_min=np.inf)
        e["u_max"] = max(e["u_max"], float(s.u.max()))
        e["v_max"] = max(e["v_max"], float(s.v.max()))
        e["u_min"] = min(e["u_min"], float(s.u.min()))
        e["v_min"] = min(e["v_min"], float(s.v.min()))
        e["hprime_min"] = min(e["hprime_min"], s.hprime)
        e["hprime_max"] = max(e["hprime_max"], s.hprime)


def _snapshot_indices(n_out: int, k: int) -> set:
    if k <= 0:
        return set()
    if k == 1:
        return {n_out}
    return {round(i * n_out / (k - 1)) for i in range(k)}


def run(p: Parameters, ip: InitialProfile, cfg: SolverConfig, stop=None,
        bounds: AprioriBounds | None = None) -> Trajectory:
    """Integrate from the initial profile up to ``cfg.t_max``.

    Args:
        stop: optional callable ``stop(trajectory) -> bool`` evaluated after
            each recorded row; returning True ends the run early.
        bounds: a priori bounds enforced on every step (computed from the
            profile when omitted).

    Raises:
        ProfileError: the initial data fail validation.
        IntegrationFault: a step broke an invariant; ``time`` is set.
    """
    validate_initial_profile(ip)
    traj = Trajectory(u0_sup=ip.u_sup, v0_sup=ip.v_sup)
    if not validate_h1(p).satisfied:
        traj.h1_warning = True
        logger.warning("running with delta*alpha + delta >= 1; convergence to coexistence is not expected")
    if bounds is None:
        bounds = apriori_bounds(p, ip)
    stepper = Stepper(p, cfg, bounds)
    state = initial_state(p, ip, cfg)
    n_out = max(1, int(round(cfg.t_max / cfg.output_dt)))
    snap_at = _snapshot_indices(n_out, cfg.snapshots)
    traj.record(state)
    if 0 in snap_at:
        traj.snapshots.append((state.t, state.h, state.y.copy(), state.u.copy(), state.v.copy()))
    k = 1
    while k <= n_out:
        t_next = min(k * cfg.output_dt, cfg.t_max)
        dt = stepper.dt_for(state)
        landing = state.t + dt >= t_next - 1e-12 * max(1.0, t_next)
        if landing:
            dt = t_next - state.t
        try:
            state = stepper.advance(state, dt)
        except IntegrationFault as exc:
            if exc.time is None:
                exc.time = state.t + dt
            traj.final_state = state
            raise
        if landing:
            state = replace(state, t=t_next)
        traj.steps += 1
        traj._track(state)
        if landing:
            traj.record(state)
            if k in snap_at:
                traj.snapshots.append((state.t, state.h, state.y.copy(), state.u.copy(), state.v.copy()))
            k += 1
            if stop is not None and stop(traj):
                traj.stopped_early = True
                break
    traj.final_state = state
    return traj


def ode_envelopes(p: Parameters, u0_sup: float, v0_sup: float, t):
    """Spatially uniform super-solutions dominating ``u`` and ``v``.

    ``ubar' = ubar(1 - ubar)`` from ``u0_sup`` and
    ``vbar' = kappa*vbar(1 - vbar/(M1 + alpha))`` from ``v0_sup``,
    both in closed logistic form.
    """
    t = np.asarray(t, dtype=float)
    M1 = max(1.0, u0_sup)
    K = M1 + p.alpha

    def logistic(x0, rate, cap):
        if x0 == 0:
            return np.zeros_like(t)
        e = np.exp(-rate * t)
        return cap * x0 / (x0 + (cap - x0) * e)

    return logistic(u0_sup, 1.0, 1.0), logistic(v0_sup, p.kappa, K)
