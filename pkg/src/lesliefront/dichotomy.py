"""Spreading/vanishing criteria, run classification and speed bracketing."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InconsistencyError, PreconditionError
from .model import InitialProfile, Parameters, equilibria
from .solver import Trajectory
from .spectral import critical_diffusivity


class Verdict(str, enum.Enum):
    SPREADING = "Spreading"
    VANISHING = "Vanishing"
    UNDETERMINED = "Undetermined"
    FAILED = "Failed"


class Regime(str, enum.Enum):
    SPREADING_FORCED = "SpreadingForced"
    MU_DEPENDENT = "MuDependent"
    OUTSIDE_RANGE = "OutsideLemma"


def critical_radius(p: Parameters) -> float:
    """``h* = (pi/2)*min(1, sqrt(D/kappa))``: a bounded front never passes it."""
    return 0.5 * math.pi * min(1.0, math.sqrt(p.D / p.kappa))


@dataclass(frozen=True)
class ThresholdSet:
    """Analytic spreading and vanishing constants for one set of initial data.

    ``None`` marks a constant whose hypotheses fail: ``mu1``/``mu_bar`` and
    the vanishing constants ``eps``, ``beta``, ``M_tilde``, ``mu_lower``
    need ``h0 < h*``; ``mu2`` needs ``|u0| <= 1``, ``|v0| <= 1 + theta`` and
    ``1 - delta*(1 + theta) > 0``.
    """

    h0: float
    h_star: float
    D_star: float
    mu1: float | None
    mu2: float | None
    mu_bar: float | None
    eps: float | None
    beta: float | None
    M_tilde: float | None
    mu_lower: float | None
    theta: float
    e_star: tuple | None
    notes: tuple = ()

    @property
    def front_cap(self) -> float | None:
        """Limit ``h0*(1 + eps)`` of the barrier front used for vanishing."""
        return None if self.eps is None else self.h0 * (1.0 + self.eps)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("h0", "h_star", "D_star", "mu1", "mu2", "mu_bar", "eps",
                                              "beta", "M_tilde", "mu_lower", "theta")}


def default_theta(p: Parameters, ip: InitialProfile) -> float:
    # 1 + theta must bound the predator for all time, i.e. be at least M2
    return max(max(1.0, ip.u_sup) + p.alpha, ip.v_sup) - 1.0


def thresholds(p: Parameters, ip: InitialProfile, theta: float | None = None) -> ThresholdSet:
    """Evaluate every closed-form criterion for the given initial data.

    Raises:
        InconsistencyError: ``beta <= 0`` although ``h0*(1 + eps) < h*``.
    """
    h0 = ip.h0
    hs = critical_radius(p)
    Ds = critical_diffusivity(p.kappa, h0)
    if theta is None:
        theta = default_theta(p, ip)
    us, vs = ip.u_sup, ip.v_sup
    notes = []
    mu1 = mu2 = mu_bar = eps = beta = Mt = mu_lo = None
    if h0 < hs:
        mu1 = (p.D / p.rho) * max(1.0, vs / p.alpha) * (0.5 * math.pi * math.sqrt(p.D / p.kappa) - h0) \
            / ip.integral_v()
        gate = 1.0 - p.delta * (1.0 + theta)
        if us <= 1.0 and vs <= 1.0 + theta and gate > 0:
            mu2 = max(1.0, us / gate) * (0.5 * math.pi - h0) / ip.integral_u()
            mu_bar = min(mu1, mu2)
        else:
            notes.append("mu2 unavailable: prey bound, predator bound or 1 - delta*(1 + theta) > 0 fails")
            mu_bar = mu1
        eps = 0.5 * (hs / h0 - 1.0)
        r = (0.5 * math.pi) ** 2 / ((1.0 + eps) ** 2 * h0 ** 2)
        beta = 0.5 * min(r * p.D - p.kappa, r - 1.0)
        if beta <= 0:
            raise InconsistencyError(f"beta = {beta:.3g} <= 0 although h0*(1 + eps) < h*")
        Mt = max(us, vs) / math.cos(math.pi / (2.0 + eps))
        mu_lo = eps * h0 ** 2 * beta * (2.0 + eps) / (2.0 * (1.0 + p.rho) * math.pi * Mt)
    else:
        notes.append("h0 >= h*: spreading is certain; mu thresholds and vanishing constants unavailable")
    return ThresholdSet(h0=h0, h_star=hs, D_star=Ds, mu1=mu1, mu2=mu2, mu_bar=mu_bar, eps=eps, beta=beta,
                        M_tilde=Mt, mu_lower=mu_lo, theta=theta, e_star=equilibria(p).e_star,
                        notes=tuple(notes))


def critical_D_rules(p: Parameters, h0: float):
    """Classify the diffusivity ratio against ``D* = 4*kappa*h0**2/pi**2``.

    Returns ``(D*, regime)``: spreading is forced for ``D <= D*``; between
    ``D*`` and ``kappa`` the outcome depends on ``mu``; above ``kappa`` no
    statement applies.
    """
    Ds = critical_diffusivity(p.kappa, h0)
    if p.D <= Ds:
        return Ds, Regime.SPREADING_FORCED
    if p.D <= p.kappa:
        return Ds, Regime.MU_DEPENDENT
    return Ds, Regime.OUTSIDE_RANGE


# ---------------------------------------------------------------------------
# Run classification


@dataclass(frozen=True)
class ClassifierConfig:
    tol_v: float = 1e-6
    tol_m: float = 1e-3
    window: int = 10


@dataclass
class ClassificationReport:
    verdict: Verdict
    rule: str | None = None
    time: float | None = None
    u_error: float | None = None
    v_error: float | None = None
    h_final: float | None = None
    speed: dict | None = None
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"verdict": self.verdict.value, "rule": self.rule, "time": self.time, "u_error": self.u_error,
                "v_error": self.v_error, "h_final": self.h_final, "speed": self.speed, **self.extra}


def _vanishing_index(hp, mass, cfg: ClassifierConfig):
    ok = (hp < cfg.tol_v) & (mass < cfg.tol_m)
    run = 0
    for i, flag in enumerate(ok):
        run = run + 1 if flag else 0
        if run >= cfg.window:
            return i
    return None


def classify(traj: Trajectory, th: ThresholdSet, cfg: ClassifierConfig = ClassifierConfig()) -> ClassificationReport:
    """Verdict for a trajectory.

    Spreading is certified at the first recorded time with ``h > h*``
    (a bounded front never exceeds ``h*``). Vanishing needs ``h' < tol_v``
    and ``|u| + |v| < tol_m`` over ``window`` consecutive rows. A crossing
    anywhere in the trajectory overrides a vanishing signal.
    """
    if len(traj) == 0:
        raise PreconditionError("cannot classify an empty trajectory")
    t, h = traj.t, traj.h
    rep = ClassificationReport(verdict=Verdict.UNDETERMINED, h_final=float(h[-1]))
    above = np.nonzero(h > th.h_star)[0]
    if above.size:
        i = above[0]
        rep.verdict, rep.rule, rep.time = Verdict.SPREADING, "h-crossing", float(t[i])
        if th.e_star is not None:
            rep.u_error = float(abs(traj.u_center[-1] - th.e_star[0]))
            rep.v_error = float(abs(traj.v_center[-1] - th.e_star[1]))
        return rep
    i = _vanishing_index(traj.hprime, traj.u_sup + traj.v_sup, cfg)
    if i is not None:
        rep.verdict, rep.rule, rep.time = Verdict.VANISHING, "decay", float(t[i])
    return rep


class EarlyExit:
    """Stop callback for :func:`lesliefront.solver.run` once a verdict is certain."""

    def __init__(self, th: ThresholdSet, cfg: ClassifierConfig = ClassifierConfig()):
        self.th = th
        self.cfg = cfg
        self._run = 0

    def __call__(self, traj: Trajectory) -> bool:
        row = traj.rows[-1]
        if row[1] > self.th.h_star:
            return True
        if row[2] < self.cfg.tol_v and row[3] + row[4] < self.cfg.tol_m:
            self._run += 1
        else:
            self._run = 0
        return self._run >= self.cfg.window


def speed_estimate(traj: Trajectory, s_lower: float, s_upper: float, window_fraction: float = 0.5,
                   margin: float = 0.05, verdict: Verdict = Verdict.SPREADING) -> dict:
    """Front speed from the trailing part of a spreading trajectory.

    ``slope`` is the least-squares slope of ``h`` against ``t`` over the
    last ``window_fraction`` of the rows; ``within_bracket`` compares it
    with ``[s_lower*(1 - margin), s_upper*(1 + margin)]``.

    Raises:
        PreconditionError: the run is not spreading or the window holds fewer than 10 rows.
    """
    if Verdict(verdict) is not Verdict.SPREADING:
        raise PreconditionError(f"speed estimate needs a spreading run, got {Verdict(verdict).value}")
    t, h = traj.t, traj.h
    n = len(t)
    k = int(math.ceil(window_fraction * n))
    if k < 10:
        raise PreconditionError(f"speed window holds {k} samples; need at least 10")
    tw, hw = t[n - k:], h[n - k:]
    slope = float(np.polyfit(tw, hw, 1)[0])
    ratio = float(h[-1] / t[-1]) if t[-1] > 0 else float("nan")
    within = s_lower * (1.0 - margin) <= slope <= s_upper * (1.0 + margin)
    return {"slope": slope, "endpoint_ratio": ratio, "bracket": [s_lower, s_upper], "within_bracket": bool(within)}
