"""Model constants, equilibria, initial data and a priori bounds.

The nondimensional system on the moving habitat ``0 < x < h(t)`` reads::

    u_t = u_xx + u(1 - u) - delta*u*v
    v_t = D*v_xx + kappa*v*(1 - v/(u + alpha))
    h'  = -mu*(u_x + rho*v_x)        at x = h(t)

with ``u_x = v_x = 0`` at ``x = 0`` and ``u = v = 0`` at the front.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError, PreconditionError, ProfileError


def _require_positive(**values):
    for name, val in values.items():
        if not (val > 0) or not math.isfinite(val):
            raise DomainError(f"{name} must be a positive finite number, got {val!r}", field=name)


@dataclass(frozen=True)
class DimensionalParameters:
    """Constants of the dimensional reaction-diffusion predator-prey model.

    ``r``, ``G``: prey growth rate and carrying capacity; ``a``: predator growth
    rate; ``b``, ``c``: interaction coefficients; ``G1``: refuge level;
    ``d1``, ``d2``: diffusivities of prey and predator.
    """

    r: float
    G: float
    a: float
    b: float
    c: float
    G1: float
    d1: float
    d2: float

    def __post_init__(self):
        _require_positive(**{k: getattr(self, k) for k in ("r", "G", "a", "b", "c", "G1", "d1", "d2")})


@dataclass(frozen=True)
class Parameters:
    """Nondimensional constants of the free-boundary system.

    Attributes:
        delta: predation pressure.
        alpha: relative refuge for the predator.
        kappa: relative predator growth rate.
        D: predator/prey diffusivity ratio.
        mu: expansion coefficient in the front law.
        rho: weight of the predator gradient in the front law.
    """

    delta: float
    alpha: float
    kappa: float
    D: float
    mu: float = 1.0
    rho: float = 1.0

    def __post_init__(self):
        _require_positive(delta=self.delta, alpha=self.alpha, kappa=self.kappa,
                          D=self.D, mu=self.mu, rho=self.rho)

    @property
    def h1_satisfied(self) -> bool:
        return validate_h1(self).satisfied

    def replace(self, **changes) -> "Parameters":
        kw = {k: getattr(self, k) for k in ("delta", "alpha", "kappa", "D", "mu", "rho")}
        kw.update(changes)
        return Parameters(**kw)


def nondimensionalize(p: DimensionalParameters, mu: float = 1.0, rho: float = 1.0) -> Parameters:
    """Rescale dimensional constants; ``mu`` and ``rho`` are supplied directly."""
    return Parameters(
        delta=p.a * p.b * p.G / (p.r * p.c),
        alpha=p.G1 / p.G,
        kappa=p.a / p.r,
        D=p.d2 / p.d1,
        mu=mu,
        rho=rho,
    )


def to_dimensional_densities(p: DimensionalParameters, u, v):
    """Map rescaled densities back to prey ``N`` and predator ``P``."""
    return p.G * np.asarray(u), p.a * p.G / p.c * np.asarray(v)


def dimensional_kinetics(p: DimensionalParameters, N, P):
    """Reaction terms of the dimensional model at densities ``(N, P)``."""
    N = np.asarray(N, dtype=float)
    P = np.asarray(P, dtype=float)
    dN = p.r * N * (1.0 - N / p.G) - p.b * N * P
    dP = P * (p.a - p.c * P / (N + p.G1))
    return dN, dP


def prey_kinetics(u, v, delta):
    """``u(1 - u) - delta*u*v``."""
    return u * (1.0 - u) - delta * u * v


def predator_kinetics(u, v, kappa, alpha):
    """``kappa*v*(1 - v/(u + alpha))``; finite for ``u >= 0``."""
    return kappa * v * (1.0 - v / (u + alpha))


@dataclass(frozen=True)
class H1Report:
    satisfied: bool
    margin: float


def validate_h1(p: Parameters) -> H1Report:
    """Check ``delta*alpha + delta < 1``; ``margin`` is ``1 - delta*alpha - delta``."""
    margin = 1.0 - p.delta * p.alpha - p.delta
    return H1Report(satisfied=margin > 0, margin=margin)


@dataclass(frozen=True)
class Equilibria:
    e1: tuple
    e2: tuple
    e3: tuple
    e_star: tuple | None


def equilibria(p: Parameters) -> Equilibria:
    """Constant steady states; the coexistence state exists iff ``delta*alpha < 1``."""
    e_star = None
    if p.delta * p.alpha < 1:
        us = (1.0 - p.delta * p.alpha) / (1.0 + p.delta)
        e_star = (us, p.alpha + us)
    return Equilibria(e1=(0.0, 0.0), e2=(0.0, p.alpha), e3=(1.0, 0.0), e_star=e_star)


@dataclass(frozen=True)
class SqueezeSequences:
    """Upper and lower bounds produced by the iterated comparison argument."""

    u_upper: np.ndarray
    u_lower: np.ndarray
    v_upper: np.ndarray
    v_lower: np.ndarray
    limits: tuple

    def contraction_ratios(self, floor: float = 1e-9) -> np.ndarray:
        """Ratios of successive bracket widths ``u_upper - u_lower`` above ``floor``."""
        gap = self.u_upper - self.u_lower
        keep = gap[:-1] > floor
        return gap[1:][keep] / gap[:-1][keep]


def squeeze_limits(p: Parameters, n: int) -> SqueezeSequences:
    """Iterate the squeeze recurrences ``n`` times.

    Starting from ``u_upper[0] = 1`` the bounds are refined by::

        v_upper[i] = u_upper[i] + alpha
        u_lower[i] = 1 - delta*v_upper[i]
        v_lower[i] = u_lower[i] + alpha
        u_upper[i+1] = 1 - delta*v_lower[i]

    Both ``u`` sequences close in on ``u*`` with ratio ``delta**2`` per step.

    Raises:
        PreconditionError: (H1) fails, so the lower bounds need not be positive.
    """
    if n < 1:
        raise PreconditionError("squeeze iteration needs n >= 1")
    if not validate_h1(p).satisfied:
        raise PreconditionError(
            f"squeeze iteration requires delta*alpha + delta < 1 (margin {validate_h1(p).margin:.3g})")
    d, a = p.delta, p.alpha
    uu = np.empty(n)
    ul = np.empty(n)
    vu = np.empty(n)
    vl = np.empty(n)
    u_up = 1.0
    for i in range(n):
        uu[i] = u_up
        vu[i] = u_up + a
        ul[i] = 1.0 - d * vu[i]
        vl[i] = ul[i] + a
        u_up = 1.0 - d * vl[i]
    # the fixed point of the two-sided system is the coexistence state
    us = (1.0 - d * a) / (1.0 + d)
    return SqueezeSequences(uu, ul, vu, vl, (us, us + a))


@dataclass(frozen=True)
class InitialProfile:
    """Initial densities on ``[0, h0]``.

    Samples live on the uniform grid ``x``. ``du_sup``/``dv_sup`` hold
    ``max |u0'|`` and ``max |v0'|``; ``du_left``/``dv_left`` the slopes at
    ``x = 0``. For the built-in cosine family these are exact.
    """

    h0: float
    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    du_sup: float
    dv_sup: float
    du_left: float = 0.0
    dv_left: float = 0.0
    kind: str = "table"
    amp_u: float | None = None
    amp_v: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def u_sup(self) -> float:
        return float(np.max(np.abs(self.u)))

    @property
    def v_sup(self) -> float:
        return float(np.max(np.abs(self.v)))

    def integral_u(self) -> float:
        if self.kind == "cosine":
            return 2.0 * self.amp_u * self.h0 / math.pi
        return float(simpson(self.u, x=self.x))

    def integral_v(self) -> float:
        if self.kind == "cosine":
            return 2.0 * self.amp_v * self.h0 / math.pi
        return float(simpson(self.v, x=self.x))

    def evaluate(self, x):
        """Densities at arbitrary points of ``[0, h0]``."""
        x = np.asarray(x, dtype=float)
        if self.kind == "cosine":
            c = np.cos(0.5 * math.pi * x / self.h0)
            return self.amp_u * c, self.amp_v * c
        return np.interp(x, self.x, self.u), np.interp(x, self.x, self.v)


def make_initial_profile(kind: str = "cosine", amp_u: float = 1.0, amp_v: float = 1.0,
                         h0: float = 1.0, n: int = 201) -> InitialProfile:
    """Build ``u0 = amp_u*cos(pi*x/(2*h0))`` and the same shape for ``v0``."""
    if kind != "cosine":
        raise DomainError(f"unknown profile kind {kind!r}", field="kind")
    _require_positive(amp_u=amp_u, amp_v=amp_v, h0=h0)
    if n < 3:
        raise DomainError("profile needs at least 3 samples", field="n")
    x = np.linspace(0.0, h0, n)
    c = np.cos(0.5 * np.pi * x / h0)
    c[-1] = 0.0
    k = 0.5 * math.pi / h0
    return InitialProfile(h0=h0, x=x, u=amp_u * c, v=amp_v * c,
                          du_sup=amp_u * k, dv_sup=amp_v * k,
                          kind="cosine", amp_u=amp_u, amp_v=amp_v)


def profile_from_table(x, u, v) -> InitialProfile:
    """Wrap user-supplied samples; slopes are estimated by finite differences."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.ndim != 1 or x.shape != u.shape or x.shape != v.shape or x.size < 3:
        raise DomainError("x, u, v must be 1-D arrays of equal length >= 3", field="x")
    if x[0] != 0.0 or np.any(np.diff(x) <= 0):
        raise DomainError("x must start at 0 and increase strictly", field="x")
    du = np.gradient(u, x, edge_order=2)
    dv = np.gradient(v, x, edge_order=2)
    return InitialProfile(h0=float(x[-1]), x=x, u=u, v=v,
                          du_sup=float(np.max(np.abs(du))), dv_sup=float(np.max(np.abs(dv))),
                          du_left=float(du[0]), dv_left=float(dv[0]), kind="table")


def validate_initial_profile(ip: InitialProfile) -> None:
    """Check the compatibility conditions on the initial data.

    ``u0'(0) = v0'(0) = 0``, ``u0(h0) = v0(h0) = 0``, and both densities
    positive on ``[0, h0)``. Derivatives of tabulated data are accepted up
    to ``1e-6`` times the amplitude.

    Raises:
        ProfileError: on the first violated condition.
    """
    if not ip.h0 > 0:
        raise ProfileError(f"h0 must be positive, got {ip.h0}")
    for name, arr, slope in (("u0", ip.u, ip.du_left), ("v0", ip.v, ip.dv_left)):
        amp = float(np.max(np.abs(arr))) if arr.size else 0.0
        if amp == 0.0:
            raise ProfileError(f"{name} vanishes identically")
        if abs(arr[-1]) > 1e-12 * amp:
            raise ProfileError(f"{name}(h0) = {arr[-1]:.3g} is not zero")
        if np.any(arr[:-1] <= 0):
            raise ProfileError(f"{name} is not positive on [0, h0)")
        tol = 0.0 if ip.kind == "cosine" else 1e-6 * amp
        if abs(slope) > tol:
            raise ProfileError(f"{name}'(0) = {slope:.3g} is not zero")


@dataclass(frozen=True)
class AprioriBounds:
    """Sup bounds ``M1`` (prey), ``M2`` (predator), barrier slope ``M`` and front-speed cap ``Lambda``."""

    M1: float
    M2: float
    M: float
    Lambda: float


def apriori_bounds(p: Parameters, ip: InitialProfile) -> AprioriBounds:
    M1 = max(1.0, ip.u_sup)
    M2 = max(M1 + p.alpha, ip.v_sup)
    M = max(1.0 / ip.h0, math.sqrt(2.0) / 2.0, math.sqrt(p.kappa / (2.0 * p.D)),
            ip.du_sup / M1, ip.dv_sup / M2)
    Lam = 2.0 * M * p.mu * (M1 + p.rho * M2)
    return AprioriBounds(M1=M1, M2=M2, M=M, Lambda=Lam)
