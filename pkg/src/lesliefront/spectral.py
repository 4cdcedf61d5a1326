"""Closed forms for the mixed Neumann-Dirichlet eigenproblem.

``d*phi'' + a*phi = sigma*phi`` on ``(0, L)`` with ``phi'(0) = phi(L) = 0``
has principal eigenfunction ``cos(pi*x/(2L))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import _require_positive


@dataclass(frozen=True)
class EigenProblemSpec:
    d: float
    a: float
    L: float

    def __post_init__(self):
        _require_positive(d=self.d, a=self.a, L=self.L)


def principal_eigenvalue(spec: EigenProblemSpec) -> float:
    """``sigma_1 = a - d*pi**2/(4*L**2)``."""
    return spec.a - spec.d * math.pi ** 2 / (4.0 * spec.L ** 2)


def critical_length(d: float, a: float) -> float:
    """Domain length at which ``sigma_1`` changes sign: ``(pi/2)*sqrt(d/a)``."""
    _require_positive(d=d, a=a)
    return 0.5 * math.pi * math.sqrt(d / a)


def critical_diffusivity(a: float, L: float) -> float:
    """Diffusivity at which ``sigma_1`` changes sign: ``4*a*L**2/pi**2``."""
    _require_positive(a=a, L=L)
    return 4.0 * a * L ** 2 / math.pi ** 2
