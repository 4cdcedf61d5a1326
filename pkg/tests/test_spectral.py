import math

import numpy as np
import pytest

from lesliefront.errors import DomainError
from lesliefront.spectral import EigenProblemSpec, critical_diffusivity, critical_length, principal_eigenvalue


@pytest.mark.parametrize("d, a, L, sigma", [
    (1.0, 1.0, math.pi / 2, 0.0),
    (1.0, 1.0, math.pi, 0.75),
    (2.0, 1.0, math.pi / 2, -1.0),
])
def test_principal_eigenvalue(d, a, L, sigma):
    assert principal_eigenvalue(EigenProblemSpec(d, a, L)) == pytest.approx(sigma, abs=1e-15)


def test_eigenfunction_residual():
    # phi = cos(pi x / 2L) solves d phi'' + a phi = sigma phi with phi'(0) = phi(L) = 0
    d, a, L = 1.3, 0.8, 2.1
    sigma = principal_eigenvalue(EigenProblemSpec(d, a, L))
    x = np.linspace(0, L, 2001)
    k = math.pi / (2 * L)
    phi, phi_xx = np.cos(k * x), -k * k * np.cos(k * x)
    assert np.max(np.abs(d * phi_xx + a * phi - sigma * phi)) < 1e-14


@pytest.mark.parametrize("d, a, expected", [(1, 1, math.pi / 2), (4, 1, math.pi), (1, 4, math.pi / 4)])
def test_critical_length(d, a, expected):
    assert critical_length(d, a) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("a, L, expected", [(1, math.pi / 2, 1.0), (2, math.pi, 8.0)])
def test_critical_diffusivity(a, L, expected):
    assert critical_diffusivity(a, L) == pytest.approx(expected, abs=1e-14)


def test_critical_diffusivity_matches_front_threshold():
    kappa, h0 = 1.7, 0.9
    assert critical_diffusivity(kappa, h0) == 4 * kappa * h0 ** 2 / math.pi ** 2


@pytest.mark.parametrize("bad", [dict(d=0, a=1, L=1), dict(d=1, a=-1, L=1), dict(d=1, a=1, L=0)])
def test_spec_rejects_nonpositive(bad):
    with pytest.raises(DomainError):
        EigenProblemSpec(**bad)


def test_duality_on_grid():
    g = np.linspace(0.2, 5.0, 10)
    for d in g:
        for a in g:
            Ls = critical_length(d, a)
            for L in g:
                s = principal_eigenvalue(EigenProblemSpec(d, a, L))
                ds = critical_diffusivity(a, L)
                if abs(s) > 1e-12:
                    assert np.sign(s) == np.sign(ds - d) == np.sign(L - Ls)
                assert abs(principal_eigenvalue(EigenProblemSpec(d, a, Ls))) < 1e-12
