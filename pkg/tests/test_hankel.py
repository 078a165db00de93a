import math

import numpy as np
import pytest

from fdem1d import hankel

# Closed-form pairs (Lipschitz integral and its parameter derivatives):
#   J0: exp(-a*lam)        -> 1/sqrt(a^2+rho^2)
#   J0: lam^2*exp(-a*lam)  -> (2a^2-rho^2)/(a^2+rho^2)^(5/2)
#   J1: exp(-a*lam)        -> (1 - a/sqrt(a^2+rho^2))/rho
#   J1: lam^2*exp(-a*lam)  -> 3*a*rho/(a^2+rho^2)^(5/2)

A_GRID = np.logspace(math.log10(0.1), math.log10(5.0), 12)
RHO_GRID = np.logspace(math.log10(0.1), math.log10(10.0), 12)


def test_filters_have_positive_increasing_nodes():
    for order in (0, 1):
        filt = hankel.get_filter(order)
        base = filt.base
        assert len(filt.weights) == len(base) >= 100
        assert np.all(base > 0)
        assert np.all(np.diff(base) > 0)


def test_exp_pair_order0_example():
    a = 1.8
    got = hankel.transform(lambda lam: np.exp(-a * lam), 0, 1.0)
    assert got.real == pytest.approx(1.0 / math.hypot(a, 1.0), rel=3e-7)


def test_lam2_exp_pair_order0_example():
    got = hankel.transform(lambda lam: lam**2 * np.exp(-lam), 0, 1.0)
    assert got.real == pytest.approx(2.0**-2.5, rel=3e-7)


def test_zero_kernel_gives_zero():
    assert hankel.transform(lambda lam: 0.0 * lam, 0, 2.0) == 0.0


@pytest.mark.parametrize("order", [0, 1])
def test_exp_pairs_to_1e6_over_acceptance_ranges(order):
    worst = 0.0
    for a in A_GRID:
        for rho in RHO_GRID:
            got = hankel.transform(lambda lam: np.exp(-a * lam), order, rho)
            r = math.hypot(a, rho)
            exact = 1.0 / r if order == 0 else (1.0 - a / r) / rho
            worst = max(worst, abs(got.real - exact) / abs(exact))
    assert worst < 1e-6


def test_lam2_variant_to_1e6():
    # the target changes sign along a = rho/sqrt(2); measure against the
    # cancellation-free magnitude there
    worst = 0.0
    for a in A_GRID:
        for rho in RHO_GRID:
            got = hankel.transform(
                lambda lam: lam**2 * np.exp(-a * lam), 0, rho)
            r = math.hypot(a, rho)
            exact = (2 * a * a - rho * rho) / r**5
            denom = (2 * a * a + rho * rho) / r**5
            worst = max(worst, abs(got.real - exact) / denom)
            got = hankel.transform(
                lambda lam: lam**2 * np.exp(-a * lam), 1, rho)
            exact = 3 * a * rho / r**5
            worst = max(worst, abs(got.real - exact) / abs(exact))
    assert worst < 1e-6


def test_linearity(rng):
    a, b = 0.7, 2.2
    alpha, beta = 1.37, -0.41
    f = lambda lam: np.exp(-a * lam)
    g = lambda lam: lam * np.exp(-b * lam)
    combo = lambda lam: alpha * f(lam) + beta * g(lam)
    for order in (0, 1):
        lhs = hankel.transform(combo, order, 1.3)
        rhs = (alpha * hankel.transform(f, order, 1.3)
               + beta * hankel.transform(g, order, 1.3))
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_non_finite_kernel_reports_node():
    def kernel(lam):
        vals = np.exp(-lam)
        vals[3] = np.nan
        return vals

    with pytest.raises(hankel.QuadratureError, match="lambda="):
        hankel.transform(kernel, 0, 1.0)


def test_rho_must_be_positive():
    with pytest.raises(ValueError):
        hankel.transform(lambda lam: np.exp(-lam), 0, 0.0)


def test_unsupported_order():
    with pytest.raises(ValueError):
        hankel.get_filter(2)
