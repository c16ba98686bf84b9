"""Adaptive Gauss-Kronrod quadrature: exactness, bookkeeping, failure modes."""
import math

import pytest

from cachewave.quadrature import IntegralResult, NonConvergence, integrate


def test_polynomial_is_exact_on_one_panel():
    # G7/K15 integrates low-degree polynomials exactly; no subdivision needed.
    res = integrate(lambda x: x ** 3, 0.0, 1.0)
    assert abs(res.value - 0.25) < 1e-14
    assert res.evaluations == 15
    assert res.error_estimate < 1e-14


def test_exponential_value():
    res = integrate(math.exp, 0.0, 1.0, rel_tol=1e-9)
    assert abs(res.value - (math.e - 1.0)) < 1e-12


def test_oscillatory_integrand_subdivides():
    # 40/(2*pi) ~ 6.4 periods on [0, 1]: far beyond one panel's reach.
    # (An integer number of periods would integrate to ~0 and be accepted
    # immediately under the absolute floor, so the interval must not be a
    # multiple of the period.)
    res = integrate(lambda x: math.sin(40.0 * x), 0.0, 1.0, rel_tol=1e-9)
    exact = (1.0 - math.cos(40.0)) / 40.0
    assert abs(res.value - exact) < 1e-10
    assert res.evaluations > 15
    # Evaluation count is 15 for the root panel plus 30 per split.
    assert (res.evaluations - 15) % 30 == 0


def test_empty_and_reversed_intervals_are_zero():
    assert integrate(math.exp, 1.0, 1.0) == IntegralResult(0.0, 0.0, 0)
    assert integrate(math.exp, 2.0, 1.0) == IntegralResult(0.0, 0.0, 0)


def test_rel_tol_validation():
    for bad in (0.0, -1e-9, 0.2, math.nan):
        with pytest.raises(ValueError):
            integrate(math.exp, 0.0, 1.0, rel_tol=bad)
    # Upper edge of the accepted range is allowed.
    integrate(math.exp, 0.0, 1.0, rel_tol=0.1)


def test_linearity():
    f = lambda x: math.exp(-x)
    g = lambda x: x * x
    combo = integrate(lambda x: 2.0 * f(x) + 3.0 * g(x), 0.0, 2.0, rel_tol=1e-9)
    parts = 2.0 * integrate(f, 0.0, 2.0, rel_tol=1e-9).value \
        + 3.0 * integrate(g, 0.0, 2.0, rel_tol=1e-9).value
    assert abs(combo.value - parts) < 1e-9 * abs(parts)


def test_interval_additivity():
    f = lambda x: math.exp(-x * x)
    whole = integrate(f, 0.0, 3.0, rel_tol=1e-9).value
    split = integrate(f, 0.0, 1.2, rel_tol=1e-9).value \
        + integrate(f, 1.2, 3.0, rel_tol=1e-9).value
    assert abs(whole - split) < 1e-9 * abs(whole)


def test_integrable_endpoint_blowup_converges():
    # Open nodes never touch x=0; x^{-1/2} is integrable and must converge.
    res = integrate(lambda x: x ** -0.5, 0.0, 1.0, rel_tol=1e-6)
    assert abs(res.value - 2.0) < 1e-4


def test_non_convergence_raises():
    # x^{-0.99} is integrable but needs refinement far beyond a small depth cap.
    with pytest.raises(NonConvergence):
        integrate(lambda x: x ** -0.99, 0.0, 1.0, rel_tol=1e-9, max_depth=8)


def test_error_estimate_bounds_true_error():
    res = integrate(lambda x: math.sin(3.0 * x) * math.exp(-x), 0.0, 4.0, rel_tol=1e-9)
    exact = (3.0 - math.exp(-4.0) * (3.0 * math.cos(12.0) + math.sin(12.0))) / 10.0
    assert abs(res.value - exact) <= max(res.error_estimate * 10.0, 1e-12)
