"""Method-level STP: reference values, report structure, orderings."""
import math

import numpy as np
import pytest

from cachewave import ChannelParams, Method, PowerSplit, RateConfig, evaluate
from cachewave.stp import stp_method1, stp_method2, stp_method3, stp_method4

CH = ChannelParams(lambda1=1.0, lambda2=0.1, power=10.0)
ALPHA = PowerSplit(math.sqrt(0.5))
RATES = RateConfig.equal_split(1.0, 1.0)
TOL = 1e-11


def test_method_values_match_reference():
    assert abs(stp_method1(CH, ALPHA, RATES, "jensen").stp - 0.909072035144508) < TOL
    assert abs(stp_method1(CH, ALPHA, RATES, "exact").stp - 0.896696026013560) < TOL
    assert abs(stp_method2(CH, ALPHA, RATES, "jensen").stp - 0.868074400807488) < TOL
    assert abs(stp_method2(CH, ALPHA, RATES, "exact").stp - 0.841392928498485) < TOL
    assert abs(stp_method3(CH, ALPHA, RATES).stp - 0.740957915425939) < TOL
    # At R2 = 1 the interference-limited clause of Method 4 is infeasible
    # for the uniform split, so its STP collapses exactly to 0.
    assert stp_method4(CH, ALPHA, RATES).stp == 0.0


def test_report_structure():
    rep = stp_method1(CH, ALPHA, RATES, "jensen")
    assert rep.method is Method.M1_JOINT_SIC
    assert rep.stp == 0.5 * (rep.cache1_success + rep.cache2_success)
    assert set(rep.factors) == {"eta1", "gamma1", "eta2", "gamma2"}
    assert rep.cache1_success == rep.factors["eta1"] * rep.factors["gamma1"]
    assert rep.cache2_success == rep.factors["eta2"] * rep.factors["gamma2"]

    assert set(stp_method2(CH, ALPHA, RATES).factors) == {"gamma_bar1", "gamma_bar2"}
    assert set(stp_method3(CH, ALPHA, RATES).factors) == {
        "eta1", "breve11", "breve12", "eta2", "breve21", "breve22"}
    assert set(stp_method4(CH, ALPHA, RATES).factors) == {
        "breve11", "hat12", "hat21", "breve22"}


def test_all_rates_zero_gives_certainty():
    rc = RateConfig.equal_split(0.0, 0.0)
    for fn in (stp_method1, stp_method2, stp_method3, stp_method4):
        assert fn(CH, ALPHA, rc).stp == 1.0


def test_method2_is_bitwise_split_invariant():
    base = stp_method2(CH, ALPHA, RATES, "exact").stp
    rng = np.random.default_rng(17)
    for _ in range(50):
        rc = RateConfig(r=1.0, r_tilde=1.0,
                        r1=float(rng.uniform(0.0, 2.0)),
                        r_tilde1=float(rng.uniform(0.0, 2.0)))
        assert stp_method2(CH, ALPHA, rc, "exact").stp == base


def test_method1_dominates_method3_pointwise():
    # The joint sum-rate event contains the intersection of the per-sub-
    # packet events, so M1 >= M3 at every shared allocation.
    rng = np.random.default_rng(23)
    for _ in range(100):
        ch = ChannelParams(float(rng.uniform(0.05, 2.0)), float(rng.uniform(0.05, 2.0)),
                           float(rng.uniform(1.0, 100.0)))
        r, rt = float(rng.uniform(0.05, 2.0)), float(rng.uniform(0.05, 2.0))
        rc = RateConfig(r, rt, float(rng.uniform(0.0, 2.0 * r)),
                        float(rng.uniform(0.0, 2.0 * rt)))
        a = float(rng.uniform(0.0, 1.0))
        assert stp_method1(ch, a, rc, "exact").stp >= stp_method3(ch, a, rc).stp - 1e-9
        assert stp_method1(ch, a, rc, "jensen").stp >= stp_method3(ch, a, rc).stp - 1e-9


def test_jensen_mode_upper_bounds_exact_mode():
    for fn in (stp_method1, stp_method2):
        assert fn(CH, ALPHA, RATES, "jensen").stp >= fn(CH, ALPHA, RATES, "exact").stp - 1e-9


def test_evaluate_dispatch_and_parsing():
    rep = evaluate(CH, ALPHA, RATES, Method.M3_SEPARATE_SIC)
    assert rep.stp == stp_method3(CH, ALPHA, RATES).stp
    assert evaluate(CH, ALPHA, RATES, "M2").method is Method.M2_JOINT_NOSIC
    assert Method.parse("m4") is Method.M4_SEPARATE_NOSIC
    assert Method.parse("M1_joint_sic") is Method.M1_JOINT_SIC
    with pytest.raises(ValueError):
        Method.parse("M5")
    with pytest.raises(ValueError):
        stp_method1(CH, ALPHA, RATES, gamma_mode="bogus")
