"""Monte Carlo oracle: reproducibility, per-draw implications, convergence."""
import math

import numpy as np
import pytest

from cachewave import ChannelParams, McConfig, Method, PowerSplit, RateConfig
from cachewave.channel import GainDraw, gain_stream, sample_gains
from cachewave.mc import (
    estimate_factor,
    estimate_stp,
    success_masks,
    trial_success,
    UnknownFactor,
)
from cachewave.stp import (
    gamma1_exact,
    stp_method1,
    stp_method2,
    stp_method3,
)

CH = ChannelParams(lambda1=1.0, lambda2=0.1, power=10.0)
ALPHA = PowerSplit(math.sqrt(0.5))
RATES = RateConfig.equal_split(1.0, 1.0)


def test_estimates_are_bitwise_reproducible():
    cfg = McConfig(n_trials=100_000, seed=9, mode="physical")
    a = estimate_stp(CH, ALPHA, RATES, Method.M1_JOINT_SIC, cfg)
    b = estimate_stp(CH, ALPHA, RATES, Method.M1_JOINT_SIC, cfg)
    assert a == b
    cfg_ff = McConfig(n_trials=100_000, seed=9, mode="formula_faithful")
    assert estimate_stp(CH, ALPHA, RATES, Method.M3_SEPARATE_SIC, cfg_ff) \
        == estimate_stp(CH, ALPHA, RATES, Method.M3_SEPARATE_SIC, cfg_ff)


def test_std_err_formula_and_scaling():
    small = estimate_stp(CH, ALPHA, RATES, Method.M2_JOINT_NOSIC,
                         McConfig(n_trials=10_000, seed=3, mode="physical"))
    large = estimate_stp(CH, ALPHA, RATES, Method.M2_JOINT_NOSIC,
                         McConfig(n_trials=1_000_000, seed=3, mode="physical"))
    for est in (small, large):
        assert est.std_err == math.sqrt(est.mean * (1.0 - est.mean) / est.n_trials)
    # 1/sqrt(n): two orders of magnitude in n is one order in std_err.
    ratio = small.std_err / large.std_err
    assert 8.0 < ratio < 12.5


def test_trial_success_zero_rates_always_succeed():
    draw = GainDraw(0.01, 0.02, 0.03, 0.04)
    rc = RateConfig.equal_split(0.0, 0.0)
    for m in Method:
        assert trial_success(m, draw, ALPHA, rc, CH.power) == (True, True)


def test_trial_success_m4_feasibility_boundary():
    # r2 = ln 2 sits exactly on the interference ceiling at the uniform
    # split: no finite HT gain can satisfy the cache-1 HT clause.
    rc = RateConfig(r=1.0, r_tilde=1.0, r1=2.0 - math.log(2.0), r_tilde1=1.0)
    for ght in (1e-6, 1.0, 1e9):
        c1, _ = trial_success(Method.M4_SEPARATE_NOSIC,
                              GainDraw(1e12, ght, 1.0, 1.0), ALPHA, rc, CH.power)
        assert c1 is False


def _shared_draws(n, seed=101):
    rng = gain_stream(seed)
    return (sample_gains(CH.lambda1, n, rng), sample_gains(CH.lambda1, n, rng),
            sample_gains(CH.lambda2, n, rng), sample_gains(CH.lambda2, n, rng))


def test_per_draw_m3_implies_m1_any_allocation():
    g = _shared_draws(100_000)
    rc = RateConfig(r=1.0, r_tilde=0.8, r1=1.3, r_tilde1=0.5)
    m1c1, m1c2 = success_masks(Method.M1_JOINT_SIC, CH.power, 0.6, rc, *g)
    m3c1, m3c2 = success_masks(Method.M3_SEPARATE_SIC, CH.power, 0.6, rc, *g)
    assert not np.any(m3c1 & ~m1c1)
    assert not np.any(m3c2 & ~m1c2)


def test_per_draw_chain_at_equal_split():
    # At the shared benchmark point (uniform power, equal split, R = R~)
    # the per-cache success sets nest: M4 within M3 within M1, and M2
    # within M1.
    g = _shared_draws(100_000, seed=55)
    rc = RateConfig.equal_split(1.0, 1.0)
    masks = {m: success_masks(m, CH.power, ALPHA, rc, *g) for m in Method}
    for cache in (0, 1):
        m1 = masks[Method.M1_JOINT_SIC][cache]
        m2 = masks[Method.M2_JOINT_NOSIC][cache]
        m3 = masks[Method.M3_SEPARATE_SIC][cache]
        m4 = masks[Method.M4_SEPARATE_NOSIC][cache]
        assert not np.any(m4 & ~m3)
        assert not np.any(m3 & ~m1)
        assert not np.any(m2 & ~m1)


def test_formula_faithful_converges_to_exact_analytic():
    cfg = McConfig(n_trials=1_000_000, seed=12, mode="formula_faithful")
    for method, analytic in (
        (Method.M1_JOINT_SIC, stp_method1(CH, ALPHA, RATES, "exact").stp),
        (Method.M2_JOINT_NOSIC, stp_method2(CH, ALPHA, RATES, "exact").stp),
        (Method.M3_SEPARATE_SIC, stp_method3(CH, ALPHA, RATES).stp),
    ):
        est = estimate_stp(CH, ALPHA, RATES, method, cfg)
        assert abs(est.mean - analytic) <= 3.0 * est.std_err


def test_method2_modes_agree():
    # M2's per-cache condition is one event; no factorization gap between
    # the two sampling semantics.
    ph = estimate_stp(CH, ALPHA, RATES, Method.M2_JOINT_NOSIC,
                      McConfig(n_trials=500_000, seed=4, mode="physical"))
    ff = estimate_stp(CH, ALPHA, RATES, Method.M2_JOINT_NOSIC,
                      McConfig(n_trials=500_000, seed=5, mode="formula_faithful"))
    assert abs(ph.mean - ff.mean) <= 3.0 * math.hypot(ph.std_err, ff.std_err)


def test_physical_counts_match_reference_predicates():
    # The rational-arithmetic counting kernels must agree with the direct
    # log-form predicates on the same draws.
    n = 50_000
    cfg = McConfig(n_trials=n, seed=21, mode="physical")
    g = (lambda rng: (sample_gains(CH.lambda1, n, rng), sample_gains(CH.lambda1, n, rng),
                      sample_gains(CH.lambda2, n, rng), sample_gains(CH.lambda2, n, rng))
         )(gain_stream(21, stream=0))
    for m in Method:
        est = estimate_stp(CH, ALPHA, RATES, m, cfg)
        c1, c2 = success_masks(m, CH.power, ALPHA, RATES, *g)
        assert est.mean == 0.5 * (int(c1.sum()) + int(c2.sum())) / n


def test_zero_rates_estimate_is_exactly_one():
    rc = RateConfig.equal_split(0.0, 0.0)
    for mode in ("physical", "formula_faithful"):
        est = estimate_stp(CH, ALPHA, rc, Method.M1_JOINT_SIC,
                           McConfig(n_trials=10_000, seed=1, mode=mode))
        assert est.mean == 1.0
        assert est.std_err == 0.0


def test_factor_estimates():
    # Closed-form anchor: lam=1, P=1, r1=ln 2 gives exactly e^{-1}.
    ch = ChannelParams(lambda1=1.0, lambda2=0.1, power=1.0)
    rc = RateConfig(r=1.0, r_tilde=1.0, r1=math.log(2.0), r_tilde1=1.0)
    cfg = McConfig(n_trials=10_000_000, seed=31)
    est = estimate_factor("breve11", ch, ALPHA, rc, cfg)
    assert abs(est.mean - math.exp(-1.0)) <= 3.0 * est.std_err

    est = estimate_factor("gamma1_exact", CH, ALPHA, RATES, cfg)
    assert abs(est.mean - gamma1_exact(CH, ALPHA, RATES.r)) <= 3.0 * est.std_err

    est = estimate_factor("eta1", CH, ALPHA, RateConfig(1.0, 1.0, 1.0, 0.0),
                          McConfig(n_trials=10_000, seed=2))
    assert est.mean == 1.0


def test_unknown_factor_rejected():
    with pytest.raises(UnknownFactor):
        estimate_factor("gamma3", CH, ALPHA, RATES, McConfig(n_trials=10, seed=0))


def test_config_validation():
    with pytest.raises(ValueError):
        McConfig(n_trials=0)
    with pytest.raises(ValueError):
        McConfig(mode="approximate")
    with pytest.raises(ValueError):
        McConfig(batch_size=0)
