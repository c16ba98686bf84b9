"""Monte Carlo oracle for the analytic STP evaluators.

Two sampling modes, both first-class:

* ``physical`` — one shared gain draw per trial; each cache succeeds iff
  its method's full decode predicate holds on that draw.  This is the
  physically consistent STP (factor events are dependent through the
  shared gains).
* ``formula_faithful`` — every factor of the method's analytic product
  gets its own independent draw, and the factor frequencies are combined
  exactly as the analytic formula combines them.  This validates the
  implemented math: it converges to the exact-mode analytic value even
  where the product formula itself ignores dependence.

Trials run in batches; batch ``i`` uses the Philox substream
``(seed, stream=i)``, so the estimate is bitwise reproducible for a given
configuration regardless of how batches are scheduled.  All per-trial
conditions are evaluated by the kernel backend in rational arithmetic
(thresholds precomputed as scalars), which keeps the counts identical
across the pure-Python and compiled backends.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .channel import ChannelParams, GainDraw, gain_stream, sample_gains
from .stp import Method, RateConfig, _alpha_value

__all__ = [
    "McConfig",
    "McEstimate",
    "UnknownFactor",
    "FACTOR_IDS",
    "trial_success",
    "success_masks",
    "estimate_stp",
    "estimate_factor",
]

DEFAULT_BATCH_SIZE = 1 << 18


class UnknownFactor(ValueError):
    """Raised when a factor id does not name an analytic factor."""


@dataclass(frozen=True)
class McConfig:
    n_trials: int = 1_000_000
    seed: int = 0
    mode: str = "physical"  # or "formula_faithful"
    batch_size: int = DEFAULT_BATCH_SIZE

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials!r}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size!r}")
        if self.mode not in ("physical", "formula_faithful"):
            raise ValueError(
                f"mode must be 'physical' or 'formula_faithful', got {self.mode!r}"
            )


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_err: float
    n_trials: int
    mode: str


def _std_err(mean: float, n: int) -> float:
    return math.sqrt(max(mean * (1.0 - mean), 0.0) / n)


def _link_threshold(thr: float, scaled_power: float) -> float:
    """Gain threshold for Pr[scaled_power * g >= thr]; inf when unreachable."""
    if thr == 0.0:
        return 0.0
    if scaled_power == 0.0:
        return math.inf
    return thr / scaled_power


# ============================================================
# Per-draw success predicates
# ============================================================

def trial_success(method: Method, draw: GainDraw, alpha, rates: RateConfig,
                  power: float) -> tuple[bool, bool]:
    """Evaluate one method's per-cache decode predicate on a single draw.

    ``power`` is the transmit SNR scale P; the draw itself carries only
    the four fading gains.
    """
    a = _alpha_value(alpha)
    s = a * a
    os_ = 1.0 - s
    p = float(power)
    g1l, g1h = draw.g1_lt, draw.g1_ht
    g2l, g2h = draw.g2_lt, draw.g2_ht

    def mrc1() -> bool:
        return math.log1p(os_ * p * g1h / (1.0 + s * p * g1h) + p * g1l) >= rates.r_tilde1

    def mrc2() -> bool:
        return math.log1p(s * p * g2h / (1.0 + os_ * p * g2h) + p * g2l) >= rates.r2

    if method is Method.M1_JOINT_SIC:
        c1 = mrc1() and (math.log1p(p * g1l) + math.log1p(s * p * g1h) >= 2.0 * rates.r)
        c2 = mrc2() and (math.log1p(p * g2l) + math.log1p(os_ * p * g2h) >= 2.0 * rates.r_tilde)
    elif method is Method.M2_JOINT_NOSIC:
        c1 = (math.log1p(p * g1l)
              + math.log1p(s * p * g1h / (1.0 + os_ * p * g1h)) >= 2.0 * rates.r)
        c2 = (math.log1p(p * g2l)
              + math.log1p(os_ * p * g2h / (1.0 + s * p * g2h)) >= 2.0 * rates.r_tilde)
    elif method is Method.M3_SEPARATE_SIC:
        c1 = (mrc1()
              and math.log1p(p * g1l) >= rates.r1
              and math.log1p(s * p * g1h) >= rates.r2)
        c2 = (mrc2()
              and math.log1p(os_ * p * g2h) >= rates.r_tilde1
              and math.log1p(p * g2l) >= rates.r_tilde2)
    elif method is Method.M4_SEPARATE_NOSIC:
        c1 = (math.log1p(p * g1l) >= rates.r1
              and math.log1p(s * p * g1h / (1.0 + os_ * p * g1h)) >= rates.r2)
        c2 = (math.log1p(os_ * p * g2h / (1.0 + s * p * g2h)) >= rates.r_tilde1
              and math.log1p(p * g2l) >= rates.r_tilde2)
    else:  # pragma: no cover - Method is exhaustive
        raise ValueError(f"unknown method {method!r}")
    return bool(c1), bool(c2)


def success_masks(method: Method, power: float, alpha, rates: RateConfig,
                  g1l: np.ndarray, g1h: np.ndarray,
                  g2l: np.ndarray, g2h: np.ndarray
                  ) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`trial_success` over gain arrays (for diagnostics
    and per-draw dominance checks)."""
    a = _alpha_value(alpha)
    s = a * a
    os_ = 1.0 - s
    p = float(power)
    mrc1 = np.log1p(os_ * p * g1h / (1.0 + s * p * g1h) + p * g1l) >= rates.r_tilde1
    mrc2 = np.log1p(s * p * g2h / (1.0 + os_ * p * g2h) + p * g2l) >= rates.r2
    if method is Method.M1_JOINT_SIC:
        c1 = mrc1 & (np.log1p(p * g1l) + np.log1p(s * p * g1h) >= 2.0 * rates.r)
        c2 = mrc2 & (np.log1p(p * g2l) + np.log1p(os_ * p * g2h) >= 2.0 * rates.r_tilde)
    elif method is Method.M2_JOINT_NOSIC:
        c1 = (np.log1p(p * g1l)
              + np.log1p(s * p * g1h / (1.0 + os_ * p * g1h)) >= 2.0 * rates.r)
        c2 = (np.log1p(p * g2l)
              + np.log1p(os_ * p * g2h / (1.0 + s * p * g2h)) >= 2.0 * rates.r_tilde)
    elif method is Method.M3_SEPARATE_SIC:
        c1 = (mrc1 & (np.log1p(p * g1l) >= rates.r1)
              & (np.log1p(s * p * g1h) >= rates.r2))
        c2 = (mrc2 & (np.log1p(os_ * p * g2h) >= rates.r_tilde1)
              & (np.log1p(p * g2l) >= rates.r_tilde2))
    elif method is Method.M4_SEPARATE_NOSIC:
        c1 = ((np.log1p(p * g1l) >= rates.r1)
              & (np.log1p(s * p * g1h / (1.0 + os_ * p * g1h)) >= rates.r2))
        c2 = ((np.log1p(os_ * p * g2h / (1.0 + s * p * g2h)) >= rates.r_tilde1)
              & (np.log1p(p * g2l) >= rates.r_tilde2))
    else:  # pragma: no cover
        raise ValueError(f"unknown method {method!r}")
    return c1, c2


# ============================================================
# STP estimation
# ============================================================

def _batch_sizes(n_trials: int, batch_size: int):
    done = 0
    batch = 0
    while done < n_trials:
        m = min(batch_size, n_trials - done)
        yield batch, m
        done += m
        batch += 1


def _physical_counts(ch: ChannelParams, alpha, rates: RateConfig,
                     method: Method, cfg: McConfig) -> tuple[int, int]:
    """Per-cache success counts over shared draws, via the kernel backend."""
    a = _alpha_value(alpha)
    s = a * a
    os_ = 1.0 - s
    p = ch.power
    sp = s * p
    osp = os_ * p

    thr_mrc1 = math.expm1(rates.r_tilde1)
    thr_mrc2 = math.expm1(rates.r2)
    big_t1 = math.exp(2.0 * rates.r)
    big_t2 = math.exp(2.0 * rates.r_tilde)
    t11 = _link_threshold(math.expm1(rates.r1), p)
    t12 = _link_threshold(math.expm1(rates.r2), sp)
    t21 = _link_threshold(math.expm1(rates.r_tilde1), osp)
    t22 = _link_threshold(math.expm1(rates.r_tilde2), p)

    c1 = 0
    c2 = 0
    for batch, m in _batch_sizes(cfg.n_trials, cfg.batch_size):
        rng = gain_stream(cfg.seed, stream=batch)
        g1l = sample_gains(ch.lambda1, m, rng)
        g1h = sample_gains(ch.lambda1, m, rng)
        g2l = sample_gains(ch.lambda2, m, rng)
        g2h = sample_gains(ch.lambda2, m, rng)
        if method is Method.M1_JOINT_SIC:
            c1 += _backend.count_m1_cache(g1l, g1h, osp, sp, p, thr_mrc1, sp, big_t1)
            c2 += _backend.count_m1_cache(g2l, g2h, sp, osp, p, thr_mrc2, osp, big_t2)
        elif method is Method.M2_JOINT_NOSIC:
            c1 += _backend.count_joint_inoise(g1l, g1h, p, sp, osp, big_t1)
            c2 += _backend.count_joint_inoise(g2l, g2h, p, osp, sp, big_t2)
        elif method is Method.M3_SEPARATE_SIC:
            c1 += _backend.count_m3_cache(g1l, g1h, osp, sp, p, thr_mrc1, t11, t12)
            c2 += _backend.count_m3_cache(g2l, g2h, sp, osp, p, thr_mrc2, t22, t21)
        elif method is Method.M4_SEPARATE_NOSIC:
            c1 += _backend.count_m4_cache(g1l, g1h, t11, sp, osp, thr_mrc2)
            c2 += _backend.count_m4_cache(g2l, g2h, t22, osp, sp, thr_mrc1)
        else:  # pragma: no cover
            raise ValueError(f"unknown method {method!r}")
    return c1, c2


# Factor table: id -> (cache (1|2), needs (pair|single), counter builder).
# The builder receives (s, os_, p, rates) and returns scalars consumed by
# the corresponding kernel; keeping thresholds scalar keeps counts
# backend-identical.

def _factor_plan(factor_id: str, ch: ChannelParams, alpha, rates: RateConfig):
    a = _alpha_value(alpha)
    s = a * a
    os_ = 1.0 - s
    p = ch.power
    sp = s * p
    osp = os_ * p

    def mrc(lam, cht, cint, rate):
        thr = math.expm1(rate)
        return (lam, "pair",
                lambda gl, gh: _backend.count_mrc(gl, gh, cht, cint, p, thr))

    def joint_sic(lam, share_p, rate):
        big_t = math.exp(2.0 * rate)
        return (lam, "pair",
                lambda gl, gh: _backend.count_joint_sic(gl, gh, p, share_p, big_t))

    def joint_inoise(lam, share_p, other_p, rate):
        big_t = math.exp(2.0 * rate)
        return (lam, "pair",
                lambda gl, gh: _backend.count_joint_inoise(gl, gh, p, share_p, other_p, big_t))

    def sum_gain(lam, share, rate):
        c = 2.0 * math.expm1(rate) / p
        return (lam, "pair",
                lambda gl, gh: _backend.count_sum_ge(gl, gh, share, c))

    def single(lam, share_p, rate):
        t = _link_threshold(math.expm1(rate), share_p)
        return (lam, "single", lambda g: _backend.count_ge(g, t))

    def sinr(lam, share, share_p, other_p, rate):
        thr = math.expm1(rate)
        if thr * (1.0 - share) >= share:
            # Interference ceiling below the threshold: the event is
            # impossible under the pinned degeneracy convention.
            return (lam, "single", lambda g: 0)
        return (lam, "single",
                lambda g: _backend.count_sinr_ge(g, share_p, other_p, thr))

    def sum_inoise(lam, cht, cint, rate):
        # Averaged-SNR joint-decoding event with interference in: same
        # functional form as the MRC event, at twice the rate threshold.
        thr = 2.0 * math.expm1(rate)
        return (lam, "pair",
                lambda gl, gh: _backend.count_mrc(gl, gh, cht, cint, p, thr))

    table = {
        "eta1": lambda: mrc(ch.lambda1, osp, sp, rates.r_tilde1),
        "eta2": lambda: mrc(ch.lambda2, sp, osp, rates.r2),
        "gamma1_exact": lambda: joint_sic(ch.lambda1, sp, rates.r),
        "gamma2_exact": lambda: joint_sic(ch.lambda2, osp, rates.r_tilde),
        "gamma1_jensen": lambda: sum_gain(ch.lambda1, s, rates.r),
        "gamma2_jensen": lambda: sum_gain(ch.lambda2, os_, rates.r_tilde),
        "gamma_bar1_exact": lambda: joint_inoise(ch.lambda1, sp, osp, rates.r),
        "gamma_bar2_exact": lambda: joint_inoise(ch.lambda2, osp, sp, rates.r_tilde),
        "gamma_bar1_jensen": lambda: sum_inoise(ch.lambda1, sp, osp, rates.r),
        "gamma_bar2_jensen": lambda: sum_inoise(ch.lambda2, osp, sp, rates.r_tilde),
        "breve11": lambda: single(ch.lambda1, p, rates.r1),
        "breve12": lambda: single(ch.lambda1, sp, rates.r2),
        "breve21": lambda: single(ch.lambda2, osp, rates.r_tilde1),
        "breve22": lambda: single(ch.lambda2, p, rates.r_tilde2),
        "hat12": lambda: sinr(ch.lambda1, s, sp, osp, rates.r2),
        "hat21": lambda: sinr(ch.lambda2, os_, osp, sp, rates.r_tilde1),
    }
    try:
        return table[factor_id]()
    except KeyError:
        raise UnknownFactor(f"unknown factor id {factor_id!r}") from None


FACTOR_IDS = (
    "eta1", "eta2",
    "gamma1_exact", "gamma1_jensen", "gamma2_exact", "gamma2_jensen",
    "gamma_bar1_exact", "gamma_bar1_jensen",
    "gamma_bar2_exact", "gamma_bar2_jensen",
    "breve11", "breve12", "breve21", "breve22",
    "hat12", "hat21",
)

# Factor products per method in formula_faithful mode (exact-event variants).
_FORMULA_FACTORS = {
    Method.M1_JOINT_SIC: (("eta1", "gamma1_exact"), ("eta2", "gamma2_exact")),
    Method.M2_JOINT_NOSIC: (("gamma_bar1_exact",), ("gamma_bar2_exact",)),
    Method.M3_SEPARATE_SIC: (("eta1", "breve11", "breve12"),
                             ("eta2", "breve21", "breve22")),
    Method.M4_SEPARATE_NOSIC: (("breve11", "hat12"), ("hat21", "breve22")),
}


def _formula_counts(ch: ChannelParams, alpha, rates: RateConfig,
                    method: Method, cfg: McConfig) -> dict[str, int]:
    """Independent per-factor event counts, drawn in fixed formula order."""
    groups = _FORMULA_FACTORS[method]
    order = [f for group in groups for f in group]
    plans = {f: _factor_plan(f, ch, alpha, rates) for f in order}
    counts = dict.fromkeys(order, 0)
    for batch, m in _batch_sizes(cfg.n_trials, cfg.batch_size):
        rng = gain_stream(cfg.seed, stream=batch)
        for f in order:
            lam, kind, counter = plans[f]
            if kind == "pair":
                gl = sample_gains(lam, m, rng)
                gh = sample_gains(lam, m, rng)
                counts[f] += counter(gl, gh)
            else:
                g = sample_gains(lam, m, rng)
                counts[f] += counter(g)
    return counts


def estimate_stp(ch: ChannelParams, alpha, rates: RateConfig, method: Method,
                 cfg: McConfig) -> McEstimate:
    """Monte Carlo STP estimate in the mode selected by ``cfg``."""
    if not isinstance(method, Method):
        method = Method.parse(str(method))
    n = cfg.n_trials
    if cfg.mode == "physical":
        c1, c2 = _physical_counts(ch, alpha, rates, method, cfg)
        mean = 0.5 * (c1 + c2) / n
    else:
        counts = _formula_counts(ch, alpha, rates, method, cfg)
        prods = [
            math.prod(counts[f] / n for f in group)
            for group in _FORMULA_FACTORS[method]
        ]
        mean = 0.5 * (prods[0] + prods[1])
    return McEstimate(mean=mean, std_err=_std_err(mean, n), n_trials=n, mode=cfg.mode)


def estimate_factor(factor_id: str, ch: ChannelParams, alpha,
                    rates: RateConfig, cfg: McConfig) -> McEstimate:
    """Frequency of one analytic factor's defining event over independent
    draws (mode-independent: a factor is a single event either way)."""
    lam, kind, counter = _factor_plan(factor_id, ch, alpha, rates)
    count = 0
    for batch, m in _batch_sizes(cfg.n_trials, cfg.batch_size):
        rng = gain_stream(cfg.seed, stream=batch)
        if kind == "pair":
            gl = sample_gains(lam, m, rng)
            gh = sample_gains(lam, m, rng)
            count += counter(gl, gh)
        else:
            count += counter(sample_gains(lam, m, rng))
    mean = count / cfg.n_trials
    return McEstimate(mean=mean, std_err=_std_err(mean, cfg.n_trials),
                      n_trials=cfg.n_trials, mode=cfg.mode)
