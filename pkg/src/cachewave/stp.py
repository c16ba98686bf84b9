"""Analytic successful-transmission probability (STP) evaluators.

The delivery scheme under study superimposes two sub-packets in the
high-traffic (HT) period — a share ``alpha**2`` of the transmit power on
one, the remainder on the other — while each cache node also holds a
low-traffic (LT) observation.  A node succeeds when it decodes everything
it asked for; four receiver designs ("methods") lead to four different
success probabilities, each a short product of per-link outage factors:

* ``eta``    — maximum-ratio combining of the LT and HT observations,
* ``gamma``  — joint decoding of both sub-packets after interference
               cancellation (exact quadrature or averaged-SNR bound),
* ``gamma_bar`` — joint decoding with the interference left in,
* ``breve``  — separate decoding of a single interference-free link,
* ``hat``    — separate decoding with interference treated as noise.

Every factor exists in a share-parametrized generic form (the cache-2
expressions are the cache-1 expressions with the power shares swapped),
so the public per-cache functions are thin wrappers and the swap symmetry
is exact by construction.

All quadrature goes through the active kernel backend at a relative
tolerance of 1e-9 — far below Monte Carlo resolution, so analytic/MC
disagreements are attributable to modeling, never to integration error.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from . import _backend
from .channel import ChannelParams
from .quadrature import NonConvergence

# Re-exported alias: evaluators surface integration failures under this name.
QuadratureFailure = NonConvergence

__all__ = [
    "PowerSplit",
    "RateConfig",
    "Method",
    "StpReport",
    "QuadratureFailure",
    "DegenerateSplit",
    "mrc_success",
    "joint_sic_success",
    "joint_sic_jensen",
    "joint_inoise_success",
    "joint_inoise_jensen",
    "single_link_success",
    "sinr_limited_success",
    "eta1",
    "eta2",
    "gamma1_jensen",
    "gamma2_jensen",
    "gamma1_exact",
    "gamma2_exact",
    "gamma_bar1_jensen",
    "gamma_bar2_jensen",
    "gamma_bar1_exact",
    "gamma_bar2_exact",
    "breve_gammas",
    "hat_gammas",
    "stp_method1",
    "stp_method2",
    "stp_method3",
    "stp_method4",
    "evaluate",
]

DEFAULT_REL_TOL = 1e-9

# Probabilities may stray outside [0,1] by quadrature error only; anything
# larger than this is a bug, not roundoff.
_CLAMP_TOL = 1e-9

# Inset applied to an integration limit where the integrand's denominator
# vanishes; the integrand decays to 0 there, so the truncation error is
# far below the 1e-12 absolute quadrature floor.
_SINGULAR_INSET = 1e-12


class DegenerateSplit(ValueError):
    """A power split produced an undefined intermediate value.

    Boundary splits (alpha = 0 or 1) are all covered by analytic limits,
    so no current evaluator raises this; it is reserved for parameter
    combinations that would yield NaN after those limits.
    """


# ============================================================
# Domain types
# ============================================================

@dataclass(frozen=True)
class PowerSplit:
    """HT-period superposition coefficient; ``alpha**2`` is the power share."""

    alpha: float  # dimensionless, in [0, 1]

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha!r}")

    @property
    def share(self) -> float:
        return self.alpha * self.alpha

    @classmethod
    def uniform(cls) -> "PowerSplit":
        """Equal power on both HT sub-packets (alpha = sqrt(1/2))."""
        return cls(math.sqrt(0.5))


@dataclass(frozen=True)
class RateConfig:
    """Per-period code rates in nats per channel use.

    ``r`` and ``r_tilde`` are the per-period rates of the two requested
    packets; each packet is split across the LT/HT periods, and only the
    first sub-packet rate is free: the second is pinned by the totals
    (``r2 = 2 r - r1`` and ``r_tilde2 = 2 r_tilde - r_tilde1``).
    """

    r: float
    r_tilde: float
    r1: float
    r_tilde1: float

    def __post_init__(self) -> None:
        if self.r < 0 or self.r_tilde < 0:
            raise ValueError("rates must be >= 0")
        if not 0.0 <= self.r1 <= 2.0 * self.r:
            raise ValueError(f"r1 must be in [0, 2r], got {self.r1!r} (r={self.r!r})")
        if not 0.0 <= self.r_tilde1 <= 2.0 * self.r_tilde:
            raise ValueError(
                f"r_tilde1 must be in [0, 2r_tilde], got {self.r_tilde1!r} "
                f"(r_tilde={self.r_tilde!r})"
            )

    @property
    def r2(self) -> float:
        return 2.0 * self.r - self.r1

    @property
    def r_tilde2(self) -> float:
        return 2.0 * self.r_tilde - self.r_tilde1

    @classmethod
    def equal_split(cls, r: float, r_tilde: float) -> "RateConfig":
        return cls(r=r, r_tilde=r_tilde, r1=r, r_tilde1=r_tilde)


class Method(enum.Enum):
    """Receiver design: joint vs. separate decoding, with or without SIC."""

    M1_JOINT_SIC = "M1_joint_sic"
    M2_JOINT_NOSIC = "M2_joint_nosic"
    M3_SEPARATE_SIC = "M3_separate_sic"
    M4_SEPARATE_NOSIC = "M4_separate_nosic"

    @classmethod
    def parse(cls, text: str) -> "Method":
        t = text.strip()
        for m in cls:
            if t == m.value or t.lower() == m.value.lower():
                return m
        aliases = {"m1": cls.M1_JOINT_SIC, "m2": cls.M2_JOINT_NOSIC,
                   "m3": cls.M3_SEPARATE_SIC, "m4": cls.M4_SEPARATE_NOSIC}
        if t.lower() in aliases:
            return aliases[t.lower()]
        raise ValueError(f"unknown method {text!r}")


@dataclass(frozen=True)
class StpReport:
    """One method evaluation: overall STP plus its per-factor breakdown."""

    method: Method
    stp: float
    cache1_success: float
    cache2_success: float
    factors: dict[str, float] = field(default_factory=dict)


# ============================================================
# Helpers
# ============================================================

def _alpha_value(alpha) -> float:
    """Accept a PowerSplit or a bare float for convenience."""
    a = alpha.alpha if isinstance(alpha, PowerSplit) else float(alpha)
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {a!r}")
    return a


def _as_probability(x: float) -> float:
    """Clamp tiny quadrature overshoot; anything bigger is a real bug."""
    if x < 0.0:
        if x < -_CLAMP_TOL:
            raise ArithmeticError(f"probability {x!r} below 0 beyond clamp tolerance")
        return 0.0
    if x > 1.0:
        if x > 1.0 + _CLAMP_TOL:
            raise ArithmeticError(f"probability {x!r} above 1 beyond clamp tolerance")
        return 1.0
    return x


def _check_rate(rate: float) -> float:
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate!r}")
    return float(rate)


# ============================================================
# Generic share-parametrized factors
# ============================================================

def mrc_success(
    lam: float, p: float, combine_share: float, rate: float,
    rel_tol: float = DEFAULT_REL_TOL,
) -> float:
    """Success probability of MRC-combined decoding of one HT sub-packet.

    The receiver adds its LT observation (full power ``p``) to the HT
    observation, where the wanted sub-packet holds ``combine_share`` of
    the power and the other sub-packet acts as interference:

        Pr[ log(1 + s*p*gh / (1 + (1-s)*p*gh) + p*gl) >= rate ],

    with independent unit-mean-scaled exponential gains ``gl, gh`` of
    rate ``lam`` and s = ``combine_share``.  Closed form for the LT-only
    event plus an adaptive quadrature term for the mixed region.
    """
    rate = _check_rate(rate)
    thr = math.expm1(rate)
    if thr == 0.0:
        return 1.0
    ns = float(combine_share)
    os_ = 1.0 - ns
    closed = math.exp(-lam * thr / p)
    hi = thr / p
    lo = 0.0 if os_ == 0.0 else max(0.0, (os_ * (thr + 1.0) - 1.0) / (os_ * p))
    if lo > 0.0:
        lo += _SINGULAR_INSET  # denominator vanishes exactly at the clamped limit
    if lo >= hi:
        return _as_probability(closed)
    val, _, _ = _backend.integrate_factor(
        _backend.FAMILY_MRC, lo, hi, rel_tol, lam, p, ns, thr
    )
    return _as_probability(closed + val)


def joint_sic_success(
    lam: float, p: float, ht_share: float, rate: float,
    rel_tol: float = DEFAULT_REL_TOL,
) -> float:
    """Exact success probability of joint two-period decoding after SIC.

        Pr[ log(1 + p*gl) + log(1 + s*p*gh) >= 2*rate ].

    For ``ht_share == 0`` the HT link carries nothing and the event
    reduces to the LT link alone (closed form).
    """
    rate = _check_rate(rate)
    big_t = math.exp(2.0 * rate)
    if big_t <= 1.0:
        return 1.0
    closed = math.exp(-lam * (big_t - 1.0) / p)
    s = float(ht_share)
    if s == 0.0:
        return _as_probability(closed)
    val, _, _ = _backend.integrate_factor(
        _backend.FAMILY_JOINT_SIC, 0.0, (big_t - 1.0) / p, rel_tol, lam, p, s, big_t
    )
    return _as_probability(closed + val)


def joint_sic_jensen(lam: float, p: float, ht_share: float, rate: float) -> float:
    """Averaged-SNR upper bound on :func:`joint_sic_success` (closed form).

    Concavity of the log turns the sum-rate event into a sum-of-gains
    event, Pr[gl + s*gh >= 2*(e^rate - 1)/p], which is hypoexponential.
    Written with ``expm1`` so nearby shares stay numerically stable.
    """
    rate = _check_rate(rate)
    c = 2.0 * math.expm1(rate) / p
    if c == 0.0:
        return 1.0
    s = float(ht_share)
    if s == 0.0:
        return _as_probability(math.exp(-lam * c))
    if s == 1.0:
        return _as_probability(math.exp(-lam * c) * (1.0 + lam * c))
    return _as_probability(
        math.exp(-lam * c) * (1.0 - (s / (1.0 - s)) * math.expm1(-lam * c * (1.0 - s) / s))
    )


def joint_inoise_success(
    lam: float, p: float, ht_share: float, rate: float,
    rel_tol: float = DEFAULT_REL_TOL,
) -> float:
    """Exact joint-decoding success with the interference left in:

        Pr[ log(1 + p*gl) + log(1 + s*p*gh/(1 + (1-s)*p*gh)) >= 2*rate ].

    The HT term saturates at log(1 + s/(1-s)), so the integration range
    is clipped where the deficit exceeds that ceiling.
    """
    rate = _check_rate(rate)
    big_t = math.exp(2.0 * rate)
    if big_t <= 1.0:
        return 1.0
    closed = math.exp(-lam * (big_t - 1.0) / p)
    s = float(ht_share)
    if s == 0.0:
        return _as_probability(closed)
    os_ = 1.0 - s
    lo = max(0.0, (os_ * big_t - 1.0) / p)
    hi = (big_t - 1.0) / p
    if lo > 0.0:
        lo += _SINGULAR_INSET
    if lo >= hi:
        return _as_probability(closed)
    val, _, _ = _backend.integrate_factor(
        _backend.FAMILY_JOINT_INOISE, lo, hi, rel_tol, lam, p, s, big_t
    )
    return _as_probability(closed + val)


def joint_inoise_jensen(
    lam: float, p: float, ht_share: float, rate: float,
    rel_tol: float = DEFAULT_REL_TOL,
) -> float:
    """Averaged-SNR upper bound on :func:`joint_inoise_success`:

        Pr[ p*gl + s*p*gh/(1 + (1-s)*p*gh) >= 2*(e^rate - 1) ].

    No closed form (the SINR term is a rational function of ``gh``), so
    the tail is integrated like the exact variant.
    """
    rate = _check_rate(rate)
    c = 2.0 * math.expm1(rate)
    if c == 0.0:
        return 1.0
    closed = math.exp(-lam * c / p)
    s = float(ht_share)
    if s == 0.0:
        return _as_probability(closed)
    os_ = 1.0 - s
    lo = 0.0 if os_ == 0.0 else max(0.0, (c - s / os_) / p)
    hi = c / p
    if lo > 0.0:
        lo += _SINGULAR_INSET
    if lo >= hi:
        return _as_probability(closed)
    val, _, _ = _backend.integrate_factor(
        _backend.FAMILY_SUM_INOISE, lo, hi, rel_tol, lam, p, s, c
    )
    return _as_probability(closed + val)


def single_link_success(lam: float, p: float, share: float, rate: float) -> float:
    """Interference-free single-link success, Pr[log(1 + share*p*g) >= rate]."""
    rate = _check_rate(rate)
    thr = math.expm1(rate)
    if thr == 0.0:
        return 1.0
    sp = float(share) * p
    if sp == 0.0:
        return 0.0
    return math.exp(-lam * thr / sp)


def sinr_limited_success(lam: float, p: float, share: float, rate: float) -> float:
    """Interference-limited single-link success,

        Pr[ log(1 + share*p*g/(1 + (1-share)*p*g)) >= rate ].

    The SINR is capped at share/(1-share); at or beyond that feasibility
    boundary the probability is exactly 0 (including the boundary itself,
    since the cap is approached but never attained).
    """
    rate = _check_rate(rate)
    thr = math.expm1(rate)
    s = float(share)
    os_ = 1.0 - s
    if thr * os_ >= s:
        return 0.0
    return math.exp(-lam * thr / (p * (s - os_ * thr)))


# ============================================================
# Per-cache factor wrappers
# ============================================================
# Cache 1 (rate lambda1) wants the packet split at rates (r1, r2); its HT
# sub-packet holds power share alpha**2.  Cache 2 (rate lambda2, rates
# (r_tilde1, r_tilde2)) sees the complementary share.  All cache-2 forms
# are the cache-1 forms under (share -> 1-share), by construction.

def eta1(ch: ChannelParams, alpha, r_tilde1: float,
         rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Cache-1 MRC success decoding the *other* packet's HT sub-packet."""
    a = _alpha_value(alpha)
    return mrc_success(ch.lambda1, ch.power, 1.0 - a * a, r_tilde1, rel_tol)


def eta2(ch: ChannelParams, alpha, r2: float,
         rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Cache-2 MRC success (mirror of :func:`eta1` with shares swapped)."""
    a = _alpha_value(alpha)
    return mrc_success(ch.lambda2, ch.power, a * a, r2, rel_tol)


def gamma1_jensen(ch: ChannelParams, alpha, r: float) -> float:
    a = _alpha_value(alpha)
    return joint_sic_jensen(ch.lambda1, ch.power, a * a, r)


def gamma2_jensen(ch: ChannelParams, alpha, r_tilde: float) -> float:
    a = _alpha_value(alpha)
    return joint_sic_jensen(ch.lambda2, ch.power, 1.0 - a * a, r_tilde)


def gamma1_exact(ch: ChannelParams, alpha, r: float,
                 rel_tol: float = DEFAULT_REL_TOL) -> float:
    a = _alpha_value(alpha)
    return joint_sic_success(ch.lambda1, ch.power, a * a, r, rel_tol)


def gamma2_exact(ch: ChannelParams, alpha, r_tilde: float,
                 rel_tol: float = DEFAULT_REL_TOL) -> float:
    a = _alpha_value(alpha)
    return joint_sic_success(ch.lambda2, ch.power, 1.0 - a * a, r_tilde, rel_tol)


def gamma_bar1_jensen(ch: ChannelParams, alpha, r: float,
                      rel_tol: float = DEFAULT_REL_TOL) -> float:
    a = _alpha_value(alpha)
    return joint_inoise_jensen(ch.lambda1, ch.power, a * a, r, rel_tol)


def gamma_bar2_jensen(ch: ChannelParams, alpha, r_tilde: float,
                      rel_tol: float = DEFAULT_REL_TOL) -> float:
    a = _alpha_value(alpha)
    return joint_inoise_jensen(ch.lambda2, ch.power, 1.0 - a * a, r_tilde, rel_tol)


def gamma_bar1_exact(ch: ChannelParams, alpha, r: float,
                     rel_tol: float = DEFAULT_REL_TOL) -> float:
    a = _alpha_value(alpha)
    return joint_inoise_success(ch.lambda1, ch.power, a * a, r, rel_tol)


def gamma_bar2_exact(ch: ChannelParams, alpha, r_tilde: float,
                     rel_tol: float = DEFAULT_REL_TOL) -> float:
    a = _alpha_value(alpha)
    return joint_inoise_success(ch.lambda2, ch.power, 1.0 - a * a, r_tilde, rel_tol)


def breve_gammas(ch: ChannelParams, alpha, rates: RateConfig
                 ) -> tuple[float, float, float, float]:
    """Separate-decoding factors after SIC, as (b11, b12, b21, b22).

    b11/b22 are the full-power LT links of caches 1 and 2; b12/b21 are
    the HT links at the respective power shares.
    """
    a = _alpha_value(alpha)
    s = a * a
    p = ch.power
    return (
        single_link_success(ch.lambda1, p, 1.0, rates.r1),
        single_link_success(ch.lambda1, p, s, rates.r2),
        single_link_success(ch.lambda2, p, 1.0 - s, rates.r_tilde1),
        single_link_success(ch.lambda2, p, 1.0, rates.r_tilde2),
    )


def hat_gammas(ch: ChannelParams, alpha, rates: RateConfig) -> tuple[float, float]:
    """Separate-decoding HT factors without SIC, as (h12, h21)."""
    a = _alpha_value(alpha)
    s = a * a
    return (
        sinr_limited_success(ch.lambda1, ch.power, s, rates.r2),
        sinr_limited_success(ch.lambda2, ch.power, 1.0 - s, rates.r_tilde1),
    )


# ============================================================
# Method-level STP
# ============================================================

def _check_gamma_mode(gamma_mode: str) -> str:
    if gamma_mode not in ("jensen", "exact"):
        raise ValueError(f"gamma_mode must be 'jensen' or 'exact', got {gamma_mode!r}")
    return gamma_mode


def stp_method1(ch: ChannelParams, alpha, rates: RateConfig,
                gamma_mode: str = "jensen",
                rel_tol: float = DEFAULT_REL_TOL) -> StpReport:
    """Joint decoding with SIC: each cache must win its MRC stage and the
    joint two-period stage."""
    _check_gamma_mode(gamma_mode)
    e1 = eta1(ch, alpha, rates.r_tilde1, rel_tol)
    e2 = eta2(ch, alpha, rates.r2, rel_tol)
    if gamma_mode == "jensen":
        g1 = gamma1_jensen(ch, alpha, rates.r)
        g2 = gamma2_jensen(ch, alpha, rates.r_tilde)
    else:
        g1 = gamma1_exact(ch, alpha, rates.r, rel_tol)
        g2 = gamma2_exact(ch, alpha, rates.r_tilde, rel_tol)
    c1 = e1 * g1
    c2 = e2 * g2
    return StpReport(
        method=Method.M1_JOINT_SIC,
        stp=0.5 * (c1 + c2),
        cache1_success=c1,
        cache2_success=c2,
        factors={"eta1": e1, "gamma1": g1, "eta2": e2, "gamma2": g2},
    )


def stp_method2(ch: ChannelParams, alpha, rates: RateConfig,
                gamma_mode: str = "jensen",
                rel_tol: float = DEFAULT_REL_TOL) -> StpReport:
    """Joint decoding without SIC.  Depends only on the total rates, never
    on the sub-packet split — the rate-split fields of ``rates`` are not
    read at all, so split invariance is bitwise."""
    _check_gamma_mode(gamma_mode)
    if gamma_mode == "jensen":
        b1 = gamma_bar1_jensen(ch, alpha, rates.r, rel_tol)
        b2 = gamma_bar2_jensen(ch, alpha, rates.r_tilde, rel_tol)
    else:
        b1 = gamma_bar1_exact(ch, alpha, rates.r, rel_tol)
        b2 = gamma_bar2_exact(ch, alpha, rates.r_tilde, rel_tol)
    return StpReport(
        method=Method.M2_JOINT_NOSIC,
        stp=0.5 * (b1 + b2),
        cache1_success=b1,
        cache2_success=b2,
        factors={"gamma_bar1": b1, "gamma_bar2": b2},
    )


def stp_method3(ch: ChannelParams, alpha, rates: RateConfig,
                gamma_mode: str = "jensen",
                rel_tol: float = DEFAULT_REL_TOL) -> StpReport:
    """Separate decoding with SIC: MRC stage, then one clause per sub-packet.

    ``gamma_mode`` is accepted for interface uniformity; every factor is
    already exact (closed forms and the MRC quadrature)."""
    _check_gamma_mode(gamma_mode)
    e1 = eta1(ch, alpha, rates.r_tilde1, rel_tol)
    e2 = eta2(ch, alpha, rates.r2, rel_tol)
    b11, b12, b21, b22 = breve_gammas(ch, alpha, rates)
    c1 = e1 * b11 * b12
    c2 = e2 * b21 * b22
    return StpReport(
        method=Method.M3_SEPARATE_SIC,
        stp=0.5 * (c1 + c2),
        cache1_success=c1,
        cache2_success=c2,
        factors={"eta1": e1, "breve11": b11, "breve12": b12,
                 "eta2": e2, "breve21": b21, "breve22": b22},
    )


def stp_method4(ch: ChannelParams, alpha, rates: RateConfig,
                gamma_mode: str = "jensen",
                rel_tol: float = DEFAULT_REL_TOL) -> StpReport:
    """Separate decoding without SIC (closed form throughout)."""
    _check_gamma_mode(gamma_mode)
    b11, b12, b21, b22 = breve_gammas(ch, alpha, rates)
    h12, h21 = hat_gammas(ch, alpha, rates)
    c1 = b11 * h12
    c2 = h21 * b22
    return StpReport(
        method=Method.M4_SEPARATE_NOSIC,
        stp=0.5 * (c1 + c2),
        cache1_success=c1,
        cache2_success=c2,
        factors={"breve11": b11, "hat12": h12, "hat21": h21, "breve22": b22},
    )


_METHOD_DISPATCH = {
    Method.M1_JOINT_SIC: stp_method1,
    Method.M2_JOINT_NOSIC: stp_method2,
    Method.M3_SEPARATE_SIC: stp_method3,
    Method.M4_SEPARATE_NOSIC: stp_method4,
}


def evaluate(ch: ChannelParams, alpha, rates: RateConfig, method: Method,
             gamma_mode: str = "jensen",
             rel_tol: float = DEFAULT_REL_TOL) -> StpReport:
    """Dispatch to the method-specific evaluator."""
    if not isinstance(method, Method):
        method = Method.parse(str(method))
    return _METHOD_DISPATCH[method](ch, alpha, rates, gamma_mode, rel_tol)
