"""NumPy / pure-Python implementations of the hot kernels.

Two kernel groups live behind the backend interface:

* ``integrate_factor`` — adaptive quadrature of the four outage-integral
  families used by the analytic evaluators.  This implementation builds
  the integrand as a closure and delegates to :mod:`cachewave.quadrature`.
* ``count_*`` — Monte Carlo success counting over gain arrays.

The compiled twin (``_cykernels``) mirrors these routines statement for
statement.  Counting kernels use only rational arithmetic per trial (all
transcendentals are folded into the scalar thresholds by the caller), so
both backends produce **bitwise-identical counts** on identical inputs.
Integration results agree to quadrature tolerance.
"""
from __future__ import annotations

import math

import numpy as np

from cachewave.quadrature import integrate

# Integrand families (keep in sync with _cykernels.pyx).
FAMILY_MRC = 0           # MRC-combine tail integral
FAMILY_JOINT_SIC = 1     # joint decoding after interference cancellation
FAMILY_JOINT_INOISE = 2  # joint decoding, interference as noise
FAMILY_SUM_INOISE = 3    # averaged-SNR variant of the interference case


def integrate_factor(
    family: int,
    a: float,
    b: float,
    rel_tol: float,
    lam: float,
    p: float,
    share: float,
    thr: float,
) -> tuple[float, float, int]:
    """Integrate one outage-integral family over [a, b].

    ``share`` is the power share entering the family's denominator /
    scaling; ``thr`` is the family-specific threshold constant (already
    exponentiated by the caller).  Returns (value, error_estimate,
    evaluations).
    """
    sp = share * p
    osp = (1.0 - share) * p

    if family == FAMILY_MRC:
        def f(y: float) -> float:
            w = thr - p * y
            den = sp - osp * w
            if den <= 0.0:
                return 0.0
            return lam * math.exp(-lam * (y + w / den))
    elif family == FAMILY_JOINT_SIC:
        def f(x: float) -> float:
            u = thr / (1.0 + p * x) - 1.0
            if u < 0.0:
                u = 0.0
            return lam * math.exp(-lam * (x + u / sp))
    elif family == FAMILY_JOINT_INOISE:
        def f(x: float) -> float:
            v = thr / (1.0 + p * x) - 1.0
            den = sp - osp * v
            if den <= 0.0:
                return 0.0
            return lam * math.exp(-lam * (x + v / den))
    elif family == FAMILY_SUM_INOISE:
        def f(x: float) -> float:
            v = thr - p * x
            den = sp - osp * v
            if den <= 0.0:
                return 0.0
            return lam * math.exp(-lam * (x + v / den))
    else:
        raise ValueError(f"unknown integrand family {family!r}")

    res = integrate(f, a, b, rel_tol)
    return res.value, res.error_estimate, res.evaluations


# ============================================================
# Monte Carlo counting kernels
# ============================================================
# Every condition below is plain rational arithmetic in the gains; the
# caller pre-computes all exp/expm1 thresholds once per run.

def count_ge(g: np.ndarray, thr: float) -> int:
    """#{ g >= thr }"""
    return int(np.count_nonzero(g >= thr))


def count_mrc(
    gl: np.ndarray, gh: np.ndarray, cht: float, cint: float, p: float, thr: float
) -> int:
    """#{ cht*gh/(1+cint*gh) + p*gl >= thr }  (combined-SNR success)"""
    return int(np.count_nonzero(cht * gh / (1.0 + cint * gh) + p * gl >= thr))


def count_sinr_ge(gh: np.ndarray, sp: float, osp: float, thr: float) -> int:
    """#{ sp*gh/(1+osp*gh) >= thr }  (single interference-limited link)"""
    return int(np.count_nonzero(sp * gh / (1.0 + osp * gh) >= thr))


def count_sum_ge(gl: np.ndarray, gh: np.ndarray, s: float, c: float) -> int:
    """#{ gl + s*gh >= c }  (averaged-SNR success after cancellation)"""
    return int(np.count_nonzero(gl + s * gh >= c))


def count_joint_sic(
    gl: np.ndarray, gh: np.ndarray, p: float, sp: float, big_t: float
) -> int:
    """#{ (1+p*gl)*(1+sp*gh) >= big_t }  (parallel-channel sum rate, SIC)"""
    return int(np.count_nonzero((1.0 + p * gl) * (1.0 + sp * gh) >= big_t))


def count_joint_inoise(
    gl: np.ndarray, gh: np.ndarray, p: float, sp: float, osp: float, big_t: float
) -> int:
    """#{ (1+p*gl)*(1+sp*gh/(1+osp*gh)) >= big_t }  (sum rate, no SIC)"""
    return int(
        np.count_nonzero((1.0 + p * gl) * (1.0 + sp * gh / (1.0 + osp * gh)) >= big_t)
    )


def count_m1_cache(
    gl: np.ndarray,
    gh: np.ndarray,
    cht: float,
    cint: float,
    p: float,
    thr_mrc: float,
    sp: float,
    big_t: float,
) -> int:
    """Joint-with-SIC per-cache success: MRC clause AND sum-rate clause."""
    mrc = cht * gh / (1.0 + cint * gh) + p * gl >= thr_mrc
    joint = (1.0 + p * gl) * (1.0 + sp * gh) >= big_t
    return int(np.count_nonzero(mrc & joint))


def count_m3_cache(
    gl: np.ndarray,
    gh: np.ndarray,
    cht: float,
    cint: float,
    p: float,
    thr_mrc: float,
    t_lt: float,
    t_ht: float,
) -> int:
    """Separate-with-SIC per-cache success: MRC AND both per-packet clauses."""
    mrc = cht * gh / (1.0 + cint * gh) + p * gl >= thr_mrc
    return int(np.count_nonzero(mrc & (gl >= t_lt) & (gh >= t_ht)))


def count_m4_cache(
    gl: np.ndarray,
    gh: np.ndarray,
    t_lt: float,
    sp: float,
    osp: float,
    thr_ht: float,
) -> int:
    """Separate-no-SIC per-cache success: LT clause AND interference-limited HT clause."""
    ht = sp * gh / (1.0 + osp * gh) >= thr_ht
    return int(np.count_nonzero((gl >= t_lt) & ht))
