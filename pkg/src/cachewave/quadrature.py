"""Adaptive one-dimensional quadrature on finite intervals.

This is the numerical workhorse behind every success-probability evaluator
in the package.  It implements a globally adaptive Gauss–Kronrod scheme:

* each panel is estimated with the 15-point Kronrod rule, and the embedded
  7-point Gauss rule provides the error estimate;
* the panel with the largest error estimate is bisected until the *sum*
  of panel errors meets the global tolerance — work concentrates where
  the integrand is hard, so integrable endpoint blowups (e.g. an inverse
  square root) converge instead of starving well-resolved panels;
* all nodes are interior points, so integrands may be singular (or merely
  undefined) at the interval endpoints — several of the outage integrals
  in this package have denominators that vanish exactly at a limit.

Each panel's bisection depth is capped (default 60 levels); needing to
split a panel already at the cap raises :class:`NonConvergence`, which
callers treat as "the integrand is pathological for these parameters"
rather than silently returning junk.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

__all__ = ["IntegralResult", "NonConvergence", "integrate"]

# Absolute floor on the accuracy target: below this, asking for more
# relative precision is meaningless in double arithmetic.
ABS_FLOOR = 1e-12

DEFAULT_MAX_DEPTH = 60

# Hard cap on simultaneously held panels (measures total work, where the
# depth cap only measures local refinement).  Production integrands use a
# few dozen panels; hitting this limit is a pathology signal.
MAX_PANELS = 10_000

# ============================================================
# 15-point Kronrod rule with embedded 7-point Gauss rule
# ============================================================
# Nodes are symmetric about 0; only the non-negative half is tabulated.
# Node ordering: Kronrod-only nodes interleave the Gauss nodes; entries
# at odd indices (1, 3, 5) and index 7 carry Gauss weight as well.

_KRONROD_NODES = (
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
)

_KRONROD_WEIGHTS = (
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
)

# Gauss weights for the embedded rule, indexed like the node table above
# (zero where the node is Kronrod-only).
_GAUSS_WEIGHTS = (
    0.0,
    0.129484966168870,
    0.0,
    0.279705391489277,
    0.0,
    0.381830050505119,
    0.0,
    0.417959183673469,
)


@dataclass(frozen=True)
class IntegralResult:
    """Outcome of one integration: value, error estimate, work done."""

    value: float
    error_estimate: float  # >= 0, conservative (sum of per-panel |K15-G7|)
    evaluations: int       # number of integrand evaluations


class NonConvergence(ArithmeticError):
    """Adaptive bisection hit a resource cap before meeting tolerance."""


def _gk15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """One Gauss–Kronrod panel on [a, b] -> (kronrod estimate, |K15-G7|)."""
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = f(center)
    kron = _KRONROD_WEIGHTS[7] * fc
    gauss = _GAUSS_WEIGHTS[7] * fc
    for i in range(7):
        dx = half * _KRONROD_NODES[i]
        fsum = f(center - dx) + f(center + dx)
        kron += _KRONROD_WEIGHTS[i] * fsum
        gauss += _GAUSS_WEIGHTS[i] * fsum
    kron *= half
    gauss *= half
    return kron, abs(kron - gauss)


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-9,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> IntegralResult:
    """Integrate ``f`` over ``[a, b]`` to relative tolerance ``rel_tol``.

    The accuracy target is ``max(rel_tol * |value|, 1e-12)`` on the summed
    panel error; the absolute floor keeps tiny integrals from demanding
    impossible relative precision.  Endpoints are never evaluated (open
    rule).

    An empty or inverted interval (``a >= b``) integrates to exactly 0
    with zero evaluations; inverted intervals arise naturally when a
    caller clamps analytically derived limits.

    Raises
    ------
    ValueError
        if ``rel_tol`` is outside ``(0, 0.1]``.
    NonConvergence
        if refinement would bisect a panel beyond ``max_depth`` levels,
        or the panel store overflows.
    """
    if not 0.0 < rel_tol <= 0.1:
        raise ValueError(f"rel_tol must be in (0, 0.1], got {rel_tol!r}")
    if a >= b:
        return IntegralResult(0.0, 0.0, 0)
    val, err = _gk15(f, a, b)
    # Parallel panel arrays: bounds, Kronrod value, error estimate, depth.
    pa, pb, pv, pe, pd = [a], [b], [val], [err], [0]
    total_val = val
    total_err = err
    splits = 0
    while True:
        tol = rel_tol * abs(total_val)
        if tol < ABS_FLOOR:
            tol = ABS_FLOOR
        if total_err <= tol:
            break
        # Split the panel with the largest error (first index wins ties).
        worst = 0
        for i in range(1, len(pe)):
            if pe[i] > pe[worst]:
                worst = i
        if pd[worst] >= max_depth:
            raise NonConvergence(
                f"no convergence on [{pa[worst]!r}, {pb[worst]!r}] after "
                f"{pd[worst]} bisection levels (panel error {pe[worst]:.3e}, "
                f"total error {total_err:.3e}, tolerance {tol:.3e})"
            )
        if len(pe) >= MAX_PANELS:
            raise NonConvergence(
                f"panel store exhausted ({MAX_PANELS} panels) with total "
                f"error {total_err:.3e} above tolerance {tol:.3e}"
            )
        wa, wb, wv, we, wd = pa[worst], pb[worst], pv[worst], pe[worst], pd[worst]
        mid = 0.5 * (wa + wb)
        lv, le = _gk15(f, wa, mid)
        rv, re = _gk15(f, mid, wb)
        pa[worst], pb[worst], pv[worst], pe[worst], pd[worst] = wa, mid, lv, le, wd + 1
        pa.append(mid)
        pb.append(wb)
        pv.append(rv)
        pe.append(re)
        pd.append(wd + 1)
        total_val = total_val - wv + lv + rv
        total_err = total_err - we + le + re
        splits += 1
    if total_err < 0.0:  # running subtraction can round slightly below zero
        total_err = 0.0
    return IntegralResult(total_val, total_err, 15 + 30 * splits)
