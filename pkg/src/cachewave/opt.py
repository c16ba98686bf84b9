"""Maximization of STP over the power split and the rate splits.

The feasible set is the box (alpha, r1, r_tilde1) in
[0,1] x [0, 2r] x [0, 2 r_tilde]: the complementary sub-packet rates are
pinned by the totals, so the equality constraints are implicit and both
searchers operate on a plain box.

Two strategies:

* :func:`optimize_grid` — exhaustive evaluation on a regular grid.  The
  objective factors over at most two of the three axes, so each outage
  factor is tabulated on its own (alpha x rate) face and the full cube is
  assembled by broadcasting; a 101^3 search costs ~2*101^2 quadratures,
  not 101^3.  Ties break toward the smallest alpha, then r1, then
  r_tilde1 (C-order argmax on axes ordered exactly that way).
* :func:`optimize_genetic` — a small real-coded GA (tournament selection,
  blend crossover, Gaussian mutation, one elite), deterministic under a
  fixed seed.  Validated against the grid; hyperparameters are defaults,
  not contracts.

Method 2's STP does not depend on the rate splits, so its grid collapses
to the alpha axis and ``evaluations == grid_resolution``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import stp as _stp
from .channel import ChannelParams
from .mc import McConfig, estimate_stp
from .stp import DEFAULT_REL_TOL, Method, RateConfig

__all__ = ["SearchSpace", "OptResult", "GaParams", "optimize_grid", "optimize_genetic"]


# ============================================================
# Domain types
# ============================================================

@dataclass(frozen=True)
class SearchSpace:
    """Box constraints and grid resolution for the (alpha, r1, r_tilde1) search.

    Rate ranges default to the full feasible intervals [0, 2r] and
    [0, 2 r_tilde]; pass a degenerate range (lo == hi) to pin an axis.
    """

    alpha_range: tuple[float, float] = (0.0, 1.0)
    r1_range: tuple[float, float] | None = None
    r_tilde1_range: tuple[float, float] | None = None
    grid_resolution: int = 101

    def __post_init__(self) -> None:
        if self.grid_resolution < 2:
            raise ValueError(f"grid_resolution must be >= 2, got {self.grid_resolution!r}")
        lo, hi = self.alpha_range
        if not (0.0 <= lo <= hi <= 1.0):
            raise ValueError(f"alpha_range must satisfy 0 <= lo <= hi <= 1, got {self.alpha_range!r}")
        for name, rng in (("r1_range", self.r1_range),
                          ("r_tilde1_range", self.r_tilde1_range)):
            if rng is not None:
                rlo, rhi = rng
                if not (0.0 <= rlo <= rhi):
                    raise ValueError(f"{name} must satisfy 0 <= lo <= hi, got {rng!r}")

    def resolved(self, r: float, r_tilde: float
                 ) -> tuple[tuple[float, float], tuple[float, float], tuple[float, float]]:
        """Concrete axis ranges for given total rates (validated)."""
        r1r = self.r1_range if self.r1_range is not None else (0.0, 2.0 * r)
        rt1r = self.r_tilde1_range if self.r_tilde1_range is not None else (0.0, 2.0 * r_tilde)
        if r1r[1] > 2.0 * r:
            raise ValueError(f"r1_range {r1r!r} exceeds [0, 2r] with r={r!r}")
        if rt1r[1] > 2.0 * r_tilde:
            raise ValueError(f"r_tilde1_range {rt1r!r} exceeds [0, 2r_tilde] with r_tilde={r_tilde!r}")
        return self.alpha_range, r1r, rt1r


@dataclass(frozen=True)
class OptResult:
    best_alpha: float
    best_r1: float
    best_r_tilde1: float
    best_stp: float
    evaluations: int
    strategy: str  # "grid" or "genetic"


@dataclass(frozen=True)
class GaParams:
    population: int = 64
    generations: int = 100
    mutation_rate: float = 0.15
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population < 4:
            raise ValueError(f"population must be >= 4, got {self.population!r}")
        if self.generations < 1:
            raise ValueError(f"generations must be >= 1, got {self.generations!r}")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError(f"mutation_rate must be in [0, 1], got {self.mutation_rate!r}")


_OBJECTIVES = ("jensen", "exact", "mc")


def _check_objective(objective: str, mc_config: McConfig | None) -> None:
    if objective not in _OBJECTIVES:
        raise ValueError(f"objective must be one of {_OBJECTIVES}, got {objective!r}")
    if objective == "mc" and mc_config is None:
        raise ValueError("objective 'mc' requires an McConfig")


def _axis(rng: tuple[float, float], resolution: int) -> np.ndarray:
    lo, hi = rng
    if lo == hi:
        return np.array([lo])
    return np.linspace(lo, hi, resolution)


# ============================================================
# Vectorized factor tables (grid fast path)
# ============================================================
# Quadrature-backed factors are tabulated point by point on their
# (alpha x rate) face; closed-form factors use numpy expressions.  Any
# evaluator failure is re-raised with the offending grid point attached.

def _note(exc: BaseException, text: str) -> None:
    if hasattr(exc, "add_note"):
        exc.add_note(text)


def _mrc_table(lam: float, p: float, shares: np.ndarray, rates: np.ndarray,
               rel_tol: float) -> np.ndarray:
    out = np.empty((shares.size, rates.size))
    for i, ns in enumerate(shares):
        for j, rate in enumerate(rates):
            try:
                out[i, j] = _stp.mrc_success(lam, p, float(ns), float(rate), rel_tol)
            except Exception as exc:
                _note(exc, f"while tabulating MRC factor at share={ns!r}, rate={rate!r}")
                raise
    return out


def _joint_vec(lam: float, p: float, shares: np.ndarray, rate: float,
               rel_tol: float, exact: bool, with_interference: bool) -> np.ndarray:
    if exact:
        fn = _stp.joint_inoise_success if with_interference else _stp.joint_sic_success
    else:
        fn = _stp.joint_inoise_jensen if with_interference else None
    out = np.empty(shares.size)
    for i, s in enumerate(shares):
        try:
            if fn is None:
                out[i] = _stp.joint_sic_jensen(lam, p, float(s), rate)
            else:
                out[i] = fn(lam, p, float(s), rate, rel_tol)
        except Exception as exc:
            _note(exc, f"while tabulating joint factor at share={s!r}, rate={rate!r}")
            raise
    return out


def _single_link_vec(lam: float, p: float, shares, rates) -> np.ndarray:
    """Vectorized interference-free link success over broadcastable args."""
    shares = np.asarray(shares, dtype=float)
    rates = np.asarray(rates, dtype=float)
    thr = np.expm1(rates)
    sp = shares * p
    with np.errstate(divide="ignore"):
        t = np.where(sp > 0.0, thr / np.where(sp > 0.0, sp, 1.0), np.inf)
    return np.where(thr == 0.0, 1.0, np.exp(-lam * t))


def _sinr_limited_vec(lam: float, p: float, shares, rates) -> np.ndarray:
    """Vectorized interference-limited link success over broadcastable args."""
    shares = np.asarray(shares, dtype=float)
    rates = np.asarray(rates, dtype=float)
    thr = np.expm1(rates)
    feasible = thr * (1.0 - shares) < shares
    den = p * (shares - (1.0 - shares) * thr)
    safe_den = np.where(feasible, den, 1.0)
    return np.where(feasible, np.exp(-lam * thr / safe_den), 0.0)


def _grid_objective(ch: ChannelParams, method: Method, r: float, r_tilde: float,
                    alphas: np.ndarray, r1s: np.ndarray, rt1s: np.ndarray,
                    objective: str, rel_tol: float) -> np.ndarray:
    """Objective cube with axes (alpha, r1, r_tilde1)."""
    p = ch.power
    s = alphas * alphas       # cache-1 HT power shares
    os_ = 1.0 - s
    r2s = 2.0 * r - r1s       # complementary sub-packet rates
    rt2s = 2.0 * r_tilde - rt1s
    exact = objective == "exact"

    if method is Method.M2_JOINT_NOSIC:
        b1 = _joint_vec(ch.lambda1, p, s, r, rel_tol, exact, with_interference=True)
        b2 = _joint_vec(ch.lambda2, p, os_, r_tilde, rel_tol, exact, with_interference=True)
        return (0.5 * (b1 + b2))[:, None, None]

    if method is Method.M1_JOINT_SIC:
        e1 = _mrc_table(ch.lambda1, p, os_, rt1s, rel_tol)   # (na, n_rt1)
        e2 = _mrc_table(ch.lambda2, p, s, r2s, rel_tol)      # (na, n_r1)
        g1 = _joint_vec(ch.lambda1, p, s, r, rel_tol, exact, with_interference=False)
        g2 = _joint_vec(ch.lambda2, p, os_, r_tilde, rel_tol, exact, with_interference=False)
        c1 = (g1[:, None] * e1)[:, None, :]                  # (na, 1, n_rt1)
        c2 = (g2[:, None] * e2)[:, :, None]                  # (na, n_r1, 1)
        return 0.5 * (c1 + c2)

    if method is Method.M3_SEPARATE_SIC:
        e1 = _mrc_table(ch.lambda1, p, os_, rt1s, rel_tol)   # (na, n_rt1)
        e2 = _mrc_table(ch.lambda2, p, s, r2s, rel_tol)      # (na, n_r1)
        b11 = _single_link_vec(ch.lambda1, p, 1.0, r1s)      # (n_r1,)
        b12 = _single_link_vec(ch.lambda1, p, s[:, None], r2s[None, :])   # (na, n_r1)
        b21 = _single_link_vec(ch.lambda2, p, os_[:, None], rt1s[None, :])  # (na, n_rt1)
        b22 = _single_link_vec(ch.lambda2, p, 1.0, rt2s)     # (n_rt1,)
        # cache 1: eta1(alpha, rt1) * b11(r1) * b12(alpha, r1)
        c1 = e1[:, None, :] * b11[None, :, None] * b12[:, :, None]
        # cache 2: eta2(alpha, r2) * b21(alpha, rt1) * b22(rt2)
        c2 = e2[:, :, None] * b21[:, None, :] * b22[None, None, :]
        return 0.5 * (c1 + c2)

    if method is Method.M4_SEPARATE_NOSIC:
        b11 = _single_link_vec(ch.lambda1, p, 1.0, r1s)      # (n_r1,)
        h12 = _sinr_limited_vec(ch.lambda1, p, s[:, None], r2s[None, :])   # (na, n_r1)
        h21 = _sinr_limited_vec(ch.lambda2, p, os_[:, None], rt1s[None, :])  # (na, n_rt1)
        b22 = _single_link_vec(ch.lambda2, p, 1.0, rt2s)     # (n_rt1,)
        c1 = (b11[None, :] * h12)[:, :, None]                # (na, n_r1, 1)
        c2 = (h21 * b22[None, :])[:, None, :]                # (na, 1, n_rt1)
        return 0.5 * (c1 + c2)

    raise ValueError(f"unknown method {method!r}")  # pragma: no cover


def _point_objective(ch: ChannelParams, method: Method, r: float, r_tilde: float,
                     a: float, r1: float, rt1: float, objective: str,
                     rel_tol: float, mc_config: McConfig | None) -> float:
    rates = RateConfig(r=r, r_tilde=r_tilde, r1=r1, r_tilde1=rt1)
    if objective == "mc":
        return estimate_stp(ch, a, rates, method, mc_config).mean
    return _stp.evaluate(ch, a, rates, method, gamma_mode=objective, rel_tol=rel_tol).stp


# ============================================================
# Strategies
# ============================================================

def optimize_grid(ch: ChannelParams, method: Method, r: float, r_tilde: float,
                  space: SearchSpace, objective: str = "jensen",
                  mc_config: McConfig | None = None,
                  rel_tol: float = DEFAULT_REL_TOL) -> OptResult:
    """Exhaustive grid search; ties break toward the smallest coordinates."""
    if not isinstance(method, Method):
        method = Method.parse(str(method))
    _check_objective(objective, mc_config)
    a_rng, r1_rng, rt1_rng = space.resolved(r, r_tilde)
    res = space.grid_resolution
    alphas = _axis(a_rng, res)
    r1s = _axis(r1_rng, res)
    rt1s = _axis(rt1_rng, res)

    if method is Method.M2_JOINT_NOSIC:
        # Split-invariant: only the alpha axis matters.
        r1s = r1s[:1]
        rt1s = rt1s[:1]

    if objective == "mc":
        cube = np.empty((alphas.size, r1s.size, rt1s.size))
        for i, a in enumerate(alphas):
            for j, r1 in enumerate(r1s):
                for k, rt1 in enumerate(rt1s):
                    try:
                        cube[i, j, k] = _point_objective(
                            ch, method, r, r_tilde, float(a), float(r1), float(rt1),
                            objective, rel_tol, mc_config)
                    except Exception as exc:
                        _note(exc, f"at grid point alpha={a!r}, r1={r1!r}, r_tilde1={rt1!r}")
                        raise
    else:
        cube = _grid_objective(ch, method, r, r_tilde, alphas, r1s, rt1s,
                               objective, rel_tol)

    flat = int(np.argmax(cube))  # C order == (alpha, r1, rt1) lexicographic tie-break
    i, j, k = np.unravel_index(flat, cube.shape)
    best_a, best_r1, best_rt1 = float(alphas[i]), float(r1s[j]), float(rt1s[k])
    best = _point_objective(ch, method, r, r_tilde, best_a, best_r1, best_rt1,
                            objective, rel_tol, mc_config)
    return OptResult(
        best_alpha=best_a, best_r1=best_r1, best_r_tilde1=best_rt1,
        best_stp=float(best), evaluations=int(cube.size), strategy="grid",
    )


def optimize_genetic(ch: ChannelParams, method: Method, r: float, r_tilde: float,
                     space: SearchSpace, objective: str = "jensen",
                     ga_params: GaParams | None = None,
                     mc_config: McConfig | None = None,
                     rel_tol: float = DEFAULT_REL_TOL) -> OptResult:
    """Real-coded GA over the same box; deterministic under a fixed seed."""
    if not isinstance(method, Method):
        method = Method.parse(str(method))
    _check_objective(objective, mc_config)
    ga = ga_params or GaParams()
    a_rng, r1_rng, rt1_rng = space.resolved(r, r_tilde)
    lo = np.array([a_rng[0], r1_rng[0], rt1_rng[0]])
    hi = np.array([a_rng[1], r1_rng[1], rt1_rng[1]])
    span = hi - lo
    rng = np.random.default_rng(ga.seed)
    evaluations = 0

    def fitness(genes: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        return _point_objective(ch, method, r, r_tilde,
                                float(genes[0]), float(genes[1]), float(genes[2]),
                                objective, rel_tol, mc_config)

    pop = lo + rng.random((ga.population, 3)) * span
    fits = np.array([fitness(ind) for ind in pop])

    for _ in range(ga.generations):
        order = int(np.argmax(fits))
        elite = pop[order].copy()
        elite_fit = fits[order]
        children = np.empty_like(pop)
        children[0] = elite
        for c in range(1, ga.population):
            # Tournament selection, size 3.
            cand = rng.integers(0, ga.population, size=3)
            p1 = pop[cand[np.argmax(fits[cand])]]
            cand = rng.integers(0, ga.population, size=3)
            p2 = pop[cand[np.argmax(fits[cand])]]
            # Blend crossover (BLX-0.5) with probability 0.9.
            if rng.random() < 0.9:
                low = np.minimum(p1, p2)
                high = np.maximum(p1, p2)
                d = high - low
                child = rng.uniform(low - 0.5 * d, high + 0.5 * d)
            else:
                child = p1.copy()
            # Gaussian mutation, per-gene, sigma = 10% of the axis span.
            mask = rng.random(3) < ga.mutation_rate
            child = child + mask * rng.normal(0.0, 1.0, 3) * 0.1 * span
            children[c] = np.clip(child, lo, hi)
        pop = children
        fits = np.array([elite_fit] + [fitness(ind) for ind in pop[1:]])

    best = int(np.argmax(fits))
    return OptResult(
        best_alpha=float(pop[best][0]), best_r1=float(pop[best][1]),
        best_r_tilde1=float(pop[best][2]), best_stp=float(fits[best]),
        evaluations=evaluations, strategy="genetic",
    )
