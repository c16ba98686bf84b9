"""Channel-model primitives: Rayleigh-fading gains and power conversion.

A Rayleigh-faded link has an exponentially distributed power gain; each
cache node sees independent realizations in the low-traffic (LT) and
high-traffic (HT) transmission periods.  Everything downstream consumes
the four gains of one slot pair through :class:`GainDraw`.

Randomness contract
-------------------
Sampling is inverse-CDF (``g = -ln(U)/lambda`` with ``U`` uniform on
``(0, 1]``) on top of NumPy's counter-based Philox generator, so a seed
fully determines the gain sequence bit-for-bit on every platform.
Parallel workloads derive one independent substream per batch index via
``SeedSequence(entropy=seed, spawn_key=(index,))``; see
:func:`gain_stream`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChannelParams",
    "GainDraw",
    "power_from_snr_db",
    "sample_gain",
    "sample_gains",
    "gain_stream",
    "draw_gains",
]


# ============================================================
# Domain types
# ============================================================

@dataclass(frozen=True)
class ChannelParams:
    """Static link parameters shared by all evaluators."""

    lambda1: float = 1.0   # exponential rate of cache-1 gains (1/mean)
    lambda2: float = 0.1   # exponential rate of cache-2 gains (1/mean)
    power: float = 10.0    # linear transmit power P (noise variance is 1)

    def __post_init__(self) -> None:
        if not self.lambda1 > 0:
            raise ValueError(f"lambda1 must be > 0, got {self.lambda1!r}")
        if not self.lambda2 > 0:
            raise ValueError(f"lambda2 must be > 0, got {self.lambda2!r}")
        if not self.power > 0:
            raise ValueError(f"power must be > 0, got {self.power!r}")


@dataclass(frozen=True)
class GainDraw:
    """One channel realization per cache and period (all power gains >= 0)."""

    g1_lt: float  # cache 1, LT period
    g1_ht: float  # cache 1, HT period
    g2_lt: float  # cache 2, LT period
    g2_ht: float  # cache 2, HT period

    def __post_init__(self) -> None:
        for name in ("g1_lt", "g1_ht", "g2_lt", "g2_ht"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")


# ============================================================
# Operations
# ============================================================

def power_from_snr_db(snr_db: float) -> float:
    """Transmit SNR in dB -> linear power (unit noise variance)."""
    return 10.0 ** (snr_db / 10.0)


def gain_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent, reproducible random stream number ``stream`` for ``seed``.

    Streams for distinct ``stream`` indices are statistically independent,
    so batches of a Monte Carlo run can be sampled in any order (or in
    parallel) and still reproduce the serial result exactly.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(ss))


def sample_gain(lam: float, rng: np.random.Generator) -> float:
    """Draw one exponential power gain with rate ``lam``.

    Inverse-CDF transform of a uniform on (0, 1]: ``rng.random()`` yields
    u in [0, 1), and ``-log1p(-u)`` maps it to ``-ln(U)`` with U = 1 - u
    never hitting zero.
    """
    return -np.log1p(-rng.random()) / lam


def sample_gains(lam: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized :func:`sample_gain`: ``n`` gains as a float64 array."""
    return -np.log1p(-rng.random(n)) / lam


def draw_gains(ch: ChannelParams, rng: np.random.Generator) -> GainDraw:
    """One full slot-pair realization (fixed draw order: 1LT, 1HT, 2LT, 2HT)."""
    return GainDraw(
        g1_lt=sample_gain(ch.lambda1, rng),
        g1_ht=sample_gain(ch.lambda1, rng),
        g2_lt=sample_gain(ch.lambda2, rng),
        g2_ht=sample_gain(ch.lambda2, rng),
    )
