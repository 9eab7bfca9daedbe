"""Estimates, confidence widths and seeded Monte-Carlo counting."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

CHUNK = 1 << 13
Z95 = 1.959963984540054


def hoeffding_halfwidth(samples: int, delta: float = 0.05) -> float:
    """``g`` with ``2 exp(-2 g^2 samples) = delta``."""
    if samples <= 0:
        raise ValueError("need at least one sample")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * samples))


def hoeffding_failure(samples: int, gamma: float) -> float:
    """Probability bound ``2/e^(2 gamma^2 samples)`` for a deviation of ``gamma``."""
    return 2.0 * math.exp(-2.0 * gamma * gamma * samples)


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("need at least one trial")
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class AdvantageReport:
    """A probability (or difference of probabilities) with its provenance.

    ``half_width`` is a 95% Hoeffding half-width in ``mc`` mode and 0 when
    the value was obtained by exact enumeration.
    """

    estimate: float
    mode: str
    samples: int = 0
    half_width: float = 0.0

    def __post_init__(self):
        if self.mode not in ("exact", "mc"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "exact" and self.half_width != 0.0:
            raise ValueError("exact reports carry no confidence width")

    def __float__(self):
        return float(self.estimate)

    @property
    def lower(self) -> float:
        return self.estimate - self.half_width

    @property
    def upper(self) -> float:
        return self.estimate + self.half_width


def chunk_seeds(seed: int, total: int) -> list[tuple[np.random.SeedSequence, int]]:
    """Split ``total`` draws into fixed chunks, each with its own child seed.

    Chunk boundaries depend only on ``total``, so the merged result is the
    same however the chunks are spread over workers.
    """
    nchunks = max(1, -(-total // CHUNK))
    children = np.random.SeedSequence(seed).spawn(nchunks)
    sizes = [CHUNK] * (nchunks - 1) + [total - CHUNK * (nchunks - 1)]
    return list(zip(children, sizes))


def mc_count(draw_and_count, total: int, seed: int, workers: int = 1) -> int:
    """Sum ``draw_and_count(rng, size)`` over seeded chunks of ``total`` draws."""
    if total <= 0:
        raise ValueError("Monte-Carlo mode needs a positive sample count")
    jobs = chunk_seeds(seed, total)

    def run(job):
        ss, size = job
        return int(draw_and_count(np.random.default_rng(ss), size))

    if workers <= 1:
        return sum(run(j) for j in jobs)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(run, jobs))


def random_ints(rng: np.random.Generator, bits: int, size: int) -> np.ndarray:
    """``size`` uniform ``bits``-bit integers as uint64 (bits <= 64)."""
    if bits == 0:
        return np.zeros(size, dtype=np.uint64)
    if bits > 64:
        raise ValueError("at most 64 bits per draw")
    raw = rng.integers(0, 1 << 63, size=size, dtype=np.uint64, endpoint=False)
    if bits == 64:
        raw = (raw << np.uint64(1)) | rng.integers(0, 2, size=size, dtype=np.uint64)
        return raw
    return raw & np.uint64((1 << bits) - 1)
