"""Sample generators G_C, Nisan-Wigderson generators and succinct PRF families.

Bit layout of a G_C output for ``m`` blocks over ``n``-input circuits: block
``i`` occupies bits ``i*(n+1) .. i*(n+1)+n-1`` (the string ``x_i``) and bit
``i*(n+1)+n`` (its label).  The seed is the concatenation of the ``x_i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import DEFAULT_BUDGET, TruthTable, eval_many, table_of
from .designs import DesignMatrix, check_seed, restrict
from .errors import BudgetExceeded, StructuralError
from .stats import AdvantageReport, hoeffding_halfwidth, mc_count, random_ints

MC_DEFAULT_SAMPLES = 10**5
_EXACT_CHUNK = 1 << 16


@dataclass(frozen=True)
class SampleGenerator:
    """``x_1..x_m -> x_1, C(x_1), ..., x_m, C(x_m)``."""

    C: object
    m: int

    @property
    def n(self) -> int:
        return self.C.n

    @property
    def seed_bits(self) -> int:
        return self.m * self.n

    @property
    def output_bits(self) -> int:
        return self.m * (self.n + 1)

    def output_batch(self, seeds: np.ndarray) -> np.ndarray:
        return gc_outputs(self.C, self.m, seeds)


def gc_outputs(C, m: int, seeds: np.ndarray, labels_from=None) -> np.ndarray:
    """Vectorized G_C on an array of ``m*n``-bit seeds."""
    n = C.n
    seeds = np.asarray(seeds, dtype=np.uint64)
    block_mask = np.uint64((1 << n) - 1)
    out = np.zeros(seeds.shape, dtype=np.uint64)
    for i in range(m):
        xi = (seeds >> np.uint64(i * n)) & block_mask
        label = eval_many(C if labels_from is None else labels_from, xi).astype(np.uint64)
        out |= xi << np.uint64(i * (n + 1))
        out |= label << np.uint64(i * (n + 1) + n)
    return out


def g_c_output(G: SampleGenerator, x: int) -> int:
    if x < 0 or x >> G.seed_bits:
        raise StructuralError(f"G_C seed must have {G.seed_bits} bits")
    return int(G.output_batch(np.array([x], dtype=np.uint64))[0])


@dataclass(frozen=True)
class NWGenerator:
    """Row ``x`` of ``NW_C(w)`` is ``C(w|J_x)``."""

    C: object
    A: DesignMatrix

    def __post_init__(self):
        if self.C.n != self.A.set_size:
            raise StructuralError(
                f"base function has {self.C.n} inputs but design rows have {self.A.set_size}")

    def row_input(self, w: int, x: int) -> int:
        return restrict(w, self.A.row(x))


def nw_row(gen: NWGenerator, w: int, x: int) -> int:
    check_seed(w, gen.A)
    return gen.C(gen.row_input(w, x))


def nw_row_function(gen: NWGenerator, w: int) -> TruthTable:
    """The function ``x -> C(w|J_x)`` on ``log_rows`` inputs."""
    check_seed(w, gen.A)
    if gen.A.log_rows < 1:
        raise StructuralError("row functions need at least two rows")
    inputs = np.array([restrict(w, J) for J in gen.A.rows], dtype=np.uint64)
    bits = eval_many(gen.C, inputs)
    return TruthTable(gen.A.log_rows, sum(1 << x for x in np.flatnonzero(bits).tolist()))


@dataclass(frozen=True)
class SuccinctPRF:
    """Multiset of circuits; a sample picks a member uniformly and applies G_C."""

    circuits: tuple
    m: int
    s: int = 0

    def __post_init__(self):
        object.__setattr__(self, "circuits", tuple(self.circuits))
        if not self.circuits:
            raise StructuralError("a succinct PRF needs at least one circuit")
        if len({c.n for c in self.circuits}) != 1:
            raise StructuralError("all members must have the same input count")

    @property
    def n(self) -> int:
        return self.circuits[0].n

    @property
    def k(self) -> int:
        return len(self.circuits)

    @property
    def output_bits(self) -> int:
        return self.m * (self.n + 1)


# ---------------------------------------------------------------- probabilities

def _check_arity(D, bits: int):
    if D.n != bits:
        raise StructuralError(f"distinguisher has {D.n} inputs, expected {bits}")


def ones_uniform_exact(D, bits: int, budget: int = DEFAULT_BUDGET) -> int:
    """Number of ``bits``-bit inputs on which D outputs 1."""
    _check_arity(D, bits)
    if (1 << bits) > budget:
        raise BudgetExceeded("uniform enumeration", 1 << bits, budget)
    if hasattr(D, "table_value") and bits <= 24:
        return bin(table_of(D)).count("1")
    total = 0
    for start in range(0, 1 << bits, _EXACT_CHUNK):
        xs = np.arange(start, min(1 << bits, start + _EXACT_CHUNK), dtype=np.uint64)
        total += int(eval_many(D, xs).sum())
    return total


def ones_generator_exact(D, C, m: int, budget: int = DEFAULT_BUDGET) -> int:
    """Number of G_C seeds whose output D accepts."""
    n = C.n
    _check_arity(D, m * (n + 1))
    if (1 << (m * n)) > budget:
        raise BudgetExceeded("G_C seed enumeration", 1 << (m * n), budget)
    total = 0
    for start in range(0, 1 << (m * n), _EXACT_CHUNK):
        seeds = np.arange(start, min(1 << (m * n), start + _EXACT_CHUNK), dtype=np.uint64)
        total += int(eval_many(D, gc_outputs(C, m, seeds)).sum())
    return total


def prob_uniform(D, bits: int, mode: str = "exact", samples: int = MC_DEFAULT_SAMPLES,
                 seed: int = 0, budget: int = DEFAULT_BUDGET, workers: int = 1) -> float:
    if mode == "exact":
        return ones_uniform_exact(D, bits, budget) / (1 << bits)
    _check_arity(D, bits)
    hits = mc_count(lambda rng, k: eval_many(D, random_ints(rng, bits, k)).sum(),
                    samples, seed, workers)
    return hits / samples


def prob_generator(D, C, m: int, mode: str = "exact", samples: int = MC_DEFAULT_SAMPLES,
                   seed: int = 0, budget: int = DEFAULT_BUDGET, workers: int = 1) -> float:
    if mode == "exact":
        return ones_generator_exact(D, C, m, budget) / (1 << (m * C.n))
    _check_arity(D, m * (C.n + 1))
    hits = mc_count(
        lambda rng, k: eval_many(D, gc_outputs(C, m, random_ints(rng, m * C.n, k))).sum(),
        samples, seed, workers)
    return hits / samples


def prob_prf(S: SuccinctPRF, D, mode: str = "exact", samples: int = MC_DEFAULT_SAMPLES,
             seed: int = 0, budget: int = DEFAULT_BUDGET, workers: int = 1) -> float:
    """``Pr[D = 1]`` for a uniform member (by multiplicity) and uniform blocks."""
    if mode == "exact":
        per_table: dict[int, float] = {}
        total = 0.0
        for C in S.circuits:
            key = table_of(C)
            if key not in per_table:
                per_table[key] = prob_generator(D, C, S.m, "exact", budget=budget)
            total += per_table[key]
        return total / S.k

    def draw(rng, k):
        members = rng.integers(0, S.k, size=k)
        seeds = random_ints(rng, S.m * S.n, k)
        hits = 0
        for j in np.unique(members):
            sel = members == j
            hits += int(eval_many(D, gc_outputs(S.circuits[j], S.m, seeds[sel])).sum())
        return hits

    _check_arity(D, S.output_bits)
    return mc_count(draw, samples, seed, workers) / samples


def prf_distinguishing_gap(S: SuccinctPRF, D, mode: str = "exact",
                           samples: int = MC_DEFAULT_SAMPLES, seed: int = 0,
                           budget: int = DEFAULT_BUDGET, workers: int = 1) -> AdvantageReport:
    """``Pr_uniform[D=1] - Pr_S[D=1]``."""
    if mode == "exact":
        p_u = prob_uniform(D, S.output_bits, "exact", budget=budget)
        p_s = prob_prf(S, D, "exact", budget=budget)
        return AdvantageReport(p_u - p_s, "exact")
    if mode != "mc":
        raise ValueError(f"unknown mode {mode!r}")
    p_u = prob_uniform(D, S.output_bits, "mc", samples, seed, workers=workers)
    p_s = prob_prf(S, D, "mc", samples, seed + 1, workers=workers)
    return AdvantageReport(p_u - p_s, "mc", samples, 2 * hoeffding_halfwidth(samples, 0.025))


__all__ = [
    "MC_DEFAULT_SAMPLES", "NWGenerator", "SampleGenerator", "SuccinctPRF", "g_c_output",
    "gc_outputs", "nw_row", "nw_row_function", "ones_generator_exact", "ones_uniform_exact",
    "prf_distinguishing_gap", "prob_generator", "prob_prf", "prob_uniform",
]
