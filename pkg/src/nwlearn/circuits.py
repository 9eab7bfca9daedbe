"""Boolean functions, fan-in-two circuits and exhaustive circuit search.

Truth tables are Python ints: bit ``x`` of the value is ``f(x)``, where the
integer ``x`` encodes an input with variable 0 as its least significant bit.
Every module uses this convention, including the LSB-first bit strings
accepted by :func:`bits_to_int`.

Gates may compute any of the 16 two-input Boolean functions.  Op code ``k``
outputs bit ``(k >> (2*a + b)) & 1`` on inputs ``(a, b)``, so ``8`` is AND,
``6`` is XOR and ``14`` is OR.

Wires are small integers: ``0`` and ``1`` are the constants, ``2 + i`` is
input ``x<i>`` and ``2 + n + g`` is gate ``g<g>``.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, NotFound, ParameterError, StructuralError

DEFAULT_BUDGET = 10**8

OP_NAMES = (
    "FALSE", "NOR", "NA_B", "NOTA", "A_NB", "NOTB", "XOR", "NAND",
    "AND", "XNOR", "B", "IMP", "A", "CIMP", "OR", "TRUE",
)
OP_CODES = {name: code for code, name in enumerate(OP_NAMES)}
AND, OR, XOR = OP_CODES["AND"], OP_CODES["OR"], OP_CODES["XOR"]

# _OPBITS[op, k] = 1 iff op outputs 1 on the k-th input pair (a, b), k = 2a + b
_OPBITS = np.array([[(op >> k) & 1 for k in range(4)] for op in range(16)], dtype=np.uint64)


def bits_to_int(bits: str) -> int:
    """Parse an LSB-first bit string (spaces ignored): ``"011"`` -> 6."""
    s = bits.replace(" ", "").replace("_", "")
    if s and set(s) - {"0", "1"}:
        raise StructuralError(f"not a bit string: {bits!r}")
    return sum(1 << i for i, ch in enumerate(s) if ch == "1")


def int_to_bits(value: int, length: int) -> str:
    """Inverse of :func:`bits_to_int` for a fixed length."""
    return "".join("1" if (value >> i) & 1 else "0" for i in range(length))


def op_apply(op: int, a: int, b: int) -> int:
    return (op >> (2 * a + b)) & 1


def table_op(op: int, a: int, b: int, mask: int) -> int:
    """Apply ``op`` bitwise to two truth tables."""
    na, nb = ~a & mask, ~b & mask
    out = 0
    if op & 1:
        out |= na & nb
    if op & 2:
        out |= na & b
    if op & 4:
        out |= a & nb
    if op & 8:
        out |= a & b
    return out


@functools.lru_cache(maxsize=None)
def input_tables(n: int) -> tuple[int, ...]:
    """Truth tables of the projections x0..x(n-1)."""
    size = 1 << n
    tables = []
    for i in range(n):
        block = ((1 << (1 << i)) - 1) << (1 << i)  # 2^i zeros then 2^i ones
        period = 1 << (i + 1)
        t = 0
        for start in range(0, size, period):
            t |= block << start
        tables.append(t)
    return tuple(tables)


def full_mask(n: int) -> int:
    return (1 << (1 << n)) - 1


def base_tables(n: int) -> tuple[int, ...]:
    """Tables of the size-0 wires in wire order: c0, c1, x0, ..., x(n-1)."""
    return (0, full_mask(n)) + input_tables(n)


@dataclass(frozen=True)
class TruthTable:
    n: int
    value: int

    def __post_init__(self):
        if self.n < 1:
            raise StructuralError("a truth table needs n >= 1")
        if self.value < 0 or self.value >> (1 << self.n):
            raise StructuralError(f"value does not fit in 2^{self.n} bits")

    @classmethod
    def from_bits(cls, bits: Sequence[int] | str) -> "TruthTable":
        if isinstance(bits, str):
            s = bits.replace(" ", "")
            n = max(1, (len(s) - 1).bit_length())
            if len(s) != 1 << n:
                raise StructuralError("bit string length must be a power of two >= 2")
            return cls(n, bits_to_int(s))
        n = (len(bits) - 1).bit_length()
        if len(bits) != 1 << n or n < 1:
            raise StructuralError("bit vector length must be a power of two >= 2")
        return cls(n, sum(1 << i for i, b in enumerate(bits) if b))

    @classmethod
    def from_function(cls, n: int, fn) -> "TruthTable":
        return cls(n, sum(1 << x for x in range(1 << n) if fn(x)))

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def bits(self) -> np.ndarray:
        return np.array([(self.value >> x) & 1 for x in range(self.size)], dtype=np.uint8)

    def __call__(self, x: int) -> int:
        return (self.value >> x) & 1

    def __getitem__(self, x: int) -> int:
        if not 0 <= x < self.size:
            raise IndexError(x)
        return (self.value >> x) & 1

    def __invert__(self) -> "TruthTable":
        return TruthTable(self.n, ~self.value & full_mask(self.n))

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        return self.bits[np.asarray(xs, dtype=np.int64)]

    def ones(self) -> int:
        return bin(self.value).count("1")

    def agreement(self, other: int | "TruthTable") -> int:
        """Number of inputs on which the two functions agree."""
        v = other.value if isinstance(other, TruthTable) else other
        return self.size - bin((self.value ^ v) & full_mask(self.n)).count("1")

    def to_text(self) -> str:
        digits = max(1, self.size // 4)
        return f"n={self.n}\n{self.value:0{digits}x}\n"

    @classmethod
    def from_text(cls, text: str) -> "TruthTable":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if len(lines) != 2 or not lines[0].startswith("n="):
            raise StructuralError("truth table file must be 'n=<n>' then one hex line")
        return cls(int(lines[0][2:]), int(lines[1], 16))


_WIRE_RE = re.compile(r"^(c[01]|x\d+|g\d+)$")
_GATE_RE = re.compile(r"^g(\d+)\s*=\s*([A-Z_]+)\(\s*(\w+)\s*,\s*(\w+)\s*\)$")


@dataclass(frozen=True)
class Circuit:
    """A fan-in-two circuit; ``gates`` is a tuple of ``(op, left, right)``.

    For circuits with gates the output is the last gate.  Size-0 circuits
    output a constant or an input wire, given by ``out``.
    """

    n: int
    gates: tuple[tuple[int, int, int], ...] = ()
    out: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise StructuralError("a circuit needs n >= 1 inputs")
        gates = tuple(tuple(int(v) for v in g) for g in self.gates)
        object.__setattr__(self, "gates", gates)
        for g, gate in enumerate(gates):
            if len(gate) != 3:
                raise StructuralError(f"gate {g} is not (op, left, right)")
            op, left, right = gate
            if not 0 <= op < 16:
                raise StructuralError(f"gate {g}: op code {op} outside 0..15")
            limit = 2 + self.n + g
            for w in (left, right):
                if not 0 <= w < limit:
                    raise StructuralError(f"gate {g}: wire {w} is not an earlier wire")
        last = 2 + self.n + len(gates) - 1
        if gates:
            if self.out is None:
                object.__setattr__(self, "out", last)
            elif self.out != last:
                raise StructuralError("the output of a circuit with gates is its last gate")
        elif self.out is None or not 0 <= self.out < 2 + self.n:
            raise StructuralError("a size-0 circuit must output a constant or an input")

    @classmethod
    def const(cls, n: int, bit: int) -> "Circuit":
        return cls(n, (), 1 if bit else 0)

    @classmethod
    def projection(cls, n: int, i: int) -> "Circuit":
        return cls(n, (), 2 + i)

    @classmethod
    def build(cls, n: int, gates, out: str | None = None) -> "Circuit":
        """Build from named gates, e.g. ``[("AND", "x0", "x1"), ("XOR", "x2", "g0")]``."""
        coded = []
        for op, left, right in gates:
            code = OP_CODES[op] if isinstance(op, str) else int(op)
            coded.append((code, parse_wire(left, n), parse_wire(right, n)))
        return cls(n, tuple(coded), None if out is None else parse_wire(out, n))

    @property
    def size(self) -> int:
        return len(self.gates)

    def wire_name(self, w: int) -> str:
        return wire_name(w, self.n)

    def __call__(self, x: int) -> int:
        return self.eval(x)

    def eval(self, x: int) -> int:
        if not 0 <= x < (1 << self.n):
            raise StructuralError(f"input {x} has more than {self.n} bits")
        vals = [0, 1] + [(x >> i) & 1 for i in range(self.n)]
        for op, left, right in self.gates:
            vals.append((op >> (2 * vals[left] + vals[right])) & 1)
        return vals[self.out]

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.uint64)
        one = np.uint64(1)
        vals = [np.zeros(xs.shape, np.uint8), np.ones(xs.shape, np.uint8)]
        vals += [((xs >> np.uint64(i)) & one).astype(np.uint8) for i in range(self.n)]
        for op, left, right in self.gates:
            idx = 2 * vals[left] + vals[right]
            vals.append(((op >> idx) & 1).astype(np.uint8))
        return vals[self.out]

    def table_value(self) -> int:
        mask = full_mask(self.n)
        vals = list(base_tables(self.n))
        for op, left, right in self.gates:
            vals.append(table_op(op, vals[left], vals[right], mask))
        return vals[self.out]

    def truth_table(self) -> TruthTable:
        return TruthTable(self.n, self.table_value())

    def to_text(self) -> str:
        lines = [f"n={self.n}"]
        for g, (op, left, right) in enumerate(self.gates):
            lines.append(f"g{g} = {OP_NAMES[op]}({self.wire_name(left)}, {self.wire_name(right)})")
        lines.append(f"out = {self.wire_name(self.out)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines or not lines[0].startswith("n="):
            raise StructuralError("circuit file must start with 'n=<inputs>'")
        n = int(lines[0][2:])
        gates = []
        out = None
        for ln in lines[1:]:
            if ln.startswith("out"):
                out = ln.split("=", 1)[1].strip()
                continue
            mt = _GATE_RE.match(ln)
            if not mt:
                raise StructuralError(f"cannot parse gate line {ln!r}")
            if int(mt.group(1)) != len(gates):
                raise StructuralError(f"gates must be numbered in order, got {ln!r}")
            if mt.group(2) not in OP_CODES:
                raise StructuralError(f"unknown gate op {mt.group(2)!r}")
            gates.append((mt.group(2), mt.group(3), mt.group(4)))
        if out is None:
            raise StructuralError("missing 'out = ...' line")
        return cls.build(n, gates, out)


def wire_name(w: int, n: int) -> str:
    if w < 2:
        return f"c{w}"
    if w < 2 + n:
        return f"x{w - 2}"
    return f"g{w - 2 - n}"


def parse_wire(name: str | int, n: int) -> int:
    if isinstance(name, (int, np.integer)):
        return int(name)
    if not _WIRE_RE.match(name):
        raise StructuralError(f"bad wire name {name!r}")
    idx = int(name[1:])
    if name[0] == "c":
        return idx
    if name[0] == "x":
        if idx >= n:
            raise StructuralError(f"input {name} out of range for n={n}")
        return 2 + idx
    return 2 + n + idx


class BitFunction:
    """A named oracle function on ``n``-bit integers, duck-typed like a Circuit."""

    def __init__(self, n: int, fn, name: str = "fn"):
        self.n = n
        self.fn = fn
        self.name = name

    def __call__(self, x: int) -> int:
        return int(self.fn(int(x)))

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        return np.fromiter((self.fn(int(x)) for x in np.asarray(xs).ravel()), dtype=np.uint8,
                           count=np.asarray(xs).size).reshape(np.shape(xs))

    def __repr__(self):
        return f"BitFunction(n={self.n}, {self.name})"


def eval_many(f, xs: np.ndarray) -> np.ndarray:
    """Evaluate any function object (Circuit, TruthTable, BitFunction) on an array."""
    if hasattr(f, "eval_batch"):
        return np.asarray(f.eval_batch(xs), dtype=np.uint8)
    return np.fromiter((f(int(x)) for x in xs), dtype=np.uint8, count=len(xs))


def table_of(f) -> int:
    """Truth table value of any function object with an ``n`` attribute."""
    if isinstance(f, Circuit):
        return f.table_value()
    if isinstance(f, TruthTable):
        return f.value
    xs = np.arange(1 << f.n, dtype=np.uint64)
    bits = eval_many(f, xs)
    return int(sum(1 << int(x) for x in np.flatnonzero(bits)))


# ---------------------------------------------------------------- enumeration

def count_circuits(n: int, s: int) -> int:
    """Number of syntactic circuits with ``n`` inputs and at most ``s`` gates."""
    total = n + 2
    per_size = 1
    for g in range(s):
        per_size *= 16 * (n + 2 + g) ** 2
        total += per_size
    return total


def enumerate_circuits(n: int, s: int, budget: int = DEFAULT_BUDGET) -> Iterator[Circuit]:
    """Stream every circuit of size <= s in canonical order.

    Order: by size, then lexicographically on the gate sequence, each gate
    keyed by ``(op, left, right)``.  Size 0 lists c0, c1, x0, ..., x(n-1).
    """
    if n < 1 or s < 0:
        raise ParameterError("need n >= 1 and s >= 0")
    needed = count_circuits(n, s)
    if needed > budget:
        raise BudgetExceeded(f"enumerate_circuits(n={n}, s={s})", needed, budget)
    for w in range(n + 2):
        yield Circuit(n, (), w)
    for size in range(1, s + 1):
        for gates, _ in _dfs(n, size):
            yield Circuit(n, gates)


def _dfs(n: int, size: int):
    """Yield ``(gates, output_table)`` for all circuits of exactly ``size`` gates."""
    mask = full_mask(n)
    tables = list(base_tables(n))
    gates: list[tuple[int, int, int]] = []

    def rec(depth):
        wires = len(tables)
        last = depth == size - 1
        for op in range(16):
            for left in range(wires):
                a = tables[left]
                for right in range(wires):
                    t = table_op(op, a, tables[right], mask)
                    gates.append((op, left, right))
                    if last:
                        yield tuple(gates), t
                    else:
                        tables.append(t)
                        yield from rec(depth + 1)
                        tables.pop()
                    gates.pop()

    yield from rec(0)


def _pair_outputs(avail: np.ndarray, mask: int) -> np.ndarray:
    """Outputs of every gate over ``avail`` wires, shape ``(16, W, W)``."""
    a = avail[:, None]
    b = avail[None, :]
    m = np.uint64(mask)
    na, nb = ~a & m, ~b & m
    basis = np.stack([na & nb, na & b, a & nb, a & b])  # (4, W, W), disjoint bits
    out = np.zeros((16,) + basis.shape[1:], dtype=np.uint64)
    for k in range(4):
        out |= _OPBITS[:, k][:, None, None] * basis[k][None]
    return out


def _check_vector_n(n: int):
    if n > 6:
        raise ParameterError(f"exhaustive circuit search supports n <= 6, got n={n}")


@functools.lru_cache(maxsize=64)
def _realizable(n: int, s: int, budget: int) -> dict[int, int]:
    _check_vector_n(n)
    mask = full_mask(n)
    base = base_tables(n)
    best = {t: 0 for t in base}
    states = {frozenset()}
    work = 0
    for size in range(1, s + 1):
        next_states = set()
        for state in states:
            avail = np.array(sorted(set(base) | state), dtype=np.uint64)
            work += 16 * len(avail) ** 2
            if work > budget:
                raise BudgetExceeded(f"realizable_tables(n={n}, s={s})", work, budget)
            outs = np.unique(_pair_outputs(avail, mask))
            for t in outs.tolist():
                if t not in best:
                    best[t] = size
                if size < s and t not in base and t not in state:
                    next_states.add(state | {t})
        states = next_states
    return best


def realizable_tables(n: int, s: int, budget: int = DEFAULT_BUDGET) -> dict[int, int]:
    """Map every truth table computable with <= s gates to its minimum size.

    Searches over sets of available wire tables rather than circuits, so it is
    far cheaper than streaming :func:`enumerate_circuits`.
    """
    if n < 1 or s < 0:
        raise ParameterError("need n >= 1 and s >= 0")
    return dict(_realizable(n, s, budget))


@functools.lru_cache(maxsize=64)
def _realizable_array(n: int, s: int, budget: int) -> tuple[np.ndarray, np.ndarray]:
    best = _realizable(n, s, budget)
    tables = np.array(sorted(best), dtype=np.uint64)
    sizes = np.array([best[int(t)] for t in tables], dtype=np.int64)
    return tables, sizes


def first_circuit(n: int, size: int, accept, budget: int = DEFAULT_BUDGET) -> Circuit | None:
    """First circuit of exactly ``size`` gates (canonical order) whose table passes ``accept``.

    ``accept`` maps a uint64 array of tables to a boolean array.  Branches
    that cannot reach an accepted table are pruned.
    """
    _check_vector_n(n)
    mask = full_mask(n)
    base = list(base_tables(n))
    if size == 0:
        for w, t in enumerate(base):
            if accept(np.array([t], dtype=np.uint64))[0]:
                return Circuit(n, (), w)
        return None
    memo: dict = {}
    work = [0]

    def can_finish(avail: frozenset, r: int) -> bool:
        key = (avail, r)
        if key in memo:
            return memo[key]
        arr = np.array(sorted(avail), dtype=np.uint64)
        work[0] += 16 * len(arr) ** 2
        if work[0] > budget:
            raise BudgetExceeded(f"first_circuit(n={n}, size={size})", work[0], budget)
        outs = np.unique(_pair_outputs(arr, mask))
        if r == 1:
            ok = bool(np.any(accept(outs)))
        else:
            ok = can_finish(avail, r - 1) or any(
                can_finish(avail | {t}, r - 1) for t in outs.tolist() if t not in avail
            )
        memo[key] = ok
        return ok

    tables = list(base)
    gates: list[tuple[int, int, int]] = []

    def rec(depth):
        wires = len(tables)
        remaining = size - depth - 1
        for op in range(16):
            for left in range(wires):
                for right in range(wires):
                    t = table_op(op, tables[left], tables[right], mask)
                    if remaining == 0:
                        if accept(np.array([t], dtype=np.uint64))[0]:
                            return tuple(gates) + ((op, left, right),)
                        continue
                    if not can_finish(frozenset(tables) | {t}, remaining):
                        continue
                    gates.append((op, left, right))
                    tables.append(t)
                    found = rec(depth + 1)
                    tables.pop()
                    gates.pop()
                    if found:
                        return found
        return None

    found = rec(0)
    return Circuit(n, found) if found else None


# ---------------------------------------------------------------- samples, GCSP

@dataclass(frozen=True)
class SampleList:
    n: int
    samples: tuple[tuple[int, int], ...]

    def __post_init__(self):
        samples = tuple((int(y), int(b) & 1) for y, b in self.samples)
        object.__setattr__(self, "samples", samples)
        if not samples:
            raise StructuralError("a sample list needs at least one sample")
        ys = [y for y, _ in samples]
        if len(set(ys)) != len(ys):
            raise StructuralError("duplicate inputs in sample list")
        if any(not 0 <= y < (1 << self.n) for y in ys):
            raise StructuralError(f"sample input outside {self.n} bits")

    @property
    def mask(self) -> int:
        return sum(1 << y for y, _ in self.samples)

    @property
    def target(self) -> int:
        return sum(b << y for y, b in self.samples)

    def __len__(self):
        return len(self.samples)

    def consistent(self, tables: np.ndarray) -> np.ndarray:
        m, t = np.uint64(self.mask), np.uint64(self.target)
        return ((np.asarray(tables, dtype=np.uint64) ^ t) & m) == 0


def gcsp_decide(samples: SampleList, s: int, budget: int = DEFAULT_BUDGET) -> bool:
    """Is some circuit with <= s gates consistent with every sample?"""
    tables, _ = _realizable_array(samples.n, s, budget)
    return bool(np.any(samples.consistent(tables)))


def gcsp(samples: SampleList, s: int, budget: int = DEFAULT_BUDGET) -> Circuit | None:
    """Return the first consistent circuit of size <= s in canonical order, or None."""
    tables, sizes = _realizable_array(samples.n, s, budget)
    ok = samples.consistent(tables)
    if not np.any(ok):
        return None
    smin = int(sizes[ok].min())
    witness = first_circuit(samples.n, smin, samples.consistent, budget)
    assert witness is not None, "realizable table without a circuit"
    return witness


def minimum_size(samples: SampleList, s: int, budget: int = DEFAULT_BUDGET) -> int | None:
    tables, sizes = _realizable_array(samples.n, s, budget)
    ok = samples.consistent(tables)
    return int(sizes[ok].min()) if np.any(ok) else None


def max_agreement(H: TruthTable, s: int, budget: int = DEFAULT_BUDGET) -> int:
    """Largest number of inputs on which a circuit of size <= s agrees with H."""
    tables, _ = _realizable_array(H.n, s, budget)
    diff = tables ^ np.uint64(H.value)
    wrong = np.array([bin(int(d)).count("1") for d in diff])
    return H.size - int(wrong.min())


def is_hard(H: TruthTable, s: int, gamma: float, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff no circuit of size <= s agrees with H on >= gamma * 2^n inputs."""
    return max_agreement(H, s, budget) < gamma * H.size - 1e-12


def sample_hard_function(n: int, s: int, gamma: float, max_trials: int, seed: int,
                         budget: int = DEFAULT_BUDGET) -> TruthTable:
    rng = np.random.default_rng(seed)
    for _ in range(max_trials):
        bits = rng.integers(0, 2, size=1 << n)
        H = TruthTable.from_bits(bits.tolist())
        if is_hard(H, s, gamma, budget):
            return H
    raise NotFound(f"no ({gamma})-hard function for size {s} at n={n} in {max_trials} trials")


def random_circuit(n: int, s: int, rng: np.random.Generator) -> Circuit:
    """A circuit with exactly ``s`` gates, every gate and wire drawn uniformly."""
    if s == 0:
        return Circuit(n, (), int(rng.integers(0, n + 2)))
    gates = []
    for g in range(s):
        wires = n + 2 + g
        gates.append((int(rng.integers(16)), int(rng.integers(wires)), int(rng.integers(wires))))
    return Circuit(n, tuple(gates))


def distinct_by_table(circuits) -> list[Circuit]:
    """Keep the first circuit for each truth table, preserving order."""
    seen = set()
    out = []
    for c in circuits:
        t = c.table_value()
        if t not in seen:
            seen.add(t)
            out.append(c)
    return out


__all__ = [
    "AND", "OR", "XOR", "OP_NAMES", "OP_CODES", "DEFAULT_BUDGET",
    "BitFunction", "Circuit", "SampleList", "TruthTable",
    "bits_to_int", "int_to_bits", "count_circuits", "enumerate_circuits",
    "first_circuit", "gcsp", "gcsp_decide", "is_hard", "max_agreement",
    "minimum_size", "random_circuit", "realizable_tables", "sample_hard_function",
    "table_of", "eval_many", "distinct_by_table", "input_tables", "full_mask",
]
