"""Interactive witnessing, trace statistics and base-function reconstruction.

A witness family has ``width`` branches; branch ``j`` proposes one candidate
input per round while querying a circuit oracle D.  The protocol stops at the
first candidate where D and the hard function H disagree and otherwise hands
the branch a correction ``(D(x), H(x))``.

Against a Nisan-Wigderson row function ``x -> C(w|J_x)`` the sequence of
candidates is the trace of the seed ``w``.  A frequent trace lets one
predict C: place the unknown input u on the last row of the trace, answer
all other rows from a precomputed table of C values, and read the
prediction off H at the final candidate.
"""

from __future__ import annotations

import io
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .circuits import DEFAULT_BUDGET, TruthTable, eval_many, is_hard, realizable_tables
from .designs import DesignMatrix, assemble, complement, restrict
from .errors import (
    BranchExhausted, BudgetExceeded, FrequentTraceNotFound, IncompleteAdvice, ParameterError,
    ProtocolError, ProtocolViolation, StructuralError,
)
from .learning import NON_ADAPTIVE, BFKLPredictor, GCSPDistinguisher, Predictor, boost
from .stats import AdvantageReport, hoeffding_halfwidth, wilson_interval


def default_rounds(n: int) -> int:
    """Round cap ``ceil(log2 n)``, at least 1."""
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


# ---------------------------------------------------------------- protocol

class Session:
    """Mutable state of one protocol run: oracle queries, emitted candidates, corrections."""

    def __init__(self, D, n: int):
        self._D = D
        self.n = n
        self.queried: list[int] = []
        self._queried_set: set[int] = set()
        self.emitted: list[int] = []
        self.corrections: list[tuple[int, int, int]] = []

    @property
    def round(self) -> int:
        return len(self.emitted) + 1

    def query(self, x: int) -> int:
        x = int(x)
        if x not in self._queried_set:
            self._queried_set.add(x)
            self.queried.append(x)
        return int(self._D(x))

    def seen(self, x: int) -> bool:
        """Queried so far, or already proposed in an earlier round."""
        return x in self._queried_set or x in self.emitted


class CorrectionOracle:
    """Answers a candidate with the truthful pair ``(D(x), H(x))``."""

    def __init__(self, D, H):
        self.D = D
        self.H = H

    def answer(self, x: int) -> tuple[int, int]:
        return int(self.D(x)), int(self.H(x))


class WitnessFamily:
    width = 1
    rounds = 1

    def propose(self, j: int, session: Session) -> int:
        raise NotImplementedError


class ScriptedFamily(WitnessFamily):
    """Branch ``j`` runs ``scripts[j][t-1](session)`` in round ``t``."""

    def __init__(self, scripts, rounds: int | None = None):
        self.scripts = [list(s) for s in scripts]
        self.width = len(self.scripts)
        self.rounds = rounds or max(len(s) for s in self.scripts)

    def propose(self, j, session):
        steps = self.scripts[j]
        t = session.round
        if t > len(steps):
            raise BranchExhausted(f"branch {j} has no round {t}")
        return int(steps[t - 1](session))


def sequence_family(sequences, rounds: int | None = None) -> ScriptedFamily:
    """Branch ``j`` proposes ``sequences[j]`` in order, without looking at D."""
    return ScriptedFamily([[(lambda s, x=x: x) for x in seq] for seq in sequences], rounds)


def probe_family(first: int, probe: int, options: tuple[int, int]) -> ScriptedFamily:
    """Two rounds: propose ``first``; if corrected, query ``probe`` and propose ``options[D(probe)]``."""
    return ScriptedFamily([[lambda s: first, lambda s: options[s.query(probe)]]])


@dataclass
class Trace:
    rounds: tuple
    terminal: bool
    exhausted: bool = False
    queries: tuple = ()
    lines: list = field(default_factory=list, repr=False)

    def __len__(self):
        return len(self.rounds)


def run_protocol(F: WitnessFamily, j: int, D, Y: CorrectionOracle, H, rounds: int | None = None) -> Trace:
    """Run branch ``j`` until a true witness or the round cap."""
    if not 0 <= j < F.width:
        raise ParameterError(f"branch {j} outside 0..{F.width - 1}")
    t_max = rounds or F.rounds
    session = Session(D, H.n)
    lines = []
    terminal = exhausted = False
    for t in range(1, t_max + 1):
        try:
            x = F.propose(j, session)
        except BranchExhausted:
            exhausted = True
            break
        if not 0 <= x < (1 << H.n):
            raise ProtocolViolation(f"round {t}: candidate {x} outside {H.n} bits")
        if session.seen(x):
            raise ProtocolViolation(f"round {t}: candidate {x:x} was already queried")
        session.emitted.append(x)
        d, h = Y.answer(x)
        verdict = "witness" if d != h else "corrected"
        lines.append(f"round={t} x={x:x} D={d} H={h} verdict={verdict}")
        if d != h:
            terminal = True
            break
        session.corrections.append((x, d, h))
    return Trace(tuple(session.emitted), terminal, exhausted, tuple(session.queried), lines)


# ---------------------------------------------------------------- witnessing from learning

class BruteForceLearner:
    """Queries D everywhere except a seeded held-out set and returns the smallest consistent circuit.

    Among consistent truth tables of minimum size the numerically smallest
    one is returned, so the learner is deterministic given its seed.
    """

    def __init__(self, n: int, held_out: int, size_bound: int, seed: int = 0,
                 budget: int = DEFAULT_BUDGET):
        if not 0 <= held_out < (1 << n):
            raise ParameterError("held-out set must leave at least one query")
        self.n = n
        self.size_bound = size_bound
        rng = np.random.default_rng(seed)
        self.held_out = frozenset(int(x) for x in rng.choice(1 << n, held_out, replace=False))
        best = realizable_tables(n, size_bound, budget)
        self._tables = sorted(best, key=lambda t: (best[t], t))

    def learn(self, query) -> TruthTable:
        mask = target = 0
        for x in range(1 << self.n):
            if x not in self.held_out:
                mask |= 1 << x
                target |= query(x) << x
        for t in self._tables:
            if (t ^ target) & mask == 0:
                return TruthTable(self.n, t)
        # D is larger than the size bound; fall back to the queried values
        return TruthTable(self.n, target)


class LearnerWitnessFamily(WitnessFamily):
    """Single-round branches: branch j runs the learner on D and proposes the j-th
    unqueried input (in increasing order) where the hypothesis differs from H."""

    rounds = 1

    def __init__(self, learner, H, width: int | None = None):
        self.learner = learner
        self.H = H
        n = H.n
        self.width = width or max(1, (1 << n) // (2 * n))

    def candidates(self, session: Session) -> list[int]:
        h = self.learner.learn(session.query)
        return [x for x in range(1 << self.H.n)
                if not session.seen(x) and h(x) != self.H(x)]

    def propose(self, j, session):
        cands = self.candidates(session)
        if j >= len(cands):
            raise BranchExhausted(f"only {len(cands)} unqueried disagreements")
        return cands[j]


def witnesses_from_learning(learner, H, eps_prime: float, seed: int = 0, size_proxy: int = 1,
                            check_hardness: bool = True, budget: int = DEFAULT_BUDGET):
    """Witness family from a learner; H must be hard to ``(1 - 1/n)``-approximate."""
    n = H.n
    if not 0 <= eps_prime < 1:
        raise ParameterError("eps_prime must lie in [0, 1)")
    if check_hardness and not is_hard(H, size_proxy, 1 - 1 / n, budget):
        raise ParameterError(f"H is not hard for size {size_proxy} at agreement 1 - 1/n")
    return LearnerWitnessFamily(learner, H)


def lemma_success_bound(eps_prime: float, n: int) -> float:
    return 1 - 2 * eps_prime * n


def branch_success(F: WitnessFamily, Ds, H) -> np.ndarray:
    """Fraction of the circuits in ``Ds`` on which each branch finds a witness."""
    wins = np.zeros(F.width)
    for D in Ds:
        for j in range(F.width):
            wins[j] += run_protocol(F, j, D, CorrectionOracle(D, H), H).terminal
    return wins / len(Ds)


# ---------------------------------------------------------------- Nisan-Wigderson traces

@dataclass(frozen=True)
class NWInstance:
    """Base circuit C on ``set_size`` inputs, design with ``2^n`` rows, hard function H on n inputs."""

    C: object
    A: DesignMatrix
    H: object

    def __post_init__(self):
        if self.C.n != self.A.set_size:
            raise StructuralError("base circuit arity must equal the design's set size")
        if self.A.log_rows != self.H.n:
            raise StructuralError("the design needs one row per input of H")

    @property
    def n(self) -> int:
        return self.H.n

    def row_oracle(self, w: int):
        rows = self.A.rows
        C = self.C
        return lambda x: C(restrict(w, rows[x]))

    def trace(self, F: WitnessFamily, j: int, w: int, rounds: int | None = None) -> Trace:
        D = self.row_oracle(w)
        return run_protocol(F, j, D, CorrectionOracle(D, self.H), self.H, rounds)

    def random_seeds(self, rng: np.random.Generator, count: int) -> list[int]:
        nbytes = (self.A.universe + 7) // 8
        mask = (1 << self.A.universe) - 1
        return [int.from_bytes(rng.bytes(nbytes), "little") & mask for _ in range(count)]


@dataclass
class TraceMass:
    """Integer counts over a seed set; the four parts always sum to ``total``."""

    equal_good: int
    equal_bad: int
    extends: int
    other: int

    @property
    def total(self) -> int:
        return self.equal_good + self.equal_bad + self.extends + self.other


def trace_mass(traces, Tr) -> TraceMass:
    eg = eb = ext = other = 0
    k = len(Tr)
    for tr in traces:
        if tr.rounds == Tr:
            if tr.terminal:
                eg += 1
            else:
                eb += 1
        elif len(tr.rounds) > k and tr.rounds[:k] == Tr:
            ext += 1
        else:
            other += 1
    return TraceMass(eg, eb, ext, other)


def greedy_trace(traces, rounds: int, extend_fraction: float = 1 / 3) -> tuple:
    """Grow the most frequent prefix while the strictly extending mass is at least
    ``extend_fraction`` of the traces starting with the prefix."""
    prefix: tuple = ()
    seqs = [tr.rounds for tr in traces]
    while len(prefix) < rounds:
        k = len(prefix)
        nxt = Counter(s[k] for s in seqs if len(s) > k and s[:k] == prefix)
        if not nxt:
            break
        X = min(nxt, key=lambda x: (-nxt[x], x))
        prefix = prefix + (X,)
        start = sum(1 for s in seqs if s[:k + 1] == prefix)
        ext = sum(1 for s in seqs if len(s) > k + 1 and s[:k + 1] == prefix)
        if ext < extend_fraction * start:
            break
    return prefix


@dataclass
class FrequentTrace:
    branch: int
    trace: tuple
    a: int
    mass: TraceMass
    success_rate: float
    success_interval: tuple
    success_threshold: float
    distribution_ok: bool
    frequency: float
    frequency_interval: tuple
    a_productivity: float
    a_interval: tuple
    branch_rates: list


def find_frequent_trace(inst: NWInstance, F: WitnessFamily, samples: int, seed: int,
                        rounds: int | None = None, success_threshold: float | None = None,
                        min_frequency: float = 0.0, a_candidates: int = 8, u_samples: int = 256,
                        seeds: list[int] | None = None) -> FrequentTrace:
    """Sample seeds, pick the most successful branch, and extract a frequent trace
    and an off-row assignment ``a`` that reproduces it often.

    ``seeds`` replaces sampling with an explicit seed list (used for exact
    checks on a reduced seed space).
    """
    n = inst.n
    t_max = rounds or F.rounds
    thr = 1 - 3 / n**3 if success_threshold is None else success_threshold
    rng = np.random.default_rng(seed)
    ws = list(seeds) if seeds is not None else inst.random_seeds(rng, samples)
    all_traces = [[inst.trace(F, j, w, t_max) for w in ws] for j in range(F.width)]
    rates = [sum(tr.terminal for tr in trs) / len(ws) for trs in all_traces]
    j = int(np.argmax(rates))
    traces = all_traces[j]
    good = sum(tr.terminal for tr in traces)
    Tr = greedy_trace(traces, t_max)
    if not Tr:
        raise FrequentTraceNotFound("no branch produced any candidate")
    mass = trace_mass(traces, Tr)
    freq = mass.equal_good / len(ws)
    if mass.equal_good == 0 or freq < min_frequency:
        raise FrequentTraceNotFound(
            f"trace {Tr} ends in a witness for only {freq:.4f} of sampled seeds")
    X_t = Tr[-1]
    hits = [w for w, tr in zip(ws, traces) if tr.rounds == Tr and tr.terminal][:a_candidates]
    l = inst.A.set_size
    best = None
    for w in hits:
        a = complement(w, X_t, inst.A)
        us = rng.integers(0, 1 << l, size=u_samples) if seeds is None else range(1 << l)
        us = list(us)
        ok = 0
        for u in us:
            tr = inst.trace(F, j, assemble(X_t, int(u), a, inst.A), t_max)
            ok += tr.rounds == Tr and tr.terminal
        if best is None or ok > best[1]:
            best = (a, ok, len(us))
    a, ok, nu = best
    return FrequentTrace(j, Tr, a, mass, rates[j], wilson_interval(good, len(ws)), thr,
                         rates[j] >= thr, freq, wilson_interval(mass.equal_good, len(ws)),
                         ok / nu, wilson_interval(ok, nu), rates)


# ---------------------------------------------------------------- correction sets and reconstruction

class _Unanswerable(Exception):
    pass


@dataclass
class CorrectionSets:
    """C values on every row input reachable once the off-row bits are fixed to ``a``.

    ``tables[x]`` maps the packed input ``w|J_x`` to ``C(w|J_x)`` for all
    seeds ``w`` that carry ``a`` outside row ``X``.  H's full truth table
    travels along as advice.
    """

    X: int
    a: int
    tables: dict
    H: object
    queries: tuple

    def lookup(self, x: int, w: int, A: DesignMatrix) -> int:
        table = self.tables.get(x)
        if table is None:
            raise IncompleteAdvice(f"no correction table for row {x}")
        key = restrict(w, A.rows[x])
        if key not in table:
            raise IncompleteAdvice(f"row {x} input {key:x} missing from its table")
        return table[key]


def query_plan(A: DesignMatrix, X: int, a: int) -> dict[int, list[int]]:
    """Inputs to ask C for each row ``x != X``; depends only on the design, X and a."""
    base = assemble(X, 0, a, A)
    JX = set(A.row(X))
    plan = {}
    for x in range(A.num_rows):
        if x == X:
            continue
        J = A.rows[x]
        free = [k for k, pos in enumerate(J) if pos in JX]
        fixed = restrict(base, J)
        inputs = []
        for bits in range(1 << len(free)):
            v = fixed
            for t, k in enumerate(free):
                v |= ((bits >> t) & 1) << k
            inputs.append(v)
        plan[x] = inputs
    return plan


def query_phase(A: DesignMatrix, X: int, a: int, C, H, budget: int = DEFAULT_BUDGET) -> CorrectionSets:
    plan = query_plan(A, X, a)
    total = sum(len(v) for v in plan.values())
    if total > budget:
        raise BudgetExceeded("correction-set queries", total, budget)
    queries = []
    tables = {}
    for x, inputs in plan.items():
        tables[x] = {v: int(C(v)) for v in inputs}
        queries.extend(inputs)
    return CorrectionSets(X, a, tables, H, tuple(queries))


@dataclass(frozen=True)
class Guess:
    branch: int
    trace: tuple
    a: int
    maj: int


class ReconstructionPredictor(Predictor):
    """Predicts C(u) by replaying the guessed trace on the seed that carries u on the last row."""

    mode = NON_ADAPTIVE

    def __init__(self, F: WitnessFamily, inst_design: DesignMatrix, H, guess: Guess,
                 corrections: CorrectionSets, seed=None):
        super().__init__(inst_design.set_size, seed)
        if not guess.trace:
            raise ParameterError("the guessed trace is empty")
        if corrections.X != guess.trace[-1] or corrections.a != guess.a:
            raise StructuralError("correction sets were built for a different row or assignment")
        self.F = F
        self.A = inst_design
        self.H = H
        self.guess = guess
        self.corrections = corrections
        self.deviations = 0
        self.calls = 0
        for v in corrections.queries:
            self.log.append(("query", v, -1))

    def predict(self, u: int) -> int:
        self.calls += 1
        g = self.guess
        X_t = g.trace[-1]
        A = self.A
        w = assemble(X_t, u, g.a, A)
        corr = self.corrections

        def oracle(x):
            if x == X_t:
                raise _Unanswerable
            return corr.lookup(x, w, A)

        session = Session(oracle, self.H.n)
        try:
            for t, X in enumerate(g.trace, start=1):
                x = self.F.propose(g.branch, session)
                if x != X or session.seen(x):
                    raise _Unanswerable
                session.emitted.append(x)
                if t == len(g.trace):
                    return 1 - int(self.H(X))
                value = corr.lookup(x, w, A)
                h = int(self.H(x))
                if value != h:
                    raise _Unanswerable
                session.corrections.append((x, value, h))
        except (_Unanswerable, ProtocolError):
            pass
        self.deviations += 1
        return g.maj


def reconstruct_predictor(F: WitnessFamily, A: DesignMatrix, H, guess: Guess, C=None,
                          corrections: CorrectionSets | None = None, seed=None,
                          budget: int = DEFAULT_BUDGET) -> ReconstructionPredictor:
    """Predictor for the base circuit; C is only queried to fill the correction sets."""
    if corrections is None:
        if C is None:
            raise ParameterError("need the target oracle or prepared correction sets")
        corrections = query_phase(A, guess.trace[-1], guess.a, C, H, budget)
    return ReconstructionPredictor(F, A, H, guess, corrections, seed)


def random_guess(rng: np.random.Generator, F: WitnessFamily, A: DesignMatrix, rounds: int) -> Guess:
    """Uniform branch, trace length, distinct trace rows, off-row assignment and fallback bit."""
    t = int(rng.integers(1, rounds + 1))
    rows = tuple(int(x) for x in rng.choice(A.num_rows, size=min(t, A.num_rows), replace=False))
    free = A.universe - A.set_size
    nbytes = (free + 7) // 8
    a = int.from_bytes(rng.bytes(nbytes), "little") & ((1 << free) - 1) if free else 0
    return Guess(int(rng.integers(F.width)), rows, a, int(rng.integers(2)))


@dataclass
class ReconstructionRun:
    guesses: list
    agreements: list
    best: int
    predictor: ReconstructionPredictor
    test: AdvantageReport

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("guess,branch,trace,maj,agreement,ci_low,ci_high\n")
        for i, (g, (est, lo, hi)) in enumerate(zip(self.guesses, self.agreements)):
            tr = "-".join(f"{x:x}" for x in g.trace)
            buf.write(f"{i},{g.branch},{tr},{g.maj},{est:.6f},{lo:.6f},{hi:.6f}\n")
        return buf.getvalue()


def reconstruction_learner(F: WitnessFamily, inst: NWInstance, guesses: int, m_test: int,
                           test_points: int, seed: int, rounds: int | None = None,
                           extra_guesses=()) -> ReconstructionRun:
    """Draw guesses, build each predictor, keep the best on ``m_test`` queries,
    then measure it on ``test_points`` fresh uniform inputs."""
    rng = np.random.default_rng(seed)
    t_max = rounds or F.rounds
    gs = list(extra_guesses) + [random_guess(rng, F, inst.A, t_max) for _ in range(guesses)]
    preds = [reconstruct_predictor(F, inst.A, inst.H, g, inst.C) for g in gs]
    result = boost(preds, inst.C, m_test, seed + 1)
    agreements = []
    for a in result.agreements:
        lo, hi = wilson_interval(round(a * m_test), m_test)
        agreements.append((a, lo, hi))
    best = preds[result.index]
    test = measure(best, inst.C, test_points, seed + 2)
    return ReconstructionRun(gs, agreements, result.index, best, test)


def measure(P, f, samples: int, seed: int) -> AdvantageReport:
    """Agreement of P with f on uniform points, with a 95% Hoeffding half-width."""
    rng = np.random.default_rng(seed)
    xs = rng.integers(0, 1 << f.n, size=samples, dtype=np.uint64)
    agree = float((eval_many(P, xs) == eval_many(f, xs)).mean())
    return AdvantageReport(agree, "mc", samples, hoeffding_halfwidth(samples))


# ---------------------------------------------------------------- speedup

class ExactTableLearner:
    """Remembers every example; unseen points get the majority label (ties to 0)."""

    def __init__(self, n: int, t: int):
        self.n = n
        self.t = t

    def examples_needed(self, seed: int) -> int:
        return self.t

    def learn(self, examples, seed: int):
        seen = {int(y): int(b) for y, b in examples}
        ones = sum(seen.values())
        default = 1 if 2 * ones > len(seen) else 0
        return lambda x: seen.get(int(x), default)


class CoinLearner:
    """Ignores the examples and outputs a seeded random function."""

    def __init__(self, n: int, t: int = 0):
        self.n = n
        self.t = t

    def examples_needed(self, seed: int) -> int:
        return self.t

    def learn(self, examples, seed: int):
        bits = np.random.default_rng([seed, 3]).integers(0, 2, size=1 << self.n)
        return lambda x: int(bits[int(x)])


class _ListOracle:
    def __init__(self, examples):
        self.examples = list(examples)
        self.pos = 0

    def draw(self):
        if self.pos >= len(self.examples):
            raise ProtocolError("ran out of examples")
        self.pos += 1
        return self.examples[self.pos - 1]


class NaturalProofInnerLearner:
    """Hybrid predictor driven by the circuit-search distinguisher, fed with random examples."""

    def __init__(self, n: int, c: int, d: int, budget: int = DEFAULT_BUDGET):
        if d <= c + 1:
            raise ParameterError("need d > c + 1")
        self.n = n
        self.m = n**d
        self.D = GCSPDistinguisher(n, self.m, n**c, budget)
        self.t = self.m - 1

    def examples_needed(self, seed: int) -> int:
        # mirrors the hybrid index draw inside BFKLPredictor
        return int(np.random.default_rng(seed).integers(0, self.m))

    def learn(self, examples, seed: int):
        return BFKLPredictor(self.D, self.m, self.n, seed, _ListOracle(examples))


@dataclass
class SpeedupPlan:
    x: int
    row: int
    ys: tuple
    a: int
    learner_seed: int
    resamples: int


class SpeedupPredictor(Predictor):
    """Predictor on the base function's inputs built from bundled non-adaptive queries."""

    mode = NON_ADAPTIVE

    def __init__(self, L, A: DesignMatrix, n: int, f, plan: SpeedupPlan, tables: dict, seed=None):
        super().__init__(A.set_size, seed)
        self.L = L
        self.A = A
        self.learner_n = n
        self.f = f
        self.plan = plan
        self.tables = tables
        self.bundle = [v for r in sorted(tables) for v in sorted(tables[r])]
        for v in self.bundle:
            self.log.append(("query", v, tables_value(tables, v)))

    def _examples(self, w: int, direct: bool):
        b = self.A.log_rows
        out = []
        for y in self.plan.ys:
            r = y & ((1 << b) - 1)
            v = restrict(w, self.A.rows[r])
            out.append((y, int(self.f(v)) if direct else self.tables[r][v]))
        return out

    def _run(self, u: int, direct: bool) -> int:
        w = assemble(self.plan.row, u, self.plan.a, self.A)
        h = self.L.learn(self._examples(w, direct), self.plan.learner_seed)
        return int(h(self.plan.x))

    def predict(self, u: int) -> int:
        return self._run(u, False)

    def direct(self, u: int) -> int:
        """Same computation with every label queried from f on the spot."""
        return self._run(u, True)


def tables_value(tables: dict, v: int) -> int:
    for t in tables.values():
        if v in t:
            return t[v]
    return -1


def speedup_transform(L, A: DesignMatrix, n: int, f, seed: int, budget: int = DEFAULT_BUDGET,
                      max_resamples: int = 1000) -> SpeedupPredictor:
    """Turn a random-example learner for n-input row functions into a predictor for f.

    Rows of the design are addressed by the low ``b`` bits of an n-bit input.
    The challenge row must differ from every example row; the draw is
    repeated until it does.
    """
    b = A.log_rows
    if b > n:
        raise ParameterError(f"design addresses {b} bits but learner inputs have only {n}")
    if f.n != A.set_size:
        raise StructuralError(f"target has {f.n} inputs, design rows have {A.set_size}")
    rng = np.random.default_rng(seed)
    learner_seed = int(rng.integers(0, 2**31))
    t = L.examples_needed(learner_seed)
    if t * (1 << b) > budget:
        raise BudgetExceeded("query bundle", t * (1 << b), budget)
    low = (1 << b) - 1
    for tries in range(max_resamples):
        ys = tuple(int(y) for y in rng.integers(0, 1 << n, size=t))
        used = {y & low for y in ys}
        x = int(rng.integers(0, 1 << n))
        if (x & low) not in used:
            break
    else:
        raise ProtocolError(f"no collision-free challenge after {max_resamples} draws")
    row = x & low
    free = A.universe - A.set_size
    a = int.from_bytes(rng.bytes((free + 7) // 8), "little") & ((1 << free) - 1) if free else 0
    plan = SpeedupPlan(x, row, ys, a, learner_seed, tries)
    full = query_plan(A, row, a)
    tables = {r: {v: int(f(v)) for v in full[r]} for r in sorted(used)}
    size = sum(len(v) for v in tables.values())
    if size > t * (1 << b):
        raise StructuralError(f"query bundle of {size} exceeds t*2^b = {t * (1 << b)}")
    return SpeedupPredictor(L, A, n, f, plan, tables, seed)


def speedup_learner(L, A: DesignMatrix, n: int, f, repeats: int, m_test: int, seed: int):
    """Repeat the transform over derived seeds and keep the best predictor."""
    seeds = np.random.SeedSequence(seed).generate_state(repeats).tolist()
    preds = [speedup_transform(L, A, n, f, int(s)) for s in seeds]
    return boost(preds, f, m_test, seed + 1), preds


__all__ = [
    "BruteForceLearner", "CoinLearner", "CorrectionOracle", "CorrectionSets", "ExactTableLearner",
    "FrequentTrace", "Guess", "LearnerWitnessFamily", "NWInstance", "NaturalProofInnerLearner",
    "ReconstructionPredictor", "ReconstructionRun", "ScriptedFamily", "Session", "SpeedupPlan",
    "SpeedupPredictor", "Trace", "TraceMass", "WitnessFamily", "branch_success", "default_rounds",
    "find_frequent_trace", "greedy_trace", "lemma_success_bound", "measure", "probe_family",
    "query_phase", "query_plan", "random_guess", "reconstruct_predictor", "reconstruction_learner",
    "run_protocol", "sequence_family", "speedup_learner", "speedup_transform", "trace_mass",
    "witnesses_from_learning",
]
