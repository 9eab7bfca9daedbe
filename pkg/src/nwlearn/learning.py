"""Predictors and learners built from distinguishers and circuit search.

The central piece is the hybrid-argument predictor: given a distinguisher D
for the sample generator G_C it guesses a hybrid index ``i``, fills blocks
before ``i`` with labelled random examples of C and blocks from ``i`` on with
random bits, and predicts ``C(x_i)`` from D's verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuits import (
    DEFAULT_BUDGET, BitFunction, Circuit, SampleList, TruthTable, _realizable_array,
    eval_many, realizable_tables,
)
from .errors import BudgetExceeded, ParameterError, PipelineError, ProtocolError, StructuralError
from .generators import MC_DEFAULT_SAMPLES, prob_generator, prob_uniform
from .stats import AdvantageReport, hoeffding_halfwidth, random_ints

RANDOM_EXAMPLES = "random-examples"
NON_ADAPTIVE = "non-adaptive-membership"
ADAPTIVE = "adaptive-membership"
UNDETERMINED = "undetermined"
NO_CIRCUIT = "no-circuit"


# ---------------------------------------------------------------- oracles

class ExampleOracle:
    """Hands out labelled uniform examples ``(x, f(x))``."""

    def __init__(self, f, rng: np.random.Generator, budget: int | None = None):
        self.f = f
        self.n = f.n
        self.rng = rng
        self.budget = budget
        self.log: list[tuple[int, int]] = []

    def draw(self) -> tuple[int, int]:
        if self.budget is not None and len(self.log) >= self.budget:
            raise ProtocolError(f"example budget of {self.budget} exhausted")
        x = int(self.rng.integers(0, 1 << self.n))
        y = int(self.f(x))
        self.log.append((x, y))
        return x, y


class MembershipOracle:
    """Answers queries ``x -> f(x)`` and records them."""

    def __init__(self, f, budget: int | None = None):
        self.f = f
        self.n = f.n
        self.budget = budget
        self.log: list[tuple[int, int]] = []

    def query(self, x: int) -> int:
        if self.budget is not None and len(self.log) >= self.budget:
            raise ProtocolError(f"query budget of {self.budget} exhausted")
        y = int(self.f(x))
        self.log.append((int(x), y))
        return y

    def query_all(self, xs) -> list[int]:
        """Ask a whole batch fixed in advance (non-adaptive use)."""
        return [self.query(x) for x in xs]


# ---------------------------------------------------------------- predictors

class Predictor:
    """A randomized procedure ``{0,1}^n -> {0,1}`` fixed by its seed and oracle answers."""

    mode = RANDOM_EXAMPLES

    def __init__(self, n: int, seed: int | None = None):
        self.n = n
        self.seed = seed
        self.log: list[tuple[str, int, int]] = []
        self.hypothesis = None

    def predict(self, x: int) -> int:
        raise NotImplementedError

    def __call__(self, x: int) -> int:
        return self.predict(int(x))

    def eval_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs)
        return np.fromiter((self.predict(int(x)) for x in xs.ravel()), dtype=np.uint8,
                           count=xs.size).reshape(xs.shape)

    def table(self) -> TruthTable:
        bits = self.eval_batch(np.arange(1 << self.n, dtype=np.uint64))
        return TruthTable(self.n, sum(1 << int(x) for x in np.flatnonzero(bits)))

    def transcript(self, challenges=()) -> list[str]:
        """Oracle interaction followed by predictions on ``challenges``."""
        lines = [f"mode={self.mode} seed={self.seed}"]
        for kind, x, b in self.log:
            lines.append(f"{kind} x={x:x} answer={b}")
        for x in challenges:
            lines.append(f"predict x={int(x):x} out={self.predict(int(x))}")
        return lines


class HypothesisPredictor(Predictor):
    """Wraps any function object as a predictor."""

    def __init__(self, h, seed=None, mode=RANDOM_EXAMPLES):
        super().__init__(h.n, seed)
        self.hypothesis = h
        self.mode = mode

    def predict(self, x):
        return int(self.hypothesis(x))

    def eval_batch(self, xs):
        return eval_many(self.hypothesis, np.asarray(xs, dtype=np.uint64))


class ConstantPredictor(Predictor):
    def __init__(self, n, bit, seed=None):
        super().__init__(n, seed)
        self.bit = int(bit)

    def predict(self, x):
        return self.bit

    def eval_batch(self, xs):
        return np.full(np.shape(xs), self.bit, dtype=np.uint8)


def accuracy(P, f, mode: str = "exact", samples: int = 10**4, seed: int = 0) -> AdvantageReport:
    """``Pr_x[P(x) = f(x)]`` by enumeration or by sampling."""
    n = f.n
    if mode == "exact":
        xs = np.arange(1 << n, dtype=np.uint64)
        agree = int((eval_many(P, xs) == eval_many(f, xs)).sum())
        return AdvantageReport(agree / (1 << n), "exact")
    rng = np.random.default_rng(seed)
    xs = random_ints(rng, n, samples)
    agree = int((eval_many(P, xs) == eval_many(f, xs)).sum())
    return AdvantageReport(agree / samples, "mc", samples, hoeffding_halfwidth(samples))


# ---------------------------------------------------------------- advantage and hybrids

def distinguishing_advantage(D, C, m: int, mode: str = "exact",
                             samples: int = MC_DEFAULT_SAMPLES, seed: int = 0,
                             budget: int = DEFAULT_BUDGET, workers: int = 1) -> AdvantageReport:
    """``Pr[D(z)=1] - Pr[D(G_C(x))=1]`` with uniform z and x."""
    bits = m * (C.n + 1)
    if D.n != bits:
        raise StructuralError(f"distinguisher has {D.n} inputs, G_C outputs have {bits}")
    if mode == "exact":
        if (1 << bits) + (1 << (m * C.n)) > budget:
            raise BudgetExceeded("distinguishing_advantage", (1 << bits) + (1 << (m * C.n)), budget)
        return AdvantageReport(prob_uniform(D, bits, budget=budget)
                               - prob_generator(D, C, m, budget=budget), "exact")
    if mode != "mc":
        raise ValueError(f"unknown mode {mode!r}")
    pu = prob_uniform(D, bits, "mc", samples, seed, workers=workers)
    pg = prob_generator(D, C, m, "mc", samples, seed + 1, workers=workers)
    return AdvantageReport(pu - pg, "mc", samples, 2 * hoeffding_halfwidth(samples, 0.025))


def _label_mask(n: int, i: int) -> int:
    """Label-bit positions of the first ``i`` blocks."""
    return sum(1 << (j * (n + 1) + n) for j in range(i))


def _relabel(C, m: int, z: np.ndarray, upto: int) -> np.ndarray:
    """Replace the labels of blocks ``0..upto-1`` of each ``z`` by C's values."""
    n = C.n
    z = np.asarray(z, dtype=np.uint64).copy()
    xmask = np.uint64((1 << n) - 1)
    for j in range(upto):
        xj = (z >> np.uint64(j * (n + 1))) & xmask
        label = eval_many(C, xj).astype(np.uint64)
        pos = np.uint64(j * (n + 1) + n)
        z = (z & ~(np.uint64(1) << pos)) | (label << pos)
    return z


def hybrid_probabilities(D, C, m: int, budget: int = DEFAULT_BUDGET) -> list[float]:
    """Exact ``Pr[p_i = 1]`` for hybrids ``i = 1..m+1``.

    Hybrid ``i`` labels the first ``i-1`` blocks with C and leaves the rest
    uniform, so hybrid 1 is uniform and hybrid ``m+1`` is G_C.
    """
    n = C.n
    bits = m * (n + 1)
    if D.n != bits:
        raise StructuralError(f"distinguisher has {D.n} inputs, expected {bits}")
    if (m + 1) << bits > budget:
        raise BudgetExceeded("hybrid_probabilities", (m + 1) << bits, budget)
    z = np.arange(1 << bits, dtype=np.uint64)
    return [int(eval_many(D, _relabel(C, m, z, i)).sum()) / (1 << bits) for i in range(m + 1)]


class BFKLPredictor(Predictor):
    """Hybrid-argument predictor for C built from a distinguisher D.

    Internal randomness: hybrid index ``i`` (0-based), bits ``r_i..r_{m-1}``
    and strings ``x_j`` for ``j > i``; the ``i`` blocks before the hybrid are
    labelled random examples drawn from the oracle.
    """

    mode = RANDOM_EXAMPLES

    def __init__(self, D, m: int, n: int, seed: int | None = None, oracle=None, internal=None):
        super().__init__(n, seed)
        if D.n != m * (n + 1):
            raise StructuralError(f"distinguisher has {D.n} inputs, expected {m * (n + 1)}")
        self.D = D
        self.m = m
        if internal is None:
            if oracle is None:
                raise ProtocolError("the predictor needs an example oracle")
            rng = np.random.default_rng(seed)
            i = int(rng.integers(0, m))
            r = [int(b) for b in rng.integers(0, 2, size=m - i)]
            examples = [oracle.draw() for _ in range(i)]
            later = [int(rng.integers(0, 1 << n)) for _ in range(m - i - 1)]
            for x, y in examples:
                self.log.append(("example", x, y))
        else:
            i, r, examples, later = internal
        self.i = i
        self.r = list(r)
        self.examples = list(examples)
        self.later = list(later)
        fixed = 0
        for j, (x, y) in enumerate(self.examples):
            fixed |= (x | (y << n)) << (j * (n + 1))
        fixed |= self.r[0] << (i * (n + 1) + n)
        for k, x in enumerate(self.later):
            j = i + 1 + k
            fixed |= (x | (self.r[k + 1] << n)) << (j * (n + 1))
        self._fixed = fixed
        self._shift = i * (n + 1)

    @classmethod
    def from_internal(cls, D, m, n, i, r, examples, later):
        return cls(D, m, n, internal=(i, r, examples, later))

    def predict(self, x: int) -> int:
        p = self.D(self._fixed | (x << self._shift))
        return self.r[0] ^ 1 if p else self.r[0]

    def eval_batch(self, xs):
        xs = np.asarray(xs, dtype=np.uint64)
        z = np.uint64(self._fixed) | (xs << np.uint64(self._shift))
        p = eval_many(self.D, z)
        return (p ^ np.uint8(self.r[0])).astype(np.uint8)


def bfkl_predictor(D, m: int, n: int, seed: int, target=None, oracle=None) -> BFKLPredictor:
    """Hybrid-argument predictor; examples come from ``oracle`` or from ``target``."""
    if oracle is None:
        if target is None:
            raise ProtocolError("need an example oracle or a target to draw examples from")
        oracle = ExampleOracle(target, np.random.default_rng([seed, 1]))
    return BFKLPredictor(D, m, n, seed, oracle)


@dataclass
class BFKLProfile:
    """Exact success probabilities over all internal randomness of the predictor."""

    m: int
    n: int
    weights: np.ndarray        # probability of each internal configuration
    accuracies: np.ndarray     # Pr_x[prediction = C(x)] for that configuration
    hybrid_index: np.ndarray   # i (0-based) of that configuration

    @property
    def mean_accuracy(self) -> float:
        return float(np.dot(self.weights, self.accuracies))

    def confidence(self, threshold: float) -> float:
        return float(self.weights[self.accuracies >= threshold - 1e-12].sum())

    @property
    def best(self) -> float:
        return float(self.accuracies.max())


def bfkl_exact_profile(D, C, m: int, budget: int = DEFAULT_BUDGET) -> BFKLProfile:
    """Enumerate every internal configuration of the hybrid predictor.

    Examples before the hybrid are uniform strings labelled by C, exactly as
    the example oracle would supply them.
    """
    n = C.n
    if D.n != m * (n + 1):
        raise StructuralError(f"distinguisher has {D.n} inputs, expected {m * (n + 1)}")
    ctab = eval_many(C, np.arange(1 << n, dtype=np.uint64))
    weights, accs, idx = [], [], []
    work = 0
    for i in range(m):
        free_bits = (m - 1) * n + (m - i)   # other strings, and r_i..r_{m-1}
        work += 1 << (free_bits + n)
        if work > budget:
            raise BudgetExceeded("bfkl_exact_profile", work, budget)
        cfg = np.arange(1 << free_bits, dtype=np.uint64)
        # unpack configuration: strings for blocks j != i, then the r bits
        z = np.zeros(cfg.shape, dtype=np.uint64)
        k = 0
        for j in range(m):
            if j == i:
                continue
            xj = (cfg >> np.uint64(k * n)) & np.uint64((1 << n) - 1)
            z |= xj << np.uint64(j * (n + 1))
            k += 1
        rbits = cfg >> np.uint64((m - 1) * n)
        for t, j in enumerate(range(i, m)):
            rb = (rbits >> np.uint64(t)) & np.uint64(1)
            z |= rb << np.uint64(j * (n + 1) + n)
        z = _relabel(C, m, z, i)
        r_i = ((rbits & np.uint64(1))).astype(np.uint8)
        correct = np.zeros(cfg.shape, dtype=np.int64)
        for x in range(1 << n):
            zx = z | np.uint64(x << (i * (n + 1)))
            pred = eval_many(D, zx) ^ r_i
            correct += pred == ctab[x]
        weights.append(np.full(cfg.shape, 1.0 / (m * (1 << free_bits))))
        accs.append(correct / (1 << n))
        idx.append(np.full(cfg.shape, i))
    return BFKLProfile(m, n, np.concatenate(weights), np.concatenate(accs), np.concatenate(idx))


def lemma_bounds(m: int, s: float) -> tuple[float, float]:
    """(confidence, accuracy) guaranteed when the distinguishing advantage is >= 1/s."""
    return 1.0 / (2 * m * m * s), 0.5 + 1.0 / (2 * m * s)


# ---------------------------------------------------------------- boosting

@dataclass
class BoostResult:
    index: int
    hypothesis: object
    agreement: float
    error: float
    gamma: float
    m_test: int
    agreements: list = field(default_factory=list)


def boost(candidates, target, m_test: int, seed: int, delta: float = 0.05) -> BoostResult:
    """Pick the candidate agreeing most with ``target`` on fresh uniform queries.

    Ties go to the earliest candidate.  ``gamma`` is the Hoeffding half-width
    for ``m_test`` queries at failure probability ``delta``.
    """
    candidates = list(candidates)
    if not candidates:
        raise ParameterError("boost needs at least one candidate")
    if m_test < 1:
        raise ParameterError("m_test must be >= 1")
    rng = np.random.default_rng(seed)
    xs = random_ints(rng, target.n, m_test)
    truth = eval_many(target, xs)
    agree = [float((eval_many(h, xs) == truth).mean()) for h in candidates]
    best = int(np.argmax(agree))
    return BoostResult(best, candidates[best], agree[best], 1.0 - agree[best],
                       hoeffding_halfwidth(m_test, delta), m_test, agree)


def boost_learner(factory, target, k: int, m_test: int, seed: int) -> BoostResult:
    """Run ``factory(seed_j)`` for ``k`` derived seeds and boost the outputs."""
    if k < 1:
        raise ParameterError("k must be >= 1")
    seeds = np.random.SeedSequence(seed).generate_state(k).tolist()
    return boost([factory(int(s)) for s in seeds], target, m_test, seed + 7919)


# ---------------------------------------------------------------- natural-proof learner

class GCSPDistinguisher(BitFunction):
    """``D(z) = 1`` iff the ``m`` samples encoded in z fit no circuit of size <= s.

    Conflicting labels on a repeated input make the samples unsatisfiable,
    so D accepts them.
    """

    def __init__(self, n: int, m: int, s: int, budget: int = DEFAULT_BUDGET):
        self.sample_n = n
        self.m = m
        self.s = s
        self.budget = budget
        self._tables, _ = _realizable_array(n, s, budget)
        self._cache: dict[int, int] = {}
        super().__init__(m * (n + 1), self._decide, f"GCSP[{s},{m}] rejects")

    def parse(self, z: int) -> SampleList | None:
        n = self.sample_n
        seen: dict[int, int] = {}
        for j in range(self.m):
            block = (z >> (j * (n + 1))) & ((1 << (n + 1)) - 1)
            y, b = block & ((1 << n) - 1), block >> n
            if seen.setdefault(y, b) != b:
                return None
        return SampleList(n, tuple(sorted(seen.items())))

    def _decide(self, z: int) -> int:
        hit = self._cache.get(z)
        if hit is not None:
            return hit
        samples = self.parse(z)
        out = 1 if samples is None else int(not np.any(samples.consistent(self._tables)))
        self._cache[z] = out
        return out


@dataclass
class NaturalProofLearner:
    """Distinguisher from exact circuit search, wrapped into a hybrid predictor."""

    c: int
    d: int
    n: int
    m: int
    size_bound: int
    distinguisher: GCSPDistinguisher
    uniform_acceptance: AdvantageReport
    threshold: float
    predictor: BFKLPredictor | None = None

    def predictor_for(self, target, seed: int) -> BFKLPredictor:
        return bfkl_predictor(self.distinguisher, self.m, self.n, seed, target=target)


def natural_proof_learner(c: int, d: int, target, seed: int, verify_samples: int = 10**4,
                          confidence: float = 0.99, budget: int = DEFAULT_BUDGET) -> NaturalProofLearner:
    """Learner for circuits of size ``n^c`` from an exact ``GCSP[n^c, n^d]`` decider.

    Checks ``Pr_uniform[D = 1] >= 1/2 - tol`` by sampling, with ``tol`` the
    Hoeffding half-width at the given confidence, then wraps the hybrid
    predictor around D for the target.
    """
    if d <= c + 1:
        raise ParameterError(f"need d > c + 1, got c={c}, d={d}")
    n = target.n
    m, size_bound = n**d, n**c
    if m * (n + 1) > 64:
        raise ParameterError(f"m(n+1) = {m * (n + 1)} bits exceeds the 64-bit sample encoding")
    if isinstance(target, Circuit) and target.size > size_bound:
        raise ParameterError(f"target has {target.size} gates, more than n^c = {size_bound}")
    D = GCSPDistinguisher(n, m, size_bound, budget)
    pu = prob_uniform(D, D.n, "mc", verify_samples, seed)
    tol = hoeffding_halfwidth(verify_samples, 1 - confidence)
    report = AdvantageReport(pu, "mc", verify_samples, tol)
    if pu < 0.5 - tol:
        raise PipelineError(f"GCSP distinguisher accepts only {pu:.4f} of uniform strings", pu)
    learner = NaturalProofLearner(c, d, n, m, size_bound, D, report, 0.5 - tol)
    learner.predictor = learner.predictor_for(target, seed)
    return learner


# ---------------------------------------------------------------- instance-specific prediction

def instance_predict(samples: SampleList, s: int, y: int, budget: int = DEFAULT_BUDGET):
    """Value at ``y`` forced by the minimum-size circuits consistent with the samples.

    Returns 0 or 1 if all minimum circuits agree at ``y``, ``UNDETERMINED`` if
    two of them disagree and ``NO_CIRCUIT`` if none has size <= s.
    """
    if any(y == yi for yi, _ in samples.samples):
        raise StructuralError(f"input {y} is already a sample")
    if not 0 <= y < (1 << samples.n):
        raise StructuralError(f"input {y} outside {samples.n} bits")
    best = realizable_tables(samples.n, s, budget)
    tables = np.array(sorted(best), dtype=np.uint64)
    ok = samples.consistent(tables)
    if not np.any(ok):
        return NO_CIRCUIT
    sizes = np.array([best[int(t)] for t in tables])
    smin = sizes[ok].min()
    minimal = tables[ok & (sizes == smin)]
    values = {int((int(t) >> y) & 1) for t in minimal}
    return values.pop() if len(values) == 1 else UNDETERMINED


def minimal_consistent_tables(samples: SampleList, s: int, budget: int = DEFAULT_BUDGET):
    best = realizable_tables(samples.n, s, budget)
    ok = [t for t in best if ((t ^ samples.target) & samples.mask) == 0]
    if not ok:
        return None, []
    smin = min(best[t] for t in ok)
    return smin, sorted(t for t in ok if best[t] == smin)


__all__ = [
    "ADAPTIVE", "NON_ADAPTIVE", "NO_CIRCUIT", "RANDOM_EXAMPLES", "UNDETERMINED",
    "BFKLPredictor", "BFKLProfile", "BoostResult", "ConstantPredictor", "ExampleOracle",
    "GCSPDistinguisher", "HypothesisPredictor", "MembershipOracle", "NaturalProofLearner",
    "Predictor", "accuracy", "bfkl_exact_profile", "bfkl_predictor", "boost", "boost_learner",
    "distinguishing_advantage", "hybrid_probabilities", "instance_predict", "lemma_bounds",
    "minimal_consistent_tables", "natural_proof_learner",
]
