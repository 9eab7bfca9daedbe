import numpy as np
import pytest

from nwlearn.circuits import BitFunction, Circuit, TruthTable, random_circuit, sample_hard_function
from nwlearn.designs import assemble, make_design
from nwlearn.errors import (
    BudgetExceeded, FrequentTraceNotFound, IncompleteAdvice, ParameterError, ProtocolError,
    ProtocolViolation, StructuralError,
)
from nwlearn.witnessing import (
    BruteForceLearner, CoinLearner, CorrectionOracle, ExactTableLearner, Guess, NWInstance,
    NaturalProofInnerLearner, ScriptedFamily, Trace, branch_success, default_rounds,
    find_frequent_trace, greedy_trace, lemma_success_bound, measure, probe_family, query_phase,
    query_plan, reconstruct_predictor, reconstruction_learner, run_protocol, sequence_family,
    speedup_learner, speedup_transform, trace_mass, witnesses_from_learning,
)

XOR2 = TruthTable.from_bits("0110")
AND2 = TruthTable.from_bits("0001")


def table3(bits):
    return TruthTable.from_bits(bits)


# ---------------------------------------------------------------- protocol

def test_default_rounds():
    assert [default_rounds(n) for n in (1, 2, 3, 4, 5, 8, 9)] == [1, 1, 2, 2, 3, 3, 4]


def test_single_round_witness():
    F = sequence_family([[1]])
    tr = run_protocol(F, 0, AND2, CorrectionOracle(AND2, XOR2), XOR2)
    assert tr.terminal and tr.rounds == (1,)
    assert tr.lines == ["round=1 x=1 D=0 H=1 verdict=witness"]


def test_adaptive_two_round_trace():
    H = table3("01101001")             # parity of 3 bits
    D1 = table3("00101001")            # agrees with H except at x=1
    D2 = table3("01101000")            # agrees with H except at x=7
    F = probe_family(0, 5, (1, 7))     # D(5)=0 for both, so round 2 proposes x=1
    tr = run_protocol(F, 0, D1, CorrectionOracle(D1, H), H)
    assert tr.rounds == (0, 1) and tr.terminal and tr.queries == (5,)
    assert tr.lines[0].endswith("verdict=corrected")
    tr2 = run_protocol(F, 0, D2, CorrectionOracle(D2, H), H)
    assert tr2.rounds == (0, 1) and not tr2.terminal and not tr2.exhausted
    # probing a point where D is 1 flips the second candidate
    G = probe_family(0, 2, (1, 7))
    assert run_protocol(G, 0, D2, CorrectionOracle(D2, H), H).rounds == (0, 7)


def test_repeat_candidate_is_violation():
    H = table3("01101001")
    F = ScriptedFamily([[lambda s: (s.query(3), 3)[1]]])
    with pytest.raises(ProtocolViolation):
        run_protocol(F, 0, H, CorrectionOracle(H, H), H)
    G = sequence_family([[2, 2]])
    with pytest.raises(ProtocolViolation):
        run_protocol(G, 0, H, CorrectionOracle(H, H), H)
    with pytest.raises(ProtocolViolation):
        run_protocol(sequence_family([[9]]), 0, H, CorrectionOracle(H, H), H)


def test_exhausted_branch_is_non_terminal():
    H = table3("01101001")
    tr = run_protocol(sequence_family([[1]], rounds=3), 0, H, CorrectionOracle(H, H), H)
    assert tr.exhausted and not tr.terminal and tr.rounds == (1,)
    with pytest.raises(ParameterError):
        run_protocol(sequence_family([[1]]), 1, H, CorrectionOracle(H, H), H)


# ---------------------------------------------------------------- witnessing from learning

H4 = sample_hard_function(4, 1, 0.75, 1000, 0)


def test_exact_learner_finds_witness_on_first_branch():
    L = BruteForceLearner(4, held_out=8, size_bound=2, seed=1)
    F = witnesses_from_learning(L, H4, 0.0)
    assert F.width == 2
    rng = np.random.default_rng(0)
    checked = 0
    for _ in range(40):
        D = random_circuit(4, int(rng.integers(1, 3)), rng)
        h = L.learn(D)
        if any(h(x) != D(x) for x in range(16)):
            continue
        session_cands = [x for x in sorted(L.held_out) if D(x) != H4(x)]
        tr = run_protocol(F, 0, D, CorrectionOracle(D, H4), H4)
        assert tr.terminal == bool(session_cands)
        checked += 1
    assert checked >= 20


def test_no_witness_when_d_equals_h():
    L = BruteForceLearner(4, held_out=8, size_bound=2, seed=1)
    F = witnesses_from_learning(L, H4, 0.0)
    assert np.all(branch_success(F, [H4], H4) == 0)


def test_hardness_is_checked():
    L = BruteForceLearner(2, held_out=1, size_bound=1)
    with pytest.raises(ParameterError):
        witnesses_from_learning(L, AND2, 0.0)
    with pytest.raises(ParameterError):
        witnesses_from_learning(L, XOR2, 1.0, check_hardness=False)
    assert lemma_success_bound(0.1, 3) == pytest.approx(0.4)


# ---------------------------------------------------------------- traces

def fake(rounds, terminal):
    return Trace(tuple(rounds), terminal)


def test_trace_mass_partition():
    traces = [fake([1], True), fake([1], False), fake([1, 2], True), fake([3], True), fake([1, 4], False)]
    m = trace_mass(traces, (1,))
    assert (m.equal_good, m.equal_bad, m.extends, m.other) == (1, 1, 2, 1)
    assert m.total == len(traces)


def test_greedy_stops_when_extension_is_rare():
    traces = [fake([1], True)] * 7 + [fake([1, 2], True)] * 2 + [fake([3], True)]
    assert greedy_trace(traces, 3) == (1,)
    traces = [fake([1], True)] * 2 + [fake([1, 2], True)] * 5 + [fake([1, 5], True)]
    assert greedy_trace(traces, 3) == (1, 2)
    assert greedy_trace(traces, 1) == (1,)
    # ties go to the smaller candidate
    assert greedy_trace([fake([4], True), fake([2], True)], 2) == (2,)


def criterion_instance():
    A = make_design(3, 9, 1)
    H = sample_hard_function(3, 1, 0.75, 1000, 0)
    C = BitFunction(9, lambda z: int(z & 0b1111 != 0), "or4")
    return NWInstance(C, A, H)


def zero_of(H):
    return min(x for x in range(1 << H.n) if H(x) == 0)


def test_reduced_seed_space_exact_versus_sampled():
    inst = criterion_instance()
    X = zero_of(inst.H)
    F = sequence_family([[X], [X + 1]])
    rng = np.random.default_rng(4)
    base = inst.random_seeds(rng, 1)[0]
    positions = list(inst.A.row(X))[:6] + list(inst.A.row(X + 1))[:4]
    base &= ~sum(1 << p for p in positions)
    space = [base | sum(((v >> i) & 1) << p for i, p in enumerate(positions)) for v in range(1 << 10)]
    exact = find_frequent_trace(inst, F, 0, 0, seeds=space, success_threshold=0.5)
    picks = rng.choice(len(space), size=4000)
    sampled = find_frequent_trace(inst, F, 0, 0, seeds=[space[i] for i in picks], success_threshold=0.5)
    assert exact.trace == sampled.trace
    assert exact.mass.total == len(space)
    lo, hi = sampled.frequency_interval
    assert lo - 0.01 <= exact.frequency <= hi + 0.01


def test_frequent_trace_not_found():
    inst = criterion_instance()
    H = inst.H
    ones = [x for x in range(8) if H(x) == 1]
    # proposing only where H=1 against the OR of four seed bits almost never yields a witness
    F = sequence_family([[ones[0]]])
    with pytest.raises(FrequentTraceNotFound):
        find_frequent_trace(inst, F, 200, 0, min_frequency=0.5)


# ---------------------------------------------------------------- reconstruction

def brute_good_inputs(inst, F, guess):
    """Inputs u whose seed reproduces the guessed trace and ends in a witness."""
    good = []
    for u in range(1 << inst.A.set_size):
        w = assemble(guess.trace[-1], u, guess.a, inst.A)
        tr = inst.trace(F, guess.branch, w, len(guess.trace))
        if tr.rounds == guess.trace and tr.terminal:
            good.append(u)
    return good


def test_reconstruction_correct_on_good_inputs():
    inst = criterion_instance()
    X = zero_of(inst.H)
    F = sequence_family([[X], [X + 1]])
    ft = find_frequent_trace(inst, F, 2000, 0)
    assert ft.trace == (X,) and ft.distribution_ok is (ft.success_rate >= ft.success_threshold)
    g = Guess(ft.branch, ft.trace, ft.a, 0)
    P = reconstruct_predictor(F, inst.A, inst.H, g, inst.C)
    good = brute_good_inputs(inst, F, g)
    assert len(good) > 400
    assert all(P(u) == inst.C(u) for u in good)


def test_wrong_branch_averages_to_half():
    inst = criterion_instance()
    X = zero_of(inst.H)
    F = sequence_family([[X], [X + 1]])
    accs = []
    for maj in (0, 1):
        P = reconstruct_predictor(F, inst.A, inst.H, Guess(0, (X + 1,), 0, maj), inst.C)
        accs.append(np.mean([P(u) == inst.C(u) for u in range(512)]))
    # the guessed trace never replays, so the fallback bit decides and the coin averages it out
    assert np.mean(accs) == pytest.approx(0.5)


def test_query_plan_is_non_adaptive():
    inst = criterion_instance()
    X, a = 1, 12345
    plan = query_plan(inst.A, X, a)
    other = BitFunction(9, lambda z: z & 1)
    q1 = query_phase(inst.A, X, a, inst.C, inst.H).queries
    q2 = query_phase(inst.A, X, a, other, inst.H).queries
    assert q1 == q2 == tuple(v for x in sorted(plan) for v in plan[x])
    with pytest.raises(BudgetExceeded):
        query_phase(inst.A, X, a, inst.C, inst.H, budget=3)


def test_overlapping_design_reconstruction():
    A = make_design(2, 3, 1)
    assert A.max_intersection() == 1
    C = Circuit.build(3, [("XOR", "x0", "x1"), ("AND", "g0", "x2")])
    for H in (XOR2, TruthTable.from_bits("1001")):
        inst = NWInstance(C, A, H)
        seqs = [[0, 1], [2, 3], [1, 3]]
        F = sequence_family(seqs, rounds=2)
        checked = 0
        for a in range(0, 64, 5):
            assert all(len(v) <= 2 for v in query_plan(A, 3, a).values())
            for j, seq in enumerate(seqs):
                for t in (1, 2):
                    g = Guess(j, tuple(seq[:t]), a, 1)
                    P = reconstruct_predictor(F, A, H, g, C)
                    for u in brute_good_inputs(inst, F, g):
                        assert P(u) == C(u)
                        checked += 1
        assert checked > 50


def test_incomplete_advice():
    inst = criterion_instance()
    cs = query_phase(inst.A, 1, 0, inst.C, inst.H)
    with pytest.raises(IncompleteAdvice):
        cs.lookup(1, 0, inst.A)
    with pytest.raises(StructuralError):
        reconstruct_predictor(sequence_family([[2]]), inst.A, inst.H, Guess(0, (2,), 0, 0),
                              corrections=cs)


def test_reconstruction_learner_includes_correct_guess():
    inst = criterion_instance()
    X = zero_of(inst.H)
    F = sequence_family([[X], [X + 1]])
    ft = find_frequent_trace(inst, F, 1000, 0)
    run = reconstruction_learner(F, inst, 6, 400, 2000, 0,
                                 extra_guesses=[Guess(ft.branch, ft.trace, ft.a, 0)])
    assert run.test.estimate >= 0.8
    assert run.to_csv().startswith("guess,branch,trace")


# ---------------------------------------------------------------- speedup

def test_speedup_exact_learner_matches_direct():
    A = make_design(3, 3, 1)
    f = TruthTable.from_function(3, lambda z: ((z & 1) ^ ((z >> 1) & 1)) & (z >> 2))
    L = ExactTableLearner(3, 3)
    for seed in range(10):
        P = speedup_transform(L, A, 3, f, seed)
        assert len(P.bundle) <= 3 * 8
        assert all(P(u) == P.direct(u) for u in range(8))
        assert P.plan.row not in {y & 7 for y in P.plan.ys}


def test_speedup_coin_learner_is_near_half():
    A = make_design(3, 9, 1)
    f = BitFunction(9, lambda z: bin(z).count("1") & 1)
    res, preds = speedup_learner(CoinLearner(3), A, 3, f, 4, 200, 0)
    acc = [measure(P, f, 2000, 1).estimate for P in preds]
    assert abs(np.mean(acc) - 0.5) < 0.1


def test_speedup_natural_inner_learner():
    A = make_design(3, 9, 1)
    f = BitFunction(9, lambda z: int(z & 0b111 != 0), "or3")
    L = NaturalProofInnerLearner(3, 0, 2)
    res, preds = speedup_learner(L, A, 3, f, 12, 300, 0)
    assert measure(preds[res.index], f, 2000, 5).estimate >= 0.75


def test_speedup_errors():
    A = make_design(3, 3, 1)
    f = TruthTable(3, 0b10010110)
    with pytest.raises(ParameterError):
        speedup_transform(ExactTableLearner(2, 1), A, 2, f, 0)
    with pytest.raises(StructuralError):
        speedup_transform(ExactTableLearner(3, 1), A, 3, XOR2, 0)
    with pytest.raises(BudgetExceeded):
        speedup_transform(ExactTableLearner(3, 10), A, 3, f, 0, budget=20)
    with pytest.raises(ProtocolError):
        speedup_transform(ExactTableLearner(3, 60), A, 3, f, 0, max_resamples=5)
