import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nwlearn.circuits import (
    AND, OR, XOR, BitFunction, Circuit, SampleList, TruthTable, bits_to_int, count_circuits,
    distinct_by_table, enumerate_circuits, eval_many, gcsp, gcsp_decide, int_to_bits, is_hard,
    max_agreement, minimum_size, random_circuit, realizable_tables, sample_hard_function, table_of,
)
from nwlearn.errors import BudgetExceeded, NotFound, ParameterError, StructuralError


def reference_gate(op, a, b):
    # truth table of op read as the 4-bit column (a,b) = 00, 01, 10, 11
    return (op >> (2 * a + b)) & 1


def reference_eval(circ, x):
    vals = [0, 1] + [(x >> i) & 1 for i in range(circ.n)]
    for op, l, r in circ.gates:
        vals.append(reference_gate(op, vals[l], vals[r]))
    return vals[circ.out]


def test_named_gate_codes():
    for op, fn in ((AND, lambda a, b: a & b), (OR, lambda a, b: a | b), (XOR, lambda a, b: a ^ b)):
        assert [reference_gate(op, a, b) for a in (0, 1) for b in (0, 1)] == \
            [fn(a, b) for a in (0, 1) for b in (0, 1)]


def test_bits_round_trip_lsb_first():
    assert bits_to_int("0110") == 6
    assert int_to_bits(6, 4) == "0110"


def test_truth_table_from_function_and_call():
    T = TruthTable.from_function(3, lambda x: x & 1)
    assert [T(x) for x in range(8)] == [0, 1] * 4
    assert (~T)(0) == 1
    assert T.ones() == 4


def test_truth_table_text_round_trip():
    T = TruthTable.from_bits("0110")
    assert TruthTable.from_text(T.to_text()) == T


def test_circuit_build_and_text_round_trip():
    C = Circuit.build(2, [("AND", "x0", "x1"), ("XOR", "g0", "x0")])
    assert [C(x) for x in range(4)] == [0, 1, 0, 0]
    assert Circuit.from_text(C.to_text()) == C


def test_circuit_rejects_forward_reference():
    with pytest.raises(StructuralError):
        Circuit(2, ((AND, 2, 5),))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 5), st.integers(0, 2**32 - 1))
def test_eval_matches_reference(n, s, seed):
    C = random_circuit(n, s, np.random.default_rng(seed))
    xs = np.arange(1 << n, dtype=np.uint64)
    batch = eval_many(C, xs)
    assert [int(b) for b in batch] == [reference_eval(C, x) for x in range(1 << n)]
    assert table_of(C) == sum(reference_eval(C, x) << x for x in range(1 << n))


def test_size_zero_enumeration_order():
    names = [c.to_text().splitlines()[-1] for c in enumerate_circuits(1, 0)]
    assert names == ["out = c0", "out = c1", "out = x0"]


def test_count_matches_enumeration():
    for n, s in ((1, 1), (2, 1)):
        assert sum(1 for _ in enumerate_circuits(n, s)) == count_circuits(n, s)
    assert count_circuits(2, 1) == 4 + 256


def test_enumeration_budget_checked_up_front():
    with pytest.raises(BudgetExceeded):
        next(enumerate_circuits(3, 3, budget=1000))


def test_enumeration_is_canonically_ordered():
    keys = [(c.size, c.gates) for c in enumerate_circuits(2, 1)][4:]
    assert keys == sorted(keys)


# frozen counts of distinct truth tables computable with <= s gates
@pytest.mark.parametrize("n,s,count", [(2, 0, 4), (2, 1, 16), (2, 2, 16), (3, 2, 152),
                                       (3, 3, 232), (4, 1, 70), (4, 2, 526), (4, 3, 3000)])
def test_realizable_counts(n, s, count):
    assert len(realizable_tables(n, s)) == count


def test_realizable_agrees_with_enumeration():
    for n, s in ((2, 1), (3, 1), (2, 2)):
        brute = {}
        for c in enumerate_circuits(n, s):
            brute.setdefault(table_of(c), c.size)
        assert realizable_tables(n, s) == brute


def test_gcsp_and_witness():
    S = SampleList(2, ((0, 0), (1, 0), (2, 0), (3, 1)))
    C = gcsp(S, 1)
    assert C.to_text().splitlines()[1] == "g0 = AND(x0, x1)"


def test_gcsp_majority_needs_four_gates():
    maj = SampleList(3, tuple((x, int(bin(x).count("1") >= 2)) for x in range(8)))
    assert gcsp(maj, 3) is None
    assert minimum_size(maj, 4) == 4


def test_gcsp_parity_witness_is_consistent():
    par = SampleList(4, tuple((x, bin(x).count("1") & 1) for x in range(16)))
    C = gcsp(par, 3)
    assert C is not None and C.size == 3
    assert all(C(x) == b for x, b in par.samples)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**16 - 1), st.integers(1, 16), st.integers(0, 3))
def test_gcsp_decide_matches_enumeration(table, k, s):
    n = 3
    rng = np.random.default_rng(table)
    ys = rng.choice(8, size=min(k, 8), replace=False)
    S = SampleList(n, tuple((int(y), (table >> int(y)) & 1) for y in ys))
    want = any(all(t >> y & 1 == b for y, b in S.samples) for t in realizable_tables(n, s))
    assert gcsp_decide(S, s) == want
    C = gcsp(S, s)
    assert (C is not None) == want
    if C is not None:
        assert all(C(y) == b for y, b in S.samples)


def test_sample_list_rejects_duplicates():
    with pytest.raises(StructuralError):
        SampleList(2, ((1, 0), (1, 1)))


def test_hardness():
    xor = TruthTable.from_bits("0110")
    assert max_agreement(xor, 0) == 2
    assert is_hard(xor, 0, 0.75)
    assert not is_hard(xor, 1, 0.75)
    H = sample_hard_function(4, 1, 0.75, 1000, 0)
    assert is_hard(H, 1, 0.75)
    with pytest.raises(NotFound):
        sample_hard_function(2, 1, 0.5, 5, 0)


def test_bit_function_and_distinct():
    f = BitFunction(2, lambda x: x >> 1)
    assert list(eval_many(f, np.arange(4))) == [0, 0, 1, 1]
    circs = list(enumerate_circuits(2, 1))
    assert len(distinct_by_table(circs)) == 16


def test_enumeration_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        list(enumerate_circuits(0, 1))


def test_truth_table_exhaustive_small():
    for bits in itertools.product((0, 1), repeat=4):
        T = TruthTable.from_bits(list(bits))
        assert [T(x) for x in range(4)] == list(bits)
