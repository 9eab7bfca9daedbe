import pytest

from nwlearn.circuits import BitFunction, Circuit, bits_to_int, int_to_bits
from nwlearn.designs import make_design, restrict
from nwlearn.errors import BudgetExceeded, StructuralError
from nwlearn.generators import (
    NWGenerator, SampleGenerator, SuccinctPRF, g_c_output, nw_row, nw_row_function,
    prf_distinguishing_gap, prob_generator, prob_prf, prob_uniform,
)

AND2 = Circuit.build(2, [("AND", "x0", "x1")])


def test_sample_generator_layout():
    G = SampleGenerator(AND2, 2)
    seed = bits_to_int("01" + "11")
    assert int_to_bits(g_c_output(G, seed), 6) == "010" + "111"


def test_sample_generator_rejects_long_seed():
    with pytest.raises(StructuralError):
        g_c_output(SampleGenerator(AND2, 1), 4)


def test_nw_rows():
    A = make_design(3, 3, 1)
    C = Circuit.build(3, [("XOR", "x0", "x1"), ("XOR", "g0", "x2")])
    gen = NWGenerator(C, A)
    w = 0b101100111
    T = nw_row_function(gen, w)
    for x in range(8):
        expect = bin(restrict(w, A.rows[x])).count("1") & 1
        assert T(x) == expect == nw_row(gen, w, x)


def test_nw_arity_checked():
    with pytest.raises(StructuralError):
        NWGenerator(AND2, make_design(3, 3, 1))


def test_exact_probabilities():
    D = BitFunction(2, lambda z: (z & 1) ^ (z >> 1))
    C = Circuit.projection(1, 0)
    assert prob_uniform(D, 2) == 0.5
    assert prob_generator(D, C, 1) == 0.0


def test_mc_close_to_exact_and_deterministic():
    D = BitFunction(6, lambda z: (z >> 2) & 1)
    exact = prob_generator(D, AND2, 2)
    mc = prob_generator(D, AND2, 2, "mc", 20000, seed=3)
    assert abs(mc - exact) < 0.02
    assert mc == prob_generator(D, AND2, 2, "mc", 20000, seed=3, workers=3)


def test_budget():
    D = BitFunction(20, lambda z: 0)
    with pytest.raises(BudgetExceeded):
        prob_uniform(D, 20, budget=1000)


def test_prf_multiplicity_weighting():
    OR2 = Circuit.build(2, [("OR", "x0", "x1")])
    D = BitFunction(3, lambda z: z >> 2)
    S = SuccinctPRF((AND2, AND2, OR2), 1)
    assert prob_prf(S, D) == pytest.approx((0.25 + 0.25 + 0.75) / 3)
    gap = prf_distinguishing_gap(S, D)
    assert gap.mode == "exact" and gap.estimate == pytest.approx(0.5 - 1.25 / 3)
    mc = prf_distinguishing_gap(S, D, "mc", 20000, seed=1)
    assert abs(mc.estimate - gap.estimate) <= mc.half_width


def test_prf_requires_common_arity():
    with pytest.raises(StructuralError):
        SuccinctPRF((AND2, Circuit.projection(3, 0)), 1)
    with pytest.raises(StructuralError):
        SuccinctPRF((), 1)
