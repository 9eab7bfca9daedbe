import math

import numpy as np
import pytest

from nwlearn.stats import (
    CHUNK, AdvantageReport, chunk_seeds, hoeffding_failure, hoeffding_halfwidth, mc_count,
    random_ints, wilson_interval,
)


def test_hoeffding_inverse_pair():
    g = hoeffding_halfwidth(500, 0.05)
    assert hoeffding_failure(500, g) == pytest.approx(0.05)
    assert hoeffding_halfwidth(10**4, 0.01) == pytest.approx(math.sqrt(math.log(200) / 2e4))


def test_wilson_contains_estimate():
    lo, hi = wilson_interval(30, 100)
    assert lo < 0.3 < hi
    assert wilson_interval(0, 10)[0] == 0.0


def test_exact_report_has_no_width():
    with pytest.raises(ValueError):
        AdvantageReport(0.5, "exact", half_width=0.1)
    r = AdvantageReport(0.5, "mc", 100, 0.1)
    assert (r.lower, r.upper) == (0.4, 0.6)


def test_chunks_cover_total():
    jobs = chunk_seeds(3, 2 * CHUNK + 5)
    assert [s for _, s in jobs] == [CHUNK, CHUNK, 5]


def test_mc_count_independent_of_workers():
    count = lambda rng, k: int(rng.integers(0, 2, size=k).sum())
    assert mc_count(count, 50000, 7, 1) == mc_count(count, 50000, 7, 4)


def test_random_ints_ranges():
    rng = np.random.default_rng(0)
    xs = random_ints(rng, 5, 1000)
    assert xs.max() < 32 and xs.dtype == np.uint64
    assert random_ints(rng, 0, 3).tolist() == [0, 0, 0]
    assert len(set(random_ints(rng, 64, 100).tolist())) == 100
