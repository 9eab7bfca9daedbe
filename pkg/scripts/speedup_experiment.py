"""Speedup transform: boosted accuracy against the number of repeats per inner learner.

The baseline column is the accuracy of the best constant predictor, so rows
where accuracy equals baseline show no gain beyond the target's bias.
"""

import argparse
import csv
import sys

from nwlearn.circuits import Circuit
from nwlearn.designs import make_design
from nwlearn.witnessing import (
    CoinLearner, ExactTableLearner, NaturalProofInnerLearner, measure, speedup_learner,
)


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--repeats", type=int, nargs="+", default=[1, 4, 16, 32])
    p.add_argument("--test-points", type=int, default=10**4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    a = p.parse_args()

    # rows sharing a constant coefficient share seed position 0
    A = make_design(3, 3, 1)
    targets = {
        "or3": Circuit.build(3, [("OR", "x0", "x1"), ("OR", "g0", "x2")]),
        "dictator": Circuit.projection(3, 0),
        "xor01": Circuit.build(3, [("XOR", "x0", "x1")]),
    }
    learners = {
        "exact": ExactTableLearner(3, 3),
        "coin": CoinLearner(3),
        "natural": NaturalProofInnerLearner(3, 0, 2),
    }
    fh = sys.stdout if a.out == "-" else open(a.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["target", "learner", "repeats", "max_bundle", "accuracy", "halfwidth", "baseline"])
    for tname, f in targets.items():
        ones = sum(f(u) for u in range(1 << f.n)) / (1 << f.n)
        for name, L in learners.items():
            for r in a.repeats:
                res, preds = speedup_learner(L, A, 3, f, r, 300, a.seed)
                test = measure(res.hypothesis, f, a.test_points, a.seed + 1)
                w.writerow([tname, name, r, max(len(P.bundle) for P in preds), f"{test.estimate:.4f}",
                            f"{test.half_width:.4f}", f"{max(ones, 1 - ones):.4f}"])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
