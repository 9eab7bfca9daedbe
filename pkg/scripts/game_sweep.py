"""Sweep the dichotomy and the antichecker construction over seeds.

Writes one CSV row per seed with the branch taken, game value, multiset
size and certificate margin, plus antichecker value and achieved floor.
"""

import argparse
import csv
import sys

import numpy as np

from nwlearn.circuits import distinct_by_table, enumerate_circuits, random_circuit, sample_hard_function
from nwlearn.games import LEARNER, dichotomy, find_anticheckers


def family(seed, n, m, s, cols):
    rng = np.random.default_rng(seed)
    pool = distinct_by_table(c for size in (0, 1) for c in enumerate_circuits(n, size))
    rows = [pool[int(i)] for i in rng.choice(len(pool), size=int(rng.integers(3, len(pool) + 1)),
                                             replace=False)]
    ds = [random_circuit(m * (n + 1), int(rng.integers(1, s + 1)), rng) for _ in range(cols)]
    return rows, ds


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--cols", type=int, default=8)
    p.add_argument("--out", default="-")
    a = p.parse_args()

    fh = sys.stdout if a.out == "-" else open(a.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["seed", "branch", "value", "k", "k_bound", "margin", "anti_value", "anti_floor"])
    for seed in range(a.seeds):
        rows, cols = family(seed, 2, a.m, a.s, a.cols)
        res = dichotomy(1, a.s, a.m, rows, cols, seed)
        if res.branch == LEARNER:
            margin = float(res.certificate.min() - res.certificate_bound)
        else:
            margin = float(res.certificate_bound - res.certificate.max())
        H = sample_hard_function(4, 1, 0.75, 1000, seed)
        anti = find_anticheckers(H, 1, seed=seed)
        w.writerow([seed, res.branch, f"{res.value:.6f}", res.k, res.k_bound, f"{margin:.6f}",
                    f"{anti.value:.6f}", f"{anti.floor:.6f}"])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
