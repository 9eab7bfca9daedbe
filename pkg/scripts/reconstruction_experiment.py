"""Reconstruction accuracy as a function of the number of sampled seeds.

For each sample count the frequent trace is re-extracted and the predictor
built from it (with the fallback bit chosen by a boosting pass) is measured
on fresh inputs.  A decoy trace gives the control row.
"""

import argparse
import csv
import sys

from nwlearn.circuits import Circuit, sample_hard_function
from nwlearn.designs import make_design
from nwlearn.witnessing import (
    Guess, NWInstance, find_frequent_trace, measure, reconstruct_predictor, sequence_family,
)


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--samples", type=int, nargs="+", default=[50, 200, 1000, 4000])
    p.add_argument("--test-points", type=int, default=10**4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    a = p.parse_args()

    A = make_design(a.n, a.n**a.d, 1)
    H = sample_hard_function(a.n, 1, 0.75, 1000, a.seed)
    gates = [("OR", "x0", "x1"), ("OR", "g0", "x2"), ("OR", "g1", "x3")]
    inst = NWInstance(Circuit.build(A.set_size, gates), A, H)
    star = min(x for x in range(1 << a.n) if H(x) == 0)
    F = sequence_family([[star], [(star + 1) % (1 << a.n)]])

    fh = sys.stdout if a.out == "-" else open(a.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["samples", "trace", "branch_success", "frequency", "accuracy", "halfwidth",
                "decoy_accuracy"])
    for count in a.samples:
        ft = find_frequent_trace(inst, F, count, a.seed)
        best = max((measure(reconstruct_predictor(F, A, H, Guess(ft.branch, ft.trace, ft.a, maj), inst.C),
                            inst.C, a.test_points, a.seed + 1) for maj in (0, 1)),
                   key=lambda r: r.estimate)
        decoy = (ft.trace[-1] + 3) % (1 << a.n)
        ctrl = [measure(reconstruct_predictor(F, A, H, Guess(ft.branch, (decoy,), ft.a, maj), inst.C),
                        inst.C, a.test_points, a.seed + 2).estimate for maj in (0, 1)]
        w.writerow([count, "-".join(map(str, ft.trace)), f"{ft.success_rate:.4f}",
                    f"{ft.frequency:.4f}", f"{best.estimate:.4f}", f"{best.half_width:.4f}",
                    f"{sum(ctrl) / 2:.4f}"])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
