"""Batch experiment harness.

Every subcommand writes a CSV (``--out``) and a human-readable summary next
to it (``<out>.summary.txt``).  CSVs start with ``#`` lines echoing the
configuration, the master seed and a content hash of the configuration, so
two runs with the same seed produce byte-identical CSVs.  Wall-clock runtime
goes into the summary only.

Exit codes: 0 success, 1 other library error, 2 usage, 3 budget exceeded,
4 verification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import circuits as cc
from . import designs, games, learning, witnessing
from .errors import BudgetExceeded, NWLearnError, VerificationError

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_BUDGET, EXIT_VERIFY = 0, 1, 2, 3, 4
OUT_ENV = "NWLEARN_OUT"


class UsageError(Exception):
    pass


@dataclass
class Report:
    """Rows of one CSV plus the lines of its summary."""

    header: list[str]
    rows: list[list] = field(default_factory=list)
    summary: list[str] = field(default_factory=list)
    stdout: list[str] = field(default_factory=list)

    def add(self, *row):
        self.rows.append(list(row))


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def canonical_config(cmd: str, cfg: dict) -> str:
    lines = [f"command={cmd}"] + [f"{k}={cfg[k]}" for k in sorted(cfg)]
    return "\n".join(lines) + "\n"


def git_blob_sha1(text: str) -> str:
    data = text.encode()
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def render_csv(cmd: str, cfg: dict, report: Report) -> str:
    canon = canonical_config(cmd, cfg)
    buf = io.StringIO()
    # seed is part of the sorted config lines
    for line in canon.splitlines():
        buf.write(f"# {line}\n")
    buf.write(f"# config_sha1={git_blob_sha1(canon)}\n")
    buf.write(",".join(report.header) + "\n")
    for row in report.rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------- helpers

def named_circuit(name: str, n: int) -> cc.Circuit:
    """Small library of targets; a path to a circuit text file also works."""
    if os.path.exists(name):
        return cc.Circuit.from_text(Path(name).read_text())
    key = name.lower()
    if key in ("identity", "x0"):
        return cc.Circuit.projection(n, 0)
    if key in ("const0", "const1"):
        return cc.Circuit.const(n, int(key[-1]))
    if key in ("and", "or", "xor", "parity"):
        if n < 2:
            raise UsageError(f"target {name} needs n >= 2")
        op = "XOR" if key == "parity" else key.upper()
        width = n if key == "parity" or n <= 2 else 2
        gates = [(op, "x0", "x1")]
        for i in range(2, width):
            gates.append((op, f"g{len(gates) - 1}", f"x{i}"))
        return cc.Circuit.build(n, gates)
    raise UsageError(f"unknown target {name!r}")


def parse_samples(text: str, n: int) -> cc.SampleList:
    """``x:b`` pairs separated by commas; x is a bit string (LSB first) or an integer."""
    pairs = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            x, b = item.split(":")
            xv = cc.bits_to_int(x) if len(x) == n and set(x) <= {"0", "1"} else int(x, 0)
            pairs.append((xv, int(b)))
        except ValueError as exc:
            raise UsageError(f"bad sample {item!r}") from exc
    return cc.SampleList(n, tuple(pairs))


def block_tester(C, m: int) -> cc.BitFunction:
    """Accepts iff some block's label disagrees with C."""
    n = C.n
    tab = [C(x) for x in range(1 << n)]

    def fn(z):
        for j in range(m):
            blk = (z >> (j * (n + 1))) & ((1 << (n + 1)) - 1)
            if (blk >> n) != tab[blk & ((1 << n) - 1)]:
                return 1
        return 0

    return cc.BitFunction(m * (n + 1), fn, "inconsistent-block tester")


# ---------------------------------------------------------------- subcommands

def cmd_design(a) -> Report:
    A = designs.make_design(a.b, a.l, a.deg)
    k = A.max_intersection()
    rep = Report(["row", "positions"])
    for i, J in enumerate(A.rows):
        rep.add(i, " ".join(map(str, J)))
    rep.stdout.append(f"MAX_INTERSECT={k}")
    rep.summary += [
        "construction: polynomial combinatorial design over a prime field",
        f"rows={A.num_rows} set_size={A.set_size} degree_bound={A.degree_bound} "
        f"field_prime={A.field_prime} universe={A.universe}",
        f"MAX_INTERSECT={k} (guaranteed <= {A.degree_bound})",
    ]
    if k > A.degree_bound:
        raise VerificationError(f"row intersection {k} exceeds the degree bound")
    return rep


def cmd_gcsp(a) -> Report:
    S = parse_samples(a.samples, a.n)
    C = cc.gcsp(S, a.s, a.budget)
    rep = Report(["n", "s", "samples", "consistent", "witness_size"])
    rep.add(a.n, a.s, len(S), int(C is not None), C.size if C is not None else -1)
    rep.stdout.append("GCSP=" + ("YES" if C is not None else "NO"))
    rep.summary += ["construction: exact circuit search for labelled samples",
                    f"answer={'YES' if C is not None else 'NO'}"]
    if C is not None:
        rep.summary.append("witness:\n" + C.to_text())
    return rep


def cmd_bfkl(a) -> Report:
    C = named_circuit(a.target, a.n)
    D = block_tester(C, a.m)
    rep = Report(["quantity", "value"])
    adv = learning.distinguishing_advantage(D, C, a.m, "exact", budget=a.budget)
    hyb = learning.hybrid_probabilities(D, C, a.m, a.budget)
    s = 1.0 / adv.estimate if adv.estimate > 0 else float("inf")
    conf_bound, acc_bound = learning.lemma_bounds(a.m, s)
    if a.exact:
        prof = learning.bfkl_exact_profile(D, C, a.m, a.budget)
        mean, worst, best = prof.mean_accuracy, float(prof.accuracies.min()), prof.best
        conf = prof.confidence(acc_bound)
    else:
        rng = np.random.default_rng(a.seed)
        accs = []
        for sd in rng.integers(0, 2**31, size=a.seeds):
            P = learning.bfkl_predictor(D, a.m, a.n, int(sd), target=C)
            accs.append(learning.accuracy(P, C).estimate)
        accs = np.array(accs)
        mean, worst, best = float(accs.mean()), float(accs.min()), float(accs.max())
        conf = float((accs >= acc_bound - 1e-12).mean())
    rep.add("distinguishing_advantage", adv.estimate)
    for i, p in enumerate(hyb, start=1):
        rep.add(f"hybrid_{i}_accept", p)
    rep.add("telescoping_sum", hyb[0] - hyb[-1])
    rep.add("confidence_bound", conf_bound)
    rep.add("accuracy_bound", acc_bound)
    rep.add("confidence_at_bound", conf)
    rep.add("mean_accuracy", mean)
    rep.add("worst_accuracy", worst)
    rep.add("best_accuracy", best)
    rep.stdout.append(f"ADVANTAGE={mean:.6g}")
    rep.summary += [
        "construction: hybrid-argument predictor from an inconsistent-block distinguisher",
        f"target={a.target} n={a.n} m={a.m} mode={'exact' if a.exact else 'sampled seeds'}",
        f"distinguishing advantage={adv.estimate:.6g}; predictor accuracy mean={mean:.6g} "
        f"worst={worst:.6g}; guarantee: confidence {conf_bound:.4g} at accuracy {acc_bound:.4g}, "
        f"achieved confidence {conf:.4g}",
    ]
    return rep


def cmd_natural_learn(a) -> Report:
    C = named_circuit(a.target, a.n)
    L = learning.natural_proof_learner(a.c, a.d, C, a.seed, a.verify_samples, budget=a.budget)
    D, m = L.distinguisher, L.m
    rep = Report(["quantity", "value"])
    gen_accept = None
    if (1 << (m * a.n)) <= a.budget:
        from .generators import prob_generator
        gen_accept = prob_generator(D, C, m, "exact", budget=a.budget)
    seeds = a.seeds or 2 * m * m * 2
    res = learning.boost_learner(lambda sd: L.predictor_for(C, sd), C, seeds, a.m_test, a.seed)
    test = witnessing.measure(res.hypothesis, C, a.test_points, a.seed + 11)
    gap = L.uniform_acceptance.estimate - (gen_accept or 0.0)
    target = 0.5 + gap / (4 * m) - 0.05
    rep.add("blocks", m)
    rep.add("size_bound", L.size_bound)
    rep.add("uniform_accept", L.uniform_acceptance.estimate)
    rep.add("uniform_accept_halfwidth", L.uniform_acceptance.half_width)
    rep.add("generator_accept_exact", -1 if gen_accept is None else gen_accept)
    rep.add("seeds_boosted", seeds)
    rep.add("boost_test_agreement", res.agreement)
    rep.add("measured_accuracy", test.estimate)
    rep.add("measured_halfwidth", test.half_width)
    rep.add("accuracy_target", target)
    rep.stdout.append(f"ACCURACY={test.estimate:.6g} TARGET={target:.6g}")
    rep.summary += [
        "construction: learner from an exact circuit-search distinguisher via the hybrid predictor",
        f"target={a.target} n={a.n} c={a.c} d={a.d} m={m} size bound={L.size_bound}",
        f"uniform acceptance {L.uniform_acceptance.estimate:.4f} +- {L.uniform_acceptance.half_width:.4f}; "
        f"generator acceptance {gen_accept}",
        f"boosted accuracy {test.estimate:.4f} +- {test.half_width:.4f} (target {target:.4f})",
    ]
    return rep


def cmd_dichotomy(a) -> Report:
    rng = np.random.default_rng(a.seed)
    rows = cc.distinct_by_table(
        c for s in range(a.row_size + 1) for c in cc.enumerate_circuits(a.n, s, a.budget))
    cols = [cc.random_circuit(a.m * (a.n + 1), int(rng.integers(1, a.s + 1)), rng)
            for _ in range(a.cols)]
    if a.testers:
        cols += [block_tester(C, a.m) for C in rows]
    res = games.dichotomy(a.c, a.s, a.m, rows, cols, a.seed, a.budget)
    kind = "row_average_advantage" if res.branch == games.LEARNER else "column_prf_gap"
    labels = ([f"{cc.table_of(C):x}" for C in rows] if res.branch == games.LEARNER
              else [f"D{j}" for j in range(len(cols))])
    rep = Report(["opponent", kind, "bound"])
    for lab, val in zip(labels, res.certificate):
        rep.add(lab, float(val), res.certificate_bound)
    rep.stdout.append(res.verdict)
    rep.summary += [
        "construction: learner-or-pseudorandom-family dichotomy via the min-max theorem "
        "and k-uniform strategies",
        res.verdict,
        f"threshold 1/(4s)={res.threshold:.6g}; k bound={res.k_bound}; certified={res.certified}",
        f"families: {len(rows)} row circuits of size <= {a.row_size}, {len(cols)} distinguishers "
        f"({a.cols} random of size <= {a.s}{', plus testers' if a.testers else ''})",
        "note: " + res.family_note,
    ]
    return rep


def cmd_anticheckers(a) -> Report:
    if a.table:
        H = cc.TruthTable.from_bits(a.table)
    else:
        H = cc.sample_hard_function(a.n, a.t, a.gamma, 10000, a.seed, a.budget)
    res = games.find_anticheckers(H, a.t, a.count, a.seed, a.eps, a.budget)
    rep = Report(["input", "multiplicity"])
    counts = {}
    for x in res.inputs:
        counts[x] = counts.get(x, 0) + 1
    for x in sorted(counts):
        rep.add(cc.int_to_bits(x, H.n), counts[x])
    rep.stdout.append(f"V={res.value:.6g} FLOOR={res.floor:.6g}")
    rep.summary += [
        "construction: anticheckers from the circuit-versus-input error game",
        f"H={H.to_text().split()[-1]} (n={H.n}) t={a.t} circuits={res.circuits}",
        f"game value {res.value:.6g}; multiset size {len(res.inputs)}; achieved error floor "
        f"{res.floor:.6g} (required >= {res.value - a.eps:.6g})",
    ]
    return rep


def cmd_witness(a) -> Report:
    H = cc.sample_hard_function(a.n, a.size_proxy, 1 - 1 / a.n, 10000, a.seed, a.budget)
    L = witnessing.BruteForceLearner(a.n, a.held_out, a.learner_size, a.seed, a.budget)
    F = witnessing.witnesses_from_learning(L, H, a.eps_prime, a.seed, a.size_proxy)
    rng = np.random.default_rng(a.seed + 1)
    Ds, tried = [], 0
    while len(Ds) < a.circuits:
        tried += 1
        if tried > 100 * a.circuits:
            raise VerificationError("learner reaches the error target on too few circuits")
        D = cc.random_circuit(a.n, int(rng.integers(1, a.circuit_size + 1)), rng)
        err = bin(cc.table_of(L.learn(D)) ^ cc.table_of(D)).count("1") / (1 << a.n)
        if err <= a.eps_prime:
            Ds.append(D)
    rates = witnessing.branch_success(F, Ds, H)
    bound = witnessing.lemma_success_bound(a.eps_prime, a.n)
    rep = Report(["branch", "success"])
    for j, r in enumerate(rates):
        rep.add(j, float(r))
    rep.stdout.append(f"BEST={rates.max():.6g} BOUND={bound:.6g}")
    rep.summary += [
        "construction: single-round witnessing from a learner",
        f"n={a.n} width={F.width} eps'={a.eps_prime} held-out={a.held_out}",
        f"tested circuits={len(Ds)} (acceptance rate {len(Ds) / tried:.3f} for learner error <= eps')",
        f"best branch success {rates.max():.4f}; counting bound 1 - 2 eps' n = {bound:.4f}",
    ]
    return rep


def _toy_nw_instance(a):
    A = designs.make_design(a.n, a.n**a.d, a.deg)
    H = cc.sample_hard_function(a.n, 1, 0.75, 10000, a.seed, a.budget)
    star = min(x for x in range(1 << a.n) if H(x) == 0)
    gates = [("OR", "x0", "x1")]
    for i in range(2, min(4, A.set_size)):
        gates.append(("OR", f"g{len(gates) - 1}", f"x{i}"))
    C = cc.Circuit.build(A.set_size, gates)
    return witnessing.NWInstance(C, A, H), star


def cmd_reconstruct(a) -> Report:
    inst, star = _toy_nw_instance(a)
    other = (star + 1) % (1 << a.n)
    F = witnessing.sequence_family([[star], [other]])
    ft = witnessing.find_frequent_trace(inst, F, a.samples, a.seed)
    extra = [witnessing.Guess(ft.branch, ft.trace, ft.a, maj) for maj in (0, 1)]
    run = witnessing.reconstruction_learner(F, inst, a.guesses, a.m_test, a.test_points, a.seed,
                                            extra_guesses=extra)
    rep = Report(["guess", "branch", "trace", "maj", "agreement", "ci_low", "ci_high"])
    for i, (g, (est, lo, hi)) in enumerate(zip(run.guesses, run.agreements)):
        rep.add(i, g.branch, "-".join(f"{x:x}" for x in g.trace), g.maj, est, lo, hi)
    rep.stdout.append(f"ACCURACY={run.test.estimate:.6g} HALFWIDTH={run.test.half_width:.6g}")
    rep.summary += [
        "construction: base-function reconstruction from a frequent witnessing trace",
        f"n={a.n} d={a.d} universe={inst.A.universe} frequent trace={ft.trace} branch={ft.branch}",
        f"branch success {ft.success_rate:.4f} (threshold {ft.success_threshold:.4f}); "
        f"trace frequency {ft.frequency:.4f}",
        f"best guess {run.best}; measured accuracy {run.test.estimate:.4f} +- {run.test.half_width:.4f}",
    ]
    return rep


def cmd_speedup(a) -> Report:
    A = designs.make_design(a.b, a.n**a.d, a.deg)
    if a.learner == "exact":
        L = witnessing.ExactTableLearner(a.n, a.examples)
    elif a.learner == "coin":
        L = witnessing.CoinLearner(a.n, a.examples)
    else:
        L = witnessing.NaturalProofInnerLearner(a.n, a.c, a.learner_d, a.budget)
    f = named_circuit(a.target, A.set_size)
    res, preds = witnessing.speedup_learner(L, A, a.n, f, a.repeats, a.m_test, a.seed)
    rep = Report(["repeat", "challenge", "examples", "bundle", "bundle_bound", "agreement"])
    for i, (P, ag) in enumerate(zip(preds, res.agreements)):
        rep.add(i, P.plan.x, len(P.plan.ys), len(P.bundle), len(P.plan.ys) << a.b, ag)
    test = witnessing.measure(res.hypothesis, f, a.test_points, a.seed + 5)
    rep.stdout.append(f"ACCURACY={test.estimate:.6g} HALFWIDTH={test.half_width:.6g}")
    rep.summary += [
        "construction: learning speedup through bundled non-adaptive queries on a design",
        f"learner={a.learner} n={a.n} d={a.d} b={a.b} target={a.target} universe={A.universe}",
        f"best repeat {res.index}; measured accuracy {test.estimate:.4f} +- {test.half_width:.4f}",
    ]
    return rep


def cmd_instance_predict(a) -> Report:
    S = parse_samples(a.samples, a.n)
    y = cc.bits_to_int(a.y) if len(a.y) == a.n and set(a.y) <= {"0", "1"} else int(a.y, 0)
    out = learning.instance_predict(S, a.s, y, a.budget)
    smin, tables = learning.minimal_consistent_tables(S, a.s, a.budget)
    rep = Report(["y", "prediction", "minimal_size", "minimal_tables"])
    rep.add(cc.int_to_bits(y, a.n), out, -1 if smin is None else smin,
            " ".join(f"{t:x}" for t in tables))
    rep.stdout.append(f"PREDICTION={out}")
    rep.summary += ["construction: instance-specific prediction by minimum consistent circuits",
                    f"prediction={out} minimal size={smin}"]
    return rep


COMMANDS = {
    "design": cmd_design, "gcsp": cmd_gcsp, "bfkl": cmd_bfkl, "natural-learn": cmd_natural_learn,
    "dichotomy": cmd_dichotomy, "anticheckers": cmd_anticheckers, "witness": cmd_witness,
    "reconstruct": cmd_reconstruct, "speedup": cmd_speedup, "instance-predict": cmd_instance_predict,
}


# ---------------------------------------------------------------- parser

def _positive(v):
    v = int(v)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nwlearn", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_text, columns):
        sp = sub.add_parser(name, help=help_text, description=f"{help_text}. CSV columns: {columns}.")
        sp.add_argument("--seed", type=int, default=0, help="master seed")
        sp.add_argument("--out", default=None, help=f"CSV path (default ${OUT_ENV}/{name}.csv)")
        sp.add_argument("--config", default=None, help="key=value file; flags override it")
        sp.add_argument("--budget", type=_positive, default=cc.DEFAULT_BUDGET, help="work cap")
        return sp

    sp = add("design", "polynomial design dump", "row, positions")
    sp.add_argument("--b", type=int, default=3)
    sp.add_argument("--l", type=int, default=3)
    sp.add_argument("--deg", type=int, default=1)

    sp = add("gcsp", "decide whether samples fit a circuit of size <= s", "n, s, samples, consistent, witness_size")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--s", type=int, default=1)
    sp.add_argument("--samples", default="00:0,10:0,01:0,11:1", help="x:b pairs, x LSB-first bits or integer")

    sp = add("bfkl", "hybrid-argument predictor statistics", "quantity, value")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--target", default="identity")
    sp.add_argument("--exact", action="store_true", help="enumerate all internal randomness")
    sp.add_argument("--seeds", type=_positive, default=64, help="sampled seeds without --exact")

    sp = add("natural-learn", "learner from exact circuit search", "quantity, value")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--c", type=int, default=1)
    sp.add_argument("--d", type=int, default=3)
    sp.add_argument("--target", default="and")
    sp.add_argument("--verify-samples", type=_positive, default=10**4)
    sp.add_argument("--seeds", type=int, default=0, help="boosted seeds (0 means 2 m^2 s with s=2)")
    sp.add_argument("--m-test", type=_positive, default=200)
    sp.add_argument("--test-points", type=_positive, default=10**4)

    sp = add("dichotomy", "learner-or-PRF dichotomy on explicit families", "opponent, certificate value, bound")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--c", type=int, default=1)
    sp.add_argument("--s", type=int, default=2)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--row-size", type=int, default=1)
    sp.add_argument("--cols", type=_positive, default=8)
    sp.add_argument("--testers", action="store_true", help="add one inconsistent-block tester per row")

    sp = add("anticheckers", "input multiset on which small circuits err", "input, multiplicity")
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--t", type=int, default=1)
    sp.add_argument("--gamma", type=float, default=0.75)
    sp.add_argument("--table", default=None, help="H as LSB-first bits instead of sampling")
    sp.add_argument("--count", type=int, default=None)
    sp.add_argument("--eps", type=float, default=0.05)

    sp = add("witness", "witnessing success of a learner-based family", "branch, success")
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--eps-prime", type=float, default=1 / 16)
    sp.add_argument("--held-out", type=int, default=8)
    sp.add_argument("--learner-size", type=int, default=2)
    sp.add_argument("--size-proxy", type=int, default=1)
    sp.add_argument("--circuits", type=_positive, default=200)
    sp.add_argument("--circuit-size", type=_positive, default=2)

    sp = add("reconstruct", "reconstruction from a frequent witnessing trace",
             "guess, branch, trace, maj, agreement, ci_low, ci_high")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--deg", type=int, default=1)
    sp.add_argument("--samples", type=_positive, default=2000)
    sp.add_argument("--guesses", type=int, default=16)
    sp.add_argument("--m-test", type=_positive, default=300)
    sp.add_argument("--test-points", type=_positive, default=10**4)

    sp = add("speedup", "learning speedup with bundled queries",
             "repeat, challenge, examples, bundle, bundle_bound, agreement")
    sp.add_argument("--learner", choices=("exact", "coin", "natural"), default="exact")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--b", type=int, default=3)
    sp.add_argument("--deg", type=int, default=1)
    sp.add_argument("--examples", type=int, default=3)
    sp.add_argument("--c", type=int, default=0)
    sp.add_argument("--learner-d", type=int, default=2)
    sp.add_argument("--target", default="or")
    sp.add_argument("--repeats", type=_positive, default=16)
    sp.add_argument("--m-test", type=_positive, default=300)
    sp.add_argument("--test-points", type=_positive, default=10**4)

    sp = add("instance-predict", "value forced by minimum consistent circuits",
             "y, prediction, minimal_size, minimal_tables")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--s", type=int, default=1)
    sp.add_argument("--samples", default="100:0,010:0,110:1,001:0,101:0,011:0,111:1")
    sp.add_argument("--y", default="000")
    return p


def read_config(path: str) -> dict:
    cfg = {}
    for num, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        cfg[k.replace("-", "_")] = v
    return cfg


def _apply_config(parser, argv):
    args = parser.parse_args(argv)
    if not args.config:
        return args
    cfg = read_config(args.config)
    sp = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in sp._actions}
    for key, val in cfg.items():
        act = actions.get(key)
        if act is None or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        if isinstance(act, argparse._StoreTrueAction):
            if val.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"config key {key!r} needs a boolean")
            cfg[key] = val.lower() in ("true", "1", "yes")
    sp.set_defaults(**cfg)
    return parser.parse_args(argv)


def config_dict(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "config", "out")}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    out = Path(args.out or Path(os.environ.get(OUT_ENV, ".")) / f"{args.command}.csv")
    cfg = config_dict(args)
    start = time.perf_counter()
    try:
        report = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded in {args.command}: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except VerificationError as exc:
        print(f"verification failed in {args.command}: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except NWLearnError as exc:
        print(f"{args.command} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    elapsed = time.perf_counter() - start
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(render_csv(args.command, cfg, report))
    canon = canonical_config(args.command, cfg)
    summary = [f"command: {args.command}", f"seed: {args.seed}",
               f"config_sha1: {git_blob_sha1(canon)}"]
    summary += [f"config: {line}" for line in canon.splitlines()[1:]]
    summary += report.summary + [f"runtime_seconds={elapsed:.3f}"]
    Path(str(out) + ".summary.txt").write_text("\n".join(summary) + "\n")
    for line in report.stdout:
        print(line, file=stdout)
    print(f"wrote {out}", file=stdout)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
