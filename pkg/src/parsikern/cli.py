"""Command-line front end (``parsikern``)."""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .exact import (DMP_CAP_LARGE_T, DMP_CAP_SMALL_T, HITTING_SET_CAP, PARTITION_CAP,
                    InstanceTooLarge, dmp_exact, dtbr_hitting_set, dtbr_partition_oracle,
                    incompatible_quartets, is_agreement_forest)
from .fitch import OracleCapError, parsimony_score
from .newick_io import (CertificateError, NewickError, parse_character_table,
                        parse_newick_lines, read_certificate, write_certificate, write_newick)
from .treecore import Tree, TreeError, build_tree, reattach_choices, tbr_move

log = logging.getLogger("parsikern")

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


# ---------------------------------------------------------------------------
# instance generation
# ---------------------------------------------------------------------------

def taxon_names(n: int) -> list[str]:
    width = max(2, len(str(n)))
    return [f"t{i:0{width}d}" for i in range(1, n + 1)]


def random_tree(n: int, rng: random.Random, names: Sequence[str] | None = None) -> Tree:
    """Binary tree by attaching leaves one at a time to a uniformly chosen edge."""
    names = list(names) if names is not None else taxon_names(n)
    if n < 1 or len(names) != n:
        raise ValueError("need n >= 1 names")
    if n == 1:
        return build_tree([], {0: names[0]})
    if n == 2:
        return build_tree([(0, 1)], {0: names[0], 1: names[1]})
    edges = [(0, 3), (1, 3), (2, 3)]
    labels = {0: names[0], 1: names[1], 2: names[2]}
    nxt = 4
    for name in names[3:]:
        u, v = edges.pop(rng.randrange(len(edges)))
        mid, leaf = nxt, nxt + 1
        nxt += 2
        edges += [(u, mid), (mid, v), (mid, leaf)]
        labels[leaf] = name
    return build_tree(edges, labels)


def random_tbr_move(T: Tree, rng: random.Random) -> Tree:
    internal = [e for e in T.edges if not (T.is_leaf(e[0]) or T.is_leaf(e[1]))]
    pool = internal or list(T.edges)
    u, v = pool[rng.randrange(len(pool))]
    r1 = reattach_choices(T, (u, v), u)
    r2 = reattach_choices(T, (u, v), v)
    return tbr_move(T, (u, v), r1[rng.randrange(len(r1))], r2[rng.randrange(len(r2))])


def gen_random_pair(n: int, r: int, seed: int) -> tuple[Tree, Tree]:
    if n < 4:
        raise ValueError("n must be at least 4")
    if r < 0:
        raise ValueError("r must be non-negative")
    rng = random.Random(seed)
    T1 = random_tree(n, rng)
    T2 = T1
    for _ in range(r):
        T2 = random_tbr_move(T2, rng)
    return T1, T2


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

class UsageError(Exception):
    pass


def _read_pair(path: str) -> tuple[Tree, Tree]:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    trees = parse_newick_lines(text)
    if len(trees) != 2:
        raise UsageError(f"{path}: expected two Newick trees, found {len(trees)}")
    if trees[0].taxa != trees[1].taxa:
        raise TreeError("the two trees have different leaf sets")
    return trees[0], trees[1]


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit(args, value: Any, plain: str) -> None:
    if args.json:
        print(json.dumps(value, sort_keys=True))
    else:
        print(plain)


def _parse_t(text: str) -> int | None:
    if text in ("inf", "unbounded"):
        return None
    try:
        t = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("t must be an integer in 2..64 or 'inf'") from None
    if not 2 <= t <= 64:
        raise argparse.ArgumentTypeError("t must be in 2..64")
    return t


def cmd_gen(args) -> int:
    T1, T2 = gen_random_pair(args.n, args.moves, args.seed)
    _write(args.output, write_newick(T1) + "\n" + write_newick(T2) + "\n")
    return EXIT_OK


def cmd_score(args) -> int:
    T1, T2 = _read_pair(args.input)
    table = parse_character_table(Path(args.characters).read_text())
    f = table.as_indices()
    s1, s2 = parsimony_score(T1, f), parsimony_score(T2, f)
    _emit(args, {"l_T1": s1, "l_T2": s2}, f"l(T1)={s1} l(T2)={s2}")
    return EXIT_OK


def cmd_dmp(args) -> int:
    T1, T2 = _read_pair(args.input)
    value = dmp_exact(T1, T2, args.t, cap=args.cap, threads=args.threads)
    _emit(args, {"dmp": value, "t": args.t if args.t is not None else "inf"}, str(value))
    return EXIT_OK


def cmd_dtbr(args) -> int:
    T1, T2 = _read_pair(args.input)
    if args.method == "partition":
        value = dtbr_partition_oracle(T1, T2, cap=args.cap or PARTITION_CAP)
    else:
        value, _ = dtbr_hitting_set(T1, T2, cap=args.cap or HITTING_SET_CAP)
    _emit(args, {"dtbr": value, "method": args.method}, str(value))
    return EXIT_OK


def cmd_reduce(args) -> int:
    from .kernelize import fully_reduce
    T1, T2 = _read_pair(args.input)
    K1, K2, trace = fully_reduce(T1, T2)
    _write(args.output, write_newick(K1) + "\n" + write_newick(K2) + "\n")
    if args.trace:
        Path(args.trace).write_text(trace.dumps())
    if args.output not in (None, "-"):
        _emit(args, {"initial_leaves": trace.initial_leaves, "final_leaves": trace.final_leaves,
                     "steps": len(trace.steps)},
              f"{trace.initial_leaves} -> {trace.final_leaves} leaves in {len(trace.steps)} steps")
    return EXIT_OK


def cmd_quartets(args) -> int:
    T1, T2 = _read_pair(args.input)
    if args.leg_disjoint:
        from .bounds import greedy_leg_disjoint
        res = greedy_leg_disjoint(T1, T2)
        tr = [{"taxa": list(q.taxa), "t1": str(q.t1), "t2": str(q.t2)} for q in res.quartets]
        if args.json:
            print(json.dumps({"quartets": tr, "hitting_set": res.hitting_set_size,
                              "edges": [list(e) for e in res.edges]}, sort_keys=True))
        else:
            for q in res.quartets:
                print(f"{q.t1}\t{q.t2}")
            print(f"quartets={len(res.quartets)} hitting_set={res.hitting_set_size}")
        return EXIT_OK
    Q = incompatible_quartets(T1, T2)
    if args.json:
        print(json.dumps([{"taxa": list(q.taxa), "t1": str(q.t1), "t2": str(q.t2)} for q in Q]))
    else:
        for q in Q:
            print(f"{q.t1}\t{q.t2}")
    return EXIT_OK


def cmd_certify(args) -> int:
    from .bounds import certified_lower_bound
    T1, T2 = _read_pair(args.input)
    cert = certified_lower_bound(T1, T2, threads=args.threads)
    _write(args.output, write_certificate(cert))
    if args.output not in (None, "-"):
        _emit(args, {"lower_bound": cert.claimed_bound, "tbr_upper_bound": cert.tbr_upper_bound},
              f"lower bound {cert.claimed_bound}, TBR upper bound {cert.tbr_upper_bound}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import verify_certificate
    T1, T2 = _read_pair(args.input)
    cert = read_certificate(Path(args.cert).read_text())
    rep = verify_certificate(T1, T2, cert)
    if args.json:
        print(json.dumps({"ok": rep.ok, "failures": rep.failures, "passed": rep.passed,
                          "gap": rep.gap}, sort_keys=True))
    else:
        print(rep.summary())
    return EXIT_OK if rep.ok else EXIT_DOMAIN


def cmd_check_af(args) -> int:
    T1, T2 = _read_pair(args.input)
    blocks = []
    for line in Path(args.partition).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            blocks.append([x.strip() for x in line.split(",") if x.strip()])
    try:
        rep = is_agreement_forest(T1, T2, blocks)
    except ValueError as exc:
        raise UsageError(f"{args.partition}: {exc}") from None
    _emit(args, {"ok": rep.ok, "condition": rep.condition, "blocks": list(rep.blocks)}, str(rep))
    return EXIT_OK if rep.ok else EXIT_DOMAIN


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="parsikern",
                                description="Parsimony distance kernels, bounds and certificates.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, fn, help_):
        s = sub.add_parser(name, help=help_)
        s.set_defaults(fn=fn)
        s.add_argument("--json", action="store_true", help="machine-readable output")
        return s

    s = cmd("gen", cmd_gen, "random tree pair related by TBR moves")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--moves", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")

    s = cmd("score", cmd_score, "parsimony scores of a character table")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-c", "--characters", required=True)

    s = cmd("dmp", cmd_dmp, "exact parsimony distance")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--t", type=_parse_t, default=2, help="state bound, 2..64 or inf")
    s.add_argument("--cap", type=int, help=f"max leaves (default {DMP_CAP_SMALL_T} for t<=3, else {DMP_CAP_LARGE_T})")
    s.add_argument("--threads", type=int, default=1)

    s = cmd("dtbr", cmd_dtbr, "exact TBR distance")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--method", choices=("hitting", "partition"), default="hitting")
    s.add_argument("--cap", type=int)

    s = cmd("reduce", cmd_reduce, "apply cherry and chain reductions")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-o", "--output")
    s.add_argument("--trace")

    s = cmd("quartets", cmd_quartets, "incompatible quartets")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--leg-disjoint", action="store_true", help="greedy leg-disjoint set and hitting set")

    s = cmd("certify", cmd_certify, "lower-bound certificate")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-o", "--output")
    s.add_argument("--threads", type=int, default=1)

    s = cmd("verify", cmd_verify, "check a certificate")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--cert", required=True)

    s = cmd("check-af", cmd_check_af, "check an agreement forest")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--partition", required=True)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(args)
    except (UsageError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NewickError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (InstanceTooLarge, OracleCapError, CertificateError, TreeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
