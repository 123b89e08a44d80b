"""Shared instance builders for the test suite."""

from __future__ import annotations

import random

from parsikern.cli import random_tree, taxon_names
from parsikern.exact import AnnotatedQuartet
from parsikern.newick_io import parse_newick
from parsikern.treecore import (QuartetTopology, build_tree, quartet_topology,
                                suppress_degree_two)

Q4 = ("((a,b),(c,d));", "((a,c),(b,d));")


def q4():
    return parse_newick(Q4[0]), parse_newick(Q4[1])


def caterpillar(names):
    """Newick for the caterpillar with leaves in the given order."""
    s = f"({names[0]},{names[1]})"
    for x in names[2:]:
        s = f"({s},{x})"
    return s + ";"


def quartet_block_tree(groups):
    """T1 made of one ((a,b),(c,d)) block per group hung off a backbone path,
    so the groups are pairwise leg-disjoint with T1 topology ab|cd."""
    edges, labels, hubs = [], {}, []
    for k, (a, b, c, d) in enumerate(groups):
        h, m, l, r = ("h", k), ("m", k), ("l", k), ("r", k)
        hubs.append(h)
        for x, p in ((a, l), (b, l), (c, r), (d, r)):
            edges.append((p, ("x", x)))
            labels[("x", x)] = x
        edges += [(m, l), (m, r), (h, m)]
    edges += list(zip(hubs, hubs[1:]))
    return suppress_degree_two(build_tree(edges, labels))


def leg_disjoint_instance(n: int, seed: int):
    """(T1, T2, Q): random T2, and a T1 in which a random partition of the
    taxa into quartets is leg-disjoint and incompatible with T2."""
    rng = random.Random(seed)
    names = taxon_names(n - n % 4)
    T2 = random_tree(len(names), rng, names)
    perm = names[:]
    rng.shuffle(perm)
    groups = []
    for i in range(0, len(perm), 4):
        g = sorted(perm[i:i + 4])
        t2 = quartet_topology(T2, g)
        opts = [QuartetTopology.of((g[0], g[j]), [y for y in g[1:] if y != g[j]]) for j in (1, 2, 3)]
        t1 = rng.choice([o for o in opts if o != t2])
        groups.append(t1.left + t1.right)
    T1 = quartet_block_tree(groups)
    Q = [AnnotatedQuartet(tuple(sorted(g)), quartet_topology(T1, g), quartet_topology(T2, g))
         for g in groups]
    return T1, T2, Q
