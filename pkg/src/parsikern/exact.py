"""
Exact oracles for small instances.

* :func:`dmp_exact` enumerates characters as restricted-growth strings.
* :func:`dtbr_partition_oracle` enumerates set partitions and tests each for
  being an agreement forest.
* :func:`dtbr_hitting_set` solves the quartet-leg hitting-set formulation by
  branch and bound.  It shares nothing with the partition oracle except the
  tree primitives, so the two cross-check each other.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .fitch import BatchScorer, OracleCapError
from .treecore import (QuartetTopology, Tree, TreeError, canonical_form,
                       quartet_topology, restrict)

log = logging.getLogger(__name__)

DMP_CAP_SMALL_T = 10
DMP_CAP_LARGE_T = 9
PARTITION_CAP = 8
HITTING_SET_CAP = 16


class InstanceTooLarge(OracleCapError):
    pass


def _same_taxa(T1: Tree, T2: Tree) -> None:
    if T1.taxa != T2.taxa:
        raise TreeError("trees have different leaf sets")


# ---------------------------------------------------------------------------
# restricted growth strings
# ---------------------------------------------------------------------------

def restricted_growth_strings(n: int, max_blocks: int, exact_blocks: int | None = None) -> np.ndarray:
    """All restricted-growth strings of length n with at most ``max_blocks``
    distinct values (exactly ``exact_blocks`` if given), one per row."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    rows = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)          # max value used so far
    for _ in range(1, n):
        limit = np.minimum(top + 1, max_blocks - 1)
        counts = (limit + 1).astype(np.int64)
        rep = np.repeat(np.arange(len(rows)), counts)
        offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        rows = np.hstack([rows[rep], offs[:, None].astype(np.int8)])
        top = np.maximum(top[rep], offs.astype(np.int8))
    if exact_blocks is not None:
        rows = rows[top == exact_blocks - 1]
    return rows


def blocks_of(rgs: Sequence[int], taxa: Sequence[str]) -> list[tuple[str, ...]]:
    out: dict[int, list[str]] = {}
    for x, b in zip(taxa, rgs):
        out.setdefault(int(b), []).append(x)
    return [tuple(out[k]) for k in sorted(out)]


# ---------------------------------------------------------------------------
# maximum parsimony distance
# ---------------------------------------------------------------------------

def dmp_exact(T1: Tree, T2: Tree, t: int | None = 2, cap: int | None = None,
              threads: int = 1, return_character: bool = False):
    """Exact t-state parsimony distance by enumerating all characters with at most t states.

    ``t=None`` means unbounded (realised as t = n).  Characters are set
    partitions of the taxa, so relabelling symmetry is quotiented out.
    """
    _same_taxa(T1, T2)
    n = T1.n_leaves
    if t is not None and t < 1:
        raise ValueError("t must be positive")
    tt = n if t is None else min(t, n)
    if cap is None:
        cap = DMP_CAP_SMALL_T if tt <= 3 else DMP_CAP_LARGE_T
    if n > cap:
        raise InstanceTooLarge(f"n={n} exceeds the d_MP oracle cap {cap}")
    if n <= 3 or tt < 2:
        return (0, {x: 0 for x in T1.taxa}) if return_character else 0
    s1, s2 = BatchScorer(T1), BatchScorer(T2)
    rows = restricted_growth_strings(n, tt)

    def work(chunk: np.ndarray) -> tuple[int, int]:
        gap = np.abs(s1.score(chunk) - s2.score(chunk))
        i = int(np.argmax(gap))
        return int(gap[i]), i

    if threads > 1 and len(rows) > 4096:
        bounds = np.linspace(0, len(rows), threads + 1).astype(int)
        chunks = [(lo, rows[lo:hi]) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(lambda c: work(c[1]), chunks))
        best, at = -1, 0
        for (lo, _), (g, i) in zip(chunks, results):
            if g > best:
                best, at = g, lo + i
    else:
        best, at = work(rows)
    if return_character:
        return best, {x: int(s) for x, s in zip(T1.taxa, rows[at])}
    return best


# ---------------------------------------------------------------------------
# quartets
# ---------------------------------------------------------------------------

class AnnotatedQuartet(NamedTuple):
    taxa: tuple[str, str, str, str]
    t1: QuartetTopology
    t2: QuartetTopology


def incompatible_quartets(T1: Tree, T2: Tree) -> list[AnnotatedQuartet]:
    """Every 4-subset whose restrictions differ, sorted by taxa."""
    _same_taxa(T1, T2)
    out = []
    for q in combinations(T1.taxa, 4):
        a = quartet_topology(T1, q)
        b = quartet_topology(T2, q)
        if a != b:
            out.append(AnnotatedQuartet(q, a, b))  # type: ignore[arg-type]
    return out


def leg_mask(T: Tree, top: QuartetTopology) -> int:
    """Edge mask of the two legs of a quartet in T (its topology in T)."""
    (a, b), (c, d) = top
    return T.taxon_path_edges(a, b) | T.taxon_path_edges(c, d)


# ---------------------------------------------------------------------------
# agreement forests
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AFReport:
    ok: bool
    condition: str | None = None       # "topology" | "T1-disjoint" | "T2-disjoint"
    blocks: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "agreement forest"
        return f"violates {self.condition} at block(s) {self.blocks}"


def _check_partition(taxa: Sequence[str], partition: Sequence[Iterable[str]]) -> list[tuple[str, ...]]:
    blocks = [tuple(sorted(b)) for b in partition]
    flat = [x for b in blocks for x in b]
    if any(not b for b in blocks) or len(flat) != len(set(flat)) or set(flat) != set(taxa):
        raise ValueError("not a partition of the taxon set")
    return blocks


def is_agreement_forest(T1: Tree, T2: Tree, partition: Sequence[Iterable[str]]) -> AFReport:
    _same_taxa(T1, T2)
    blocks = _check_partition(T1.taxa, partition)
    for i, b in enumerate(blocks):
        if len(b) >= 4 and canonical_form(restrict(T1, b)) != canonical_form(restrict(T2, b)):
            return AFReport(False, "topology", (i,))
    for label, T in (("T1-disjoint", T1), ("T2-disjoint", T2)):
        masks = [T.steiner_edges(b) for b in blocks]
        for i, j in combinations(range(len(blocks)), 2):
            if masks[i] & masks[j]:
                return AFReport(False, label, (i, j))
    return AFReport(True)


class _AFChecker:
    """Cached block-level checks for partition enumeration."""

    def __init__(self, T1: Tree, T2: Tree):
        self.T1, self.T2 = T1, T2
        self._cache: dict[tuple[str, ...], tuple[bool, int, int]] = {}

    def block(self, b: tuple[str, ...]) -> tuple[bool, int, int]:
        hit = self._cache.get(b)
        if hit is None:
            agree = len(b) < 4 or canonical_form(restrict(self.T1, b)) == canonical_form(restrict(self.T2, b))
            hit = (agree, self.T1.steiner_edges(b), self.T2.steiner_edges(b))
            self._cache[b] = hit
        return hit

    def __call__(self, blocks: list[tuple[str, ...]]) -> bool:
        m1 = m2 = 0
        for b in blocks:
            agree, e1, e2 = self.block(b)
            if not agree or m1 & e1 or m2 & e2:
                return False
            m1 |= e1
            m2 |= e2
        return True


def dtbr_partition_oracle(T1: Tree, T2: Tree, cap: int = PARTITION_CAP,
                          return_forest: bool = False):
    """min over agreement forests of (#blocks - 1), by exhaustive enumeration."""
    _same_taxa(T1, T2)
    n = T1.n_leaves
    if n > cap:
        raise InstanceTooLarge(f"n={n} exceeds the partition oracle cap {cap}")
    if n <= 3:
        return (0, [list(T1.taxa)]) if return_forest else 0
    check = _AFChecker(T1, T2)
    taxa = T1.taxa
    for k in range(1, n + 1):
        for row in restricted_growth_strings(n, k, exact_blocks=k):
            blocks = blocks_of(row, taxa)
            if check(blocks):
                return (k - 1, blocks) if return_forest else k - 1
    raise AssertionError("all-singletons partition is always an agreement forest")


# ---------------------------------------------------------------------------
# hitting set
# ---------------------------------------------------------------------------

def cut_to_partition(T1: Tree, edges: Iterable[int | tuple[int, int]]) -> list[tuple[str, ...]]:
    """Leaf sets of the components of T1 minus the given edges (ids or pairs)."""
    ids = [e if isinstance(e, int) else T1.edge_id(*e) for e in edges]
    blocks = []
    for comp in T1.components_without(ids):
        taxa = tuple(sorted(T1.label(v) for v in comp if T1.is_leaf(v)))
        if taxa:
            blocks.append(taxa)
    return sorted(blocks)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _bits(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def _minimal_constraints(masks: Iterable[int]) -> list[int]:
    """Drop duplicate and superset constraints; they never bind."""
    kept: list[int] = []
    for m in sorted(set(masks), key=lambda m: (_popcount(m), m)):
        if not any(k & m == k for k in kept):
            kept.append(m)
    return kept


def _packing_bound(masks: list[int]) -> int:
    """Size of a greedy set of pairwise disjoint constraints (a dual solution)."""
    used = 0
    count = 0
    for m in sorted(masks, key=_popcount):
        if m & used == 0:
            used |= m
            count += 1
    return count


def min_hitting_set(masks: Sequence[int]) -> int:
    """Minimum-cardinality bit mask hitting every mask in ``masks``."""
    cons = _minimal_constraints(masks)
    if not cons:
        return 0
    if any(m == 0 for m in cons):
        raise ValueError("an empty constraint cannot be hit")
    # greedy upper bound
    rest, greedy = list(cons), 0
    while rest:
        freq: dict[int, int] = {}
        for m in rest:
            for e in _bits(m):
                freq[e] = freq.get(e, 0) + 1
        e = min(freq, key=lambda k: (-freq[k], k))
        greedy |= 1 << e
        rest = [m for m in rest if not m >> e & 1]
    best = [_popcount(greedy), greedy]

    def search(chosen: int, count: int, unhit: list[int], forbidden: int) -> None:
        if not unhit:
            if count < best[0]:
                best[0], best[1] = count, chosen
            return
        avail = [m & ~forbidden for m in unhit]
        if any(a == 0 for a in avail):
            return
        if count + _packing_bound(avail) >= best[0]:
            return
        pivot = min(range(len(avail)), key=lambda i: (_popcount(avail[i]), avail[i]))
        branch = _bits(avail[pivot])
        # try edges that hit the most constraints first
        branch.sort(key=lambda e: (-sum(1 for a in avail if a >> e & 1), e))
        excluded = 0
        for e in branch:
            bit = 1 << e
            search(chosen | bit, count + 1, [m for m in unhit if not m & bit], forbidden | excluded)
            excluded |= bit

    search(0, 0, cons, 0)
    return best[1]


def dtbr_hitting_set(T1: Tree, T2: Tree, cap: int = HITTING_SET_CAP,
                     quartets: list[AnnotatedQuartet] | None = None) -> tuple[int, list[tuple[int, int]]]:
    """Exact d_TBR as a minimum set of T1 edges hitting the legs of every
    incompatible quartet.  Returns the value and the edges."""
    _same_taxa(T1, T2)
    n = T1.n_leaves
    if n > cap:
        raise InstanceTooLarge(f"n={n} exceeds the hitting-set cap {cap}")
    if n <= 3:
        return 0, []
    Q = incompatible_quartets(T1, T2) if quartets is None else quartets
    chosen = min_hitting_set([leg_mask(T1, q.t1) for q in Q])
    edges = [T1.edges[i] for i in _bits(chosen)]
    return len(edges), edges


def hits_all(T1: Tree, Q: Iterable[AnnotatedQuartet], edges: Iterable[int | tuple[int, int]]) -> bool:
    mask = 0
    for e in edges:
        mask |= 1 << (e if isinstance(e, int) else T1.edge_id(*e))
    return all(leg_mask(T1, q.t1) & mask for q in Q)
