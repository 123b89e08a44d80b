"""
Fitch-Hartigan small parsimony on unrooted trees (degree-2 vertices allowed).

Candidate sets are bit masks over at most 64 states.  The tree is rooted by
subdividing ``root_edge``; a degree-2 vertex copies its single child's set and
never counts as a union vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping

import numpy as np

from .treecore import Tree, TreeError, induced_subtree

MAX_STATES = 64
ROOT = -1  # id of the virtual root that subdivides root_edge


class CharacterError(ValueError):
    pass


class OracleCapError(ValueError):
    """Instance too large for an exhaustive oracle."""


@dataclass(frozen=True)
class Character:
    """Assignment taxon -> state index in ``range(num_states)``.

    ``num_states=None`` means unbounded (capped at 64 by the bit-set encoding).
    """

    assignment: Mapping[str, int]
    num_states: int | None = None

    def __post_init__(self):
        t = self.num_states
        if t is not None and not (1 <= t <= MAX_STATES):
            raise CharacterError(f"t must be in 1..{MAX_STATES}")
        limit = t if t is not None else MAX_STATES
        for x, s in self.assignment.items():
            if not isinstance(s, (int, np.integer)) or not 0 <= s < limit:
                raise CharacterError(f"state {s!r} of {x!r} out of range")

    def __getitem__(self, taxon: str) -> int:
        return self.assignment[taxon]

    @property
    def states(self) -> set[int]:
        return set(self.assignment.values())

    def restricted(self, taxa: Iterable[str]) -> "Character":
        return Character({x: self.assignment[x] for x in taxa}, self.num_states)


def as_character(f) -> Character:
    return f if isinstance(f, Character) else Character(dict(f))


@dataclass(frozen=True)
class FitchMap:
    """Bottom-up candidate sets.

    ``sets[v]`` is a bit mask for every vertex of the tree plus the virtual
    root (key ``ROOT``); ``kind[v]`` is ``"leaf"``, ``"union"``,
    ``"intersection"`` or ``"copy"`` (degree-2 vertices).
    """

    sets: dict[int, int]
    kind: dict[int, str]
    children: dict[int, tuple[int, ...]]
    root_edge: tuple[int, int] | None

    @property
    def union_count(self) -> int:
        return sum(1 for k in self.kind.values() if k == "union")

    def states(self, v: int) -> set[int]:
        m = self.sets[v]
        return {i for i in range(MAX_STATES) if m >> i & 1}


def default_root_edge(T: Tree) -> tuple[int, int] | None:
    """Edge incident to the leaf of the lexicographically smallest taxon."""
    if T.n_vertices == 1:
        return None
    s = T.leaf(T.taxa[0])
    p = T.neighbors(s)[0]
    return (min(s, p), max(s, p))


def _rooted_children(T: Tree, root_edge: tuple[int, int] | None):
    """Children lists for the tree rooted at the subdivision of root_edge,
    plus a postorder."""
    if root_edge is None:
        only = 0
        return {ROOT: (only,), only: ()}, [only, ROOT]
    u, v = root_edge
    if (min(u, v), max(u, v)) not in T.edge_index:
        raise TreeError(f"{root_edge} is not an edge")
    children: dict[int, tuple[int, ...]] = {ROOT: (u, v)}
    order = []
    stack = [(u, v, False), (v, u, False)]
    while stack:
        x, par, done = stack.pop()
        if done:
            order.append(x)
            continue
        kids = tuple(w for w in T.neighbors(x) if w != par)
        children[x] = kids
        stack.append((x, par, True))
        for w in reversed(kids):
            stack.append((w, x, False))
    order.append(ROOT)
    return children, order


def _check_cover(T: Tree, f: Character) -> None:
    missing = [x for x in T.taxa if x not in f.assignment]
    if missing:
        raise CharacterError(f"character does not cover leaves {missing}")


def fitch_map(T: Tree, f, root_edge: tuple[int, int] | None = None) -> FitchMap:
    f = as_character(f)
    _check_cover(T, f)
    if root_edge is None:
        root_edge = default_root_edge(T)
    children, order = _rooted_children(T, root_edge)
    sets: dict[int, int] = {}
    kind: dict[int, str] = {}
    for v in order:
        kids = children[v]
        if v != ROOT and T.is_leaf(v):
            if kids:
                raise TreeError("leaf with children; bad root edge")
            sets[v] = 1 << f[T.label(v)]
            kind[v] = "leaf"
        elif len(kids) == 1:
            sets[v] = sets[kids[0]]
            kind[v] = "copy"
        else:
            a, b = sets[kids[0]], sets[kids[1]]
            if a & b:
                sets[v], kind[v] = a & b, "intersection"
            else:
                sets[v], kind[v] = a | b, "union"
    return FitchMap(sets, kind, children, root_edge)


def parsimony_score(T: Tree, f) -> int:
    """l_f(T): the number of union vertices of the Fitch map."""
    return fitch_map(T, f).union_count


def _lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def fitch_extension(T: Tree, f, root_edge: tuple[int, int] | None = None) -> dict[int, int]:
    """An optimal extension vertex -> state; free choices take the smallest state."""
    F = fitch_map(T, f, root_edge)
    ext: dict[int, int] = {ROOT: _lowest(F.sets[ROOT])}
    stack = [ROOT]
    while stack:
        u = stack.pop()
        for v in F.children[u]:
            s = ext[u]
            ext[v] = s if F.sets[v] >> s & 1 else _lowest(F.sets[v])
            stack.append(v)
    del ext[ROOT]
    return ext


def mutation_count(T: Tree, extension: Mapping[int, int]) -> int:
    """Number of edges whose endpoints get different states."""
    missing = [v for v in range(T.n_vertices) if v not in extension]
    if missing:
        raise CharacterError(f"extension misses vertices {missing[:5]}")
    return sum(1 for u, v in T.edges if extension[u] != extension[v])


def parsimonious_extension(T: Tree, Y: Iterable[str], fbar: Mapping[int, int]) -> dict[int, int]:
    """Extend a labelling of T(Y) (keyed by T(Y)'s own vertex ids) to all of T.

    Vertices outside T(Y) take the state of their nearest T(Y) vertex.
    """
    sub = induced_subtree(T, Y)
    missing = [v for v in range(sub.n_vertices) if v not in fbar]
    if missing:
        raise CharacterError("labelling does not cover T(Y)")
    out: dict[int, int] = {}
    frontier = []
    for v in range(sub.n_vertices):
        host = sub.origin[v]  # type: ignore[index]
        out[host] = fbar[v]
        frontier.append(host)
    for u in frontier:
        for w in T.neighbors(u):
            if w not in out:
                out[w] = out[u]
                frontier.append(w)
    return out


def brute_force_parsimony_oracle(T: Tree, f, cap: int = 12) -> int:
    """Minimum mutation count over every labelling of the internal vertices.

    Internal labels range over the states used at the leaves.
    """
    f = as_character(f)
    _check_cover(T, f)
    internal = T.internal_vertices()
    states = sorted({f[x] for x in T.taxa})
    if len(internal) > cap or len(states) > cap:
        raise OracleCapError(f"{len(internal)} internal vertices / {len(states)} states exceed cap {cap}; use Fitch")
    if not internal:
        return sum(1 for u, v in T.edges if f[T.label(u)] != f[T.label(v)])
    pos = {v: i for i, v in enumerate(internal)}
    lab = np.empty((len(states) ** len(internal), T.n_vertices), dtype=np.int16)
    grid = np.array(list(product(states, repeat=len(internal))), dtype=np.int16)
    for v in range(T.n_vertices):
        if v in pos:
            lab[:, v] = grid[:, pos[v]]
        else:
            lab[:, v] = f[T.label(v)]
    us = np.array([u for u, _ in T.edges])
    vs = np.array([v for _, v in T.edges])
    return int((lab[:, us] != lab[:, vs]).sum(axis=1).min())


# ---------------------------------------------------------------------------
# batch scoring (many characters on one tree)
# ---------------------------------------------------------------------------

class BatchScorer:
    """Scores many characters on one tree at once.

    ``score(states)`` takes an integer array of shape (m, n_taxa) whose
    columns follow ``T.taxa`` and returns the m parsimony scores.
    """

    def __init__(self, T: Tree):
        self.T = T
        children, order = _rooted_children(T, default_root_edge(T))
        col = {T.leaf(x): i for i, x in enumerate(T.taxa)}
        self._leaves = [(v, col[v]) for v in order if v != ROOT and T.is_leaf(v)]
        self._steps = [(v, children[v]) for v in order if v == ROOT or not T.is_leaf(v)]

    def score(self, states: np.ndarray) -> np.ndarray:
        states = np.asarray(states)
        masks = np.left_shift(np.uint64(1), states.astype(np.uint64))
        sets = {v: masks[:, c] for v, c in self._leaves}
        total = np.zeros(states.shape[0], dtype=np.int32)
        for v, kids in self._steps:
            if len(kids) == 1:
                sets[v] = sets[kids[0]]
                continue
            a, b = sets[kids[0]], sets[kids[1]]
            inter = a & b
            empty = inter == 0
            total += empty
            sets[v] = np.where(empty, a | b, inter)
        return total
