"""
Lower bounds on the parsimony distance from leg-disjoint quartets.

Two pieces:

1. :func:`greedy_leg_disjoint` picks pairwise T1-leg-disjoint incompatible
   quartets together with a T1 edge set hitting the legs of *every*
   incompatible quartet (so its size bounds the TBR distance from above).
2. :func:`witness_character` turns the chosen quartets into an explicit
   two-state character.  It keeps a subset ``selected`` of at least a ninth
   of them, and the Fitch scores of the character differ by at least
   ceil(len(selected) / 3).

Colours are 0 (red) and 1 (blue).  In the witness, ``beta`` counts T1-legs of
selected quartets whose endpoints differ, ``delta`` counts mutation edges of
the colouring of T2 restricted to the quartet taxa.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .exact import AnnotatedQuartet, incompatible_quartets, leg_mask
from .fitch import Character, fitch_extension, parsimonious_extension, parsimony_score
from .newick_io import CertificateDocument, CertificateQuartet, tree_hash
from .treecore import (QuartetTopology, Tree, TreeError, induced_subtree,
                       pendants_of, restrict, sides_of)

log = logging.getLogger(__name__)

RED, BLUE = 0, 1


class WitnessError(RuntimeError):
    """A construction step failed its own bookkeeping check."""


def lg(x: float) -> float:
    return max(1.0, math.log2(x)) if x > 0 else 1.0


def _bits(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def _median(T: Tree, x: int, y: int, z: int) -> int:
    pm = T.path_vertex_mask
    m = pm(x, y) & pm(x, z) & pm(y, z)
    return m.bit_length() - 1


# ---------------------------------------------------------------------------
# quartet geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuartetGeometry:
    top: QuartetTopology                 # ab|cd in T1
    leg_ab: tuple[int, ...]              # edge ids
    leg_cd: tuple[int, ...]
    joint_ab: int
    joint_cd: int
    backbone: tuple[int, ...]
    first_edges: dict[str, int]          # taxon x -> first edge from its joint towards x
    reach: dict[str, frozenset[str]]     # leaves reachable from x without its joint

    def side_size(self, pair: int) -> int:
        x, y = self.top[pair]
        return len(self.reach[x] | self.reach[y])


def _reach(T: Tree, start: int, blocked: int, cut: int) -> frozenset[str]:
    seen = {start}
    stack = [start]
    out = []
    while stack:
        u = stack.pop()
        if T.is_leaf(u):
            out.append(T.label(u))
        for w in T.neighbors(u):
            if w == blocked or w in seen or cut >> T.edge_id(u, w) & 1:
                continue
            seen.add(w)
            stack.append(w)
    return frozenset(out)


def quartet_geometry(T1: Tree, top: QuartetTopology, cut: int = 0) -> QuartetGeometry:
    """Legs, joints, backbone, pendant edges and reach sets of ``top`` in T1.

    ``cut`` is a bit mask of already chosen edge ids; it must not touch the legs.
    """
    (a, b), (c, d) = top
    va, vb, vc, vd = (T1.leaf(x) for x in (a, b, c, d))
    pe = T1.path_edge_mask
    if (pe(va, vb) | pe(vc, vd)) & cut:
        raise TreeError(f"quartet {top} is already hit")
    u_ab = _median(T1, va, vb, vc)
    u_cd = _median(T1, vc, vd, va)
    reach = {a: _reach(T1, va, u_ab, cut), b: _reach(T1, vb, u_ab, cut),
             c: _reach(T1, vc, u_cd, cut), d: _reach(T1, vd, u_cd, cut)}
    first = {a: _first_edge(T1, u_ab, a), b: _first_edge(T1, u_ab, b),
             c: _first_edge(T1, u_cd, c), d: _first_edge(T1, u_cd, d)}
    return QuartetGeometry(top, tuple(_bits(pe(va, vb))), tuple(_bits(pe(vc, vd))), u_ab, u_cd,
                           tuple(_bits(pe(u_ab, u_cd))), first, reach)


def _first_edge(T1: Tree, joint: int, x: str) -> int:
    """Id of the first edge on the path from ``joint`` to leaf x."""
    path = T1.path(joint, T1.leaf(x))
    return T1.edge_id(path[0], path[1])


def _forest_segments(T1: Tree, cut: int, c: str, d: str) -> list[list[int]]:
    """The c-d path of T1 split into the T1 paths behind the edges of the
    forest obtained from T1 - cut (suppressing degree-2 vertices, dropping
    leafless parts).  Each segment is a list of edge ids ordered from c."""
    path = T1.path(T1.leaf(c), T1.leaf(d))
    segs: list[list[int]] = [[]]
    for i in range(len(path) - 1):
        u, w = path[i], path[i + 1]
        segs[-1].append(T1.edge_id(u, w))
        if i + 1 < len(path) - 1:
            # w survives iff its off-path direction still carries a leaf
            prev, nxt = path[i], path[i + 2]
            off = [z for z in T1.neighbors(w) if z not in (prev, nxt)]
            alive = any(not cut >> T1.edge_id(w, z) & 1 and _reach(T1, z, w, cut) for z in off)
            if alive:
                segs.append([])
    return segs


# ---------------------------------------------------------------------------
# greedy selection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GreedyIteration:
    quartet: AnnotatedQuartet
    oriented: QuartetTopology            # ab|cd, the ab side has the smaller reach
    reach_size: int
    path_length: int                     # forest edges on the c-d path
    added: tuple[int, ...]               # T1 edge ids


@dataclass
class GreedyResult:
    quartets: list[AnnotatedQuartet]
    edges: list[tuple[int, int]]         # hitting set as T1 vertex pairs
    edge_mask: int
    trace: list[GreedyIteration]
    all_quartets: list[AnnotatedQuartet]
    n: int

    @property
    def hitting_set_size(self) -> int:
        return len(self.edges)


def greedy_leg_disjoint(T1: Tree, T2: Tree,
                        quartets: list[AnnotatedQuartet] | None = None) -> GreedyResult:
    Q = incompatible_quartets(T1, T2) if quartets is None else list(quartets)
    legs = [leg_mask(T1, q.t1) for q in Q]
    cut = 0
    chosen: list[AnnotatedQuartet] = []
    trace: list[GreedyIteration] = []
    while True:
        unhit = [i for i in range(len(Q)) if not legs[i] & cut]
        if not unhit:
            break
        reach_cache: dict[tuple[str, int], frozenset[str]] = {}

        def reach(x: str, u: int) -> frozenset[str]:
            key = (x, u)
            if key not in reach_cache:
                reach_cache[key] = _reach(T1, T1.leaf(x), u, cut)
            return reach_cache[key]

        best = None
        for i in unhit:
            (a, b), (c, d) = Q[i].t1
            va, vb, vc, vd = (T1.leaf(x) for x in (a, b, c, d))
            u_ab = _median(T1, va, vb, vc)
            u_cd = _median(T1, vc, vd, va)
            s_ab = len(reach(a, u_ab) | reach(b, u_ab))
            s_cd = len(reach(c, u_cd) | reach(d, u_cd))
            if s_ab <= s_cd:
                top, size = QuartetTopology((a, b), (c, d)), s_ab
            else:
                top, size = QuartetTopology((c, d), (a, b)), s_cd
            if best is not None and size > best[0][0]:
                continue
            segs = _forest_segments(T1, cut, *top.right)
            key = (size, len(segs), Q[i].taxa)
            if best is None or key < best[0]:
                best = (key, i, top, segs)
        assert best is not None
        (size, plen, _), i, top, segs = best
        (a, b), (c, _) = top
        joint = _median(T1, T1.leaf(a), T1.leaf(b), T1.leaf(c))
        added = [_first_edge(T1, joint, a), _first_edge(T1, joint, b)]
        added += [s[0] for s in segs]
        for e in added:
            cut |= 1 << e
        chosen.append(Q[i])
        trace.append(GreedyIteration(Q[i], top, size, plen, tuple(added)))
    edges = [T1.edges[e] for e in _bits(cut)]
    return GreedyResult(chosen, edges, cut, trace, Q, T1.n_leaves)


def check_greedy(T1: Tree, res: GreedyResult, d_tbr: int | None = None) -> list[str]:
    """Violations of the guarantees of the greedy selection (empty if none)."""
    bad = []
    legs = [leg_mask(T1, q.t1) for q in res.quartets]
    for i in range(len(legs)):
        for j in range(i + 1, len(legs)):
            if legs[i] & legs[j]:
                bad.append(f"legs of {res.quartets[i].taxa} and {res.quartets[j].taxa} overlap")
    for q in res.all_quartets:
        if not leg_mask(T1, q.t1) & res.edge_mask:
            bad.append(f"{q.taxa} not hit")
    L = lg(res.n)
    for it in res.trace:
        if it.path_length > 2 * L:
            bad.append(f"path of length {it.path_length} > 2 lg n at {it.quartet.taxa}")
    if res.hitting_set_size > len(res.quartets) * 2 * (L + 1):
        bad.append(f"hitting set {res.hitting_set_size} > {len(res.quartets)} quartets * 2(lg n + 1)")
    if d_tbr is not None and len(res.quartets) < d_tbr / (2 * (L + 1)):
        bad.append(f"{len(res.quartets)} quartets < d_TBR/(2(lg n + 1)) with d_TBR={d_tbr}")
    return bad


# ---------------------------------------------------------------------------
# witness character
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessStep:
    case: str
    quartets: tuple[tuple[str, ...], ...]
    gain: int


@dataclass
class Witness:
    """Colouring of T2 on the quartet taxa; the Fitch scores of its leaf
    character on the two restricted trees differ by at least beta - delta."""

    tree: Tree                           # T2 restricted to all quartet taxa
    selected: list[AnnotatedQuartet]
    colouring: dict[int, int]            # vertex of ``tree`` -> colour, on the core
    beta: int = 0
    delta: int = 0
    n_input: int = 0
    steps: list[WitnessStep] = field(default_factory=list)

    @property
    def bound(self) -> int:
        return self.beta - self.delta

    @property
    def taxa(self) -> list[str]:
        return sorted(x for q in self.selected for x in q.taxa)

    @property
    def character(self) -> dict[str, int]:
        T = self.tree
        return {x: self.colouring[T.leaf(x)] for x in self.taxa}

    @property
    def core_mask(self) -> int:
        m = 0
        for v in self.colouring:
            m |= 1 << v
        return m


def _beta(selected: Iterable[AnnotatedQuartet], colour_of) -> int:
    total = 0
    for q in selected:
        for x, y in q.t1:
            total += colour_of(x) != colour_of(y)
    return total


def _delta(T: Tree, colouring: dict[int, int]) -> int:
    return sum(1 for u, v in T.edges if u in colouring and v in colouring and colouring[u] != colouring[v])


def _recount(w: Witness) -> tuple[int, int]:
    T = w.tree
    beta = _beta(w.selected, lambda x: w.colouring[T.leaf(x)])
    return beta, _delta(T, w.colouring)


def _check_leg_disjoint(T1: Tree, Q: Sequence[AnnotatedQuartet]) -> None:
    used = 0
    for q in Q:
        m = leg_mask(T1, q.t1)
        if m & used:
            raise ValueError(f"quartet {q.taxa} is not leg-disjoint from the others")
        used |= m


def _extended(w: Witness, taxa: Iterable[str]) -> dict[int, int]:
    """Parsimonious extension of the colouring to the core plus ``taxa``:
    each new vertex takes the colour of its nearest core vertex."""
    T = w.tree
    col = dict(w.colouring)
    for x in taxa:
        v = T.leaf(x)
        if v in col:
            continue
        # walk towards the core
        path = [v]
        seen = {v}
        frontier = [(v, [v])]
        hit = None
        while hit is None:
            nxt = []
            for u, p in frontier:
                for z in T.neighbors(u):
                    if z in seen:
                        continue
                    if z in col:
                        hit = (z, p)
                        break
                    seen.add(z)
                    nxt.append((z, p + [z]))
                if hit:
                    break
            frontier = nxt
        z, path = hit
        for u in path:
            col[u] = col[z]
    return col


def _nearest_core_colour(w: Witness) -> dict[int, int]:
    """Colour every vertex with the colour of its nearest core vertex."""
    T = w.tree
    col = dict(w.colouring)
    queue = sorted(col)
    for u in queue:
        for z in T.neighbors(u):
            if z not in col:
                col[z] = col[u]
                queue.append(z)
    return col


def phase1_colouring(T1: Tree, T2: Tree, Q: Sequence[AnnotatedQuartet]) -> Witness:
    """Greedy fully-T2-disjoint subset coloured with beta = 2k, delta = k."""
    Q = sorted(Q, key=lambda q: q.taxa)
    _check_leg_disjoint(T1, Q)
    Xp = sorted(x for q in Q for x in q.taxa)
    if not Q:
        return Witness(T2, [], {}, n_input=0)
    T = restrict(T2, Xp)
    sel: list[AnnotatedQuartet] = []
    used = 0
    for q in Q:
        m = T.steiner_vertices(q.taxa)
        if m & used == 0:
            sel.append(q)
            used |= m
    core = T.steiner_vertices([x for q in sel for x in q.taxa])
    cut = set()
    for q in sel:
        (a, c), (b, d) = q.t2
        va, vb, vc = T.leaf(a), T.leaf(b), T.leaf(c)
        j1 = _median(T, va, vc, vb)
        j2 = _median(T, vb, T.leaf(d), va)
        path = T.path(j1, j2)
        cut.add(T.edge_id(path[0], path[1]))
    root = min(_bits(core))
    col = {root: RED}
    stack = [root]
    while stack:
        u = stack.pop()
        for z in T.neighbors(u):
            if core >> z & 1 and z not in col:
                col[z] = col[u] ^ (T.edge_id(u, z) in cut)
                stack.append(z)
    w = Witness(T, sel, col, n_input=len(Q))
    w.beta, w.delta = _recount(w)
    if w.beta != 2 * len(sel) or w.delta != len(sel):
        raise WitnessError(f"initial colouring produced beta={w.beta}, delta={w.delta} for {len(sel)} quartets")
    w.steps.append(WitnessStep("initial", tuple(q.taxa for q in sel), len(sel)))
    return w


def _commit(w: Witness, case: str, added: list[AnnotatedQuartet], col: dict[int, int]) -> None:
    before = w.beta - w.delta
    w.selected = sorted(w.selected + added, key=lambda q: q.taxa)
    w.colouring = col
    w.beta, w.delta = _recount(w)
    gain = w.beta - w.delta - before
    if gain < 1 or len(added) > 3:
        raise WitnessError(f"{case} added {len(added)} quartet(s) with gain {gain}")
    w.steps.append(WitnessStep(case, tuple(q.taxa for q in added), gain))


def _good_extension(w: Witness, U: list[AnnotatedQuartet]):
    near = _nearest_core_colour(w)
    T = w.tree
    for q in U:
        if _beta([q], lambda x: near[T.leaf(x)]) > 0:
            return "good-extension", [q], _extended(w, q.taxa)
    return None


def _pendant_index(w: Witness) -> tuple[list, dict[str, int]]:
    pend = pendants_of(w.tree, w.core_mask)
    where = {x: i for i, p in enumerate(pend) for x in p.taxa}
    return pend, where


def _shared_pendant(w: Witness, U: list[AnnotatedQuartet]):
    pend, where = _pendant_index(w)
    for q in U:
        groups: dict[int, list[str]] = {}
        for x in q.taxa:
            groups.setdefault(where[x], []).append(x)
        if max(len(g) for g in groups.values()) < 2:
            continue
        for pair in q.t2:
            if where[pair[0]] == where[pair[1]]:
                break
        else:
            raise WitnessError(f"{q.taxa}: no T2 pair inside a shared pendant subtree")
        col = _extended(w, q.taxa)
        T = w.tree
        a, c = (T.leaf(x) for x in pair)
        flip = 1 - col[a]
        for v in T.path(a, c):
            col[v] = flip
        return "shared-pendant", [q], col
    return None


def _pendant_pair(w: Witness, U: list[AnnotatedQuartet]):
    pend, where = _pendant_index(w)
    for i, p in enumerate(pend):
        hits = [q for q in U if any(where[x] == i for x in q.taxa)]
        if len(hits) < 2:
            continue
        q1, q2 = hits[:2]
        col = _extended(w, q1.taxa + q2.taxa)
        flip = 1 - col[p.attachment]
        for v in p.vertices:
            if v in col:
                col[v] = flip
        return "pendant-pair", [q1, q2], col
    return None


def _normalize_sides(w: Witness) -> None:
    """Make every side interior monochromatic without increasing delta."""
    T = w.tree
    col = dict(w.colouring)
    for side in sides_of(T, w.core_mask):
        inner = side[1:-1]
        if not inner:
            continue
        e0, e1 = col[side[0]], col[side[-1]]
        if e0 == e1:
            target = e0
        else:
            ones = sum(col[v] for v in inner)
            if 2 * ones != len(inner):
                target = int(2 * ones > len(inner))
            else:
                target = e0  # side[0] is the smaller endpoint
        for v in inner:
            col[v] = target
    before = w.delta
    w.colouring = col
    w.beta, w.delta = _recount(w)
    if w.delta > before:
        raise WitnessError("side normalisation increased delta")


def _side_layout(w: Witness):
    """For each side: its interior and the U-leaf hanging off each interior
    vertex; plus taxon -> (side index, position)."""
    T = w.tree
    mask = w.core_mask
    sides = sides_of(T, mask)
    pos: dict[str, tuple[int, int]] = {}
    for si, side in enumerate(sides):
        for k, v in enumerate(side[1:-1]):
            for z in T.neighbors(v):
                if not mask >> z & 1:
                    if not T.is_leaf(z):
                        return None
                    pos[T.label(z)] = (si, k)
    return sides, pos


def _split_leg(q: AnnotatedQuartet, pos, si: int):
    """A T1 leg of q with exactly one endpoint adjacent to side si, as
    (on-side taxon, off-side taxon), or None."""
    for x, y in q.t1:
        on_x, on_y = pos[x][0] == si, pos[y][0] == si
        if on_x != on_y:
            return (x, y) if on_x else (y, x)
    return None


def _paint_interval(col, side, lo: int, hi: int, colour: int) -> None:
    for v in side[1:-1][lo:hi + 1]:
        col[v] = colour


def _side_steps(w: Witness, U: list[AnnotatedQuartet]):
    layout = _side_layout(w)
    if layout is None:
        log.warning("pendant subtree with more than one leaf on a side; skipping the side steps")
        return None
    sides, pos = layout
    T = w.tree
    on_side = {si: [q for q in U if all(pos[x][0] == si for x in q.taxa)] for si in range(len(sides))}
    split = {si: [q for q in U if _split_leg(q, pos, si)] for si in range(len(sides))}

    # three quartets with a leg split across this side
    for si, side in enumerate(sides):
        if len(split[si]) < 3:
            continue
        group = split[si][:3]
        col = _extended(w, [x for q in group for x in q.taxa])
        flip = 1 - col[side[1]]
        _paint_interval(col, side, 0, len(side) - 3, flip)
        for q in group:
            for x in q.taxa:
                if pos[x][0] == si:
                    col[T.leaf(x)] = flip
        return "side-three-legs", group, col

    # a whole quartet plus a split leg on the same side
    for si, side in enumerate(sides):
        if not on_side[si] or not split[si]:
            continue
        q1 = on_side[si][0]
        q2 = split[si][0]
        a2 = _split_leg(q2, pos, si)[0]
        p = {x: pos[x][1] for x in q1.taxa}
        pairs = sorted(q1.t2, key=lambda pr: min(p[x] for x in pr))
        first, last = pairs
        if pos[a2][1] > max(p[x] for x in first):
            cutoff, after = max(p[x] for x in first), (lambda k: k > cutoff)
        else:
            cutoff, after = min(p[x] for x in last), (lambda k: k < cutoff)
        col = _extended(w, q1.taxa + q2.taxa)
        flip = 1 - col[side[1]]
        chosen = [x for q in (q1, q2) for x in q.taxa if pos[x][0] == si and after(pos[x][1])]
        ks = [pos[x][1] for x in chosen]
        _paint_interval(col, side, min(ks), max(ks), flip)
        for x in chosen:
            col[T.leaf(x)] = flip
        return "side-quartet-leg", [q1, q2], col

    # two whole quartets on the same side
    for si, side in enumerate(sides):
        if len(on_side[si]) < 2:
            continue
        qa, qb = on_side[si][:2]

        def layout_of(q):
            p = {x: pos[x][1] for x in q.taxa}
            F, L = sorted(q.t2, key=lambda pr: min(p[x] for x in pr))
            F = tuple(sorted(F, key=p.get))     # (outer, inner)
            L = tuple(sorted(L, key=p.get))     # (inner, outer)
            return p, F, L

        pa, Fa, La = layout_of(qa)
        pb, Fb, Lb = layout_of(qb)
        p = {**pa, **pb}
        if max(p[Fa[1]], p[Fb[1]]) < min(p[La[0]], p[Lb[0]]):
            blue = list(Fa + Fb)
        else:
            if p[Fa[1]] > p[Fb[1]]:
                Fa, La, Fb, Lb = Fb, Lb, Fa, La
            # now inner positions satisfy Fa < La < Fb < Lb
            if p[Fb[0]] < p[La[0]]:
                blue = list(La) + [Fb[1]] + list(Lb)
            elif p[La[1]] > p[Fb[1]]:
                blue = list(Fa) + [La[0]] + list(Fb)
            else:
                blue = list(La) + list(Fb)
        col = _extended(w, qa.taxa + qb.taxa)
        flip = 1 - col[side[1]]
        ks = [p[x] for x in blue]
        _paint_interval(col, side, min(ks), max(ks), flip)
        for x in blue:
            col[T.leaf(x)] = flip
        return "side-two-quartets", [qa, qb], col
    return None


def phase2_extend(T1: Tree, T2: Tree, w: Witness, U: Sequence[AnnotatedQuartet]) -> Witness:
    """Move quartets from U into the selection until no step applies."""
    U = sorted(U, key=lambda q: q.taxa)
    while U:
        found = _good_extension(w, U) or _shared_pendant(w, U) or _pendant_pair(w, U)
        if found is None:
            _normalize_sides(w)
            found = _good_extension(w, U) or _side_steps(w, U)
        if found is None:
            break
        case, added, col = found
        _commit(w, case, added, col)
        taken = {q.taxa for q in added}
        U = [q for q in U if q.taxa not in taken]
    return w


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def witness_character(T1: Tree, T2: Tree, Q: Sequence[AnnotatedQuartet]) -> Witness:
    """Build a witness whose bound beta - delta is at least a third of the
    selected quartets, with at least a ninth of Q selected; the bound is
    re-checked by Fitch on the restricted trees."""
    Q = sorted(Q, key=lambda q: q.taxa)
    w = phase1_colouring(T1, T2, Q)
    chosen = {q.taxa for q in w.selected}
    w = phase2_extend(T1, T2, w, [q for q in Q if q.taxa not in chosen])
    k = len(w.selected)
    if w.bound < _ceil_div(k, 3) or 9 * k < len(Q):
        raise WitnessError(f"final witness: bound {w.bound}, {k} of {len(Q)} quartets selected")
    if k:
        f = w.character
        gap = parsimony_score(restrict(T1, f), f) - parsimony_score(restrict(T2, f), f)
        if gap < w.bound:
            raise WitnessError(f"Fitch gap {gap} below bound {w.bound}")
    return w


def lift_character(T1: Tree, T2: Tree, f: dict[str, int]) -> dict[str, int]:
    """Extend a character on Y to all taxa of T1 without new mutations in T1.

    The gap l(T2) - l(T1) of the result is at least that of f on the
    induced subtrees.
    """
    Y = sorted(f)
    if not set(Y) <= set(T1.taxa) or T1.taxa != T2.taxa:
        raise ValueError("character domain is not a subset of the taxa")
    if not Y:
        return {x: 0 for x in T1.taxa}
    sub = induced_subtree(T1, Y)
    ext = fitch_extension(sub, Character({x: f[x] for x in Y}))
    full = parsimonious_extension(T1, Y, ext)
    return {x: full[T1.leaf(x)] for x in T1.taxa}


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

@dataclass
class Orientation:
    name: str
    greedy: GreedyResult
    witness: Witness


def _orient(name: str, A: Tree, B: Tree) -> Orientation:
    g = greedy_leg_disjoint(A, B)
    return Orientation(name, g, witness_character(A, B, g.quartets))


def certified_lower_bound(T1: Tree, T2: Tree, threads: int = 1,
                          lift: bool = True) -> CertificateDocument:
    """Certificate for the better of the two orientations.

    ``tbr_upper_bound`` is the smaller hitting set found, an upper bound on
    the TBR distance.
    """
    if T1.taxa != T2.taxa:
        raise TreeError("trees have different leaf sets")
    jobs = (("first", T1, T2), ("second", T2, T1))
    if threads > 1:
        with ThreadPoolExecutor(2) as ex:
            runs = list(ex.map(lambda j: _orient(*j), jobs))
    else:
        runs = [_orient(*j) for j in jobs]
    best = max(runs, key=lambda r: (r.witness.bound, r.name == "first"))
    A, B = (T1, T2) if best.name == "first" else (T2, T1)
    w = best.witness
    char = w.character
    lifted = lift_character(B, A, char) if lift and char else None
    return CertificateDocument(
        tree_hashes=(tree_hash(T1), tree_hash(T2)),
        orientation=best.name,
        quartets=[CertificateQuartet(q.taxa, str(q.t1), str(q.t2)) for q in w.selected],
        character=char,
        beta=w.beta,
        delta=w.delta,
        claimed_bound=w.bound,
        tbr_upper_bound=min(r.greedy.hitting_set_size for r in runs),
        greedy_quartet_count=len(best.greedy.quartets),
        lifted_character=lifted,
        metadata={"steps": [s.case for s in w.steps],
                  "bounds": {r.name: r.witness.bound for r in runs},
                  "incompatible_quartets": len(runs[0].greedy.all_quartets)},
    )
