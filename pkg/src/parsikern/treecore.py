"""
Unrooted leaf-labelled trees with internal degree at most three.

A :class:`Tree` is immutable.  Vertices are dense integers ``0..n_vertices-1``;
leaves carry a taxon label, internal vertices carry none.  Degree-2 internal
vertices are allowed (induced subtrees have them); ``is_phylogenetic`` tells
whether a tree is free of them.

All-pairs path masks are computed lazily and cached on the instance, so
repeated quartet and leg queries on the same tree are cheap bit operations.
"""

from __future__ import annotations

from functools import cached_property
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

NEWICK_DELIMITERS = set("(),;:[]'")


class TreeError(ValueError):
    """Raised for malformed trees or invalid tree operations."""


class QuartetTopology(NamedTuple):
    """Resolved quartet ``left | right``; both pairs sorted, ``left[0]`` smallest."""

    left: tuple[str, str]
    right: tuple[str, str]

    @classmethod
    def of(cls, p: Iterable[str], r: Iterable[str]) -> "QuartetTopology":
        p = tuple(sorted(p))
        r = tuple(sorted(r))
        if r < p:
            p, r = r, p
        return cls(p, r)  # type: ignore[arg-type]

    @property
    def taxa(self) -> tuple[str, str, str, str]:
        return tuple(sorted(self.left + self.right))  # type: ignore[return-value]

    def pairs(self) -> tuple[tuple[str, str], tuple[str, str]]:
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"{','.join(self.left)}|{','.join(self.right)}"

    @classmethod
    def parse(cls, text: str) -> "QuartetTopology":
        try:
            lhs, rhs = text.split("|")
            p, r = lhs.split(","), rhs.split(",")
        except ValueError:
            raise TreeError(f"malformed quartet topology {text!r}") from None
        if len(p) != 2 or len(r) != 2 or len(set(p + r)) != 4:
            raise TreeError(f"malformed quartet topology {text!r}")
        return cls.of(p, r)


class Chain(NamedTuple):
    """A chain of leaves, canonically oriented (smaller end taxon first)."""

    leaves: tuple[str, ...]
    pendant_first: bool
    pendant_last: bool

    def __len__(self) -> int:  # type: ignore[override]
        return len(self.leaves)

    @property
    def k(self) -> int:
        return len(self.leaves)


class Tree:
    """
    Immutable unrooted tree.

    Parameters
    ----------
    n_vertices : int
    edges : iterable of (u, v) pairs over ``range(n_vertices)``
    labels : mapping vertex -> taxon name, exactly the degree-<=1 vertices
    origin : optional tuple mapping each vertex to a vertex id of a host tree
        (set by :func:`induced_subtree`)
    """

    def __init__(self, n_vertices: int, edges: Iterable[tuple[int, int]],
                 labels: dict[int, str], origin: Sequence[int] | None = None):
        adj: list[list[int]] = [[] for _ in range(n_vertices)]
        edge_list = []
        for u, v in edges:
            if u == v or not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise TreeError(f"bad edge ({u}, {v})")
            adj[u].append(v)
            adj[v].append(u)
            edge_list.append((u, v) if u < v else (v, u))
        edge_list.sort()
        if len(set(edge_list)) != len(edge_list):
            raise TreeError("duplicate edge")
        if n_vertices == 0:
            raise TreeError("empty tree")
        if len(edge_list) != n_vertices - 1:
            raise TreeError("a tree on V vertices needs V-1 edges")
        self._adj = tuple(tuple(sorted(a)) for a in adj)
        self._edges = tuple(edge_list)
        self._labels = dict(labels)
        self._leaf = {}
        for v, name in self._labels.items():
            if not name or NEWICK_DELIMITERS & set(name) or name != name.strip():
                raise TreeError(f"invalid taxon name {name!r}")
            if name in self._leaf:
                raise TreeError(f"duplicate taxon {name!r}")
            self._leaf[name] = v
        self.origin = tuple(origin) if origin is not None else None
        self._validate()

    def _validate(self) -> None:
        n = self.n_vertices
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in self._adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != n:
            raise TreeError("tree is not connected")
        for v in range(n):
            d = len(self._adj[v])
            if d > 3:
                raise TreeError(f"vertex {v} has degree {d} > 3")
            if (d <= 1) != (v in self._labels):
                raise TreeError(f"vertex {v}: leaves and only leaves carry labels")

    # -- basic accessors --------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self._adj)

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self._edges

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def is_leaf(self, v: int) -> bool:
        return v in self._labels

    def label(self, v: int) -> str | None:
        return self._labels.get(v)

    @property
    def labels(self) -> dict[int, str]:
        return dict(self._labels)

    def leaf(self, taxon: str) -> int:
        try:
            return self._leaf[taxon]
        except KeyError:
            raise TreeError(f"unknown taxon {taxon!r}") from None

    @cached_property
    def taxa(self) -> tuple[str, ...]:
        """Taxon names in lexicographic order."""
        return tuple(sorted(self._leaf))

    @property
    def n_leaves(self) -> int:
        return len(self._leaf)

    @cached_property
    def is_phylogenetic(self) -> bool:
        return all(len(a) != 2 for a in self._adj)

    def internal_vertices(self) -> list[int]:
        return [v for v in range(self.n_vertices) if v not in self._labels]

    def parent(self, taxon: str) -> int:
        """The unique neighbour of a leaf."""
        v = self.leaf(taxon)
        if not self._adj[v]:
            raise TreeError("single-vertex tree has no parent")
        return self._adj[v][0]

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self._edges)}

    def edge_id(self, u: int, v: int) -> int:
        return self.edge_index[(u, v) if u < v else (v, u)]

    # -- paths ------------------------------------------------------------

    def _bfs_parents(self, root: int) -> list[int]:
        par = [-1] * self.n_vertices
        par[root] = root
        order = [root]
        for u in order:
            for w in self._adj[u]:
                if par[w] < 0:
                    par[w] = u
                    order.append(w)
        return par

    @cached_property
    def _path_masks(self) -> tuple[list[list[int]], list[list[int]]]:
        n = self.n_vertices
        vmask = [[0] * n for _ in range(n)]
        emask = [[0] * n for _ in range(n)]
        eidx = self.edge_index
        for s in range(n):
            vm, em = vmask[s], emask[s]
            vm[s] = 1 << s
            order = [s]
            for u in order:
                for w in self._adj[u]:
                    if w != s and vm[w] == 0:
                        vm[w] = vm[u] | (1 << w)
                        em[w] = em[u] | (1 << eidx[(u, w) if u < w else (w, u)])
                        order.append(w)
        return vmask, emask

    def path_vertex_mask(self, u: int, v: int) -> int:
        """Bit mask of the vertices on the u-v path."""
        return self._path_masks[0][u][v]

    def path_edge_mask(self, u: int, v: int) -> int:
        """Bit mask (over edge ids) of the edges on the u-v path."""
        return self._path_masks[1][u][v]

    def path(self, u: int, v: int) -> list[int]:
        """Vertices of the u-v path in order, u first."""
        par = self._bfs_parents(v)
        out = [u]
        while out[-1] != v:
            out.append(par[out[-1]])
        return out

    def taxon_path_edges(self, a: str, b: str) -> int:
        return self.path_edge_mask(self.leaf(a), self.leaf(b))

    def components_without(self, removed_edges: Iterable[int]) -> list[list[int]]:
        """Vertex sets of the components after deleting the given edge ids."""
        cut = set(removed_edges)
        comp = [-1] * self.n_vertices
        out = []
        for s in range(self.n_vertices):
            if comp[s] >= 0:
                continue
            comp[s] = len(out)
            members = [s]
            for u in members:
                for w in self._adj[u]:
                    if comp[w] < 0 and self.edge_id(u, w) not in cut:
                        comp[w] = len(out)
                        members.append(w)
            out.append(sorted(members))
        return out

    def steiner_vertices(self, taxa: Iterable[str]) -> int:
        """Vertex mask of the smallest subtree containing the given leaves."""
        vs = [self.leaf(x) for x in taxa]
        if not vs:
            raise TreeError("empty taxon set")
        mask = 0
        for v in vs:
            mask |= self.path_vertex_mask(vs[0], v)
        return mask

    def steiner_edges(self, taxa: Iterable[str]) -> int:
        vs = [self.leaf(x) for x in taxa]
        mask = 0
        for v in vs[1:]:
            mask |= self.path_edge_mask(vs[0], v)
        return mask

    # -- misc -------------------------------------------------------------

    def __repr__(self) -> str:
        from .newick_io import write_newick
        return f"Tree({write_newick(self)!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tree):
            return NotImplemented
        return canonical_form(self) == canonical_form(other)

    def __hash__(self) -> int:
        return hash(canonical_form(self))


# ---------------------------------------------------------------------------
# construction helpers
# ---------------------------------------------------------------------------

def build_tree(edges: Iterable[tuple[object, object]], labels: dict[object, str],
               origin: dict[object, int] | None = None) -> Tree:
    """Build a :class:`Tree` from arbitrary hashable vertex keys, renumbering densely.

    Keys are renumbered in sorted order of their ``repr`` unless they are ints,
    which keeps identifiers stable across runs.
    """
    edges = list(edges)
    keys = set(labels)
    for u, v in edges:
        keys.add(u)
        keys.add(v)
    ordered = sorted(keys, key=lambda k: (0, k) if isinstance(k, int) else (1, repr(k)))
    idx = {k: i for i, k in enumerate(ordered)}
    org = [origin[k] for k in ordered] if origin is not None else None
    return Tree(len(ordered), [(idx[u], idx[v]) for u, v in edges],
                {idx[k]: name for k, name in labels.items()}, org)


def _subtree_from_mask(T: Tree, mask: int) -> Tree:
    verts = [v for v in range(T.n_vertices) if mask >> v & 1]
    inside = set(verts)
    edges = [(u, v) for (u, v) in T.edges if u in inside and v in inside]
    labels = {}
    for v in verts:
        deg = sum(1 for w in T.neighbors(v) if w in inside)
        if deg <= 1:
            name = T.label(v)
            if name is None:
                raise TreeError("induced subtree has an unlabelled leaf")
            labels[v] = name
    return build_tree(edges, labels, {v: v for v in verts})


def induced_subtree(T: Tree, Y: Iterable[str]) -> Tree:
    """T(Y): the smallest subtree of T containing the leaves Y.

    The result may contain degree-2 vertices.  ``result.origin`` maps each of
    its vertices back to the vertex of ``T`` it came from.
    """
    Y = sorted(set(Y))
    if not Y:
        raise TreeError("Y must be non-empty")
    missing = [y for y in Y if y not in T._leaf]
    if missing:
        raise TreeError(f"taxa not in tree: {missing}")
    return _subtree_from_mask(T, T.steiner_vertices(Y))


def suppress_degree_two(T: Tree) -> Tree:
    """Suppress every degree-2 vertex (label-free) of T."""
    if T.is_phylogenetic:
        return T
    adj = {v: set(T.neighbors(v)) for v in range(T.n_vertices)}
    for v in range(T.n_vertices):
        if len(adj[v]) == 2 and not T.is_leaf(v):
            a, b = adj.pop(v)
            adj[a].discard(v)
            adj[b].discard(v)
            adj[a].add(b)
            adj[b].add(a)
    edges = {(u, w) for u in adj for w in adj[u] if u < w}
    labels = {v: T.label(v) for v in adj if T.is_leaf(v)}
    origin = None
    if T.origin is not None:
        origin = {v: T.origin[v] for v in adj}
    else:
        origin = {v: v for v in adj}
    return build_tree(sorted(edges), labels, origin)  # type: ignore[arg-type]


def restrict(T: Tree, Y: Iterable[str]) -> Tree:
    """T|_Y: the induced subtree with all degree-2 vertices suppressed."""
    return suppress_degree_two(induced_subtree(T, Y))


# ---------------------------------------------------------------------------
# canonical forms and isomorphism
# ---------------------------------------------------------------------------

def _rooted_form(T: Tree, v: int, parent: int) -> tuple:
    if T.is_leaf(v) and parent >= 0:
        return (T.label(v),)
    kids = [_rooted_form(T, w, v) for w in T.neighbors(v) if w != parent]
    if T.is_leaf(v):
        kids.append((T.label(v),))
    kids.sort(key=_min_taxon)
    return tuple(kids)


def _min_taxon(form: tuple) -> str:
    if len(form) == 1 and isinstance(form[0], str):
        return form[0]
    return min(_min_taxon(f) for f in form)


def canonical_root(T: Tree) -> tuple[int, int] | None:
    """The edge (p, w) at which canonical forms are rooted.

    ``p`` is the parent of the smallest taxon ``s``; ``w`` is the neighbour of
    ``p`` other than ``s`` whose side holds the largest minimum taxon.  For
    two leaves the edge is the single edge; for one leaf there is none.
    """
    if T.n_vertices == 1:
        return None
    s = T.leaf(T.taxa[0])
    p = T.neighbors(s)[0]
    if T.is_leaf(p):
        return (s, p)
    best, best_key = None, None
    for w in T.neighbors(p):
        if w == s:
            continue
        key = _min_taxon(_rooted_form(T, w, p))
        if best_key is None or key > best_key:
            best, best_key = w, key
    if best is None:  # p has degree 1 other than s cannot happen in a valid tree
        return (s, p)
    return (p, best)


def canonical_form(T: Tree) -> tuple:
    """Nested-tuple canonical form; equal iff trees are label-isomorphic."""
    root = canonical_root(T)
    if root is None:
        return ((T.taxa[0],),)
    p, w = root
    kids = [_rooted_form(T, p, w), _rooted_form(T, w, p)]
    kids.sort(key=_min_taxon)
    return tuple(kids)


def isomorphic(T1: Tree, T2: Tree) -> bool:
    return canonical_form(T1) == canonical_form(T2)


# ---------------------------------------------------------------------------
# quartets, cherries, chains
# ---------------------------------------------------------------------------

def _require_same_taxa(T1: Tree, T2: Tree) -> None:
    if T1.taxa != T2.taxa:
        raise TreeError("trees have different leaf sets")


def quartet_topology(T: Tree, q: Iterable[str]) -> QuartetTopology:
    """Resolution of the 4-taxon set q in T, by path disjointness."""
    q = sorted(set(q))
    if len(q) != 4:
        raise TreeError("a quartet has exactly four taxa")
    a, b, c, d = (T.leaf(x) for x in q)
    pm = T.path_vertex_mask
    found = []
    for (x, y), (z, w) in (((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c))):
        if pm(x, y) & pm(z, w) == 0:
            found.append(((x, y), (z, w)))
    if len(found) != 1:
        raise TreeError(f"quartet {q} does not resolve in this tree (internal error)")
    (x, y), (z, w) = found[0]
    return QuartetTopology.of((T.label(x), T.label(y)), (T.label(z), T.label(w)))


def cherries(T: Tree) -> set[tuple[str, str]]:
    byparent: dict[int, list[str]] = {}
    for x in T.taxa:
        if T.n_vertices > 1:
            byparent.setdefault(T.parent(x), []).append(x)
    out = set()
    for leaves in byparent.values():
        out.update(combinations(sorted(leaves), 2))
    if T.n_vertices == 2:
        out.add(tuple(T.taxa))  # type: ignore[arg-type]
    return out


def common_cherries(T1: Tree, T2: Tree) -> list[tuple[str, str]]:
    """Unordered taxon pairs that share a parent in both trees, sorted."""
    _require_same_taxa(T1, T2)
    return sorted(cherries(T1) & cherries(T2))


def _chain_ok(T: Tree, seq: Sequence[str]) -> bool:
    """Whether seq is a chain of T: parents form a path, repeats only at the ends."""
    k = len(seq)
    if k < 2 or T.n_vertices <= 2:
        return False
    ps = [T.parent(x) for x in seq]
    distinct = [ps[0]]
    for i in range(1, k):
        if ps[i] == ps[i - 1]:
            if i != 1 and i != k - 1:
                return False
            continue
        if ps[i] not in T.neighbors(ps[i - 1]):
            return False
        distinct.append(ps[i])
    return len(set(distinct)) == len(distinct)


def _is_pendant(T: Tree, seq: Sequence[str]) -> tuple[bool, bool]:
    ps = [T.parent(x) for x in seq]
    return ps[0] == ps[1], ps[-1] == ps[-2]


def _chain_step_candidates(T: Tree, x: str) -> set[str]:
    p = T.parent(x)
    near = {p, *T.neighbors(p)}
    out = set()
    for w in near:
        for y in T.neighbors(w) if not T.is_leaf(w) else ():
            if T.is_leaf(y) and y != T.leaf(x):
                out.add(T.label(y))
    return out


def _canonical_chain(seq: tuple[str, ...], ok) -> tuple[str, ...]:
    # The two leaves at a pendant end share a parent in both trees, so their
    # order is immaterial; pick the smallest variant among swaps and reversal.
    variants = {seq, seq[::-1]}
    for s in list(variants):
        if len(s) >= 3:
            a = (s[1], s[0]) + s[2:]
            b = s[:-2] + (s[-1], s[-2])
            for v in (a, b, (s[1], s[0]) + s[2:-2] + (s[-1], s[-2]) if len(s) >= 4 else a):
                if ok(list(v)):
                    variants.add(v)
    return min(variants)


def common_chains(T1: Tree, T2: Tree) -> list[Chain]:
    """Maximal common chains with k >= 2, canonically oriented and deduplicated."""
    _require_same_taxa(T1, T2)
    if T1.n_leaves < 3:
        return []

    def ok(seq):
        return _chain_ok(T1, seq) and _chain_ok(T2, seq)

    def extensions(seq):
        cand = _chain_step_candidates(T1, seq[-1]) & _chain_step_candidates(T2, seq[-1])
        return sorted(y for y in cand if y not in seq and ok(seq + [y]))

    found: set[tuple[str, ...]] = set()
    for x in T1.taxa:
        stack = [[x]]
        while stack:
            seq = stack.pop()
            nxt = extensions(seq)
            if nxt:
                stack.extend(seq + [y] for y in nxt)
                continue
            if len(seq) < 2:
                continue
            rev = seq[::-1]
            if extensions(rev):
                continue  # extendable at the front; found from another start
            found.add(tuple(seq))
    out = {}
    for seq in found:
        canon = _canonical_chain(seq, ok)
        p1 = _is_pendant(T1, canon)
        p2 = _is_pendant(T2, canon)
        out[canon] = Chain(canon, p1[0] or p2[0], p1[1] or p2[1])
    return sorted(out.values(), key=lambda c: (-c.k, c.leaves))


# ---------------------------------------------------------------------------
# sides and pendant subtrees
# ---------------------------------------------------------------------------

class Pendant(NamedTuple):
    root: int            # vertex of the pendant subtree adjacent to T(Xp)
    attachment: int      # vertex of T(Xp) it hangs from
    vertices: tuple[int, ...]
    taxa: tuple[str, ...]


def sides_of(T: Tree, core_mask: int) -> list[tuple[int, ...]]:
    """Maximal paths of the subtree given by ``core_mask`` whose internal
    vertices have degree 2 within it.  Each side is oriented with its smaller
    endpoint first; sides are sorted."""
    inside = [v for v in range(T.n_vertices) if core_mask >> v & 1]
    deg = {v: sum(1 for w in T.neighbors(v) if core_mask >> w & 1) for v in inside}
    if len(inside) < 2:
        return []
    sides = set()
    anchors = [v for v in inside if deg[v] != 2]
    for s in anchors:
        for w in T.neighbors(s):
            if not core_mask >> w & 1:
                continue
            path = [s, w]
            while deg[path[-1]] == 2:
                nxt = [z for z in T.neighbors(path[-1]) if core_mask >> z & 1 and z != path[-2]]
                path.append(nxt[0])
            if path[0] > path[-1]:
                path.reverse()
            sides.add(tuple(path))
    return sorted(sides)


def pendants_of(T: Tree, core_mask: int) -> list[Pendant]:
    out = []
    for s in range(T.n_vertices):
        if not core_mask >> s & 1:
            continue
        for r in T.neighbors(s):
            if core_mask >> r & 1:
                continue
            verts = [r]
            seen = {s, r}
            for u in verts:
                for w in T.neighbors(u):
                    if w not in seen:
                        seen.add(w)
                        verts.append(w)
            taxa = tuple(sorted(T.label(v) for v in verts if T.is_leaf(v)))
            out.append(Pendant(r, s, tuple(sorted(verts)), taxa))
    return sorted(out, key=lambda p: (p.taxa, p.root))


def sides_and_pendants(T: Tree, Xp: Iterable[str]):
    """Sides of T(Xp) (as vertex paths in T) and pendant subtrees of T(Xp) in T."""
    Xp = sorted(set(Xp))
    if len(Xp) < 2:
        raise TreeError("need at least two taxa to define sides")
    mask = T.steiner_vertices(Xp)
    return sides_of(T, mask), pendants_of(T, mask)


# ---------------------------------------------------------------------------
# TBR
# ---------------------------------------------------------------------------

def tbr_move(T: Tree, cut_edge: tuple[int, int],
             reattach1: tuple[int, int] | None,
             reattach2: tuple[int, int] | None) -> Tree:
    """Tree bisection and reconnection.

    Deleting ``cut_edge = (u, v)`` splits T into T_u and T_v.  ``reattach1``
    is an edge of T inside T_u and ``reattach2`` one inside T_v; an edge
    incident to a suppressed endpoint (u or v) stands for the edge that
    suppression creates.  Use ``None`` for a component that is a single leaf.
    """
    u, v = cut_edge
    if (min(u, v), max(u, v)) not in T.edge_index:
        raise TreeError(f"{cut_edge} is not an edge")
    if not T.is_phylogenetic:
        raise TreeError("TBR is defined on phylogenetic trees")
    comp = T.components_without([T.edge_id(u, v)])
    side = {}
    for i, members in enumerate(comp):
        for w in members:
            side[w] = i
    adj = {w: set(T.neighbors(w)) for w in range(T.n_vertices)}
    adj[u].discard(v)
    adj[v].discard(u)

    def detach(end: int, edge):
        # Remove `end` by suppression (if internal) and return the endpoints
        # of the edge to subdivide, or None for a lone leaf.
        if T.is_leaf(end):
            if edge is not None:
                raise TreeError("a single-leaf component takes no reattachment edge")
            return None
        if edge is None:
            raise TreeError("reattachment edge required")
        a, b = edge
        if (min(a, b), max(a, b)) not in T.edge_index or (min(a, b), max(a, b)) == (min(u, v), max(u, v)):
            raise TreeError(f"{edge} is not a valid reattachment edge")
        if side[a] != side[end] or side[b] != side[end]:
            raise TreeError(f"reattachment edge {edge} is in the wrong component")
        x, y = sorted(adj[end])
        if end in (a, b):
            a, b = x, y
        del adj[end]
        adj[x].discard(end)
        adj[y].discard(end)
        adj[x].add(y)
        adj[y].add(x)
        return a, b

    e1 = detach(u, reattach1)
    e2 = detach(v, reattach2)
    new_u, new_v = u, v
    if e1 is not None:
        a, b = e1
        adj[a].discard(b)
        adj[b].discard(a)
        new_u = ("s", 1)
        adj[new_u] = {a, b}
        adj[a].add(new_u)
        adj[b].add(new_u)
    if e2 is not None:
        a, b = e2
        adj[a].discard(b)
        adj[b].discard(a)
        new_v = ("s", 2)
        adj[new_v] = {a, b}
        adj[a].add(new_v)
        adj[b].add(new_v)
    adj[new_u].add(new_v)
    adj[new_v].add(new_u)
    edges = set()
    for a in adj:
        for b in adj[a]:
            ka, kb = _vkey(a), _vkey(b)
            edges.add((a, b) if ka < kb else (b, a))
    labels = {w: T.label(w) for w in adj if isinstance(w, int) and T.is_leaf(w)}
    return build_tree(sorted(edges, key=lambda e: (_vkey(e[0]), _vkey(e[1]))), labels)


def _vkey(v) -> tuple:
    return (0, v, 0) if isinstance(v, int) else (1, 0, v[1])


def reattach_choices(T: Tree, cut_edge: tuple[int, int], end: int) -> list[tuple[int, int] | None]:
    """Reattachment edges for the component of ``end`` after cutting ``cut_edge``.

    Edges incident to ``end`` are collapsed to one representative because
    they denote the same edge once ``end`` is suppressed.
    """
    if T.is_leaf(end):
        return [None]
    u, v = cut_edge
    comp = T.components_without([T.edge_id(u, v)])
    members = next(set(c) for c in comp if end in c)
    out = []
    incident_done = False
    for (a, b) in T.edges:
        if a in members and b in members:
            if end in (a, b):
                if incident_done:
                    continue
                incident_done = True
            out.append((a, b))
    return out
