"""
Newick trees, TSV character tables and JSON certificate documents.

Newick parsing is deliberately forgiving: branch lengths, internal labels and
``[...]`` comments are accepted and dropped.  A top-level bifurcation is an
artefact of rooting and is always suppressed, as are unary internal nodes.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from typing import Any

from .treecore import Tree, TreeError, build_tree, canonical_root

log = logging.getLogger(__name__)

CERTIFICATE_VERSION = "certificate_v1"


class NewickError(ValueError):
    """Syntax or content error in a Newick string; ``offset`` is a byte offset."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)


# ---------------------------------------------------------------------------
# Newick parsing
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.data = text.encode("utf-8")
        self.pos = 0
        self.nodes: list[list[int]] = []   # children per node
        self.names: list[str | None] = []

    def error(self, msg: str) -> NewickError:
        off = len(self.text[: self.pos].encode("utf-8"))
        return NewickError(msg, off)

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip(self) -> None:
        t = self.text
        while self.pos < len(t):
            ch = t[self.pos]
            if ch.isspace():
                self.pos += 1
            elif ch == "[":
                end = t.find("]", self.pos)
                if end < 0:
                    raise self.error("unterminated comment")
                self.pos = end + 1
            else:
                break

    def label(self) -> str | None:
        self.skip()
        t = self.text
        if self.pos < len(t) and t[self.pos] == "'":
            start = self.pos
            self.pos += 1
            out = []
            while True:
                if self.pos >= len(t):
                    self.pos = start
                    raise self.error("unterminated quoted label")
                ch = t[self.pos]
                if ch == "'":
                    if t[self.pos + 1: self.pos + 2] == "'":
                        out.append("'")
                        self.pos += 2
                        continue
                    self.pos += 1
                    break
                out.append(ch)
                self.pos += 1
            return "".join(out)
        start = self.pos
        while self.pos < len(t) and t[self.pos] not in "(),;:[" and not t[self.pos].isspace():
            self.pos += 1
        name = t[start:self.pos]
        return name or None

    def length(self) -> None:
        if self.peek() == ":":
            self.pos += 1
            self.skip()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos] in "0123456789.eE+-":
                self.pos += 1
            if start == self.pos:
                raise self.error("expected branch length")
            try:
                float(self.text[start:self.pos])
            except ValueError:
                self.pos = start
                raise self.error("malformed branch length") from None

    def node(self) -> int:
        me = len(self.nodes)
        self.nodes.append([])
        self.names.append(None)
        if self.peek() == "(":
            self.pos += 1
            while True:
                self.nodes[me].append(self.node())
                ch = self.peek()
                if ch == ",":
                    self.pos += 1
                    continue
                if ch == ")":
                    self.pos += 1
                    break
                raise self.error("expected ',' or ')'")
            name = self.label()
            if name is not None:
                log.warning("internal label %r dropped", name)
        else:
            name = self.label()
            if name is None:
                raise self.error("expected a leaf label")
            self.names[me] = name
        self.length()
        return me

    def parse(self) -> tuple[list[list[int]], list[str | None]]:
        if self.peek() == "":
            raise self.error("empty input")
        self.node()
        if self.peek() != ";":
            raise self.error("expected ';'")
        self.pos += 1
        if self.peek() != "":
            raise self.error("trailing characters after ';'")
        return self.nodes, self.names


def parse_newick(text: str) -> Tree:
    """Parse one semicolon-terminated Newick tree into an unrooted :class:`Tree`."""
    p = _Parser(text.strip())
    children, names = p.parse()
    seen: set[str] = set()
    for name in names:
        if name is None:
            continue
        if name in seen:
            raise NewickError(f"duplicate leaf label {name!r}")
        seen.add(name)
    adj: dict[int, set[int]] = {i: set() for i in range(len(children))}
    for u, kids in enumerate(children):
        for w in kids:
            adj[u].add(w)
            adj[w].add(u)
    labels = {i: n for i, n in enumerate(names) if n is not None}
    # suppress unlabelled vertices of degree <= 2 (rooting artefacts, unary nodes)
    changed = True
    while changed:
        changed = False
        for v in sorted(adj):
            if v in labels:
                continue
            d = len(adj[v])
            if d == 2:
                a, b = adj.pop(v)
                adj[a].discard(v)
                adj[b].discard(v)
                adj[a].add(b)
                adj[b].add(a)
                changed = True
            elif d <= 1 and len(adj) > 1:
                for w in adj.pop(v):
                    adj[w].discard(v)
                changed = True
    for v, nb in adj.items():
        if len(nb) > 3:
            raise NewickError(f"multifurcation of degree {len(nb)} is not supported")
    edges = sorted({(u, w) for u in adj for w in adj[u] if u < w})
    try:
        return build_tree(edges, {v: labels[v] for v in adj if v in labels})
    except TreeError as exc:
        raise NewickError(str(exc)) from exc


def parse_newick_lines(text: str) -> list[Tree]:
    """Parse a .nwk file: one tree per non-empty line."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            out.append(parse_newick(line))
        except NewickError as exc:
            raise NewickError(f"line {lineno}: {exc}") from exc
    return out


def _write(T: Tree, v: int, parent: int) -> tuple[str, str]:
    if T.is_leaf(v):
        name = T.label(v)
        return name, name  # type: ignore[return-value]
    parts = [_write(T, w, v) for w in T.neighbors(v) if w != parent]
    parts.sort()
    return parts[0][0], "(" + ",".join(s for _, s in parts) + ")"


def write_newick(T: Tree) -> str:
    """Deterministic canonical Newick.

    The tree is rooted on the edge from the parent of the smallest taxon
    towards the neighbour whose side holds the largest minimum taxon, and
    children are ordered by their smallest taxon.
    """
    root = canonical_root(T)
    if root is None:
        return T.taxa[0] + ";"
    p, w = root
    parts = sorted([_write(T, p, w), _write(T, w, p)])
    return "(" + ",".join(s for _, s in parts) + ");"


# ---------------------------------------------------------------------------
# character tables
# ---------------------------------------------------------------------------

UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class CharacterTable:
    """Rows of (taxon, state token); ``states`` is the sorted token alphabet."""

    rows: tuple[tuple[str, str], ...]
    t: int | str | None = None

    @property
    def states(self) -> tuple[str, ...]:
        return tuple(sorted({s for _, s in self.rows}))

    @property
    def taxa(self) -> tuple[str, ...]:
        return tuple(sorted(x for x, _ in self.rows))

    def as_indices(self) -> dict[str, int]:
        idx = {s: i for i, s in enumerate(self.states)}
        return {x: idx[s] for x, s in self.rows}


def parse_character_table(text: str, t: int | str | None = None) -> CharacterTable:
    """Parse ``taxon<TAB>state`` lines (no header).

    ``t`` may be a positive int, ``"unbounded"`` or None (undeclared).
    """
    rows = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.rstrip("\r\n").split("\t")
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'taxon<TAB>state'")
        taxon, state = parts[0].strip(), parts[1].strip()
        if not taxon:
            raise ValueError(f"line {lineno}: empty taxon")
        if not state:
            raise ValueError(f"line {lineno}: empty state token")
        if taxon in seen:
            raise ValueError(f"line {lineno}: duplicate taxon {taxon!r}")
        seen.add(taxon)
        rows.append((taxon, state))
    table = CharacterTable(tuple(rows), t)
    if isinstance(t, int):
        if t < 1:
            raise ValueError("t must be positive")
        if len(table.states) > t:
            raise ValueError(f"{len(table.states)} distinct states exceed t={t}")
    elif t not in (None, UNBOUNDED):
        raise ValueError(f"bad state bound {t!r}")
    return table


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

class CertificateError(ValueError):
    """Schema violation in a certificate document."""


@dataclass
class CertificateQuartet:
    taxa: tuple[str, str, str, str]
    t1: str          # topology in the tree playing T1, e.g. "a,b|c,d"
    t2: str

    def to_json(self) -> dict[str, Any]:
        return {"taxa": list(self.taxa), "t1": self.t1, "t2": self.t2}


@dataclass
class CertificateDocument:
    """A lower-bound certificate for the t-state parsimony distance.

    ``orientation`` names the input tree ("first" or "second") whose legs
    carry the quartets; ``character`` is the two-state witness over the
    union of ``quartets``; ``lifted_character`` (optional) extends it to all
    taxa.  ``claimed_bound`` equals ``beta - delta``.
    """

    tree_hashes: tuple[str, str]
    orientation: str
    quartets: list[CertificateQuartet]
    character: dict[str, int]
    beta: int
    delta: int
    claimed_bound: int
    tbr_upper_bound: int | None = None
    greedy_quartet_count: int | None = None
    lifted_character: dict[str, int] | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "version": CERTIFICATE_VERSION,
            "trees": {"first": self.tree_hashes[0], "second": self.tree_hashes[1]},
            "orientation": self.orientation,
            "quartets": [q.to_json() for q in self.quartets],
            "character": {k: self.character[k] for k in sorted(self.character)},
            "beta": self.beta,
            "delta": self.delta,
            "claimed_bound": self.claimed_bound,
            "tbr_upper_bound": self.tbr_upper_bound,
            "greedy_quartet_count": self.greedy_quartet_count,
            "lifted_character": (None if self.lifted_character is None else
                                 {k: self.lifted_character[k] for k in sorted(self.lifted_character)}),
            "metadata": self.metadata,
        }
        return doc


_KNOWN_FIELDS = {"version", "trees", "orientation", "quartets", "character", "beta",
                 "delta", "claimed_bound", "tbr_upper_bound", "greedy_quartet_count",
                 "lifted_character", "metadata"}


def write_certificate(c: CertificateDocument) -> str:
    return json.dumps(c.to_json(), indent=2, sort_keys=False) + "\n"


def _nonneg_int(doc: dict, key: str, optional: bool = False) -> int | None:
    v = doc.get(key)
    if v is None and optional:
        return None
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise CertificateError(f"{key} must be a non-negative integer")
    return v


def _character(obj: Any, key: str) -> dict[str, int]:
    if not isinstance(obj, dict):
        raise CertificateError(f"{key} must be an object")
    for k, v in obj.items():
        if not isinstance(k, str) or not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise CertificateError(f"{key} maps taxa to non-negative integer states")
    return dict(obj)


def read_certificate(text: str) -> CertificateDocument:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateError(f"not JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise CertificateError("certificate must be a JSON object")
    if doc.get("version") != CERTIFICATE_VERSION:
        raise CertificateError(f"version must be {CERTIFICATE_VERSION!r}")
    trees = doc.get("trees")
    if not isinstance(trees, dict) or not all(isinstance(trees.get(k), str) for k in ("first", "second")):
        raise CertificateError("trees must hold 'first' and 'second' hashes")
    if doc.get("orientation") not in ("first", "second"):
        raise CertificateError("orientation must be 'first' or 'second'")
    raw_q = doc.get("quartets")
    if not isinstance(raw_q, list):
        raise CertificateError("quartets must be a list")
    quartets = []
    for q in raw_q:
        if (not isinstance(q, dict) or not isinstance(q.get("taxa"), list) or len(q["taxa"]) != 4
                or not all(isinstance(x, str) for x in q["taxa"])
                or not isinstance(q.get("t1"), str) or not isinstance(q.get("t2"), str)):
            raise CertificateError("each quartet needs 4 taxa and t1/t2 topologies")
        quartets.append(CertificateQuartet(tuple(q["taxa"]), q["t1"], q["t2"]))  # type: ignore[arg-type]
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise CertificateError("metadata must be an object")
    meta = dict(meta)
    extra = sorted(set(doc) - _KNOWN_FIELDS)
    if extra:
        meta["ignored_fields"] = extra
    lifted = doc.get("lifted_character")
    return CertificateDocument(
        tree_hashes=(trees["first"], trees["second"]),
        orientation=doc["orientation"],
        quartets=quartets,
        character=_character(doc.get("character"), "character"),
        beta=_nonneg_int(doc, "beta"),  # type: ignore[arg-type]
        delta=_nonneg_int(doc, "delta"),  # type: ignore[arg-type]
        claimed_bound=_nonneg_int(doc, "claimed_bound"),  # type: ignore[arg-type]
        tbr_upper_bound=_nonneg_int(doc, "tbr_upper_bound", optional=True),
        greedy_quartet_count=_nonneg_int(doc, "greedy_quartet_count", optional=True),
        lifted_character=None if lifted is None else _character(lifted, "lifted_character"),
        metadata=meta,
    )


def tree_hash(T: Tree) -> str:
    """sha256 of the canonical Newick string."""
    return hashlib.sha256(write_newick(T).encode("utf-8")).hexdigest()
