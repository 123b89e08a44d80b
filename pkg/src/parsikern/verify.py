"""
Independent certificate checker.

Imports only the tree primitives, Fitch scoring and the certificate schema;
nothing from the construction code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fitch import parsimony_score
from .newick_io import CertificateDocument, tree_hash
from .treecore import QuartetTopology, Tree, TreeError, quartet_topology, restrict

CHECKS = ("taxa", "hashes", "incompatible", "leg-disjoint", "character",
          "fitch-gap", "strength", "consistency", "lifted")


@dataclass
class VerificationReport:
    failures: dict[str, str] = field(default_factory=dict)
    passed: list[str] = field(default_factory=list)
    gap: int | None = None
    lifted_gap: int | None = None

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok

    def fail(self, check: str, why: str) -> None:
        self.failures.setdefault(check, why)

    def summary(self) -> str:
        lines = [f"{'ACCEPTED' if self.ok else 'REJECTED'}"]
        for name in CHECKS:
            if name in self.failures:
                lines.append(f"  FAIL {name}: {self.failures[name]}")
            elif name in self.passed:
                lines.append(f"  ok   {name}")
        return "\n".join(lines)


def _legs(T: Tree, top: QuartetTopology) -> int:
    (a, b), (c, d) = top
    return T.taxon_path_edges(a, b) | T.taxon_path_edges(c, d)


def verify_certificate(T1: Tree, T2: Tree, c: CertificateDocument) -> VerificationReport:
    rep = VerificationReport()
    if T1.taxa != T2.taxa:
        rep.fail("taxa", "trees have different leaf sets")
        return rep
    rep.passed.append("taxa")
    if c.tree_hashes != (tree_hash(T1), tree_hash(T2)):
        rep.fail("hashes", "tree hashes do not match the input trees")
    else:
        rep.passed.append("hashes")
    A, B = (T1, T2) if c.orientation == "first" else (T2, T1)
    known = set(T1.taxa)

    # (i) incompatible with the stated topologies
    tops = []
    for q in c.quartets:
        try:
            if len(set(q.taxa)) != 4 or not set(q.taxa) <= known:
                raise TreeError("bad taxa")
            s1, s2 = QuartetTopology.parse(q.t1), QuartetTopology.parse(q.t2)
            if set(s1.taxa) != set(q.taxa) or set(s2.taxa) != set(q.taxa):
                raise TreeError("topology taxa differ from the quartet")
        except (TreeError, ValueError) as exc:
            rep.fail("incompatible", f"{q.taxa}: {exc}")
            continue
        if s1 == s2:
            rep.fail("incompatible", f"{q.taxa}: stated topologies agree")
        elif quartet_topology(A, q.taxa) != s1 or quartet_topology(B, q.taxa) != s2:
            rep.fail("incompatible", f"{q.taxa}: stated topology does not match the trees")
        tops.append(s1)
    if "incompatible" not in rep.failures:
        rep.passed.append("incompatible")

    # (ii) pairwise leg-disjoint in the leg tree
    used = 0
    for top in tops:
        m = _legs(A, top)
        if m & used:
            rep.fail("leg-disjoint", f"legs of {top} overlap an earlier quartet")
            break
        used |= m
    else:
        rep.passed.append("leg-disjoint")

    # (iii) two-state character on exactly the quartet taxa
    domain = {x for q in c.quartets for x in q.taxa}
    f = c.character
    if set(f) != domain:
        rep.fail("character", "domain differs from the union of the quartets")
    elif not set(f.values()) <= {0, 1}:
        rep.fail("character", "character is not two-state")
    else:
        rep.passed.append("character")

    # (iv) Fitch gap on the restricted trees
    if "character" in rep.failures:
        rep.fail("fitch-gap", "no valid character to score")
    else:
        gap, lB = 0, 0
        if domain:
            lA = parsimony_score(restrict(A, sorted(domain)), f)
            lB = parsimony_score(restrict(B, sorted(domain)), f)
            gap = lA - lB
        rep.gap = gap
        if gap < c.claimed_bound:
            rep.fail("fitch-gap", f"gap {gap} < claimed bound {c.claimed_bound}")
        else:
            rep.passed.append("fitch-gap")

    # (v) strength
    k = len(c.quartets)
    if c.claimed_bound < -(-k // 3):
        rep.fail("strength", f"claimed bound {c.claimed_bound} < ceil({k}/3)")
    else:
        rep.passed.append("strength")

    # bookkeeping: beta recount, bound = beta - delta, delta dominates l(B)
    if "character" not in rep.failures:
        beta = sum((f[a] != f[b]) + (f[x] != f[y]) for (a, b), (x, y) in tops)
        if beta != c.beta:
            rep.fail("consistency", f"beta recount {beta} != stated {c.beta}")
        elif c.claimed_bound != c.beta - c.delta:
            rep.fail("consistency", "claimed bound != beta - delta")
        elif domain and c.delta < lB:
            rep.fail("consistency", f"delta {c.delta} below the restricted score {lB}")
        else:
            rep.passed.append("consistency")
    else:
        rep.fail("consistency", "no valid character")

    # optional: lifted character on the full trees
    if c.lifted_character is not None:
        g = c.lifted_character
        if set(g) != known or not set(g.values()) <= {0, 1} or any(g[x] != f.get(x, g[x]) for x in f):
            rep.fail("lifted", "lifted character must extend the witness to all taxa")
        else:
            rep.lifted_gap = abs(parsimony_score(T1, g) - parsimony_score(T2, g))
            if rep.lifted_gap < c.claimed_bound:
                rep.fail("lifted", f"lifted gap {rep.lifted_gap} < claimed bound")
            else:
                rep.passed.append("lifted")
    return rep
