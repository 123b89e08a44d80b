"""
Cherry and chain reduction to a fixed point.

Both rules preserve the t-state parsimony distance.  :func:`fully_reduce`
exhausts cherries, then shortens the longest common chain, and repeats.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Sequence

from .treecore import (Chain, Tree, TreeError, _chain_ok, common_chains,
                       common_cherries, restrict)

log = logging.getLogger(__name__)

MIN_CHAIN = 5


class ReductionError(ValueError):
    pass


@dataclass(frozen=True)
class ReductionStep:
    kind: str                     # "cherry" | "chain"
    leaves: tuple[str, ...]       # the cherry pair or the chain, in order
    removed: tuple[str, ...]

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "leaves": list(self.leaves), "removed": list(self.removed)}


@dataclass
class ReductionTrace:
    initial_leaves: int
    final_leaves: int = 0
    steps: list[ReductionStep] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {"initial_leaves": self.initial_leaves, "final_leaves": self.final_leaves,
                "steps": [s.to_json() for s in self.steps]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def from_json(cls, doc: dict[str, Any]) -> "ReductionTrace":
        steps = [ReductionStep(s["kind"], tuple(s["leaves"]), tuple(s["removed"])) for s in doc["steps"]]
        return cls(doc["initial_leaves"], doc["final_leaves"], steps)


def _drop(T1: Tree, T2: Tree, removed: Sequence[str]) -> tuple[Tree, Tree]:
    keep = [x for x in T1.taxa if x not in set(removed)]
    return restrict(T1, keep), restrict(T2, keep)


def apply_cherry_reduction(T1: Tree, T2: Tree, pair: tuple[str, str]) -> tuple[Tree, Tree]:
    """Remove the second leaf of a common cherry from both trees."""
    x, y = pair
    if (min(x, y), max(x, y)) not in common_cherries(T1, T2):
        raise ReductionError(f"({x}, {y}) is not a common cherry")
    return _drop(T1, T2, [y])


def is_common_chain(T1: Tree, T2: Tree, leaves: Sequence[str]) -> bool:
    return _chain_ok(T1, list(leaves)) and _chain_ok(T2, list(leaves))


def apply_chain_reduction(T1: Tree, T2: Tree, chain: Chain | Sequence[str]) -> tuple[Tree, Tree]:
    """Keep the two leaves at each end of a common chain, drop the rest."""
    leaves = tuple(chain.leaves if isinstance(chain, Chain) else chain)
    if len(leaves) < MIN_CHAIN:
        raise ReductionError(f"chain of length {len(leaves)} is shorter than {MIN_CHAIN}")
    if not is_common_chain(T1, T2, leaves):
        raise ReductionError("not a common chain")
    return _drop(T1, T2, leaves[2:-2])


def _step(T1: Tree, T2: Tree) -> tuple[Tree, Tree, ReductionStep] | None:
    cc = common_cherries(T1, T2)
    if cc:
        x, y = cc[0]
        T1, T2 = apply_cherry_reduction(T1, T2, (x, y))
        return T1, T2, ReductionStep("cherry", (x, y), (y,))
    for ch in common_chains(T1, T2):
        if ch.k >= MIN_CHAIN:
            T1, T2 = apply_chain_reduction(T1, T2, ch)
            return T1, T2, ReductionStep("chain", ch.leaves, ch.leaves[2:-2])
        break  # sorted longest first
    return None


def fully_reduce(T1: Tree, T2: Tree) -> tuple[Tree, Tree, ReductionTrace]:
    if T1.taxa != T2.taxa:
        raise TreeError("trees have different leaf sets")
    trace = ReductionTrace(T1.n_leaves)
    while T1.n_leaves >= 4:
        nxt = _step(T1, T2)
        if nxt is None:
            break
        T1, T2, step = nxt
        log.debug("%s %s", step.kind, ",".join(step.leaves))
        trace.steps.append(step)
    trace.final_leaves = T1.n_leaves
    return T1, T2, trace


def is_fully_reduced(T1: Tree, T2: Tree) -> bool:
    if T1.n_leaves < 4:
        return True
    if common_cherries(T1, T2):
        return False
    return not any(ch.k >= MIN_CHAIN for ch in common_chains(T1, T2))


def replay(T1: Tree, T2: Tree, trace: ReductionTrace) -> tuple[Tree, Tree]:
    """Re-apply a trace, checking every step's precondition."""
    if T1.n_leaves != trace.initial_leaves:
        raise ReductionError("trace does not start from this instance")
    for s in trace.steps:
        if s.kind == "cherry":
            if s.removed != s.leaves[1:]:
                raise ReductionError("cherry step must remove the second leaf")
            T1, T2 = apply_cherry_reduction(T1, T2, s.leaves)  # type: ignore[arg-type]
        elif s.kind == "chain":
            if s.removed != s.leaves[2:-2]:
                raise ReductionError("chain step must remove the interior leaves")
            T1, T2 = apply_chain_reduction(T1, T2, s.leaves)
        else:
            raise ReductionError(f"unknown step kind {s.kind!r}")
    if T1.n_leaves != trace.final_leaves:
        raise ReductionError("trace final size mismatch")
    return T1, T2
