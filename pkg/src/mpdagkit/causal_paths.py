"""Possible-ancestral-relation queries on maximal PDAGs.

A path is classified against every ordered pair of its nodes, not just
consecutive ones: one directed edge from a later to an earlier path node
already rules the path out as possibly causal.  Reachability uses a
depth-first search over (previous, current) states that only follows
forward or undirected edges and skips shielded continuations; an
exhaustive path-enumeration oracle with the same semantics is provided
for cross-checking on small graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .pdag_core import NodePath, PdagGraph, as_path

B_POSSIBLY_CAUSAL = "b-possibly-causal"
B_NON_CAUSAL = "b-non-causal"

DESCENDANTS = "descendants"
ANCESTORS = "ancestors"

DEFAULT_ENUMERATION_GUARD = 12


def node_set(g: PdagGraph, names: "str | Iterable[str]") -> frozenset[str]:
    """Coerce a name or iterable of names into a validated node set."""
    if isinstance(names, str):
        names = (names,)
    result = frozenset(names)
    g.check_nodes(result)
    return result


@dataclass(frozen=True)
class PathClassification:
    """Verdict for one path; a failing ordered index pair when non-causal."""

    path: NodePath
    verdict: str
    witness: Optional[tuple[int, int]] = None

    @property
    def is_b_possibly_causal(self) -> bool:
        return self.verdict == B_POSSIBLY_CAUSAL

    @property
    def witness_nodes(self) -> Optional[tuple[str, str]]:
        if self.witness is None:
            return None
        i, j = self.witness
        return (self.path.nodes[i], self.path.nodes[j])


@dataclass(frozen=True)
class ReachSet:
    """Closure of a query set under one direction of possible causation."""

    nodes: frozenset[str]
    query: frozenset[str]
    direction: str

    def __contains__(self, node: str) -> bool:
        return node in self.nodes

    def __iter__(self):
        return iter(sorted(self.nodes))


def classify_path(g: PdagGraph, p: "NodePath | Sequence[str]") -> PathClassification:
    """Decide whether ``p`` could be causal in some DAG completion of ``g``.

    The path is possibly causal only when no ordered pair of its nodes
    (in path order, consecutive or not) is joined by a directed edge
    pointing backwards; the first offending pair is reported otherwise.
    """
    path = as_path(g, p)
    nodes = path.nodes
    for i in range(len(nodes) - 1):
        for j in range(i + 1, len(nodes)):
            if g.is_directed(nodes[j], nodes[i]):
                return PathClassification(path, B_NON_CAUSAL, (i, j))
    return PathClassification(path, B_POSSIBLY_CAUSAL)


def _forward_reach(g: PdagGraph, roots: frozenset[str]) -> frozenset[str]:
    """Nodes reachable from ``roots`` along possibly-causal unshielded walks.

    States are (previous, current) pairs; a step to ``w`` is allowed when
    the edge leaves ``current`` forward or undirected, does not back up,
    and ``w`` is non-adjacent to the previous node (keeping consecutive
    triples unshielded).  Tracking the predecessor makes the state space
    O(nodes * edges) rather than linear; correctness is anchored to the
    enumeration oracle, which the test suite checks it against.
    """
    order = g.node_index
    reached = set(roots)
    seen: set[tuple[Optional[str], str]] = {(None, r) for r in roots}
    stack: list[tuple[Optional[str], str]] = sorted(seen, key=lambda s: order(s[1]))
    while stack:
        prev, cur = stack.pop()
        steps = sorted(g.children(cur) | g.siblings(cur), key=order)
        for w in steps:
            if w == prev:
                continue
            if prev is not None and g.has_edge(prev, w):
                continue
            reached.add(w)
            state = (cur, w)
            if state not in seen:
                seen.add(state)
                stack.append(state)
    return frozenset(reached)


def b_possible_descendants(g: PdagGraph, xs: "str | Iterable[str]") -> ReachSet:
    """All nodes with a b-possibly-causal path from some node of ``xs``
    (plus ``xs`` itself)."""
    roots = node_set(g, xs)
    return ReachSet(_forward_reach(g, roots), roots, DESCENDANTS)


def b_possible_ancestors(g: PdagGraph, xs: "str | Iterable[str]") -> ReachSet:
    """Mirror image of :func:`b_possible_descendants` on the edge-reversed graph."""
    roots = node_set(g, xs)
    return ReachSet(_forward_reach(g.reversed(), roots), roots, ANCESTORS)


def _guard(g: PdagGraph, max_nodes: int) -> None:
    if len(g) > max_nodes:
        raise ValueError(
            f"graph has {len(g)} nodes, above the path-enumeration guard of "
            f"{max_nodes}; raise max_nodes to override"
        )


def _enumerated_reach(g: PdagGraph, roots: frozenset[str]) -> frozenset[str]:
    """Endpoints of b-possibly-causal simple paths, by exhaustive search.

    Prefixes that already contain a backward pair are pruned: the
    classification quantifies over all node pairs, so no extension of
    such a prefix can become possibly causal.
    """
    order = g.node_index
    reached = set(roots)

    def extend(path: list[str], on_path: set[str]) -> None:
        cur = path[-1]
        for w in sorted(g.children(cur) | g.siblings(cur), key=order):
            if w in on_path:
                continue
            if g.children(w) & on_path:
                continue  # would put a backward pair on the prefix
            reached.add(w)
            path.append(w)
            on_path.add(w)
            extend(path, on_path)
            on_path.discard(w)
            path.pop()

    for root in sorted(roots, key=order):
        extend([root], {root})
    return frozenset(reached)


def oracle_reach(
    g: PdagGraph,
    xs: "str | Iterable[str]",
    direction: str = DESCENDANTS,
    max_nodes: int = DEFAULT_ENUMERATION_GUARD,
) -> ReachSet:
    """Reference reachability semantics via simple-path enumeration.

    Guarded by ``max_nodes`` (default 12) since the search walks every
    viable simple path.  Agrees with the state-search implementation;
    the state search is the production route.
    """
    _guard(g, max_nodes)
    roots = node_set(g, xs)
    if direction not in (DESCENDANTS, ANCESTORS):
        raise ValueError(f"unknown direction {direction!r}")
    base = g if direction == DESCENDANTS else g.reversed()
    return ReachSet(_enumerated_reach(base, roots), roots, direction)
