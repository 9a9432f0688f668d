"""DAG extensions of a partially directed graph.

``consistent_extension`` finds one DAG with the same skeleton and
unshielded colliders that keeps every directed edge (the sink-peeling
algorithm), ``enumerate_dags`` lists the whole class by backtracking
over undirected edges with rule closure after every choice, and
``represents`` is the membership predicate both are measured against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .meek import OrientationConflictError, _close, _Work
from .pdag_core import PdagGraph, has_directed_cycle

DEFAULT_DAG_LIMIT = 100_000


@dataclass(frozen=True)
class DagList:
    """Distinct DAGs in deterministic order; ``truncated`` marks a cut-off."""

    dags: tuple[PdagGraph, ...]
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.dags)

    def __iter__(self) -> Iterator[PdagGraph]:
        return iter(self.dags)


def unshielded_collider_triples(g: PdagGraph) -> frozenset[tuple[str, str, str]]:
    """Triples (x, z, y), x < y, with x -> z <- y and x, y non-adjacent."""
    triples = set()
    for z in g.nodes:
        parents = sorted(g.parents(z))
        for i, x in enumerate(parents):
            for y in parents[i + 1 :]:
                if not g.has_edge(x, y):
                    triples.add((x, z, y))
    return frozenset(triples)


def represents(g: PdagGraph, h: PdagGraph) -> bool:
    """True iff ``h`` is represented by ``g``: identical skeleton and
    unshielded colliders, and every directed edge of ``g`` oriented the
    same way in ``h``."""
    if set(g.nodes) != set(h.nodes):
        return False
    if g.skeleton() != h.skeleton():
        return False
    if unshielded_collider_triples(g) != unshielded_collider_triples(h):
        return False
    return all(h.is_directed(tail, head) for tail, head in g.directed_edges())


def consistent_extension(g: PdagGraph) -> Optional[PdagGraph]:
    """One DAG represented by ``g``, or None when no extension exists.

    Repeatedly peels a node with no outgoing directed edge whose
    undirected neighbours are adjacent to all of its other neighbours,
    orienting the undirected edges into it.  Ties break on the lowest
    node index, so the result is deterministic.
    """
    if has_directed_cycle(g):
        return None
    remaining = set(g.nodes)
    und = {n: set(g.siblings(n)) for n in g.nodes}
    ch = {n: set(g.children(n)) for n in g.nodes}
    pa = {n: set(g.parents(n)) for n in g.nodes}
    oriented: list[tuple[str, str]] = []

    def adjacent_in(x: str) -> set[str]:
        return (und[x] | ch[x] | pa[x]) & remaining

    while remaining:
        sink = None
        for x in g.nodes:
            if x not in remaining or ch[x] & remaining:
                continue
            adj = adjacent_in(x)
            if all(adj - {u} <= adjacent_in(u) for u in und[x] & remaining):
                sink = x
                break
        if sink is None:
            return None
        for u in und[sink] & remaining:
            oriented.append((u, sink))
        remaining.discard(sink)

    return PdagGraph(g.nodes, directed=list(g.directed_edges()) + oriented)


def enumerate_dags(g: PdagGraph, limit: int = DEFAULT_DAG_LIMIT) -> DagList:
    """All DAGs represented by ``g``, each exactly once.

    Backtracks over the first undirected edge in canonical pair order,
    orienting it both ways and re-closing the rules before recursing;
    branches whose closure would create a cycle are dead.  Fully
    oriented leaves are kept only when they pass :func:`represents`.

    Args:
        g: graph with an acyclic directed part.
        limit: positive cap on the number of DAGs collected; the result
            is flagged truncated when unexplored work remains.
    """
    if limit < 1:
        raise ValueError("limit must be positive")
    if has_directed_cycle(g):
        raise ValueError("input graph has a directed cycle")

    found: list[PdagGraph] = []
    truncated = False

    def first_undirected(work: _Work) -> Optional[tuple[str, str]]:
        best = None
        for u in work.nodes:
            for v in work.und[u]:
                key = (u, v) if u <= v else (v, u)
                if best is None or key < best:
                    best = key
        return best

    def recurse(work: _Work) -> bool:
        """Returns False when the limit cut enumeration short."""
        nonlocal truncated
        edge = first_undirected(work)
        if edge is None:
            candidate = work.freeze()
            if represents(g, candidate):
                if len(found) >= limit:
                    truncated = True
                    return False
                found.append(candidate)
            return True
        a, b = edge
        for tail, head in ((a, b), (b, a)):
            branch = work.copy()
            try:
                branch.orient(tail, head)
                _close(branch, [(tail, head)])
            except OrientationConflictError:
                continue
            if not recurse(branch):
                return False
        return True

    recurse(_Work(g))
    return DagList(tuple(found), truncated)
