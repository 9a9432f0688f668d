"""Orientation closure, background-knowledge merging and CPDAG construction.

The four orientation rules are applied as exact induced-subgraph
patterns; a graph closed under them is a maximal PDAG.  Required edge
orientations are merged one at a time: each requirement either matches
the current graph (undirected or already oriented) and is followed by
re-closure, or the whole merge fails and the input is reported back
untouched together with the first violating requirement.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .pdag_core import (
    GraphParseError,
    PdagGraph,
    has_directed_cycle,
    parse_statements,
)


class OrientationConflictError(RuntimeError):
    """An orientation step would create a directed cycle.

    Only reachable when the input graph is closed but admits no DAG
    extension, or when a requirement contradicts the graph; callers that
    merge background knowledge translate this into a failure outcome.
    """


@dataclass(frozen=True)
class BackgroundKnowledge:
    """Ordered collection of required directed-edge orientations."""

    requirements: tuple[tuple[str, str], ...]

    def __init__(self, requirements: Iterable[tuple[str, str]] = ()):
        reqs = tuple((str(a), str(b)) for a, b in requirements)
        for a, b in reqs:
            if a == b:
                raise ValueError(f"requirement endpoints must differ: {a!r}")
        object.__setattr__(self, "requirements", reqs)

    def __len__(self) -> int:
        return len(self.requirements)

    def __iter__(self):
        return iter(self.requirements)


def parse_background(text: str) -> BackgroundKnowledge:
    """Parse background knowledge: graph format restricted to ``A -> B`` lines."""
    reqs = []
    for st in parse_statements(text):
        if st[0] != "edge" or st[3] != "->":
            lineno = st[-1]
            raise GraphParseError(
                "only directed edge statements are allowed in background knowledge",
                lineno,
            )
        _, u, v, _op, weight, lineno = st
        if weight is not None:
            raise GraphParseError("weights are not allowed in background knowledge", lineno)
        if u == v:
            raise GraphParseError(f"self-loop on {u!r}", lineno)
        reqs.append((u, v))
    return BackgroundKnowledge(reqs)


@dataclass(frozen=True)
class OrientationOutcome:
    """Result of merging background knowledge into a maximal PDAG.

    On success ``graph`` is the re-closed result and ``violation`` is
    None.  On failure ``graph`` is the untouched input, ``violation`` is
    the first requirement that could not be oriented and ``reason`` says
    why in one line.
    """

    graph: PdagGraph
    violation: Optional[tuple[str, str]] = None
    reason: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.violation is None


@dataclass(frozen=True)
class ValidationReport:
    acyclic: bool
    closed: bool
    extendable: bool


class _Work:
    """Mutable adjacency-set view of a graph used during closure."""

    __slots__ = ("nodes", "index", "und", "pa", "ch")

    def __init__(self, g: PdagGraph):
        self.nodes = g.nodes
        self.index = {n: i for i, n in enumerate(g.nodes)}
        self.und = {n: set(g.siblings(n)) for n in g.nodes}
        self.pa = {n: set(g.parents(n)) for n in g.nodes}
        self.ch = {n: set(g.children(n)) for n in g.nodes}

    def adjacent(self, u: str, v: str) -> bool:
        return v in self.und[u] or v in self.pa[u] or v in self.ch[u]

    def copy(self) -> "_Work":
        dup = object.__new__(_Work)
        dup.nodes = self.nodes
        dup.index = self.index
        dup.und = {n: set(s) for n, s in self.und.items()}
        dup.pa = {n: set(s) for n, s in self.pa.items()}
        dup.ch = {n: set(s) for n, s in self.ch.items()}
        return dup

    def sorted(self, names: Iterable[str]) -> list[str]:
        return sorted(names, key=self.index.__getitem__)

    def reaches(self, src: str, dst: str) -> bool:
        """Directed reachability src -> ... -> dst."""
        if src == dst:
            return True
        seen = {src}
        stack = [src]
        while stack:
            u = stack.pop()
            for w in self.ch[u]:
                if w == dst:
                    return True
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    def orient(self, u: str, v: str) -> bool:
        """Turn u - v into u -> v; False when already so oriented."""
        if v in self.ch[u]:
            return False
        if v not in self.und[u]:
            raise OrientationConflictError(
                f"cannot orient {u} -> {v}: edge is not undirected"
            )
        if self.reaches(v, u):
            raise OrientationConflictError(
                f"orienting {u} -> {v} would create a directed cycle"
            )
        self.und[u].discard(v)
        self.und[v].discard(u)
        self.ch[u].add(v)
        self.pa[v].add(u)
        return True

    def freeze(self) -> PdagGraph:
        directed = [(u, v) for u in self.nodes for v in self.sorted(self.ch[u])]
        undirected = [
            (u, v) for u in self.nodes for v in self.sorted(self.und[u]) if self.index[u] < self.index[v]
        ]
        return PdagGraph(self.nodes, directed=directed, undirected=undirected)


def _rule_targets(work: _Work, a: str, b: str) -> list[tuple[str, str]]:
    """Orientations implied by rules whose pattern uses the directed edge a -> b.

    Every rule premise contains at least one directed edge, so scanning
    each directed edge as it appears visits every applicable pattern.
    """
    out: list[tuple[str, str]] = []
    und, pa, ch = work.und, work.pa, work.ch

    # R1: a -> b, b - c, a and c non-adjacent  =>  b -> c.
    for c in work.sorted(und[b]):
        if c != a and not work.adjacent(a, c):
            out.append((b, c))

    # R2 with a -> b as the first edge of the chain: a -> b -> c, a - c  =>  a -> c.
    for c in work.sorted(ch[b]):
        if c in und[a]:
            out.append((a, c))
    # R2 with a -> b as the second edge: x -> a -> b, x - b  =>  x -> b.
    for x in work.sorted(pa[a]):
        if b in und[x]:
            out.append((x, b))

    # R3: i - b, i - a, i - w, a -> b, w -> b, a and w non-adjacent  =>  i -> b.
    for i in work.sorted(und[b] & und[a]):
        for w in work.sorted(pa[b] & und[i]):
            if w != a and not work.adjacent(a, w):
                out.append((i, b))
                break

    # R4, a -> b matching the upper edge j -> l of the pattern
    # (i - j, i - l, i - k, j -> l, l -> k, j and k non-adjacent => i -> k).
    for i in work.sorted(und[a] & und[b]):
        for k in work.sorted(ch[b] & und[i]):
            if k != a and not work.adjacent(a, k):
                out.append((i, k))
    # R4, a -> b matching the lower edge l -> k of the pattern.
    for i in work.sorted(und[a] & und[b]):
        for j in work.sorted(pa[a] & und[i]):
            if j != b and not work.adjacent(j, b):
                out.append((i, b))
                break

    return out


def _close(work: _Work, seed: Iterable[tuple[str, str]]) -> None:
    """Apply rules until fixpoint, starting from the given directed edges.

    Targets are recomputed after every orientation so each firing is
    checked against the current state, never a stale premise.
    """
    queue = deque(seed)
    while queue:
        a, b = queue.popleft()
        while True:
            targets = _rule_targets(work, a, b)
            if not targets:
                break
            u, v = targets[0]
            work.orient(u, v)
            queue.append((u, v))


def _first_open_rule(work: _Work) -> Optional[tuple[str, str]]:
    """First orientation any rule would perform, or None when closed."""
    for u in work.nodes:
        for v in work.sorted(work.ch[u]):
            targets = _rule_targets(work, u, v)
            if targets:
                return targets[0]
    return None


def close_orientations(g: PdagGraph) -> PdagGraph:
    """Close the edge orientations of ``g`` under the four rules.

    The skeleton is unchanged and existing directed edges are kept.
    Raises ValueError when the input already has a directed cycle and
    :class:`OrientationConflictError` when closing would create one
    (possible only for inputs with no DAG extension).
    """
    if has_directed_cycle(g):
        raise ValueError("input graph has a directed cycle")
    work = _Work(g)
    _close(work, g.directed_edges())
    return work.freeze()


def is_closed(g: PdagGraph) -> bool:
    """True iff no orientation rule applies to ``g``."""
    return _first_open_rule(_Work(g)) is None


def _require_maximal(g: PdagGraph) -> None:
    if has_directed_cycle(g):
        raise ValueError("input graph has a directed cycle")
    if not is_closed(g):
        raise ValueError("input graph is not closed under the orientation rules")


def construct_max_pdag(
    g: PdagGraph, r: BackgroundKnowledge | Iterable[tuple[str, str]]
) -> OrientationOutcome:
    """Merge required orientations into a maximal PDAG, or fail.

    Requirements are processed in order.  A requirement ``X -> Y`` is
    oriented when the current graph has ``X - Y`` or already ``X -> Y``;
    after each new orientation the rules are re-closed.  Any other edge
    state, or a re-closure that would create a directed cycle, makes the
    whole merge fail: the outcome then carries that requirement and the
    untouched input graph.
    """
    if not isinstance(r, BackgroundKnowledge):
        r = BackgroundKnowledge(r)
    _require_maximal(g)
    work = _Work(g)
    for x, y in r:
        if x not in work.index or y not in work.index:
            missing = x if x not in work.index else y
            return OrientationOutcome(g, (x, y), f"unknown node {missing}")
        if y in work.ch[x]:
            continue
        if y in work.und[x]:
            try:
                work.orient(x, y)
                _close(work, [(x, y)])
            except OrientationConflictError:
                return OrientationOutcome(
                    g, (x, y), f"{x} -> {y} creates a directed cycle"
                )
            continue
        if x in work.ch[y]:
            reason = f"{x} -> {y} conflicts with {y} -> {x}"
        else:
            reason = f"no edge between {x} and {y}"
        return OrientationOutcome(g, (x, y), reason)
    return OrientationOutcome(work.freeze())


def cpdag_of(d: PdagGraph) -> PdagGraph:
    """CPDAG of a DAG: its skeleton plus the orientations shared by the
    whole Markov equivalence class (unshielded colliders, then closure)."""
    if not d.is_dag():
        raise ValueError("input is not a fully directed acyclic graph")
    forced: set[tuple[str, str]] = set()
    for z in d.nodes:
        parents = sorted(d.parents(z))
        for i, x in enumerate(parents):
            for y in parents[i + 1 :]:
                if not d.has_edge(x, y):
                    forced.add((x, z))
                    forced.add((y, z))
    undirected = []
    for a, b in sorted(d.skeleton()):
        tail, head = (a, b) if d.is_directed(a, b) else (b, a)
        if (tail, head) not in forced:
            undirected.append((a, b))
    base = PdagGraph(d.nodes, directed=sorted(forced), undirected=undirected)
    return close_orientations(base)


def validate_maximal_pdag(g: PdagGraph) -> ValidationReport:
    """Report whether ``g`` is acyclic, rule-closed and DAG-extendable."""
    from .extension import consistent_extension

    acyclic = not has_directed_cycle(g)
    closed = is_closed(g)
    extendable = consistent_extension(g) is not None if acyclic else False
    return ValidationReport(acyclic=acyclic, closed=closed, extendable=extendable)
