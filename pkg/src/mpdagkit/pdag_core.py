"""Graph value type for partially directed graphs, plus the text format.

A :class:`PdagGraph` stores an ordered node set and, for every unordered
node pair, one of three edge states: undirected, directed one way, or
directed the other way (absent pairs are simply not stored).  The same
value type is used for DAGs, CPDAGs and maximal PDAGs; graphs are
immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# Edge states, stored against the name-sorted version of each pair.
UNDIRECTED = "--"
LEFT_TO_RIGHT = ">"
RIGHT_TO_LEFT = "<"

# Definite-status labels for nodes on a path.
COLLIDER = "collider"
DEFINITE_NON_COLLIDER = "definite-non-collider"
ENDPOINT = "endpoint"
NOT_DEFINITE = "not-definite"


class GraphParseError(ValueError):
    """Raised for malformed graph documents; carries the offending line."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _pair(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u <= v else (v, u)


class PdagGraph:
    """Immutable partially directed graph over named nodes.

    Args:
        nodes: node names in declaration order; names must match
            ``[A-Za-z_][A-Za-z0-9_]*`` and be unique.
        directed: iterable of ``(tail, head)`` pairs.
        undirected: iterable of unordered pairs.

    Each node pair may carry at most one edge and self loops are
    rejected, so the representation cannot express multigraphs.
    """

    __slots__ = ("_nodes", "_index", "_edges", "_pa", "_ch", "_sib", "_hash")

    def __init__(
        self,
        nodes: Sequence[str],
        directed: Iterable[tuple[str, str]] = (),
        undirected: Iterable[tuple[str, str]] = (),
    ):
        nodes = tuple(nodes)
        index: dict[str, int] = {}
        for name in nodes:
            if not NAME_RE.match(name):
                raise ValueError(f"invalid node name: {name!r}")
            if name in index:
                raise ValueError(f"duplicate node name: {name!r}")
            index[name] = len(index)
        edges: dict[tuple[str, str], str] = {}

        def add(u: str, v: str, state: str) -> None:
            if u not in index or v not in index:
                missing = u if u not in index else v
                raise ValueError(f"edge endpoint not a declared node: {missing!r}")
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            key = _pair(u, v)
            if key in edges:
                raise ValueError(f"duplicate edge between {key[0]!r} and {key[1]!r}")
            if state == UNDIRECTED:
                edges[key] = UNDIRECTED
            else:
                edges[key] = LEFT_TO_RIGHT if (u, v) == key else RIGHT_TO_LEFT

        for u, v in directed:
            add(u, v, "dir")
        for u, v in undirected:
            add(u, v, UNDIRECTED)

        pa: dict[str, set[str]] = {n: set() for n in nodes}
        ch: dict[str, set[str]] = {n: set() for n in nodes}
        sib: dict[str, set[str]] = {n: set() for n in nodes}
        for (a, b), state in edges.items():
            if state == UNDIRECTED:
                sib[a].add(b)
                sib[b].add(a)
            else:
                tail, head = (a, b) if state == LEFT_TO_RIGHT else (b, a)
                ch[tail].add(head)
                pa[head].add(tail)

        self._nodes = nodes
        self._index = index
        self._edges = edges
        self._pa = {n: frozenset(s) for n, s in pa.items()}
        self._ch = {n: frozenset(s) for n, s in ch.items()}
        self._sib = {n: frozenset(s) for n, s in sib.items()}
        self._hash = hash((nodes, tuple(sorted(edges.items()))))

    # -- basic views ---------------------------------------------------

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._nodes

    def __contains__(self, node: str) -> bool:
        return node in self._index

    def __len__(self) -> int:
        return len(self._nodes)

    def node_index(self, node: str) -> int:
        try:
            return self._index[node]
        except KeyError:
            raise KeyError(f"unknown node: {node!r}") from None

    def check_nodes(self, names: Iterable[str]) -> None:
        for name in names:
            if name not in self._index:
                raise KeyError(f"unknown node: {name!r}")

    def edge(self, u: str, v: str) -> Optional[str]:
        """Edge state between ``u`` and ``v``, oriented relative to ``u``.

        Returns ``"->"`` for ``u -> v``, ``"<-"`` for ``u <- v``, ``"--"``
        for an undirected edge and ``None`` when the pair is not adjacent.
        """
        self.check_nodes((u, v))
        state = self._edges.get(_pair(u, v))
        if state is None or state == UNDIRECTED:
            return state
        forward = (u, v) == _pair(u, v)
        if state == LEFT_TO_RIGHT:
            return "->" if forward else "<-"
        return "<-" if forward else "->"

    def has_edge(self, u: str, v: str) -> bool:
        return _pair(u, v) in self._edges

    def is_directed(self, u: str, v: str) -> bool:
        """True iff the edge ``u -> v`` is present."""
        key = _pair(u, v)
        state = self._edges.get(key)
        if state is None or state == UNDIRECTED:
            return False
        return state == (LEFT_TO_RIGHT if (u, v) == key else RIGHT_TO_LEFT)

    def is_undirected(self, u: str, v: str) -> bool:
        return self._edges.get(_pair(u, v)) == UNDIRECTED

    def parents(self, v: str) -> frozenset[str]:
        self.check_nodes((v,))
        return self._pa[v]

    def children(self, v: str) -> frozenset[str]:
        self.check_nodes((v,))
        return self._ch[v]

    def siblings(self, v: str) -> frozenset[str]:
        self.check_nodes((v,))
        return self._sib[v]

    def adjacent(self, v: str) -> frozenset[str]:
        self.check_nodes((v,))
        return self._pa[v] | self._ch[v] | self._sib[v]

    def directed_edges(self) -> tuple[tuple[str, str], ...]:
        """All directed edges as (tail, head), in canonical pair order."""
        out = []
        for (a, b), state in sorted(self._edges.items()):
            if state == LEFT_TO_RIGHT:
                out.append((a, b))
            elif state == RIGHT_TO_LEFT:
                out.append((b, a))
        return tuple(out)

    def undirected_edges(self) -> tuple[tuple[str, str], ...]:
        return tuple(
            key for key, state in sorted(self._edges.items()) if state == UNDIRECTED
        )

    def skeleton(self) -> frozenset[tuple[str, str]]:
        """Unordered adjacent pairs, each as its name-sorted tuple."""
        return frozenset(self._edges)

    def edge_count(self) -> int:
        return len(self._edges)

    # -- derived graphs ------------------------------------------------

    def reversed(self) -> "PdagGraph":
        """Same skeleton with every directed edge flipped."""
        return PdagGraph(
            self._nodes,
            directed=[(h, t) for t, h in self.directed_edges()],
            undirected=self.undirected_edges(),
        )

    def induced(self, keep: Iterable[str]) -> "PdagGraph":
        """Induced subgraph on ``keep``, preserving node order."""
        keep_set = set(keep)
        self.check_nodes(keep_set)
        nodes = [n for n in self._nodes if n in keep_set]
        directed = [
            (t, h) for t, h in self.directed_edges() if t in keep_set and h in keep_set
        ]
        undirected = [
            (a, b)
            for a, b in self.undirected_edges()
            if a in keep_set and b in keep_set
        ]
        return PdagGraph(nodes, directed=directed, undirected=undirected)

    def is_dag(self) -> bool:
        """True iff every edge is directed and no directed cycle exists."""
        if any(state == UNDIRECTED for state in self._edges.values()):
            return False
        return not has_directed_cycle(self)

    # -- value semantics -----------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PdagGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"PdagGraph(nodes={len(self._nodes)}, edges={len(self._edges)})"

    def serialize(self) -> str:
        return serialize_graph(self)


@dataclass(frozen=True)
class NodePath:
    """A path: two or more distinct nodes, consecutively adjacent in a graph."""

    graph: PdagGraph
    nodes: tuple[str, ...]

    def __init__(self, graph: PdagGraph, nodes: Sequence[str]):
        nodes = tuple(nodes)
        if len(nodes) < 2:
            raise ValueError("a path needs at least two nodes")
        if len(set(nodes)) != len(nodes):
            raise ValueError(f"path repeats a node: {nodes}")
        graph.check_nodes(nodes)
        for u, v in zip(nodes, nodes[1:]):
            if not graph.has_edge(u, v):
                raise ValueError(f"consecutive path nodes not adjacent: {u}, {v}")
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "nodes", nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[str]:
        return iter(self.nodes)

    def reversed(self) -> "NodePath":
        return NodePath(self.graph, self.nodes[::-1])


def as_path(g: PdagGraph, p: "NodePath | Sequence[str]") -> NodePath:
    """Coerce a node sequence into a validated :class:`NodePath` in ``g``."""
    if isinstance(p, NodePath):
        if p.graph is not g and p.graph != g:
            raise ValueError("path belongs to a different graph")
        return p
    return NodePath(g, p)


@dataclass(frozen=True)
class Neighborhood:
    parents: frozenset[str]
    children: frozenset[str]
    siblings: frozenset[str]


def neighborhood(g: PdagGraph, v: str) -> Neighborhood:
    """Parents, children and siblings of ``v``; the sets are disjoint."""
    return Neighborhood(g.parents(v), g.children(v), g.siblings(v))


def classify_definite_status(
    g: PdagGraph, p: "NodePath | Sequence[str]"
) -> tuple[str, ...]:
    """Label every node on ``p`` with its definite-status role.

    Interior nodes become ``collider`` when both flanking edges point into
    them, ``definite-non-collider`` when a flanking edge leaves them or when
    both flanking edges are undirected and the flanking neighbours are
    non-adjacent, and ``not-definite`` otherwise.  Endpoints are labelled
    ``endpoint``.
    """
    path = as_path(g, p)
    nodes = path.nodes
    labels = [ENDPOINT]
    for left, mid, right in zip(nodes, nodes[1:], nodes[2:]):
        into_left = g.is_directed(left, mid)
        into_right = g.is_directed(right, mid)
        out_any = g.is_directed(mid, left) or g.is_directed(mid, right)
        if into_left and into_right:
            labels.append(COLLIDER)
        elif out_any:
            labels.append(DEFINITE_NON_COLLIDER)
        elif (
            g.is_undirected(left, mid)
            and g.is_undirected(mid, right)
            and not g.has_edge(left, right)
        ):
            labels.append(DEFINITE_NON_COLLIDER)
        else:
            labels.append(NOT_DEFINITE)
    labels.append(ENDPOINT)
    return tuple(labels)


def is_definite_status_path(g: PdagGraph, p: "NodePath | Sequence[str]") -> bool:
    return NOT_DEFINITE not in classify_definite_status(g, p)


def has_directed_cycle(g: PdagGraph) -> bool:
    """True iff the directed sub-relation of ``g`` contains a cycle."""
    state: dict[str, int] = {}  # 0 = on stack, 1 = done

    for root in g.nodes:
        if root in state:
            continue
        stack: list[tuple[str, Iterator[str]]] = [(root, iter(sorted(g.children(root))))]
        state[root] = 0
        while stack:
            node, it = stack[-1]
            advanced = False
            for child in it:
                if child not in state:
                    state[child] = 0
                    stack.append((child, iter(sorted(g.children(child)))))
                    advanced = True
                    break
                if state[child] == 0:
                    return True
            if not advanced:
                state[node] = 1
                stack.pop()
    return False


# -- text format -------------------------------------------------------

_EDGE_TOKEN = {"--": UNDIRECTED, "->": "dir"}


def parse_statements(
    text: str,
) -> list[tuple]:
    """Tokenize a graph document into statements, keeping edge weights.

    Returns a list of ``("node", name, line)`` and
    ``("edge", u, v, kind, weight, line)`` tuples where ``kind`` is
    ``"--"`` or ``"->"`` and ``weight`` is a float or None.  Raises
    :class:`GraphParseError` with the line number on malformed input.
    """
    statements: list[tuple] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "node":
            if len(tokens) != 2:
                raise GraphParseError("node directive takes exactly one name", lineno)
            if not NAME_RE.match(tokens[1]):
                raise GraphParseError(f"invalid node name {tokens[1]!r}", lineno)
            statements.append(("node", tokens[1], lineno))
            continue
        if len(tokens) >= 3 and tokens[1] in _EDGE_TOKEN:
            u, op, v = tokens[0], tokens[1], tokens[2]
            for name in (u, v):
                if not NAME_RE.match(name):
                    raise GraphParseError(f"invalid node name {name!r}", lineno)
            weight = None
            if len(tokens) == 4:
                if op != "->":
                    raise GraphParseError(
                        "weights are only allowed on directed edges", lineno
                    )
                try:
                    weight = float(tokens[3])
                except ValueError:
                    raise GraphParseError(
                        f"invalid edge weight {tokens[3]!r}", lineno
                    ) from None
            elif len(tokens) > 4:
                raise GraphParseError("too many tokens on edge statement", lineno)
            statements.append(("edge", u, v, op, weight, lineno))
            continue
        if NAME_RE.match(tokens[0]) and len(tokens) == 1:
            raise GraphParseError(f"syntax error near {tokens[0]!r}", lineno)
        if NAME_RE.match(tokens[0]) and len(tokens) >= 2 and tokens[1] not in _EDGE_TOKEN:
            if NAME_RE.match(tokens[1]) and len(tokens) == 2:
                raise GraphParseError(f"unknown directive {tokens[0]!r}", lineno)
            raise GraphParseError(f"unknown edge operator {tokens[1]!r}", lineno)
        raise GraphParseError(f"syntax error near {tokens[0]!r}", lineno)
    return statements


def parse_graph(text: str) -> PdagGraph:
    """Parse the edge-list graph format into a :class:`PdagGraph`.

    One statement per line: ``node NAME``, ``A -- B`` or ``A -> B`` (an
    optional trailing weight on directed edges is accepted and ignored
    here).  ``#`` starts a comment; blank lines are skipped.  Nodes are
    recorded in order of first mention; a pair may be declared once.
    """
    nodes: list[str] = []
    seen: set[str] = set()
    pairs: set[tuple[str, str]] = set()
    directed: list[tuple[str, str]] = []
    undirected: list[tuple[str, str]] = []

    def ensure(name: str) -> None:
        if name not in seen:
            seen.add(name)
            nodes.append(name)

    for st in parse_statements(text):
        if st[0] == "node":
            ensure(st[1])
            continue
        _, u, v, op, _weight, lineno = st
        if u == v:
            raise GraphParseError(f"self-loop on {u!r}", lineno)
        key = _pair(u, v)
        if key in pairs:
            raise GraphParseError(
                f"duplicate edge between {key[0]!r} and {key[1]!r}", lineno
            )
        pairs.add(key)
        ensure(u)
        ensure(v)
        if op == "--":
            undirected.append((u, v))
        else:
            directed.append((u, v))
    return PdagGraph(nodes, directed=directed, undirected=undirected)


def serialize_graph(g: PdagGraph) -> str:
    """Canonical text form: node directives in declaration order, then
    edges sorted by (min endpoint, max endpoint).  Round-trips through
    :func:`parse_graph` bit-exactly."""
    lines = [f"node {name}" for name in g.nodes]
    for a, b in sorted(g.skeleton()):
        state = g.edge(a, b)
        if state == "--":
            lines.append(f"{a} -- {b}")
        elif state == "->":
            lines.append(f"{a} -> {b}")
        else:
            lines.append(f"{b} -> {a}")
    return "\n".join(lines) + "\n"
