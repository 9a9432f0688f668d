"""Covariate-adjustment identification on maximal PDAGs.

The criterion has three conditions, evaluated in order: every proper
possibly-causal path out of the treatment set must start with a directed
edge (amenability), the candidate set must avoid the forbidden nodes,
and every proper non-causal definite-status path must be blocked.  The
first two are decided from path enumeration with pruning; blocking
delegates to a single DAG extension, where removing the first edge of
every proper causal path and testing d-separation is sound and
complete.  An enumeration-based reference for blocking is kept for
cross-checks on small graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional

from .causal_paths import (
    DEFAULT_ENUMERATION_GUARD,
    b_possible_ancestors,
    b_possible_descendants,
    classify_path,
    node_set,
)
from .extension import consistent_extension
from .pdag_core import (
    COLLIDER,
    DEFINITE_NON_COLLIDER,
    NOT_DEFINITE,
    PdagGraph,
    classify_definite_status,
)


@dataclass(frozen=True)
class ForbiddenSet:
    """Nodes unusable for adjustment, with the on-path nodes they stem from."""

    nodes: frozenset[str]
    on_path: frozenset[str]

    def __contains__(self, node: str) -> bool:
        return node in self.nodes

    def __iter__(self):
        return iter(sorted(self.nodes))


@dataclass(frozen=True)
class ConditionCheck:
    """Boolean outcome plus a violating path when the check fails."""

    ok: bool
    witness: Optional[tuple[str, ...]] = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class AdjustmentVerdict:
    """Per-condition results of the adjustment criterion.

    Conditions are checked in order and evaluation stops at the first
    failure, so later fields may be None (not evaluated).  ``witness``
    is a node-name tuple for a violating path or a single node name for
    a forbidden-set violation.  ``zero_effect`` is advisory: it flags
    that the outcome set cannot possibly descend from the treatments, so
    the total effect is zero even when no adjustment set exists.
    """

    amenable: bool
    forbidden_ok: Optional[bool]
    blocking_ok: Optional[bool]
    overall: bool
    zero_effect: bool
    witness: "tuple[str, ...] | str | None" = None


def _disjoint(name_a: str, a: frozenset, name_b: str, b: frozenset) -> None:
    overlap = a & b
    if overlap:
        raise ValueError(f"{name_a} and {name_b} overlap: {sorted(overlap)}")


def _proper_possibly_causal_paths(
    g: PdagGraph,
    xs: frozenset[str],
    ys: frozenset[str],
    max_nodes: int,
) -> list[tuple[str, ...]]:
    """All proper b-possibly-causal simple paths from ``xs`` to ``ys``.

    Properness means only the first node lies in ``xs``.  Prefixes with a
    backward pair are pruned, as are nodes from which ``ys`` is no longer
    reachable along forward or undirected edges avoiding ``xs``.
    """
    if len(g) > max_nodes:
        raise ValueError(
            f"graph has {len(g)} nodes, above the path-enumeration guard of "
            f"{max_nodes}; raise max_nodes to override"
        )
    order = g.node_index

    # Static viability prune: reverse reachability to ys over usable edges.
    viable = set(ys)
    frontier = list(ys)
    while frontier:
        w = frontier.pop()
        for u in g.parents(w) | g.siblings(w):
            if u not in viable and u not in xs:
                viable.add(u)
                frontier.append(u)

    paths: list[tuple[str, ...]] = []

    def extend(path: list[str], on_path: set[str]) -> None:
        cur = path[-1]
        for w in sorted(g.children(cur) | g.siblings(cur), key=order):
            if w in on_path or w in xs or w not in viable:
                continue
            if g.children(w) & on_path:
                continue  # backward pair against an earlier path node
            path.append(w)
            on_path.add(w)
            if w in ys:
                paths.append(tuple(path))
            extend(path, on_path)
            on_path.discard(w)
            path.pop()

    for x in sorted(xs, key=order):
        extend([x], {x})
    return paths


def forbidden_set(
    g: PdagGraph,
    xs: "str | Iterable[str]",
    ys: "str | Iterable[str]",
    max_nodes: int = DEFAULT_ENUMERATION_GUARD,
) -> ForbiddenSet:
    """Nodes that no adjustment set for (``xs``, ``ys``) may contain.

    Collects every non-treatment node on a proper b-possibly-causal path
    from ``xs`` to ``ys`` and closes the collection under b-possible
    descent.
    """
    xs = node_set(g, xs)
    ys = node_set(g, ys)
    if not xs or not ys:
        raise ValueError("treatment and outcome sets must be non-empty")
    _disjoint("xs", xs, "ys", ys)
    on_path = {
        node for path in _proper_possibly_causal_paths(g, xs, ys, max_nodes) for node in path
    } - xs
    if not on_path:
        return ForbiddenSet(frozenset(), frozenset())
    closed = b_possible_descendants(g, frozenset(on_path)).nodes
    return ForbiddenSet(closed, frozenset(on_path))


def _first_witness(paths: Iterable[tuple[str, ...]]) -> Optional[tuple[str, ...]]:
    ranked = sorted(paths, key=lambda p: (len(p), p))
    return ranked[0] if ranked else None


def is_amenable(
    g: PdagGraph,
    xs: "str | Iterable[str]",
    ys: "str | Iterable[str]",
    max_nodes: int = DEFAULT_ENUMERATION_GUARD,
) -> ConditionCheck:
    """Check that every proper possibly-causal path leaves ``xs`` with a
    directed edge; a shortest offending path is the witness otherwise."""
    xs = node_set(g, xs)
    ys = node_set(g, ys)
    _disjoint("xs", xs, "ys", ys)
    paths = _proper_possibly_causal_paths(g, xs, ys, max_nodes)
    undirected_start = [p for p in paths if g.is_undirected(p[0], p[1])]
    if undirected_start:
        return ConditionCheck(False, _first_witness(undirected_start))
    return ConditionCheck(True)


# -- d-separation in DAGs ----------------------------------------------


def _ancestors(d: PdagGraph, seeds: frozenset[str]) -> set[str]:
    out = set(seeds)
    stack = list(seeds)
    while stack:
        v = stack.pop()
        for p in d.parents(v):
            if p not in out:
                out.add(p)
                stack.append(p)
    return out


def _descendants(d: PdagGraph, seeds: Iterable[str]) -> set[str]:
    out = set(seeds)
    stack = list(out)
    while stack:
        v = stack.pop()
        for c in d.children(v):
            if c not in out:
                out.add(c)
                stack.append(c)
    return out


def d_separated(
    d: PdagGraph,
    xs: "str | Iterable[str]",
    ys: "str | Iterable[str]",
    zs: "str | Iterable[str]" = (),
) -> bool:
    """True iff every path between ``xs`` and ``ys`` in the DAG ``d`` is
    blocked by ``zs``.

    Uses reachability over (node, arrival-direction) states: a collider
    passes the trail on only when it has a descendant in ``zs``, any
    other interior node only when it is outside ``zs``.
    """
    if not d.is_dag():
        raise ValueError("d-separation needs a fully directed acyclic graph")
    xs = node_set(d, xs)
    ys = node_set(d, ys)
    zs = node_set(d, zs)
    _disjoint("xs", xs, "ys", ys)
    _disjoint("xs", xs, "zs", zs)
    _disjoint("ys", ys, "zs", zs)

    anz = _ancestors(d, zs)  # nodes with a descendant in zs, plus zs
    # States: (node, True) = arrived along an edge into the node,
    #         (node, False) = arrived against an edge out of the node.
    seen: set[tuple[str, bool]] = set()
    stack: list[tuple[str, bool]] = []
    for x in xs:
        for c in d.children(x):
            stack.append((c, True))
        for p in d.parents(x):
            stack.append((p, False))
    while stack:
        state = stack.pop()
        if state in seen:
            continue
        seen.add(state)
        v, arrived_in = state
        if v in ys:
            return False
        if arrived_in:
            if v in anz:
                for p in d.parents(v):
                    stack.append((p, False))  # collider opens
            if v not in zs:
                for c in d.children(v):
                    stack.append((c, True))
        else:
            if v not in zs:
                for p in d.parents(v):
                    stack.append((p, False))
                for c in d.children(v):
                    stack.append((c, True))
    return True


def _connecting_path(
    d: PdagGraph,
    xs: frozenset[str],
    ys: frozenset[str],
    zs: frozenset[str],
) -> Optional[tuple[str, ...]]:
    """A shortest d-connecting simple path in ``d``, or None.

    Iterative deepening over simple paths whose interior nodes satisfy
    the blocking conditions; deterministic via node-index order.
    """
    order = d.node_index
    anz = _ancestors(d, zs)

    def extend(path: list[str], on_path: set[str], depth: int) -> Optional[tuple[str, ...]]:
        cur = path[-1]
        if cur in ys:
            return tuple(path)
        if len(path) > depth:
            return None
        arrived_in = len(path) >= 2 and d.is_directed(path[-2], cur)
        for w in sorted(d.adjacent(cur), key=order):
            if w in on_path or w in xs:
                continue
            if len(path) >= 2:
                leaving_in = d.is_directed(w, cur)
                if arrived_in and leaving_in:
                    if cur not in anz:
                        continue
                elif cur in zs:
                    continue
            path.append(w)
            on_path.add(w)
            hit = extend(path, on_path, depth)
            on_path.discard(w)
            path.pop()
            if hit is not None:
                return hit
        return None

    for depth in range(1, len(d.nodes)):
        for x in sorted(xs, key=order):
            hit = extend([x], {x}, depth)
            if hit is not None:
                return hit
    return None


def proper_backdoor_graph(
    d: PdagGraph, xs: frozenset[str], ys: frozenset[str]
) -> PdagGraph:
    """Copy of DAG ``d`` without the first edge of any proper causal path
    from ``xs`` to ``ys``."""
    onward = _ancestors(d.induced(set(d.nodes) - set(xs)), frozenset(ys))
    directed = [
        (t, h) for t, h in d.directed_edges() if not (t in xs and h in onward)
    ]
    return PdagGraph(d.nodes, directed=directed)


def check_b_blocking(
    g: PdagGraph,
    xs: "str | Iterable[str]",
    ys: "str | Iterable[str]",
    zs: "str | Iterable[str]" = (),
    max_nodes: int = DEFAULT_ENUMERATION_GUARD,
) -> ConditionCheck:
    """Check the blocking condition by delegating to one DAG extension.

    Requires the amenability and forbidden-set hypotheses to hold (they
    make the delegation valid); violation is a ValueError.  The witness
    on failure is a d-connecting path certified in the extension DAG.
    """
    xs = node_set(g, xs)
    ys = node_set(g, ys)
    zs = node_set(g, zs)
    _disjoint("zs", zs, "xs", xs)
    _disjoint("zs", zs, "ys", ys)
    if not is_amenable(g, xs, ys, max_nodes).ok:
        raise ValueError("blocking check requires amenability to hold")
    if zs & forbidden_set(g, xs, ys, max_nodes).nodes:
        raise ValueError("blocking check requires zs to avoid the forbidden set")
    return _blocking_fast(g, xs, ys, zs)


def _blocking_fast(
    g: PdagGraph, xs: frozenset[str], ys: frozenset[str], zs: frozenset[str]
) -> ConditionCheck:
    dag = consistent_extension(g)
    if dag is None:
        raise ValueError("graph has no consistent DAG extension")
    pruned = proper_backdoor_graph(dag, xs, ys)
    if d_separated(pruned, xs, ys, zs):
        return ConditionCheck(True)
    return ConditionCheck(False, _connecting_path(pruned, xs, ys, zs))


def b_blocking_by_enumeration(
    g: PdagGraph,
    xs: "str | Iterable[str]",
    ys: "str | Iterable[str]",
    zs: "str | Iterable[str]" = (),
    max_nodes: int = DEFAULT_ENUMERATION_GUARD,
) -> ConditionCheck:
    """Reference blocking semantics: every proper non-causal
    definite-status path from ``xs`` to ``ys`` must be blocked by ``zs``.

    Walks all proper simple paths, so it is guarded and only meant for
    small graphs and cross-checks of the fast route.
    """
    xs = node_set(g, xs)
    ys = node_set(g, ys)
    zs = node_set(g, zs)
    if len(g) > max_nodes:
        raise ValueError(
            f"graph has {len(g)} nodes, above the path-enumeration guard of "
            f"{max_nodes}; raise max_nodes to override"
        )
    order = g.node_index
    violations: list[tuple[str, ...]] = []

    def d_connecting(path: tuple[str, ...]) -> bool:
        labels = classify_definite_status(g, path)
        if NOT_DEFINITE in labels:
            return False  # not a definite-status path
        for node, label in zip(path, labels):
            if label == DEFINITE_NON_COLLIDER and node in zs:
                return False
            if label == COLLIDER and not (_descendants(g, (node,)) & zs):
                return False
        return True

    def extend(path: list[str], on_path: set[str]) -> None:
        cur = path[-1]
        for w in sorted(g.adjacent(cur), key=order):
            if w in on_path or w in xs:
                continue
            path.append(w)
            on_path.add(w)
            if w in ys:
                tup = tuple(path)
                if not classify_path(g, tup).is_b_possibly_causal and d_connecting(tup):
                    violations.append(tup)
            extend(path, on_path)
            on_path.discard(w)
            path.pop()

    for x in sorted(xs, key=order):
        extend([x], {x})
    if violations:
        return ConditionCheck(False, _first_witness(violations))
    return ConditionCheck(True)


def satisfies_b_adjustment(
    g: PdagGraph,
    xs: "str | Iterable[str]",
    ys: "str | Iterable[str]",
    zs: "str | Iterable[str]" = (),
    max_nodes: int = DEFAULT_ENUMERATION_GUARD,
) -> AdjustmentVerdict:
    """Evaluate the three-condition adjustment criterion for ``zs``.

    Conditions run in order with the first failure short-circuiting the
    rest; the verdict also carries the zero-effect flag (outcomes outside
    the possible descendants of the treatments).
    """
    xs = node_set(g, xs)
    ys = node_set(g, ys)
    zs = node_set(g, zs)
    _disjoint("xs", xs, "ys", ys)
    _disjoint("zs", zs, "xs", xs)
    _disjoint("zs", zs, "ys", ys)
    if not xs or not ys:
        raise ValueError("treatment and outcome sets must be non-empty")

    zero_effect = not (ys & b_possible_descendants(g, xs).nodes)
    paths = _proper_possibly_causal_paths(g, xs, ys, max_nodes)

    undirected_start = [p for p in paths if g.is_undirected(p[0], p[1])]
    if undirected_start:
        return AdjustmentVerdict(
            amenable=False,
            forbidden_ok=None,
            blocking_ok=None,
            overall=False,
            zero_effect=zero_effect,
            witness=_first_witness(undirected_start),
        )

    on_path = {node for path in paths for node in path} - xs
    forb = (
        b_possible_descendants(g, frozenset(on_path)).nodes if on_path else frozenset()
    )
    blocked_nodes = zs & forb
    if blocked_nodes:
        return AdjustmentVerdict(
            amenable=True,
            forbidden_ok=False,
            blocking_ok=None,
            overall=False,
            zero_effect=zero_effect,
            witness=min(blocked_nodes, key=g.node_index),
        )

    blocking = _blocking_fast(g, xs, ys, zs)
    return AdjustmentVerdict(
        amenable=True,
        forbidden_ok=True,
        blocking_ok=blocking.ok,
        overall=blocking.ok,
        zero_effect=zero_effect,
        witness=blocking.witness,
    )


def adjust_set(
    g: PdagGraph,
    xs: "str | Iterable[str]",
    ys: "str | Iterable[str]",
    max_nodes: int = DEFAULT_ENUMERATION_GUARD,
) -> Optional[frozenset[str]]:
    """The canonical candidate adjustment set, or None when nothing works.

    Builds possible-ancestors(xs | ys) minus xs, ys and the forbidden
    set, and keeps it only when it passes the criterion; by construction
    no other set can pass when this one fails.
    """
    xs = node_set(g, xs)
    ys = node_set(g, ys)
    candidate = (
        b_possible_ancestors(g, xs | ys).nodes
        - xs
        - ys
        - forbidden_set(g, xs, ys, max_nodes).nodes
    )
    verdict = satisfies_b_adjustment(g, xs, ys, candidate, max_nodes)
    return frozenset(candidate) if verdict.overall else None


def list_adjustment_sets(
    g: PdagGraph,
    xs: "str | Iterable[str]",
    ys: "str | Iterable[str]",
    minimal_only: bool = False,
    max_size: Optional[int] = None,
    universe_cap: int = 20,
    max_nodes: int = DEFAULT_ENUMERATION_GUARD,
) -> list[frozenset[str]]:
    """All (or all minimal) valid adjustment sets at desk scale.

    Candidates are subsets of the nodes outside ``xs``, ``ys`` and the
    forbidden set, enumerated by size and node order.  The candidate
    universe is capped (override with ``universe_cap`` or the
    MPDAGKIT_UNIVERSE_CAP environment variable via the CLI).
    """
    xs = node_set(g, xs)
    ys = node_set(g, ys)
    if not is_amenable(g, xs, ys, max_nodes).ok:
        return []
    forb = forbidden_set(g, xs, ys, max_nodes).nodes
    universe = sorted(set(g.nodes) - xs - ys - forb, key=g.node_index)
    if len(universe) > universe_cap:
        raise ValueError(
            f"candidate universe has {len(universe)} nodes, above the cap of "
            f"{universe_cap}"
        )
    dag = consistent_extension(g)
    if dag is None:
        raise ValueError("graph has no consistent DAG extension")
    pruned = proper_backdoor_graph(dag, xs, ys)

    top = len(universe) if max_size is None else min(max_size, len(universe))
    valid: list[frozenset[str]] = []
    for size in range(top + 1):
        for combo in combinations(universe, size):
            z = frozenset(combo)
            if d_separated(pruned, xs, ys, z):
                valid.append(z)
    if minimal_only:
        valid = [z for z in valid if not any(other < z for other in valid)]
    return valid
