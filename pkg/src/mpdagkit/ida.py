"""Possible (joint) parent sets of intervention nodes and effect multisets.

Instead of listing every DAG in the class, each subset of a node's
undirected neighbours is promoted to required parents (with the rest
required as children); a subset is kept exactly when that local
knowledge merges consistently into the graph.  Effects are one linear
regression per surviving parent set, or path tracing through a fitted
extension DAG for joint interventions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .extension import consistent_extension
from .meek import BackgroundKnowledge, construct_max_pdag
from .pdag_core import PdagGraph

DEDUP_TOLERANCE = 1e-8


@dataclass(frozen=True)
class PossibleParents:
    """One accepted combination: parent set per intervention node, plus
    the sibling subset that was promoted to parents for each."""

    parents: tuple[frozenset[str], ...]
    chosen_siblings: tuple[frozenset[str], ...]


@dataclass(frozen=True)
class ParentSetFamily:
    """All accepted (joint) parent-set tuples for the intervention nodes."""

    interventions: tuple[str, ...]
    entries: tuple[PossibleParents, ...]

    def tuples(self) -> list[tuple[frozenset[str], ...]]:
        return [entry.parents for entry in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True)
class EffectMultiset:
    """Effect values aligned one-to-one with a parent-set family.

    Values are floats for a single intervention and equal-length tuples
    of floats for joint interventions; failed (rank-deficient) fits are
    NaN.  The dedup view depends only on the values and the tolerance.
    """

    family: ParentSetFamily
    values: tuple
    tolerance: float = DEDUP_TOLERANCE

    def __len__(self) -> int:
        return len(self.values)

    def unique_values(self, tolerance: Optional[float] = None) -> list:
        tol = self.tolerance if tolerance is None else tolerance
        vectors = [
            value if isinstance(value, tuple) else (value,) for value in self.values
        ]
        if not vectors:
            return []
        nan_seen = any(any(math.isnan(c) for c in vec) for vec in vectors)
        clean = [vec for vec in vectors if not any(math.isnan(c) for c in vec)]
        reps: list[tuple] = []
        for vec in sorted(clean):
            if not reps or max(abs(a - b) for a, b in zip(vec, reps[-1])) > tol:
                reps.append(vec)
        out = [rep if len(rep) > 1 else rep[0] for rep in reps]
        if nan_seen:
            out.append(float("nan") if len(vectors[0]) == 1 else (float("nan"),) * len(vectors[0]))
        return out

    def unique_count(self, tolerance: Optional[float] = None) -> int:
        return len(self.unique_values(tolerance))


def _sibling_pools(g: PdagGraph, xs: Sequence[str]) -> list[list[str]]:
    pools = []
    for i, x in enumerate(xs):
        earlier = set(xs[:i])
        pools.append(sorted(g.siblings(x) - earlier, key=g.node_index))
    return pools


def _local_background(
    xs: Sequence[str],
    pools: list[list[str]],
    chosen: Sequence[frozenset[str]],
) -> BackgroundKnowledge:
    reqs: list[tuple[str, str]] = []
    for x, pool, picked in zip(xs, pools, chosen):
        for a in pool:
            if a in picked:
                reqs.append((a, x))
            else:
                reqs.append((x, a))
    return BackgroundKnowledge(reqs)


def possible_parent_sets(g: PdagGraph, xs: Sequence[str]) -> ParentSetFamily:
    """All joint parent-set tuples of ``xs`` consistent with ``g``.

    For every combination of sibling subsets (a binary counter per
    intervention node over its canonically ordered siblings, later nodes
    excluding earlier intervention nodes), the corresponding required
    orientations are merged into ``g``; accepted combinations record the
    parent sets read from the merged graph.
    """
    xs = tuple(xs)
    if len(set(xs)) != len(xs):
        raise ValueError("intervention nodes must be distinct")
    g.check_nodes(xs)
    pools = _sibling_pools(g, xs)

    entries: list[PossibleParents] = []
    counters = [range(1 << len(pool)) for pool in pools]

    def combos(i: int, acc: list[frozenset[str]]) -> None:
        if i == len(pools):
            chosen = tuple(acc)
            bg = _local_background(xs, pools, chosen)
            outcome = construct_max_pdag(g, bg)
            if outcome.ok:
                parents = tuple(frozenset(outcome.graph.parents(x)) for x in xs)
                entries.append(PossibleParents(parents, chosen))
            return
        pool = pools[i]
        for code in counters[i]:
            picked = frozenset(pool[j] for j in range(len(pool)) if code >> j & 1)
            acc.append(picked)
            combos(i + 1, acc)
            acc.pop()

    combos(0, [])
    return ParentSetFamily(xs, tuple(entries))


def _columns_index(
    g: PdagGraph, data: np.ndarray, columns: Optional[Sequence[str]]
) -> dict[str, int]:
    names = tuple(columns) if columns is not None else g.nodes
    if set(names) != set(g.nodes) or len(names) != len(g.nodes):
        raise ValueError("data columns do not match the graph's nodes")
    if data.ndim != 2 or data.shape[1] != len(names):
        raise ValueError(
            f"data must be a 2-d matrix with {len(names)} columns, got {data.shape}"
        )
    return {name: i for i, name in enumerate(names)}


def _regression_coefficient(
    data: np.ndarray, col: dict[str, int], target: str, regressors: list[str]
) -> float:
    """Least-squares coefficient of the first regressor, NaN when the
    design matrix is rank deficient."""
    n = data.shape[0]
    design = np.column_stack(
        [np.ones(n)] + [data[:, col[name]] for name in regressors]
    )
    response = data[:, col[target]]
    solution, _, rank, _ = np.linalg.lstsq(design, response, rcond=None)
    if rank < design.shape[1]:
        return float("nan")
    return float(solution[1])


def ida_effects(
    g: PdagGraph,
    x: str,
    y: str,
    data: np.ndarray,
    columns: Optional[Sequence[str]] = None,
) -> EffectMultiset:
    """Multiset of possible total effects of ``x`` on ``y``.

    One value per possible parent set ``P`` of ``x``: zero when ``y`` is
    in ``P``, otherwise the coefficient of ``x`` when ``y`` is regressed
    on ``x`` and ``P``.
    """
    if x == y:
        raise ValueError("intervention and outcome must differ")
    data = np.asarray(data, dtype=float)
    col = _columns_index(g, data, columns)
    if data.shape[0] <= len(g.nodes):
        raise ValueError("need more samples than variables")
    family = possible_parent_sets(g, (x,))
    values = []
    for entry in family:
        parents = entry.parents[0]
        if y in parents:
            values.append(0.0)
            continue
        regressors = [x] + sorted(parents, key=g.node_index)
        values.append(_regression_coefficient(data, col, y, regressors))
    return EffectMultiset(family, tuple(values))


def _fit_coefficient_matrix(
    dag: PdagGraph, data: np.ndarray, col: dict[str, int]
) -> np.ndarray:
    """Node-wise least squares on DAG parents; B[i, j] is the fitted
    direct effect of node i on node j (node order of the graph)."""
    p = len(dag.nodes)
    idx = {name: i for i, name in enumerate(dag.nodes)}
    n = data.shape[0]
    B = np.zeros((p, p))
    for v in dag.nodes:
        parents = sorted(dag.parents(v), key=idx.__getitem__)
        if not parents:
            continue
        design = np.column_stack(
            [np.ones(n)] + [data[:, col[name]] for name in parents]
        )
        response = np.asarray(data[:, col[v]], dtype=float)
        solution, _, rank, _ = np.linalg.lstsq(design, response, rcond=None)
        if rank < design.shape[1]:
            B[[idx[name] for name in parents], idx[v]] = float("nan")
        else:
            for k, name in enumerate(parents):
                B[idx[name], idx[v]] = solution[k + 1]
    return B


def joint_ida_effects(
    g: PdagGraph,
    xs: Sequence[str],
    y: str,
    data: np.ndarray,
    columns: Optional[Sequence[str]] = None,
) -> EffectMultiset:
    """Multiset of possible joint total effects of ``xs`` on ``y``.

    For each accepted parent-set combination the graph is oriented by
    the combination's required edges, one DAG extension is fitted node
    by node, and the effect vector is read from the inverse of
    (I - B) at the treatment rows and outcome column (the sum over
    directed paths of fitted coefficient products).
    """
    xs = tuple(xs)
    if y in xs:
        raise ValueError("outcome must not be an intervention node")
    data = np.asarray(data, dtype=float)
    col = _columns_index(g, data, columns)
    if data.shape[0] <= len(g.nodes):
        raise ValueError("need more samples than variables")
    family = possible_parent_sets(g, xs)
    pools = _sibling_pools(g, xs)
    idx = {name: i for i, name in enumerate(g.nodes)}

    values = []
    for entry in family:
        outcome = construct_max_pdag(g, _local_background(xs, pools, entry.chosen_siblings))
        assert outcome.ok, "accepted combination must merge consistently"
        dag = consistent_extension(outcome.graph)
        assert dag is not None, "merged graph of an accepted combination extends"
        B = _fit_coefficient_matrix(dag, data, col)
        if np.isnan(B).any():
            values.append((float("nan"),) * len(xs))
            continue
        totals = np.linalg.inv(np.eye(len(idx)) - B)
        values.append(tuple(float(totals[idx[x], idx[y]]) for x in xs))
    return EffectMultiset(family, tuple(values))
