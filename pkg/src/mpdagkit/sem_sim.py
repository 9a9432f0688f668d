"""Linear-SEM simulation: random models, sampling, oracles, and the
background-knowledge study.

Every run is reproducible from one master seed: per-replicate seeds are
the uint64 stream of ``numpy.random.SeedSequence(master)``, and each
replicate derives separate generators for the model, the data, the
treatment/outcome draw and the background-knowledge order by seeding
``default_rng([replicate_seed, purpose])`` with purpose codes 0-3.  The
background generator is re-created identically for every fraction, so a
graph's oriented-edge sets are nested prefixes of one permutation as the
fraction grows; identifiability then improves monotonically row by row
rather than merely on average.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional, Sequence

import numpy as np

from .adjustment import adjust_set, is_amenable
from .ida import ida_effects
from .meek import construct_max_pdag, cpdag_of
from .pdag_core import GraphParseError, PdagGraph, parse_statements

CSV_HEADER = "seed,p,en,fraction,amenable,identifiable,true_effect,n_tuples,n_unique,ms"


@dataclass
class SemModel:
    """A weighted DAG with per-node noise scales.

    ``coefficients`` maps each directed edge (tail, head) to its weight;
    the support must equal the DAG's edge set.  Models drawn by
    :func:`random_dag` keep weight magnitudes in [0.1, 1], but loaded or
    hand-built models may use any finite weights.
    """

    dag: PdagGraph
    coefficients: dict[tuple[str, str], float]
    noise_scales: dict[str, float]

    def __post_init__(self) -> None:
        if not self.dag.is_dag():
            raise ValueError("model graph must be a fully directed DAG")
        edges = set(self.dag.directed_edges())
        if set(self.coefficients) != edges:
            raise ValueError("coefficient support must equal the edge set")
        if set(self.noise_scales) != set(self.dag.nodes):
            raise ValueError("every node needs a noise scale")
        if any(s <= 0 for s in self.noise_scales.values()):
            raise ValueError("noise scales must be positive")

    def topological_order(self) -> list[str]:
        indegree = {v: len(self.dag.parents(v)) for v in self.dag.nodes}
        ready = [v for v in self.dag.nodes if indegree[v] == 0]
        order: list[str] = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for c in sorted(self.dag.children(v), key=self.dag.node_index):
                indegree[c] -= 1
                if indegree[c] == 0:
                    ready.append(c)
        return order

    def coefficient_matrix(self) -> np.ndarray:
        idx = {name: i for i, name in enumerate(self.dag.nodes)}
        B = np.zeros((len(idx), len(idx)))
        for (tail, head), w in self.coefficients.items():
            B[idx[tail], idx[head]] = w
        return B


def random_dag(p: int, en: float, rng: np.random.Generator) -> SemModel:
    """Random linear SEM on nodes V1..Vp in topological order.

    Each forward pair carries an edge independently with probability
    ``en / (p - 1)``; weights are uniform on [-1, -0.1] or [0.1, 1] and
    noise is standard normal.
    """
    if p < 2:
        raise ValueError("need at least two nodes")
    if not 0 < en <= p - 1:
        raise ValueError("expected neighbourhood size must be in (0, p-1]")
    names = [f"V{i}" for i in range(1, p + 1)]
    prob = en / (p - 1)
    directed = []
    coefficients = {}
    for i in range(p):
        for j in range(i + 1, p):
            if rng.random() < prob:
                weight = rng.uniform(0.1, 1.0) * (1 if rng.random() < 0.5 else -1)
                directed.append((names[i], names[j]))
                coefficients[(names[i], names[j])] = float(weight)
    dag = PdagGraph(names, directed=directed)
    return SemModel(dag, coefficients, {n: 1.0 for n in names})


def sample_data(m: SemModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` rows; columns follow the model's node order."""
    if n < 1:
        raise ValueError("need at least one sample")
    idx = {name: i for i, name in enumerate(m.dag.nodes)}
    data = np.empty((n, len(idx)))
    for v in m.topological_order():
        noise = rng.standard_normal(n) * m.noise_scales[v]
        total = noise
        for parent in m.dag.parents(v):
            total = total + m.coefficients[(parent, v)] * data[:, idx[parent]]
        data[:, idx[v]] = total
    return data


def true_total_effect(m: SemModel, xs: "str | Sequence[str]", y: str) -> np.ndarray:
    """Population total effects of each of ``xs`` on ``y``: entries of the
    inverse of (I - B), i.e. sums of coefficient products over directed
    paths; zero when ``y`` is not a descendant."""
    if isinstance(xs, str):
        xs = (xs,)
    if y in xs:
        raise ValueError("outcome must not be an intervention node")
    m.dag.check_nodes(tuple(xs) + (y,))
    idx = {name: i for i, name in enumerate(m.dag.nodes)}
    totals = np.linalg.inv(np.eye(len(idx)) - m.coefficient_matrix())
    return np.array([totals[idx[x], idx[y]] for x in xs])


def add_background_fraction(
    cpdag: PdagGraph,
    true_dag: PdagGraph,
    fraction: float,
    rng: np.random.Generator,
) -> PdagGraph:
    """Orient a random fraction of the undirected edges as in ``true_dag``
    and re-close the rules.

    The sample is the prefix of one random permutation, so two calls with
    identically seeded generators and growing fractions produce nested
    orientation sets.  Fraction 0 returns the input; fraction 1 recovers
    the true DAG.
    """
    if not 0 <= fraction <= 1:
        raise ValueError("fraction must lie in [0, 1]")
    if cpdag.skeleton() != true_dag.skeleton():
        raise ValueError("graph and true DAG must share a skeleton")
    undirected = cpdag.undirected_edges()
    count = int(round(fraction * len(undirected)))
    perm = rng.permutation(len(undirected))
    chosen = [undirected[i] for i in perm[:count]]
    requirements = []
    for a, b in chosen:
        requirements.append((a, b) if true_dag.is_directed(a, b) else (b, a))
    outcome = construct_max_pdag(cpdag, requirements)
    if not outcome.ok:
        raise ValueError(
            f"background edge {outcome.violation} is inconsistent; the input "
            "graph does not represent the true DAG"
        )
    return outcome.graph


def _skeleton_components(g: PdagGraph) -> dict[str, frozenset[str]]:
    comp: dict[str, frozenset[str]] = {}
    unseen = set(g.nodes)
    while unseen:
        root = min(unseen, key=g.node_index)
        members = {root}
        stack = [root]
        while stack:
            v = stack.pop()
            for w in g.adjacent(v):
                if w not in members:
                    members.add(w)
                    stack.append(w)
        frozen = frozenset(members)
        for v in members:
            comp[v] = frozen
        unseen -= members
    return comp


def choose_xy(true_dag: PdagGraph, rng: np.random.Generator) -> tuple[str, str]:
    """Draw a treatment uniformly, then an outcome uniformly among nodes
    in its skeleton component that are not its parents; redraw the
    treatment when no outcome qualifies."""
    comp = _skeleton_components(true_dag)
    nodes = true_dag.nodes

    def candidates(x: str) -> list[str]:
        banned = true_dag.parents(x) | {x}
        return sorted(comp[x] - banned, key=true_dag.node_index)

    if not any(candidates(v) for v in nodes):
        raise ValueError("no valid treatment/outcome pair exists in this graph")
    while True:
        x = nodes[int(rng.integers(len(nodes)))]
        pool = candidates(x)
        if pool:
            y = pool[int(rng.integers(len(pool)))]
            return x, y


@dataclass(frozen=True)
class SimConfig:
    """Grid for the simulation study; defaults are the desk-scale grid."""

    node_counts: tuple[int, ...] = (10, 20)
    neighborhood_sizes: tuple[float, ...] = (3.0, 5.0)
    graphs_per_setting: int = 200
    sample_size: int = 200
    fractions: tuple[float, ...] = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
    seed: int = 0

    def __post_init__(self) -> None:
        if list(self.fractions) != sorted(self.fractions):
            raise ValueError("fractions must be sorted")
        if any(not 0 <= f <= 1 for f in self.fractions):
            raise ValueError("fractions must lie in [0, 1]")
        if self.sample_size <= max(self.node_counts):
            raise ValueError("sample size must exceed the largest node count")
        if self.graphs_per_setting < 1:
            raise ValueError("need at least one graph per setting")


@dataclass(frozen=True)
class SimRow:
    seed: int
    p: int
    en: float
    fraction: float
    amenable: bool
    identifiable: bool
    true_effect: float
    n_tuples: int
    n_unique: int
    ms: float


def _replicate_rows(
    rep_seed: int,
    p: int,
    en: float,
    cfg: SimConfig,
) -> list[SimRow]:
    rng_model = np.random.default_rng([rep_seed, 0])
    rng_data = np.random.default_rng([rep_seed, 1])
    rng_xy = np.random.default_rng([rep_seed, 2])

    model = random_dag(p, en, rng_model)
    data = sample_data(model, cfg.sample_size, rng_data)
    x, y = choose_xy(model.dag, rng_xy)
    cpdag = cpdag_of(model.dag)
    truth = float(true_total_effect(model, x, y)[0])

    rows = []
    for fraction in cfg.fractions:
        start = time.perf_counter()
        rng_bg = np.random.default_rng([rep_seed, 3])
        graph = add_background_fraction(cpdag, model.dag, fraction, rng_bg)
        amen = bool(is_amenable(graph, x, y, max_nodes=p).ok)
        identifiable = adjust_set(graph, x, y, max_nodes=p) is not None
        effects = ida_effects(graph, x, y, data)
        elapsed_ms = (time.perf_counter() - start) * 1000.0
        rows.append(
            SimRow(
                seed=rep_seed,
                p=p,
                en=en,
                fraction=fraction,
                amenable=amen,
                identifiable=identifiable,
                true_effect=truth,
                n_tuples=len(effects),
                n_unique=effects.unique_count(),
                ms=elapsed_ms,
            )
        )
    return rows


def run_simulation(cfg: SimConfig, csv_path: Optional[str] = None) -> list[SimRow]:
    """Run the study grid and return one row per (graph, fraction).

    Row order is deterministic: settings in grid order, replicates in
    seed order, fractions ascending.  When ``csv_path`` is given the rows
    are also written there in the documented CSV schema.
    """
    settings = list(product(cfg.node_counts, cfg.neighborhood_sizes))
    total = len(settings) * cfg.graphs_per_setting
    seeds = np.random.SeedSequence(cfg.seed).generate_state(total, dtype=np.uint64)
    rows: list[SimRow] = []
    k = 0
    for p, en in settings:
        for _ in range(cfg.graphs_per_setting):
            rows.extend(_replicate_rows(int(seeds[k]), p, en, cfg))
            k += 1
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            fh.write(rows_to_csv(rows))
    return rows


def rows_to_csv(rows: Iterable[SimRow]) -> str:
    """Render rows in the stable CSV schema (10 significant digits)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for row in rows:
        writer.writerow(
            [
                row.seed,
                row.p,
                format(row.en, ".10g"),
                format(row.fraction, ".10g"),
                "true" if row.amenable else "false",
                "true" if row.identifiable else "false",
                format(row.true_effect, ".10g"),
                row.n_tuples,
                row.n_unique,
                format(row.ms, ".10g"),
            ]
        )
    return buf.getvalue()


def load_sem_model(text: str) -> SemModel:
    """Parse a SEM model from the graph format: directed weighted edges.

    Every edge must be directed and carry a weight; noise scales default
    to 1.  Isolated nodes may be declared with ``node`` directives.
    """
    nodes: list[str] = []
    seen: set[str] = set()
    directed: list[tuple[str, str]] = []
    coefficients: dict[tuple[str, str], float] = {}

    def ensure(name: str) -> None:
        if name not in seen:
            seen.add(name)
            nodes.append(name)

    for st in parse_statements(text):
        if st[0] == "node":
            ensure(st[1])
            continue
        _, u, v, op, weight, lineno = st
        if op != "->":
            raise GraphParseError("SEM models allow only directed edges", lineno)
        if weight is None:
            raise GraphParseError(f"edge {u} -> {v} needs a weight", lineno)
        ensure(u)
        ensure(v)
        if (u, v) in coefficients:
            raise GraphParseError(f"duplicate edge between {u!r} and {v!r}", lineno)
        directed.append((u, v))
        coefficients[(u, v)] = weight
    dag = PdagGraph(nodes, directed=directed)
    return SemModel(dag, coefficients, {n: 1.0 for n in nodes})


def serialize_sem_model(m: SemModel) -> str:
    lines = [f"node {name}" for name in m.dag.nodes]
    for tail, head in m.dag.directed_edges():
        lines.append(f"{tail} -> {head} {m.coefficients[(tail, head)]!r}")
    return "\n".join(lines) + "\n"
