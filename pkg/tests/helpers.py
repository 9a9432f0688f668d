"""Independent reference implementations used only by the tests.

These deliberately avoid the library's production code paths: the
restart-scan closure re-derives the orientation rules from scratch, and
the DAG-level adjustment oracle evaluates the criterion by brute-force
path enumeration.
"""

from itertools import permutations

from mpdagkit.pdag_core import PdagGraph


class ScanState:
    def __init__(self, g: PdagGraph):
        self.nodes = list(g.nodes)
        self.und = {n: set(g.siblings(n)) for n in g.nodes}
        self.pa = {n: set(g.parents(n)) for n in g.nodes}
        self.ch = {n: set(g.children(n)) for n in g.nodes}

    def adj(self, u, v):
        return v in self.und[u] or v in self.pa[u] or v in self.ch[u]

    def orient(self, u, v):
        assert v in self.und[u]
        self.und[u].discard(v)
        self.und[v].discard(u)
        self.ch[u].add(v)
        self.pa[v].add(u)

    def freeze(self) -> PdagGraph:
        directed = [(u, v) for u in self.nodes for v in sorted(self.ch[u])]
        undirected = [
            (u, v) for u in self.nodes for v in sorted(self.und[u]) if u < v
        ]
        return PdagGraph(self.nodes, directed=directed, undirected=undirected)


def _rule1(s: ScanState):
    for a in s.nodes:
        for b in sorted(s.ch[a]):
            for c in sorted(s.und[b]):
                if c != a and not s.adj(a, c):
                    return (b, c)
    return None


def _rule2(s: ScanState):
    for a in s.nodes:
        for b in sorted(s.ch[a]):
            for c in sorted(s.ch[b]):
                if c in s.und[a]:
                    return (a, c)
    return None


def _rule3(s: ScanState):
    for i in s.nodes:
        for b in sorted(s.und[i]):
            parents = sorted(s.pa[b] & s.und[i])
            for x in parents:
                for w in parents:
                    if x < w and not s.adj(x, w):
                        return (i, b)
    return None


def _rule4(s: ScanState):
    # i - j, i - l, i - k, j -> l, l -> k, j and k non-adjacent  =>  i -> k
    for i in s.nodes:
        for k in sorted(s.und[i]):
            for l in sorted(s.pa[k] & s.und[i]):
                for j in sorted(s.pa[l] & s.und[i]):
                    if j != k and not s.adj(j, k):
                        return (i, k)
    return None


_RULES = {"R1": _rule1, "R2": _rule2, "R3": _rule3, "R4": _rule4}


def scan_close(g: PdagGraph, rule_order=("R1", "R2", "R3", "R4")) -> PdagGraph:
    """Reference closure: scan rules in the given order, restart on change."""
    s = ScanState(g)
    changed = True
    while changed:
        changed = False
        for name in rule_order:
            hit = _RULES[name](s)
            if hit is not None:
                s.orient(*hit)
                changed = True
                break
    return s.freeze()


def scan_construct(g: PdagGraph, requirements, rule_order=("R1", "R2", "R3", "R4")):
    """Reference merge of required orientations; returns graph or None."""
    s = ScanState(g)
    for x, y in requirements:
        if y in s.ch[x]:
            continue
        if y not in s.und[x]:
            return None
        s.orient(x, y)
        frozen = scan_close(s.freeze(), rule_order)
        from mpdagkit.pdag_core import has_directed_cycle

        if has_directed_cycle(frozen):
            return None
        s = ScanState(frozen)
    return s.freeze()


def all_rule_orders():
    return list(permutations(("R1", "R2", "R3", "R4")))


# -- DAG-level adjustment oracle -----------------------------------------


def dag_descendants(d: PdagGraph, node: str) -> set:
    out = {node}
    stack = [node]
    while stack:
        v = stack.pop()
        for c in d.children(v):
            if c not in out:
                out.add(c)
                stack.append(c)
    return out


def _proper_paths(d: PdagGraph, xs: frozenset, ys: frozenset):
    """All proper simple paths (any edge directions) from xs to ys."""
    paths = []

    def extend(path, on_path):
        cur = path[-1]
        for w in sorted(d.adjacent(cur)):
            if w in on_path or w in xs:
                continue
            path.append(w)
            on_path.add(w)
            if w in ys:
                paths.append(tuple(path))
            extend(path, on_path)
            on_path.discard(w)
            path.pop()

    for x in sorted(xs):
        extend([x], {x})
    return paths


def _is_causal(d: PdagGraph, path) -> bool:
    return all(d.is_directed(u, v) for u, v in zip(path, path[1:]))


def _path_blocked(d: PdagGraph, path, zs: frozenset) -> bool:
    for i in range(1, len(path) - 1):
        left, mid, right = path[i - 1], path[i], path[i + 1]
        collider = d.is_directed(left, mid) and d.is_directed(right, mid)
        if collider:
            if not (dag_descendants(d, mid) & zs):
                return True
        elif mid in zs:
            return True
    return False


def dag_forbidden(d: PdagGraph, xs: frozenset, ys: frozenset) -> set:
    on_causal = set()
    for path in _proper_paths(d, xs, ys):
        if _is_causal(d, path):
            on_causal.update(path[1:])
    forb = set()
    for w in on_causal:
        forb |= dag_descendants(d, w)
    return forb


def dag_adjustment_criterion(d: PdagGraph, xs, ys, zs) -> bool:
    """Sound-and-complete DAG criterion by exhaustive path enumeration."""
    xs, ys, zs = frozenset(xs), frozenset(ys), frozenset(zs)
    if zs & dag_forbidden(d, xs, ys):
        return False
    for path in _proper_paths(d, xs, ys):
        if not _is_causal(d, path) and not _path_blocked(d, path, zs):
            return False
    return True
