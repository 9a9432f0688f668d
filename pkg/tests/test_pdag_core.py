import numpy as np
import pytest

from mpdagkit.pdag_core import (
    COLLIDER,
    DEFINITE_NON_COLLIDER,
    ENDPOINT,
    NOT_DEFINITE,
    GraphParseError,
    NodePath,
    PdagGraph,
    classify_definite_status,
    has_directed_cycle,
    neighborhood,
    parse_graph,
    serialize_graph,
)

from conftest import edge_states, same_graph


def random_graph(rng: np.random.Generator, p: int) -> PdagGraph:
    names = [f"N{i}" for i in range(p)]
    directed, undirected = [], []
    for i in range(p):
        for j in range(i + 1, p):
            roll = rng.integers(4)
            if roll == 1:
                undirected.append((names[i], names[j]))
            elif roll == 2:
                directed.append((names[i], names[j]))
            elif roll == 3:
                directed.append((names[j], names[i]))
    return PdagGraph(names, directed=directed, undirected=undirected)


class TestParsing:
    def test_figure_one_skeleton(self, fig1_cpdag):
        assert fig1_cpdag.nodes == ("A", "B", "D", "C")
        assert edge_states(fig1_cpdag) == {
            ("A", "B"): "--",
            ("A", "D"): "--",
            ("B", "C"): "--",
            ("B", "D"): "--",
            ("C", "D"): "--",
        }

    def test_isolated_node_directive(self):
        g = parse_graph("node X")
        assert g.nodes == ("X",)
        assert g.edge_count() == 0

    def test_duplicate_pair_rejected(self):
        with pytest.raises(GraphParseError, match="duplicate edge") as err:
            parse_graph("A -> B\nB -> A")
        assert err.value.line == 2

    def test_duplicate_pair_mixed_kinds(self):
        with pytest.raises(GraphParseError, match="duplicate edge"):
            parse_graph("A -- B\nA -> B")

    def test_self_loop_rejected(self):
        with pytest.raises(GraphParseError, match="self-loop"):
            parse_graph("A -> A")

    def test_unknown_directive(self):
        with pytest.raises(GraphParseError, match="unknown directive") as err:
            parse_graph("# fine\nnodes X")
        assert err.value.line == 2

    def test_syntax_error_has_line_number(self):
        with pytest.raises(GraphParseError, match="line 3"):
            parse_graph("A -- B\n\nA => C")

    def test_comments_and_blank_lines(self):
        g = parse_graph("# header\nA -- B  # trailing\n\nnode C\n")
        assert g.nodes == ("A", "B", "C")
        assert g.is_undirected("A", "B")

    def test_weight_accepted_on_directed_edges(self):
        g = parse_graph("A -> B 0.75")
        assert g.is_directed("A", "B")

    def test_weight_rejected_on_undirected_edges(self):
        with pytest.raises(GraphParseError, match="directed"):
            parse_graph("A -- B 0.75")

    def test_bad_name_rejected(self):
        with pytest.raises(GraphParseError, match="invalid node name"):
            parse_graph("1up -> B")

    def test_round_trip_fixture(self, fig1_cpdag):
        assert parse_graph(serialize_graph(fig1_cpdag)) == fig1_cpdag

    def test_round_trip_random(self):
        rng = np.random.default_rng(20240811)
        for _ in range(1000):
            g = random_graph(rng, int(rng.integers(1, 16)))
            assert parse_graph(serialize_graph(g)) == g


class TestGraphValue:
    def test_duplicate_node_name(self):
        with pytest.raises(ValueError, match="duplicate node"):
            PdagGraph(["A", "A"])

    def test_unknown_endpoint(self):
        with pytest.raises(ValueError, match="not a declared node"):
            PdagGraph(["A"], directed=[("A", "B")])

    def test_edge_queries(self, fig1_mpdag):
        assert fig1_mpdag.edge("D", "B") == "->"
        assert fig1_mpdag.edge("B", "D") == "<-"
        assert fig1_mpdag.edge("A", "B") == "--"
        assert fig1_mpdag.edge("A", "C") is None

    def test_reversed_flips_directed_only(self, fig1_mpdag):
        rev = fig1_mpdag.reversed()
        assert rev.is_directed("B", "D")
        assert rev.is_undirected("A", "B")

    def test_hashable_value_semantics(self, fig1_mpdag):
        twin = PdagGraph(
            fig1_mpdag.nodes,
            directed=fig1_mpdag.directed_edges(),
            undirected=fig1_mpdag.undirected_edges(),
        )
        assert twin == fig1_mpdag
        assert hash(twin) == hash(fig1_mpdag)
        assert len({twin, fig1_mpdag}) == 1


class TestNeighborhood:
    def test_mpdag_example(self, fig1_mpdag):
        hood = neighborhood(fig1_mpdag, "B")
        assert hood.parents == {"D"}
        assert hood.children == frozenset()
        assert hood.siblings == {"A", "C"}

    def test_cpdag_example(self, fig1_cpdag):
        hood = neighborhood(fig1_cpdag, "B")
        assert hood.parents == frozenset()
        assert hood.children == frozenset()
        assert hood.siblings == {"A", "C", "D"}

    def test_isolated_node(self):
        hood = neighborhood(parse_graph("node X"), "X")
        assert hood.parents == hood.children == hood.siblings == frozenset()

    def test_unknown_node(self, fig1_cpdag):
        with pytest.raises(KeyError, match="unknown node"):
            neighborhood(fig1_cpdag, "Z")

    def test_partition_property(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            g = random_graph(rng, 8)
            for v in g.nodes:
                hood = neighborhood(g, v)
                union = hood.parents | hood.children | hood.siblings
                assert union == g.adjacent(v)
                total = len(hood.parents) + len(hood.children) + len(hood.siblings)
                assert total == len(union)


class TestDefiniteStatus:
    def test_shielded_mixed_triple_is_not_definite(self, fig1_mpdag):
        labels = classify_definite_status(fig1_mpdag, ("D", "B", "C"))
        assert labels == (ENDPOINT, NOT_DEFINITE, ENDPOINT)

    def test_collider(self):
        g = parse_graph("X -> Z\nY -> Z")
        assert classify_definite_status(g, ("X", "Z", "Y"))[1] == COLLIDER

    def test_unshielded_undirected_triple(self):
        g = parse_graph("A -- B\nB -- C")
        assert (
            classify_definite_status(g, ("A", "B", "C"))[1] == DEFINITE_NON_COLLIDER
        )

    def test_edge_out_is_definite_non_collider(self):
        g = parse_graph("B -> A\nB -> C\nA -- C")
        assert (
            classify_definite_status(g, ("A", "B", "C"))[1] == DEFINITE_NON_COLLIDER
        )

    def test_reversal_preserves_labels(self):
        rng = np.random.default_rng(99)
        for _ in range(200):
            g = random_graph(rng, 6)
            path = _random_path(g, rng)
            if path is None:
                continue
            forward = classify_definite_status(g, path)
            backward = classify_definite_status(g, path[::-1])
            assert forward == backward[::-1]


def _random_path(g, rng, max_len=5):
    start = g.nodes[int(rng.integers(len(g.nodes)))]
    path = [start]
    seen = {start}
    while len(path) < max_len:
        options = sorted(g.adjacent(path[-1]) - seen)
        if not options:
            break
        nxt = options[int(rng.integers(len(options)))]
        path.append(nxt)
        seen.add(nxt)
    return tuple(path) if len(path) >= 2 else None


class TestCycles:
    def test_mpdag_has_none(self, fig1_mpdag):
        assert not has_directed_cycle(fig1_mpdag)

    def test_three_cycle(self):
        g = PdagGraph("ABC", directed=[("A", "B"), ("B", "C"), ("C", "A")])
        assert has_directed_cycle(g)

    def test_undirected_triangle(self):
        g = PdagGraph("ABC", undirected=[("A", "B"), ("B", "C"), ("A", "C")])
        assert not has_directed_cycle(g)


class TestNodePath:
    def test_rejects_short_and_repeated(self, fig1_cpdag):
        with pytest.raises(ValueError):
            NodePath(fig1_cpdag, ("A",))
        with pytest.raises(ValueError, match="repeats"):
            NodePath(fig1_cpdag, ("A", "B", "A"))

    def test_rejects_non_adjacent_step(self, fig1_cpdag):
        with pytest.raises(ValueError, match="not adjacent"):
            NodePath(fig1_cpdag, ("A", "C"))

    def test_same_graph_required(self, fig1_cpdag, fig3_cpdag):
        path = NodePath(fig1_cpdag, ("A", "B"))
        from mpdagkit.pdag_core import as_path

        with pytest.raises(ValueError, match="different graph"):
            as_path(fig3_cpdag, path)


def test_same_graph_helper(fig1_cpdag):
    reordered = PdagGraph(
        sorted(fig1_cpdag.nodes),
        undirected=fig1_cpdag.undirected_edges(),
    )
    assert same_graph(fig1_cpdag, reordered)
    assert reordered != fig1_cpdag
