"""
Tests for ordering: reachability sets, weak coloring numbers, admissibility.
"""

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from errors import CapacityError, GraphParseError, ParameterError
from graph_core import Graph, gen_complete, gen_cycle, gen_edgeless, gen_grid, gen_path, gen_star
from ordering import (
    LinearOrdering,
    adm_exact,
    adm_under,
    admissibility_bound_holds,
    best_ordering,
    heuristic_ordering,
    kappa,
    load_ordering,
    reachable_set,
    save_ordering,
    wcol_exact,
    wcol_under,
    weak_reach_sets,
)

PROPERTY_SETTINGS = settings(
    max_examples=80,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)


@st.composite
def graphs_with_orderings(draw, max_n=8):
    n = draw(st.integers(min_value=1, max_value=max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    sequence = draw(st.permutations(range(n)))
    return Graph.from_edges(n, edges), LinearOrdering.from_sequence(sequence)


class TestLinearOrdering:
    def test_bijection_checked(self):
        with pytest.raises(ParameterError):
            LinearOrdering.from_sequence([0, 0, 1])
        with pytest.raises(ParameterError):
            LinearOrdering((0, 0), (0, 1))

    def test_precedes(self):
        order = LinearOrdering.from_sequence([2, 0, 1])
        assert order.precedes(2, 0)
        assert not order.precedes(1, 0)

    def test_induced_keeps_relative_order(self):
        order = LinearOrdering.from_sequence([4, 2, 0, 3, 1])
        local = order.induced((0, 2, 4))
        # local ids: 0 -> 0, 1 -> 2, 2 -> 4; global order 4, 2, 0
        assert local.inverse == (2, 1, 0)

    def test_file_round_trip(self):
        order = LinearOrdering.from_sequence([3, 1, 0, 2])
        assert load_ordering(save_ordering(order), 4) == order

    def test_file_errors(self):
        with pytest.raises(GraphParseError, match="line 2"):
            load_ordering("0\nx\n", 2)
        with pytest.raises(GraphParseError):
            load_ordering("0\n", 2)
        with pytest.raises(GraphParseError):
            load_ordering("1\n1\n", 2)

    def test_best_ordering_from_file(self, tmp_path):
        path = tmp_path / "order.txt"
        path.write_text("2\n1\n0\n", encoding="utf-8")
        order = best_ordering(gen_path(3), 1, "file", str(path))
        assert order.inverse == (2, 1, 0)
        with pytest.raises(ParameterError):
            best_ordering(gen_path(3), 1, "sideways")


class TestReachableSet:
    def test_radius_zero(self):
        g = gen_grid(3)
        order = LinearOrdering.identity(9)
        assert reachable_set(g, order, 0, 4) == frozenset({4})

    def test_path_last_vertex(self):
        g = gen_path(3)
        assert reachable_set(g, LinearOrdering.identity(3), 2, 2) == frozenset({0, 1, 2})

    def test_star_leaf_center_first(self):
        g = gen_star(3)
        assert reachable_set(g, LinearOrdering.identity(4), 1, 2) == frozenset({0, 2})

    def test_path_through_smaller_vertex_does_not_count(self):
        # 1 - 0 - 2 with 0 first: from 2, vertex 1 is behind a smaller vertex
        g = Graph.from_edges(3, [(0, 1), (0, 2)])
        order = LinearOrdering.identity(3)
        assert reachable_set(g, order, 2, 2) == frozenset({0, 2})

    @PROPERTY_SETTINGS
    @given(instance=graphs_with_orderings(), r=st.integers(0, 4))
    def test_matches_bulk_sets_and_grows_with_r(self, instance, r):
        g, order = instance
        bulk = weak_reach_sets(g, order, r)
        wider = weak_reach_sets(g, order, r + 1)
        for v in g.vertices():
            assert reachable_set(g, order, r, v) == bulk[v]
            assert v in bulk[v]
            assert bulk[v] <= wider[v]
        first = order.inverse[0]
        assert bulk[first] == frozenset({first})


class TestWcol:
    def test_edgeless(self):
        assert wcol_under(gen_edgeless(5), LinearOrdering.identity(5), 3) == 1
        assert wcol_exact(gen_edgeless(4), 2)[0] == 1

    def test_star_center_first(self):
        assert wcol_under(gen_star(3), LinearOrdering.identity(4), 1) == 2

    def test_path(self):
        assert wcol_under(gen_path(3), LinearOrdering.identity(3), 2) == 3

    def test_empty_graph_rejected(self):
        with pytest.raises(ParameterError):
            wcol_under(gen_edgeless(0), LinearOrdering.identity(0), 1)

    def test_exact_triangle(self):
        assert wcol_exact(gen_complete(3), 1)[0] == 3

    def test_exact_star_witness(self):
        value, order = wcol_exact(gen_star(3), 2)
        assert value == 2
        assert order.position[0] == 0
        assert wcol_under(gen_star(3), order, 2) == 2

    def test_exact_cap(self, monkeypatch):
        monkeypatch.setenv("SEP_EXACT_CAPS", "wcol=5")
        with pytest.raises(CapacityError) as excinfo:
            wcol_exact(gen_path(6), 1)
        assert excinfo.value.cap_name == "wcol"
        assert "SEP_EXACT_CAPS" in str(excinfo.value)

    @PROPERTY_SETTINGS
    @given(instance=graphs_with_orderings(max_n=7), r=st.integers(1, 3))
    def test_exact_never_worse_than_heuristic(self, instance, r):
        g, _ = instance
        value, witness = wcol_exact(g, r)
        assert value == wcol_under(g, witness, r)
        assert value <= wcol_under(g, heuristic_ordering(g, r), r)


class TestHeuristicOrdering:
    def test_star_center_first(self):
        for r in (1, 2):
            order = heuristic_ordering(gen_star(5), r)
            assert order.inverse[0] == 0

    def test_edgeless_identity(self):
        assert heuristic_ordering(gen_edgeless(4), 2) == LinearOrdering.identity(4)

    def test_path_middle_first(self):
        order = heuristic_ordering(gen_path(3), 1)
        assert order.inverse[0] == 1
        assert wcol_under(gen_path(3), order, 1) == 2

    def test_deterministic(self):
        g = gen_grid(4)
        assert heuristic_ordering(g, 2) == heuristic_ordering(g, 2)


class TestAdmissibility:
    def test_star_center_last(self):
        order = LinearOrdering.from_sequence([1, 2, 3, 0])
        assert kappa(gen_star(3), order, 1, 0) == 3

    def test_first_vertex_has_no_fan(self):
        g = gen_grid(3)
        order = heuristic_ordering(g, 2)
        assert kappa(g, order, 2, order.inverse[0]) == 0

    def test_path_middle_vertex(self):
        assert kappa(gen_path(3), LinearOrdering.identity(3), 2, 1) == 1

    def test_star_center_first(self):
        for r in (1, 2):
            assert adm_under(gen_star(4), LinearOrdering.identity(5), r) == 1

    def test_single_vertex(self):
        assert adm_under(gen_edgeless(1), LinearOrdering.identity(1), 1) == 0

    def test_complete(self):
        assert adm_under(gen_complete(4), LinearOrdering.identity(4), 1) == 3

    def test_fan_uses_disjoint_paths(self):
        # from 2 at radius 4: the edge to 1 and the route 3-4-0
        g = gen_cycle(5)
        order = LinearOrdering.identity(5)
        assert kappa(g, order, 2, 4) == 2
        assert kappa(g, order, 4, 2) == 2

    def test_radius_must_be_positive(self):
        with pytest.raises(ParameterError):
            adm_under(gen_path(3), LinearOrdering.identity(3), 0)

    def test_exact(self):
        value, order = adm_exact(gen_path(4), 2)
        assert value == adm_under(gen_path(4), order, 2)
        assert value == 1
        assert adm_exact(gen_complete(4), 1)[0] == 3

    @PROPERTY_SETTINGS
    @given(instance=graphs_with_orderings(max_n=7), r=st.integers(1, 3))
    def test_wcol_bounded_by_admissibility(self, instance, r):
        g, order = instance
        assert admissibility_bound_holds(g, order, r)
