"""
Tests for expander: witnesses of non-expansion, ball growing and the
distance bound on expanders.
"""

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from errors import CapacityError, DomainError, InvariantViolation, ParameterError
from expander import (
    ExpanderWitness,
    check_distance_lemma,
    ell,
    find_witness_between,
    find_witness_exhaustive,
    grow_ball_certified,
    separate_by_growth,
)
from graph_core import Graph, VertexAssignment, gen_complete, gen_edgeless, gen_path, gen_star, neighborhood

PROPERTY_SETTINGS = settings(
    max_examples=80,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)


def uniform(n):
    return VertexAssignment.uniform(n)


@st.composite
def weighted_graphs(draw, max_n=8):
    n = draw(st.integers(min_value=1, max_value=max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    w = draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    rho = draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    assume(sum(rho) > 0)
    t = draw(st.integers(1, 4))
    return Graph.from_edges(n, edges), VertexAssignment.from_values(w), VertexAssignment.from_values(rho), t


class TestEll:
    def test_values(self):
        assert ell(3, 10) == 9
        assert ell(1, 4) == 3
        assert ell(1, 1) == 1
        assert ell(2, Fraction(9, 4)) == 3

    def test_arguments_checked(self):
        with pytest.raises(ParameterError):
            ell(0, 4)
        with pytest.raises(ParameterError):
            ell(2, Fraction(1, 2))

    def test_huge_bound(self):
        # (1 + 1/t)^l grows too slowly for exact powers to stay small
        value = ell(10 ** 6, 10 ** 6)
        assert 13_800_000 < value < 13_820_000

    @PROPERTY_SETTINGS
    @given(t=st.integers(1, 64), b=st.integers(1, 64))
    def test_minimal(self, t, b):
        l = ell(t, b)
        step = Fraction(t + 1, t)
        assert step ** l > b
        assert l == 0 or step ** (l - 1) <= b


class TestExhaustiveWitness:
    def test_star_two_leaves(self):
        witness = find_witness_exhaustive(gen_star(4), uniform(5), uniform(5), 1)
        assert witness.members == frozenset({1, 2})
        assert witness.rho_of_boundary == 1
        assert witness.w_of_members == 2

    def test_complete_graph_expands(self):
        assert find_witness_exhaustive(gen_complete(4), uniform(4), uniform(4), 1) is None

    def test_single_vertex(self):
        assert find_witness_exhaustive(gen_edgeless(1), uniform(1), uniform(1), 1) is None

    def test_zero_cost(self):
        with pytest.raises(DomainError, match="expander undefined"):
            find_witness_exhaustive(gen_path(3), uniform(3), VertexAssignment.uniform(3, 0), 1)

    def test_cap(self):
        with pytest.raises(CapacityError):
            find_witness_exhaustive(gen_path(21), uniform(21), uniform(21), 1)

    def test_bad_certificate_rejected(self):
        g = gen_complete(4)
        with pytest.raises(InvariantViolation):
            ExpanderWitness.certify(g, uniform(4), uniform(4), 1, {0, 1})
        with pytest.raises(InvariantViolation):
            ExpanderWitness.certify(g, uniform(4), uniform(4), 1, set())

    @PROPERTY_SETTINGS
    @given(instance=weighted_graphs())
    def test_witness_revalidates(self, instance):
        g, w, rho, t = instance
        witness = find_witness_exhaustive(g, w, rho, t)
        if witness is None:
            return
        members = witness.members
        assert 2 * w.of(members) <= w.total
        assert t * rho.of(neighborhood(g, members)) < rho.of(members)


class TestGrowBall:
    def test_path_stops_when_heavy(self):
        grown = grow_ball_certified(gen_path(3), uniform(3), uniform(3), 10, {0}, max_steps=2)
        assert grown.reached == frozenset({0, 1})
        assert grown.witness is None

    def test_star_from_leaf(self):
        grown = grow_ball_certified(gen_star(4), uniform(5), uniform(5), 1, {1})
        assert grown.witness is None
        assert grown.reached == frozenset(range(5))
        assert grown.steps == 2

    def test_whole_graph_seed(self):
        grown = grow_ball_certified(gen_path(4), uniform(4), uniform(4), 1, range(4))
        assert grown.witness is None
        assert grown.steps == 0

    def test_stall_gives_witness(self):
        g = gen_path(7)
        grown = grow_ball_certified(g, uniform(7), uniform(7), 1, {0}, max_steps=3)
        assert grown.witness is not None
        assert grown.witness.members == frozenset({0, 1})

    def test_seed_checked(self):
        with pytest.raises(DomainError):
            grow_ball_certified(gen_path(3), uniform(3), VertexAssignment.from_values([0, 1, 1]), 1, {0})
        with pytest.raises(ParameterError):
            grow_ball_certified(gen_path(3), uniform(3), uniform(3), 1, {2}, within=frozenset({0, 1}))

    @PROPERTY_SETTINGS
    @given(instance=weighted_graphs(), data=st.data())
    def test_growth_rate(self, instance, data):
        g, w, rho, t = instance
        seed = data.draw(st.integers(0, g.vertex_count - 1))
        assume(rho[seed] > 0)
        steps = data.draw(st.integers(0, 6))
        grown = grow_ball_certified(g, w, rho, t, {seed}, max_steps=steps)
        if grown.witness is None and 2 * w.of(grown.reached) <= w.total:
            assert rho.of(grown.reached) >= Fraction(t + 1, t) ** grown.steps * rho[seed]

    def test_between_takes_first_witness(self):
        g = gen_path(7)
        witness = find_witness_between(g, uniform(7), uniform(7), 1, {6}, {0}, 1, 1)
        assert witness.members == frozenset({5, 6})


class TestDistanceBound:
    def test_complete_graph(self):
        assert check_distance_lemma(gen_complete(4), uniform(4), uniform(4), 1, {0}, {1}, 4, 4)

    def test_overlapping_sets(self):
        assert check_distance_lemma(gen_complete(3), uniform(3), uniform(3), 1, {0, 1}, {1}, 3, 3)

    def test_path_of_three(self):
        g = gen_path(3)
        if find_witness_exhaustive(g, uniform(3), uniform(3), 3) is not None:
            pytest.skip("not an expander at t=3")
        assert check_distance_lemma(g, uniform(3), uniform(3), 3, {0}, {2}, 3, 3)

    def test_preconditions(self):
        with pytest.raises(DomainError, match="too cheap"):
            check_distance_lemma(gen_complete(4), uniform(4), uniform(4), 1, {0}, {1}, 2, 4)
        with pytest.raises(DomainError, match="not an expander"):
            check_distance_lemma(gen_star(4), uniform(5), uniform(5), 1, {0}, {1}, 5, 5)

    @settings(
        max_examples=60,
        deadline=None,
        suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
    )
    @given(instance=weighted_graphs(max_n=6), data=st.data())
    def test_holds_on_expanders(self, instance, data):
        g, w, rho, t = instance
        assume(find_witness_exhaustive(g, w, rho, t) is None)
        costly = [v for v in g.vertices() if rho[v] > 0]
        x1 = data.draw(st.sets(st.sampled_from(costly), min_size=1))
        x2 = data.draw(st.sets(st.sampled_from(costly), min_size=1))
        b1 = rho.total / rho.of(x1)
        b2 = rho.total / rho.of(x2)
        assert check_distance_lemma(g, w, rho, t, x1, x2, b1, b2)

    def test_separate_close_sets(self):
        split = separate_by_growth(gen_complete(4), uniform(4), uniform(4), 1, {0}, {1}, 4, 4)
        assert split.witness is None
        assert split.distance == 1
        assert split.bound == 6

    def test_separate_far_sets(self):
        split = separate_by_growth(gen_path(7), uniform(7), uniform(7), 1, {0}, {6}, 1, 1)
        assert split.distance == 6
        assert split.bound == 2
        assert split.witness.members == frozenset({0, 1})
