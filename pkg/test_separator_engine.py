"""
Tests for separator_engine: verification, base solvers, the engine run and
the iterated recursion.
"""

import re
from fractions import Fraction
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from errors import CapacityError, ParameterError
from graph_core import (
    Graph,
    VertexAssignment,
    gen_complete,
    gen_edgeless,
    gen_grid,
    gen_path,
    gen_random_bounded_degree,
    gen_star,
    star_lower_bound_costs,
    to_networkx,
)
from applications import min_outliers_oracle
from separator_engine import (
    AutoSubsolver,
    EngineParams,
    ExactSubsolver,
    SeparatorResult,
    SeparatorWorkflow,
    TrivialSubsolver,
    base_solver_exact,
    base_solver_trivial,
    exact_outlier_search,
    greedy_outliers,
    iterate_separator,
    make_result,
    param_schedule,
    round_count,
    run_engine,
    verify_separator,
)

PROPERTY_SETTINGS = settings(
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)

TRACE_LINE = re.compile(r"^step=(a|b|c1|c2|d|e) \|A\|=\d+ \|B\|=\d+ \|C\|=\d+ \|D\|=\d+ \|K\|=\d+ r=\d+$")


def uniform(n):
    return VertexAssignment.uniform(n)


@st.composite
def instances(draw, max_n=7):
    n = draw(st.integers(min_value=1, max_value=max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    w = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    rho = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    t = draw(st.integers(1, 6))
    return Graph.from_edges(n, edges), VertexAssignment.from_values(w), VertexAssignment.from_values(rho), t


def brute_force_min_outliers(g, w, rho, t):
    graph = to_networkx(g)
    best = None
    for size in range(g.vertex_count + 1):
        for cut in combinations(range(g.vertex_count), size):
            rest = graph.subgraph(set(graph.nodes) - set(cut))
            if any(3 * w.of(part) > 2 * w.total for part in nx.connected_components(rest)):
                continue
            remaining = rho.of(cut)
            dropped = 0
            for v in sorted(cut, key=lambda x: (-rho[x], x)):
                if t * remaining <= rho.total:
                    break
                remaining -= rho[v]
                dropped += 1
            if best is None or dropped < best:
                best = dropped
    return best


def assert_trace(result, n, r):
    assert result.trace
    assert all(TRACE_LINE.match(line) for line in result.trace)
    assert result.trace[-1].startswith("step=a ")
    assert len(result.trace) - 1 <= SeparatorWorkflow.transition_bound(n, r)


def trace_steps(result):
    return {line.split()[0][len("step="):] for line in result.trace}


def spiked_path(n, spikes, height):
    rho = [height if v in spikes else 1 for v in range(n)]
    return gen_path(n), VertexAssignment.from_values(rho)


def assert_within_schedule(result, n):
    factor = 1
    for level in result.schedule[:-1]:
        factor *= level.r
    assert len(result.outliers) <= max(result.schedule[-1].n, n) * factor


ENGINE_CASES = (
    [("star9", gen_star(9), star_lower_bound_costs(9), t) for t in (1, 2, 4, 8)]
    + [("grid5", gen_grid(5), uniform(25), t) for t in (1, 2, 4, 8)]
    + [("random30", gen_random_bounded_degree(30, 4, seed=s), uniform(30), t) for s, t in ((1, 1), (2, 2), (3, 4))]
)

ITERATE_CASES = [
    ("grid4", gen_grid(4), 2, 1),
    ("grid4", gen_grid(4), 4, 1),
    ("grid4", gen_grid(4), 2, 2),
    ("grid4", gen_grid(4), 8, 0),
    ("grid4", gen_grid(4), 1, 2),
    ("grid12", gen_grid(12), 2, 0),
    ("random30", gen_random_bounded_degree(30, 4, seed=5), 2, 1),
]


class TestVerifySeparator:
    def setup_method(self):
        self.star = gen_star(9)
        self.w = uniform(10)
        self.rho = star_lower_bound_costs(9)

    def test_center_is_cheap_enough_at_four(self):
        result = make_result(self.star, self.w, self.rho, {0}, set())
        assert verify_separator(self.star, self.w, self.rho, 4, result)

    def test_center_too_expensive_at_five(self):
        result = make_result(self.star, self.w, self.rho, {0}, set())
        report = verify_separator(self.star, self.w, self.rho, 5, result)
        assert not report
        assert report.clause == "cheapness"

    def test_outlier_makes_it_cheap(self):
        result = make_result(self.star, self.w, self.rho, {0}, {0})
        assert verify_separator(self.star, self.w, self.rho, 5, result)

    def test_empty_separator_unbalanced(self):
        result = make_result(self.star, self.w, self.rho, set(), set())
        assert verify_separator(self.star, self.w, self.rho, 1, result).clause == "balance"

    def test_membership(self):
        result = SeparatorResult(frozenset({12}), frozenset(), (), Fraction(0))
        assert verify_separator(self.star, self.w, self.rho, 1, result).clause == "membership"

    def test_balance_modes(self):
        g = gen_path(4)
        w = VertexAssignment.from_values([0, 0, 0, 3])
        result = make_result(g, w, uniform(4), {1}, set())
        assert verify_separator(g, w, uniform(4), 1, result, "weighted").clause == "balance"
        assert verify_separator(g, w, uniform(4), 1, result, "unweighted")
        with pytest.raises(ParameterError):
            verify_separator(g, w, uniform(4), 1, result, "lopsided")

    def test_outliers_inside_separator(self):
        with pytest.raises(ParameterError):
            SeparatorResult(frozenset({1}), frozenset({2}), (), Fraction(0))

    def test_make_result_certificates(self):
        result = make_result(gen_path(3), uniform(3), uniform(3), {1}, set())
        assert result.component_weights == (1, 1)
        assert result.nonoutlier_cost == 1


class TestBaseSolvers:
    def test_greedy_outliers(self):
        rho = VertexAssignment.from_values([3, 1, 1, 2])
        assert greedy_outliers(rho, {0, 1, 2, 3}, Fraction(2)) == frozenset({0, 3})
        assert greedy_outliers(uniform(3), {0, 1, 2}, Fraction(1)) == frozenset({0, 1})
        assert greedy_outliers(uniform(3), {0, 1}, Fraction(5)) == frozenset()

    def test_trivial(self):
        g = gen_grid(3)
        result = base_solver_trivial(g)
        assert result.separator == result.outliers == g.vertex_set()
        assert verify_separator(g, uniform(9), uniform(9), 100, result)

    def test_exact_edge(self):
        result = base_solver_exact(gen_complete(2), uniform(2), uniform(2), 2)
        assert result.separator == frozenset({0})
        assert result.outliers == frozenset()

    def test_exact_star_needs_one_outlier(self):
        g = gen_star(9)
        rho = star_lower_bound_costs(9)
        result = base_solver_exact(g, uniform(10), rho, 5)
        assert len(result.outliers) == 1
        assert verify_separator(g, uniform(10), rho, 5, result)

    def test_exact_cap(self):
        with pytest.raises(CapacityError):
            base_solver_exact(gen_path(15), uniform(15), uniform(15), 1)

    def test_subsolvers(self):
        g = gen_path(5)
        order = None
        for solver in (TrivialSubsolver(), ExactSubsolver(), AutoSubsolver()):
            result = solver.solve(g, uniform(5), uniform(5), 2, order)
            assert verify_separator(g, uniform(5), uniform(5), 2, result)
            assert len(result.outliers) <= solver.outlier_bound(5)

    @PROPERTY_SETTINGS
    @given(instance=instances())
    def test_exact_matches_brute_force(self, instance):
        g, w, rho, t = instance
        q, separator, outliers = exact_outlier_search(g, w, rho, t)
        assert q == len(outliers) == brute_force_min_outliers(g, w, rho, t)
        result = make_result(g, w, rho, separator, outliers)
        assert verify_separator(g, w, rho, t, result)


class TestEngineParams:
    def test_schedule_constants(self):
        params = EngineParams.for_instance(10, 1, Fraction(10), wcol_m=2, omega_hat=3)
        assert params.r == 17
        assert params.m == 34
        # 1.2^22 > 50 >= 1.2^21
        assert params.l == 44
        assert params.b == 9 * params.l
        assert params.n_prime == 5 * params.b * 1 * 2
        assert params.heavy_threshold == Fraction(10, 5 * params.b)
        assert params.cheap_threshold == Fraction(10, 50)

    def test_round_count(self):
        assert round_count(1) == 17
        assert Fraction(9, 8) ** round_count(4) > Fraction(80, 3)

    def test_validation(self):
        with pytest.raises(ParameterError):
            EngineParams.for_instance(5, 0, Fraction(1), 1, 2)
        with pytest.raises(ParameterError):
            EngineParams(t=1, n=5, n_bound=5, rho_total=Fraction(1), l=2, m=2, r=1, omega_hat=1, wcol_m=1)
        with pytest.raises(ParameterError):
            EngineParams(t=1, n=5, n_bound=5, rho_total=Fraction(1), l=2, m=2, r=1, omega_hat=2, wcol_m=0)
        with pytest.raises(ParameterError):
            EngineParams(t=1, n=5, n_bound=4, rho_total=Fraction(1), l=2, m=2, r=1, omega_hat=2, wcol_m=1)

    def test_omega_raised(self):
        params = EngineParams.for_instance(4, 1, Fraction(4), 1, 2)
        raised = params.with_omega(5)
        assert raised.omega_hat == 5
        assert raised.b == 25 * params.l


class TestRunEngine:
    def test_star_with_lower_bound_costs(self):
        g = gen_star(9)
        rho = star_lower_bound_costs(9)
        result = run_engine(g, uniform(10), rho, 1)
        assert verify_separator(g, uniform(10), rho, 1, result)
        assert_trace(result, 10, round_count(1))

    def test_grid(self):
        g = gen_grid(5)
        result = run_engine(g, uniform(25), uniform(25), 1, subsolver=AutoSubsolver())
        assert verify_separator(g, uniform(25), uniform(25), 1, result)
        assert_trace(result, 25, round_count(1))

    def test_exact_subsolver_on_path(self):
        g = gen_path(6)
        result = run_engine(g, uniform(6), uniform(6), 2, subsolver=ExactSubsolver())
        assert verify_separator(g, uniform(6), uniform(6), 2, result)

    def test_zero_cost(self):
        g = gen_path(4)
        result = run_engine(g, uniform(4), VertexAssignment.uniform(4, 0), 3)
        assert result.separator == g.vertex_set()
        assert result.outliers == frozenset()

    def test_empty_graph(self):
        result = run_engine(gen_edgeless(0), uniform(0), uniform(0), 1)
        assert result.separator == frozenset()

    def test_t_checked(self):
        with pytest.raises(ParameterError, match="t must be >= 1"):
            run_engine(gen_path(3), uniform(3), uniform(3), 0)

    def test_params_for_other_instance(self):
        params = EngineParams.for_instance(3, 2, Fraction(3), 1, 2)
        with pytest.raises(ParameterError):
            run_engine(gen_path(3), uniform(3), uniform(3), 1, params=params)

    def test_bag_and_minor_steps(self):
        # four expensive spikes on a long path keep the heavy threshold above 1
        g, rho = spiked_path(500, {100, 200, 300, 400}, 400)
        w = uniform(500)
        result = run_engine(g, w, rho, 1)
        assert {"d", "e"} <= trace_steps(result)
        assert verify_separator(g, w, rho, 1, result)
        assert_trace(result, 500, round_count(1))

    @pytest.mark.parametrize("name,g,rho,t", ENGINE_CASES, ids=[f"{c[0]}-t{c[3]}" for c in ENGINE_CASES])
    def test_instances(self, name, g, rho, t):
        w = uniform(g.vertex_count)
        result = run_engine(g, w, rho, t)
        assert verify_separator(g, w, rho, t, result)
        assert len(result.outliers) <= g.vertex_count
        assert_trace(result, g.vertex_count, round_count(t))

    @settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(instance=instances(max_n=8))
    def test_always_valid(self, instance):
        g, w, rho, t = instance
        result = run_engine(g, w, rho, t)
        assert verify_separator(g, w, rho, t, result)
        assert result.outliers <= result.separator


class TestSchedule:
    def test_first_levels(self):
        levels = param_schedule(20, 1, 2, lambda m: 1, lambda m, l: 2)
        assert [level.level for level in levels] == [0, 1, 2]
        assert levels[0].r == 17
        assert levels[0].m == 1
        assert levels[1].t == 5 * levels[0].r * levels[0].t
        assert levels[2].t == 5 * levels[1].r * levels[1].t
        assert levels[1].m == 34
        assert levels[0].b == 4 * levels[0].l
        assert levels[1].n == 5 * levels[0].b * 1 * 1
        assert levels[-1].l is None

    def test_rows(self):
        row = param_schedule(8, 2, 1, lambda m: 2, lambda m, l: 3)[0].as_row()
        assert set(row) == {"t_i", "m_i", "l_i", "b_i", "n_i", "r_i"}
        assert row["t_i"] == 2

    def test_expansion_constants(self):
        levels = param_schedule(8, 1, 1, lambda m: 1, lambda m, l: 2, expansion=(Fraction(1), 0))
        assert levels[0].expansion == (45, 2)

    def test_arguments(self):
        with pytest.raises(ParameterError):
            param_schedule(5, 1, -1, lambda m: 1, lambda m, l: 2)
        with pytest.raises(ParameterError):
            param_schedule(5, 0, 1, lambda m: 1, lambda m, l: 2)


class TestIterateSeparator:
    def test_zero_levels_is_the_base_solver(self):
        g = gen_star(9)
        rho = star_lower_bound_costs(9)
        result = iterate_separator(g, uniform(10), rho, 5, 0, base=ExactSubsolver())
        direct = base_solver_exact(g, uniform(10), rho, 5)
        assert (result.separator, result.outliers) == (direct.separator, direct.outliers)
        assert len(result.schedule) == 1

    def test_zero_cost(self):
        g = gen_grid(3)
        result = iterate_separator(g, uniform(9), VertexAssignment.uniform(9, 0), 2, 1)
        assert result.separator == g.vertex_set()
        assert result.outliers == frozenset()

    def test_grid_one_level(self):
        g = gen_grid(4)
        result = iterate_separator(g, uniform(16), uniform(16), 1, 1)
        assert verify_separator(g, uniform(16), uniform(16), 1, result)
        assert len(result.schedule) == 2
        bound = result.schedule[-1].n * result.schedule[0].r
        assert len(result.outliers) <= max(bound, 16 * result.schedule[0].r)

    @pytest.mark.parametrize("name,g,t,a", ITERATE_CASES, ids=[f"{c[0]}-t{c[2]}-a{c[3]}" for c in ITERATE_CASES])
    def test_instances(self, name, g, t, a):
        n = g.vertex_count
        result = iterate_separator(g, uniform(n), uniform(n), t, a)
        assert verify_separator(g, uniform(n), uniform(n), t, result)
        assert len(result.schedule) == a + 1
        assert_within_schedule(result, n)

    @settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(instance=instances(max_n=10), a=st.integers(0, 1))
    def test_never_beats_the_oracle(self, instance, a):
        g, w, rho, t = instance
        result = iterate_separator(g, w, rho, t, a)
        assert verify_separator(g, w, rho, t, result)
        assert len(result.outliers) >= min_outliers_oracle(g, w, rho, t)

    def test_arguments(self):
        with pytest.raises(ParameterError):
            iterate_separator(gen_path(3), uniform(3), uniform(3), 1, -1)
        with pytest.raises(ParameterError):
            iterate_separator(gen_path(3), uniform(2), uniform(3), 1, 1)
