"""
Outlier-tolerant balanced separator engine.

One engine run grows a tuple (A, B, C, D, K, r_i) until the residual graph
R = G - (A + B + C + D + K) carries at most two thirds of the weight. The
run is a LangGraph workflow: the balance node derives R and the heavy graph,
asserts the invariants and routes to one of the step nodes. Non-expansion
witnesses are searched for only when a distance bound fails during the heavy
or clique-minor steps.

The iterated form nests engine runs through a per-level subsolver following
the parameter schedule, and bottoms out in a base solver.
"""

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from langgraph.graph import END, StateGraph
from typing_extensions import Protocol, TypedDict

from config import get_caps, status
from errors import InvariantViolation, ParameterError, SeparatorError
from expander import ExpanderWitness, ell, find_witness_between
from graph_core import (
    EMPTY,
    Graph,
    VertexAssignment,
    VertexSet,
    adjacency_masks,
    bfs_distances,
    bfs_tree,
    components,
    induced_subgraph,
    mask_components,
    mask_members,
    neighborhood,
    tree_path,
)
from ordering import LinearOrdering, heuristic_ordering, wcol_under
from reach_graph import expansion_bound_after_power, omega_shallow, power_reach_graph, restricted_reach_graph

__all__ = [
    "AutoSubsolver",
    "CliqueBag",
    "EngineParams",
    "EngineState",
    "ExactSubsolver",
    "ScheduleLevel",
    "SeparatorResult",
    "SeparatorWorkflow",
    "TrivialSubsolver",
    "VerificationReport",
    "base_solver_exact",
    "base_solver_trivial",
    "ell",
    "exact_outlier_search",
    "greedy_outliers",
    "iterate_separator",
    "make_result",
    "param_schedule",
    "run_engine",
    "verify_separator",
]

BALANCE_MODES = ("weighted", "unweighted")

# ----------------------------------------------------------------------------
# Results and verification
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparatorResult:
    separator: VertexSet
    outliers: VertexSet
    component_weights: Tuple[Fraction, ...]
    nonoutlier_cost: Fraction
    trace: Tuple[str, ...] = ()
    schedule: Tuple["ScheduleLevel", ...] = ()
    restarts: int = 0

    def __post_init__(self):
        if not self.outliers <= self.separator:
            raise ParameterError("outliers must be a subset of the separator")

def make_result(g: Graph, w: VertexAssignment, rho: VertexAssignment,
                separator, outliers, **extra) -> SeparatorResult:
    """Build a result with its certificates computed from the graph"""
    separator = frozenset(separator)
    outliers = frozenset(outliers)
    weights = tuple(w.of(part) for part in components(g, separator))
    return SeparatorResult(separator, outliers, weights, rho.of(separator - outliers), **extra)

@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    clause: Optional[str] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

def verify_separator(g: Graph, w: VertexAssignment, rho: VertexAssignment, t: int,
                     result: SeparatorResult, balance: str = "weighted") -> VerificationReport:
    """Balanced and (rho/t)-cheap; the report names the first failed clause"""
    if balance not in BALANCE_MODES:
        raise ParameterError(f"unknown balance mode: {balance}")
    n = g.vertex_count
    if any(not 0 <= v < n for v in result.separator) or not result.outliers <= result.separator:
        return VerificationReport(False, "membership", "ids out of range or outliers outside the separator")

    for part in components(g, result.separator):
        if balance == "weighted":
            if 3 * w.of(part) > 2 * w.total:
                return VerificationReport(
                    False, "balance", f"component weight {w.of(part)} exceeds 2/3 of {w.total}"
                )
        elif 3 * len(part) > 2 * n:
            return VerificationReport(False, "balance", f"component size {len(part)} exceeds 2/3 of {n}")

    cost = rho.of(result.separator - result.outliers)
    if t * cost > rho.total:
        return VerificationReport(False, "cheapness", f"cost {cost} exceeds {rho.total}/{t}")
    return VerificationReport(True)

# ----------------------------------------------------------------------------
# Base solvers
# ----------------------------------------------------------------------------

def greedy_outliers(rho: VertexAssignment, separator, budget: Fraction) -> VertexSet:
    """Drop the most expensive vertices (smaller id first on ties) until cost <= budget"""
    remaining = rho.of(separator)
    chosen = []
    for v in sorted(separator, key=lambda x: (-rho[x], x)):
        if remaining <= budget:
            break
        chosen.append(v)
        remaining -= rho[v]
    return frozenset(chosen)

def exact_outlier_search(g: Graph, w: VertexAssignment, rho: VertexAssignment, t: int,
                         balance: str = "weighted") -> Tuple[int, VertexSet, VertexSet]:
    """
    Balanced separator with the fewest greedy outliers.

    Candidates are enumerated by size, then lexicographically, so the first
    minimum found also has the smallest size. No cap check here; callers own it.
    """
    if balance not in BALANCE_MODES:
        raise ParameterError(f"unknown balance mode: {balance}")
    n = g.vertex_count
    masks = adjacency_masks(g)
    if balance == "weighted":
        weights = list(w.values)
        total = w.total
    else:
        weights = [1] * n
        total = n
    budget = rho.total / t
    full = (1 << n) - 1
    best: Optional[Tuple[int, VertexSet, VertexSet]] = None

    for size in range(n + 1):
        for combo in combinations(range(n), size):
            cut = 0
            for v in combo:
                cut |= 1 << v
            balanced = all(
                3 * sum(weights[v] for v in mask_members(part)) <= 2 * total
                for part in mask_components(masks, full & ~cut)
            )
            if not balanced:
                continue
            outliers = greedy_outliers(rho, combo, budget)
            if best is None or len(outliers) < best[0]:
                best = (len(outliers), frozenset(combo), outliers)
                if best[0] == 0:
                    return best
    return best

def base_solver_trivial(g: Graph, w: Optional[VertexAssignment] = None,
                        rho: Optional[VertexAssignment] = None) -> SeparatorResult:
    """Every vertex is a separator vertex and an outlier"""
    everything = g.vertex_set()
    w = w if w is not None else VertexAssignment.uniform(g.vertex_count)
    rho = rho if rho is not None else VertexAssignment.uniform(g.vertex_count)
    return make_result(g, w, rho, everything, everything)

def base_solver_exact(g: Graph, w: VertexAssignment, rho: VertexAssignment, t: int) -> SeparatorResult:
    get_caps().require("separator", g.vertex_count, hint="use base_solver_trivial or the engine")
    _, separator, outliers = exact_outlier_search(g, w, rho, t)
    return make_result(g, w, rho, separator, outliers)

class Subsolver(Protocol):
    name: str

    def solve(self, g: Graph, w: VertexAssignment, rho: VertexAssignment, t: int,
              order: LinearOrdering) -> SeparatorResult: ...

    def outlier_bound(self, n_vertices: int) -> int: ...

class TrivialSubsolver:
    name = "trivial"

    def solve(self, g, w, rho, t, order):
        return base_solver_trivial(g, w, rho)

    def outlier_bound(self, n_vertices: int) -> int:
        return n_vertices

class ExactSubsolver:
    name = "exact"

    def solve(self, g, w, rho, t, order):
        return base_solver_exact(g, w, rho, t)

    def outlier_bound(self, n_vertices: int) -> int:
        return n_vertices

class AutoSubsolver:
    """Exact within the separator cap, trivial above it"""
    name = "auto"

    def solve(self, g, w, rho, t, order):
        if g.vertex_count <= get_caps().separator:
            return base_solver_exact(g, w, rho, t)
        return base_solver_trivial(g, w, rho)

    def outlier_bound(self, n_vertices: int) -> int:
        return n_vertices

SUBSOLVERS = {
    "trivial": TrivialSubsolver,
    "exact": ExactSubsolver,
    "auto": AutoSubsolver,
}

# ----------------------------------------------------------------------------
# Parameters and state
# ----------------------------------------------------------------------------

def round_count(t: int) -> int:
    """Smallest r with (9/8)^r > 20t/3"""
    return ell(8, Fraction(20 * t, 3))

@dataclass(frozen=True)
class EngineParams:
    t: int
    n: int
    n_bound: int
    rho_total: Fraction
    l: int
    m: int
    r: int
    omega_hat: int
    wcol_m: int
    b: int = field(init=False)
    n_prime: int = field(init=False)

    def __post_init__(self):
        if self.t < 1:
            raise ParameterError("t must be at least 1")
        if self.omega_hat < 2:
            raise ParameterError("omega estimate must be at least 2")
        if self.wcol_m < 1:
            raise ParameterError("wcol_m must be at least 1")
        if self.n_bound < self.n:
            raise ParameterError("n_bound must cover the instance size")
        object.__setattr__(self, "b", self.omega_hat ** 2 * self.l)
        object.__setattr__(self, "n_prime", 5 * self.b * self.t * self.wcol_m)

    @classmethod
    def for_instance(cls, n: int, t: int, rho_total: Fraction, wcol_m: int, omega_hat: int,
                     n_bound: Optional[int] = None) -> "EngineParams":
        """l = 2 ell(5t, 5tn), m = 2 ell(5t, 20t), r = round_count(t)"""
        if t < 1:
            raise ParameterError("t must be at least 1")
        n_bound = max(n, n_bound or 0, 1)
        return cls(
            t=t,
            n=n,
            n_bound=n_bound,
            rho_total=Fraction(rho_total),
            l=2 * ell(5 * t, 5 * t * n_bound),
            m=2 * ell(5 * t, 20 * t),
            r=round_count(t),
            omega_hat=max(2, omega_hat),
            wcol_m=wcol_m,
        )

    def with_omega(self, omega_hat: int) -> "EngineParams":
        return replace(self, omega_hat=omega_hat)

    @property
    def heavy_threshold(self) -> Fraction:
        return self.rho_total / (5 * self.b * self.t)

    @property
    def cheap_threshold(self) -> Fraction:
        return self.rho_total / (5 * self.t * self.n_bound)

@dataclass(frozen=True)
class CliqueBag:
    """One branch set: the union of paths from center, each of length <= l"""
    members: VertexSet
    center: int
    paths: Tuple[Tuple[int, ...], ...]

@dataclass(frozen=True)
class EngineState:
    A: VertexSet = EMPTY
    B: VertexSet = EMPTY
    C: VertexSet = EMPTY
    D: VertexSet = EMPTY
    bags: Tuple[CliqueBag, ...] = ()
    r_i: int = 0

    @property
    def K(self) -> VertexSet:
        members = set()
        for bag in self.bags:
            members |= bag.members
        return frozenset(members)

    def occupied(self) -> VertexSet:
        return self.A | self.B | self.C | self.D | self.K

    def potential(self) -> Tuple[int, int]:
        return (len(self.A) + len(self.C) + self.r_i, len(self.K))

    def describe(self, step: str) -> str:
        return (
            f"step={step} |A|={len(self.A)} |B|={len(self.B)} |C|={len(self.C)} "
            f"|D|={len(self.D)} |K|={len(self.K)} r={self.r_i}"
        )

class OmegaEstimateExceeded(SeparatorError):
    """A clique minor outgrew the omega estimate; the run restarts with a larger one"""

    def __init__(self, bags_needed: int):
        self.bags_needed = bags_needed
        super().__init__(f"clique minor needs {bags_needed} bags")

# ----------------------------------------------------------------------------
# Workflow
# ----------------------------------------------------------------------------

class EngineRunState(TypedDict):
    """State object for one engine run"""
    # Instance
    graph: Graph
    weights: VertexAssignment
    costs: VertexAssignment
    order: LinearOrdering
    params: EngineParams
    subsolver: Any

    # Tuple and derived graphs
    tuple_state: EngineState
    residual: VertexSet
    heavy: VertexSet
    heavy_components: List[VertexSet]

    # Control
    pending_witness: Optional[ExpanderWitness]
    execution_path: List[str]
    transitions: int
    potential: Tuple[int, int]

    # Output
    result: Optional[SeparatorResult]

class SeparatorWorkflow:
    """LangGraph state machine for a single engine run"""

    def __init__(self):
        self.graph = None
        self._build_graph()

    def _build_graph(self):
        workflow = StateGraph(EngineRunState)

        workflow.add_node("balance", self._balance_node)
        workflow.add_node("absorb_witness", self._absorb_witness_node)
        workflow.add_node("heavy", self._heavy_node)
        workflow.add_node("retire_bag", self._retire_bag_node)
        workflow.add_node("grow_minor", self._grow_minor_node)
        workflow.add_node("finalize", self._finalize_node)

        workflow.set_entry_point("balance")

        workflow.add_conditional_edges(
            "balance",
            self._route_after_balance,
            {
                "finalize": "finalize",
                "heavy": "heavy",
                "retire_bag": "retire_bag",
                "grow_minor": "grow_minor",
            }
        )
        workflow.add_conditional_edges(
            "heavy",
            self._route_after_search,
            {
                "absorb_witness": "absorb_witness",
                "balance": "balance",
            }
        )
        workflow.add_conditional_edges(
            "grow_minor",
            self._route_after_search,
            {
                "absorb_witness": "absorb_witness",
                "balance": "balance",
            }
        )
        workflow.add_edge("absorb_witness", "balance")
        workflow.add_edge("retire_bag", "balance")
        workflow.add_edge("finalize", END)

        self.graph = workflow.compile()

    # Public interface
    def run(self, g: Graph, w: VertexAssignment, rho: VertexAssignment, order: LinearOrdering,
            params: EngineParams, subsolver: Subsolver) -> SeparatorResult:
        cheap = frozenset(v for v in g.vertices() if rho[v] < params.cheap_threshold)
        start = EngineState(C=cheap)
        initial_state = EngineRunState(
            graph=g,
            weights=w,
            costs=rho,
            order=order,
            params=params,
            subsolver=subsolver,
            tuple_state=start,
            residual=EMPTY,
            heavy=EMPTY,
            heavy_components=[],
            pending_witness=None,
            execution_path=[],
            transitions=0,
            potential=start.potential(),
            result=None,
        )
        # balance + step node + witness detour per transition
        limit = 3 * self.transition_bound(g.vertex_count, params.r) + 10
        final_state = self.graph.invoke(initial_state, config={"recursion_limit": limit})
        return final_state["result"]

    @staticmethod
    def transition_bound(n: int, r: int) -> int:
        return (n + r) * (n + 1)

    # Nodes
    def _balance_node(self, state: EngineRunState) -> EngineRunState:
        """Derive R and the heavy graph, then assert every invariant"""
        g, rho, params = state["graph"], state["costs"], state["params"]
        current = state["tuple_state"]

        residual = g.vertex_set() - current.occupied()
        heavy = frozenset(v for v in residual if rho[v] > params.heavy_threshold)
        state["residual"] = residual
        state["heavy"] = heavy
        state["heavy_components"] = self._heavy_components(g, residual, heavy, params.m)

        self._check_invariants(state)
        return state

    def _absorb_witness_node(self, state: EngineRunState) -> EngineRunState:
        """Witness step: A += Z, B += N_R(Z)"""
        witness = state["pending_witness"]
        current = state["tuple_state"]
        members = witness.members
        if not members <= state["residual"]:
            self._fail(state, "witness leaves the residual graph")
        boundary = neighborhood(state["graph"], members, state["residual"])
        updated = replace(current, A=current.A | members, B=current.B | boundary)
        state["pending_witness"] = None
        return self._record(state, updated, "b")

    def _heavy_node(self, state: EngineRunState) -> EngineRunState:
        """Heavy step: absorb a cheap heavy graph into C, or split it with the subsolver"""
        g, rho, params = state["graph"], state["costs"], state["params"]
        current = state["tuple_state"]
        heavy = state["heavy"]
        heavy_cost = rho.of(heavy)

        if 5 * params.t * heavy_cost <= params.rho_total:
            return self._record(state, replace(current, C=current.C | heavy), "c1")

        ranked = sorted(state["heavy_components"], key=lambda part: (-rho.of(part), min(part)))
        if 4 * rho.of(ranked[0]) < 3 * heavy_cost:
            first, second = self._split_heavy(ranked, rho, heavy_cost)
            steps = ell(5 * params.t, 20 * params.t)
            witness = find_witness_between(
                g, state["weights"], rho, 5 * params.t, first, second, steps, steps, state["residual"]
            )
            if witness is None:
                self._fail(state, "heavy graph is split but neither side stalls")
            state["pending_witness"] = witness
            return state

        if current.r_i >= params.r:
            self._fail(state, f"heavy step with r_i={current.r_i} at the round limit {params.r}")

        separator, outliers = self._solve_power_instance(state)
        updated = replace(
            current,
            C=current.C | separator,
            D=current.D | outliers,
            r_i=current.r_i + 1,
        )
        return self._record(state, updated, "c2")

    def _retire_bag_node(self, state: EngineRunState) -> EngineRunState:
        """Retire step: a bag with no neighbor in R moves to A"""
        current = state["tuple_state"]
        index = self._isolated_bag(state)
        bag = current.bags[index]
        updated = replace(
            current,
            A=current.A | bag.members,
            bags=current.bags[:index] + current.bags[index + 1:],
        )
        return self._record(state, updated, "d")

    def _grow_minor_node(self, state: EngineRunState) -> EngineRunState:
        """Minor step: join the smallest residual vertex to every bag by short paths"""
        g, rho, params = state["graph"], state["costs"], state["params"]
        current = state["tuple_state"]
        residual = state["residual"]
        position = state["order"].position

        root = min(residual, key=lambda v: position[v])
        dist, parent = bfs_tree(g, root, residual)
        targets = []
        for bag in current.bags:
            touching = neighborhood(g, bag.members, residual)
            reachable = sorted((dist[u], u) for u in touching if u in dist)
            if not reachable or reachable[0][0] > params.l:
                target = reachable[0][1] if reachable else min(touching)
                steps = ell(5 * params.t, 5 * params.t * params.n_bound)
                witness = find_witness_between(
                    g, state["weights"], rho, 5 * params.t, {root}, {target}, steps, steps, residual
                )
                if witness is None:
                    self._fail(state, f"no short path from {root} to {target} and no stall")
                state["pending_witness"] = witness
                return state
            targets.append(reachable[0][1])

        if len(current.bags) > params.omega_hat - 1:
            raise OmegaEstimateExceeded(len(current.bags) + 1)

        paths = tuple(tuple(tree_path(parent, root, target)) for target in targets)
        members = {root}
        for path in paths:
            members.update(path)
        bag = CliqueBag(frozenset(members), root, paths)
        return self._record(state, replace(current, bags=current.bags + (bag,)), "e")

    def _finalize_node(self, state: EngineRunState) -> EngineRunState:
        """Stop: B + C + D + K is the separator, D the outliers"""
        g, w, rho, params = state["graph"], state["weights"], state["costs"], state["params"]
        current = state["tuple_state"]
        limit = params.rho_total
        five_t = 5 * params.t
        if five_t * rho.of(current.B) > limit:
            self._fail(state, "rho(B) exceeds rho(G)/5t at the stop")
        if five_t * rho.of(current.C) > 3 * limit:
            self._fail(state, "rho(C) exceeds 3 rho(G)/5t at the stop")
        if five_t * rho.of(current.K) > limit:
            self._fail(state, "rho(K) exceeds rho(G)/5t at the stop")

        state["execution_path"] = state["execution_path"] + [current.describe("a")]
        separator = current.B | current.C | current.D | current.K
        result = make_result(g, w, rho, separator, current.D, trace=tuple(state["execution_path"]))
        report = verify_separator(g, w, rho, params.t, result)
        if not report:
            self._fail(state, f"final separator fails {report.clause}: {report.detail}")
        state["result"] = result
        return state

    # Routing functions
    def _route_after_balance(self, state: EngineRunState) -> str:
        w = state["weights"]
        if 3 * w.of(state["residual"]) <= 2 * w.total:
            return "finalize"
        if state["heavy"]:
            return "heavy"
        if self._isolated_bag(state) is not None:
            return "retire_bag"
        return "grow_minor"

    def _route_after_search(self, state: EngineRunState) -> str:
        if state["pending_witness"] is not None:
            return "absorb_witness"
        return "balance"

    # Helper methods
    def _record(self, state: EngineRunState, updated: EngineState, step: str) -> EngineRunState:
        state["tuple_state"] = updated
        state["transitions"] = state["transitions"] + 1
        state["execution_path"] = state["execution_path"] + [updated.describe(step)]
        return state

    def _fail(self, state: EngineRunState, message: str):
        raise InvariantViolation(message, state["execution_path"])

    @staticmethod
    def _heavy_components(g: Graph, residual: VertexSet, heavy: VertexSet, m: int) -> List[VertexSet]:
        """Components of the graph on heavy vertices joined at R-distance <= m"""
        label: Dict[int, int] = {}
        parts: List[VertexSet] = []
        for start in sorted(heavy):
            if start in label:
                continue
            members = {start}
            queue = [start]
            while queue:
                u = queue.pop()
                for v in bfs_distances(g, (u,), residual, limit=m):
                    if v in heavy and v not in members:
                        members.add(v)
                        queue.append(v)
            for v in members:
                label[v] = len(parts)
            parts.append(frozenset(members))
        return parts

    @staticmethod
    def _split_heavy(ranked: Sequence[VertexSet], rho: VertexAssignment,
                     heavy_cost: Fraction) -> Tuple[VertexSet, VertexSet]:
        """Heaviest components first until the first side costs more than a quarter"""
        first = set()
        taken = Fraction(0)
        for part in ranked:
            if 4 * taken > heavy_cost:
                break
            first |= part
            taken += rho.of(part)
        second = set()
        for part in ranked:
            if not part <= first:
                second |= part
        return frozenset(first), frozenset(second)

    def _isolated_bag(self, state: EngineRunState) -> Optional[int]:
        g = state["graph"]
        for index, bag in enumerate(state["tuple_state"].bags):
            if not neighborhood(g, bag.members, state["residual"]):
                return index
        return None

    def _solve_power_instance(self, state: EngineRunState) -> Tuple[VertexSet, VertexSet]:
        """Run the subsolver on the restricted power graph of R over the heavy vertices"""
        g, rho, params = state["graph"], state["costs"], state["params"]
        subsolver = state["subsolver"]
        heavy = state["heavy"]

        sub_graph, base_ids = induced_subgraph(g, state["residual"])
        sub_order = state["order"].induced(base_ids)
        local = {v: i for i, v in enumerate(base_ids)}
        power = restricted_reach_graph(sub_graph, sub_order, params.m, (local[v] for v in heavy))
        prime_ids = tuple(base_ids[x] for x in power.vertex_map)
        if len(prime_ids) > params.n_prime:
            self._fail(state, f"power instance has {len(prime_ids)} vertices, more than n'={params.n_prime}")

        w_prime = VertexAssignment(tuple(rho[v] if v in heavy else Fraction(0) for v in prime_ids))
        rho_prime = rho.restrict(prime_ids)
        t_prime = 5 * params.r * params.t
        result = subsolver.solve(power.graph, w_prime, rho_prime, t_prime, sub_order.induced(power.vertex_map))
        report = verify_separator(power.graph, w_prime, rho_prime, t_prime, result)
        if not report:
            self._fail(state, f"subsolver {subsolver.name} failed {report.clause}: {report.detail}")
        if len(result.outliers) > subsolver.outlier_bound(len(prime_ids)):
            self._fail(state, f"subsolver {subsolver.name} exceeded its outlier bound")

        cheap_part = frozenset(prime_ids[x] for x in result.separator - result.outliers)
        outliers = frozenset(prime_ids[x] for x in result.outliers)
        return cheap_part, outliers

    def _check_invariants(self, state: EngineRunState) -> None:
        g, w, rho, params = state["graph"], state["weights"], state["costs"], state["params"]
        current = state["tuple_state"]
        A, B, C, D, K = current.A, current.B, current.C, current.D, current.K
        total_rho = params.rho_total
        five_t = 5 * params.t

        sizes = len(A) + len(B) + len(C) + len(D) + len(K)
        if len(A | B | C | D | K) != sizes:
            self._fail(state, "A, B, C, D, K are not pairwise disjoint")

        if 3 * w.of(A) > 2 * w.total:
            self._fail(state, "w(A) exceeds 2/3 w(G)")
        if not neighborhood(g, A) <= B | C | D | K:
            self._fail(state, "N(A) reaches the residual graph")

        if rho.of(A) < five_t * rho.of(B):
            self._fail(state, "rho(A) < 5t rho(B)")

        delta = 0 if state["heavy"] else 1
        if five_t * rho.of(C) > (1 + Fraction(current.r_i, params.r) + delta) * total_rho:
            self._fail(state, "rho(C) above its budget")

        if len(D) > current.r_i * state["subsolver"].outlier_bound(params.n_prime):
            self._fail(state, "too many outliers for r_i subsolver calls")

        self._check_bags(state)

        if current.r_i > params.r:
            self._fail(state, "r_i exceeds r")
        ceiling = Fraction(8, 9) ** current.r_i * total_rho
        for part in state["heavy_components"]:
            if rho.of(part) > ceiling:
                self._fail(state, "heavy component above (8/9)^r_i rho(G)")

        if state["transitions"] > self.transition_bound(g.vertex_count, params.r):
            self._fail(state, "transition bound exceeded")
        potential = current.potential()
        if state["transitions"] > 0 and potential <= state["potential"]:
            self._fail(state, "progress measure did not increase")
        state["potential"] = potential

    def _check_bags(self, state: EngineRunState) -> None:
        g, rho, params = state["graph"], state["costs"], state["params"]
        bags = state["tuple_state"].bags
        seen = set()
        for bag in bags:
            if bag.members & seen:
                self._fail(state, "bags overlap")
            seen |= bag.members
            if bag.center not in bag.members or len(bag.paths) > params.omega_hat - 1:
                self._fail(state, "bag is not covered by at most omega-1 paths")
            covered = {bag.center}
            for path in bag.paths:
                if path[0] != bag.center or len(path) - 1 > params.l:
                    self._fail(state, "covering path too long or off-center")
                if any(not g.has_edge(u, v) for u, v in zip(path, path[1:])):
                    self._fail(state, "covering path is not a path of G")
                covered.update(path)
            if covered != bag.members:
                self._fail(state, "paths do not cover the bag")
            if any(5 * params.b * params.t * rho[v] > params.rho_total for v in bag.members):
                self._fail(state, "expensive vertex inside K")
        for first, second in combinations(bags, 2):
            if not neighborhood(g, first.members) & second.members:
                self._fail(state, "two bags are not adjacent")

# Global workflow instance
workflow = SeparatorWorkflow()

def _check_assignments(g: Graph, w: VertexAssignment, rho: VertexAssignment, t: int) -> None:
    if t < 1:
        raise ParameterError("t must be >= 1")
    if len(w) != g.vertex_count or len(rho) != g.vertex_count:
        raise ParameterError("assignments must cover every vertex")

def default_params(g: Graph, rho: VertexAssignment, t: int, order: LinearOrdering,
                   n_bound: Optional[int] = None) -> EngineParams:
    """Parameters probed on g: wcol_m under order and a greedy omega estimate"""
    n = g.vertex_count
    n_bound = max(n, n_bound or 0, 1)
    m = 2 * ell(5 * t, 20 * t)
    l = 2 * ell(5 * t, 5 * t * n_bound)
    wcol_m = wcol_under(g, order, min(m, max(n - 1, 1)))
    omega = omega_shallow(g, l, "greedy").upper
    return EngineParams.for_instance(n, t, rho.total, wcol_m, omega, n_bound)

def run_engine(g: Graph, w: VertexAssignment, rho: VertexAssignment, t: int,
               order: Optional[LinearOrdering] = None, params: Optional[EngineParams] = None,
               subsolver: Optional[Subsolver] = None) -> SeparatorResult:
    """
    One engine run. Returns a w-balanced separator whose non-outlier part
    costs at most rho(G)/t; outliers come from subsolver calls only.

    Args:
        order: ordering of g (default: smallest-last at radius m)
        params: engine parameters (default: probed from g)
        subsolver: solver for the power-graph instances (default: AutoSubsolver)

    Returns:
        SeparatorResult with the transition trace and the restart count
    """
    _check_assignments(g, w, rho, t)
    n = g.vertex_count
    if n == 0 or rho.total == 0:
        return make_result(g, w, rho, g.vertex_set(), EMPTY)

    subsolver = subsolver or AutoSubsolver()
    if order is None:
        order = heuristic_ordering(g, min(2 * ell(5 * t, 20 * t), max(n - 1, 1)))
    if params is None:
        params = default_params(g, rho, t, order)
    if params.t != t or params.n != n:
        raise ParameterError("engine parameters were built for another instance")

    restarts = 0
    status("ENGINE", f"n={n} t={t} l={params.l} m={params.m} r={params.r} omega={params.omega_hat}")
    while True:
        try:
            result = workflow.run(g, w, rho, order, params, subsolver)
        except OmegaEstimateExceeded as e:
            restarts += 1
            params = params.with_omega(max(2 * params.omega_hat, e.bags_needed))
            status("WARNING", f"omega estimate raised to {params.omega_hat}, restarting")
            continue
        status("OK", f"engine finished: |separator|={len(result.separator)} outliers={len(result.outliers)}")
        return replace(result, restarts=restarts)

# ----------------------------------------------------------------------------
# Iterated recursion
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ScheduleLevel:
    level: int
    t: int
    r: int
    m: int
    n: int
    l: Optional[int] = None
    b: Optional[int] = None
    omega: Optional[int] = None
    wcol: Optional[int] = None
    expansion: Optional[Tuple[Fraction, int]] = None

    def as_row(self) -> Dict[str, Optional[int]]:
        return {"t_i": self.t, "m_i": self.m, "l_i": self.l, "b_i": self.b, "n_i": self.n, "r_i": self.r}

def param_schedule(n: int, t: int, a: int, wcol_probe: Callable[[int], int],
                   omega_probe: Callable[[int, int], int],
                   expansion: Optional[Tuple[Fraction, int]] = None) -> Tuple[ScheduleLevel, ...]:
    """
    Levels 0..a of the recursion.

    t_0 = t, n_0 = n, m_0 = 1; t_{i+1} = 5 r_i t_i; m_{i+1} = 2 ell(5t_i, 20t_i) m_i;
    l_i = 2 ell(5t_i, 5t_i n_i); b_i = omega^2 l_i; n_{i+1} = 5 b_i t_i wcol_{m_{i+1}}.
    wcol_probe(m) gives wcol_m under the fixed ordering, omega_probe(m, l) an
    upper estimate of the depth-l clique minor size of the radius-m power graph.
    With expansion = (c, k), each level also records the power-graph expansion
    constants at radius m_i.
    """
    if a < 0:
        raise ParameterError("a must be non-negative")
    if t < 1:
        raise ParameterError("t must be >= 1")
    levels = []
    t_i, n_i, m_i = t, n, 1
    for i in range(a + 1):
        r_i = round_count(t_i)
        growth = None
        if expansion is not None:
            growth = expansion_bound_after_power(expansion[0], expansion[1], m_i, wcol_probe(m_i))
        if i == a:
            levels.append(ScheduleLevel(i, t_i, r_i, m_i, n_i, expansion=growth))
            break
        m_next = 2 * ell(5 * t_i, 20 * t_i) * m_i
        l_i = 2 * ell(5 * t_i, 5 * t_i * max(n_i, 1))
        omega = max(2, omega_probe(m_i, l_i))
        b_i = omega * omega * l_i
        wcol_next = wcol_probe(m_next)
        n_next = 5 * b_i * t_i * wcol_next
        levels.append(ScheduleLevel(i, t_i, r_i, m_i, n_i, l_i, b_i, omega, wcol_next, growth))
        t_i, m_i, n_i = 5 * r_i * t_i, m_next, n_next
    status("SCHEDULE", " ".join(f"n_{lv.level}={lv.n}" for lv in levels))
    return tuple(levels)

@dataclass
class RecursionStats:
    base_sizes: List[int] = field(default_factory=list)
    restarts: int = 0

class LevelSubsolver:
    """Engine run at one schedule level, recursing into the next"""

    def __init__(self, schedule: Sequence[ScheduleLevel], level: int, base: Subsolver, stats: RecursionStats):
        self.schedule = schedule
        self.level = level
        self.base = base
        self.stats = stats
        self.name = f"level-{level}"

    def solve(self, g, w, rho, t, order):
        level = self.schedule[self.level]
        if level.t != t:
            raise InvariantViolation(f"level {self.level} expects t={level.t}, got {t}")
        if self.level == len(self.schedule) - 1:
            self.stats.base_sizes.append(g.vertex_count)
            return self.base.solve(g, w, rho, t, order)
        if g.vertex_count == 0 or rho.total == 0:
            return make_result(g, w, rho, g.vertex_set(), EMPTY)
        params = EngineParams.for_instance(
            g.vertex_count, t, rho.total, level.wcol, level.omega, n_bound=level.n
        )
        deeper = LevelSubsolver(self.schedule, self.level + 1, self.base, self.stats)
        result = run_engine(g, w, rho, t, order, params, deeper)
        self.stats.restarts += result.restarts
        return result

    def outlier_bound(self, n_vertices: int) -> int:
        factor = 1
        for level in self.schedule[self.level:-1]:
            factor *= level.r
        return factor * n_vertices

def iterate_separator(g: Graph, w: VertexAssignment, rho: VertexAssignment, t: int, a: int,
                      order: Optional[LinearOrdering] = None, base: Optional[Subsolver] = None,
                      expansion: Optional[Tuple[Fraction, int]] = None) -> SeparatorResult:
    """
    a nested engine levels over one global ordering, then the base solver.

    The outlier count is checked against n_a times the product of r_i.
    """
    _check_assignments(g, w, rho, t)
    if a < 0:
        raise ParameterError("a must be >= 0")
    n = g.vertex_count
    base = base or AutoSubsolver()
    if n == 0 or rho.total == 0:
        return make_result(g, w, rho, g.vertex_set(), EMPTY)

    m_a = 1
    t_i = t
    for _ in range(a):
        m_a *= 2 * ell(5 * t_i, 20 * t_i)
        t_i *= 5 * round_count(t_i)
    horizon = max(n - 1, 1)
    if order is None:
        order = heuristic_ordering(g, min(m_a, horizon))

    def wcol_probe(m: int) -> int:
        return wcol_under(g, order, min(m, horizon))

    def omega_probe(m: int, l: int) -> int:
        return omega_shallow(power_reach_graph(g, order, min(m, horizon)).graph, l, "greedy").upper

    schedule = param_schedule(n, t, a, wcol_probe, omega_probe, expansion)
    stats = RecursionStats()
    result = LevelSubsolver(schedule, 0, base, stats).solve(g, w, rho, t, order)

    largest_base = max(stats.base_sizes, default=0)
    if stats.restarts == 0 and largest_base > schedule[-1].n:
        raise InvariantViolation(f"base instance of {largest_base} vertices exceeds n_a={schedule[-1].n}")
    factor = 1
    for level in schedule[:-1]:
        factor *= level.r
    bound = max(schedule[-1].n, largest_base) * factor
    if len(result.outliers) > bound:
        raise InvariantViolation(f"{len(result.outliers)} outliers exceed the schedule bound {bound}")
    report = verify_separator(g, w, rho, t, result)
    if not report:
        raise InvariantViolation(f"iterated separator fails {report.clause}: {report.detail}")
    return replace(result, schedule=schedule, restarts=stats.restarts)
