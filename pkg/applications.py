"""
Applications of the outlier-tolerant separators: distance-r separators,
edge separators, the per-instance minimum-outlier oracle and the two
lower-bound checks (lower-bound star and the subdivided biclique family).
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, List, Optional, Sequence, Tuple

from config import get_caps, status
from errors import InvariantViolation, ParameterError
from graph_core import (
    EMPTY,
    Graph,
    VertexAssignment,
    VertexSet,
    adjacency_masks,
    bfs_distances,
    components,
    gen_star,
    gen_subdivided_biclique,
    biclique_lower_bound_assignments,
    mask_components,
    mask_members,
    star_lower_bound_costs,
)
from ordering import heuristic_ordering, wcol_under
from reach_graph import power_reach_graph, reach_preimage
from separator_engine import VerificationReport, exact_outlier_search, iterate_separator


# ----------------------------------------------------------------------------
# Distance-r separators
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class DistanceSeparatorResult:
    Z: VertexSet
    C: VertexSet
    A: VertexSet
    B: VertexSet
    r: int


def split_components(sizes: Sequence[int], n: int) -> Tuple[List[int], List[int]]:
    """
    Pack components (each of size <= 2n/3) into two sides of size <= 2n/3.

    Largest components go to the first side until it holds at least n/3;
    the rest form the second side. Returns index lists.
    """
    if any(3 * size > 2 * n for size in sizes):
        raise ParameterError("a component is larger than 2/3 of the graph")
    ranked = sorted(range(len(sizes)), key=lambda i: (-sizes[i], i))
    first: List[int] = []
    second: List[int] = []
    filled = 0
    for i in ranked:
        if 3 * filled < n:
            first.append(i)
            filled += sizes[i]
        else:
            second.append(i)
    return sorted(first), sorted(second)


def verify_distance_separator(g: Graph, result: DistanceSeparatorResult) -> VerificationReport:
    """Partition, size and distance clauses, re-checked by BFS"""
    everything = result.A | result.B | result.C | result.Z
    pieces = len(result.A) + len(result.B) + len(result.C) + len(result.Z)
    if everything != g.vertex_set() or pieces != g.vertex_count:
        return VerificationReport(False, "partition", "A, B, C, Z do not partition V")
    remaining = g.vertex_count - len(result.Z)
    for name, side in (("A", result.A), ("B", result.B)):
        if 3 * len(side) > 2 * remaining:
            return VerificationReport(False, "balance", f"|{name}|={len(side)} exceeds 2/3 of {remaining}")
    allowed = result.A | result.B
    reached = bfs_distances(g, result.A, allowed, limit=result.r)
    hit = sorted(v for v in reached if v in result.B)
    if hit:
        return VerificationReport(False, "distance", f"vertex {hit[0]} of B within distance {result.r} of A")
    return VerificationReport(True)


def distance_separator(g: Graph, t: int, r: int, a: int = 1) -> DistanceSeparatorResult:
    """
    Balanced distance-r separator with few deleted vertices.

    Separates the radius-r power graph with cost rho(u) = |R(u)| at
    cheapness t * wcol_r, so the blown-up separator C' has at most n/t
    vertices. The deleted set Z is the outliers plus a rebalancing set taken
    from the larger side.
    """
    if t < 1:
        raise ParameterError("t must be >= 1")
    if r < 1:
        raise ParameterError("r must be >= 1")
    n = g.vertex_count
    if n == 0:
        return DistanceSeparatorResult(EMPTY, EMPTY, EMPTY, EMPTY, r)

    order = heuristic_ordering(g, r)
    power = power_reach_graph(g, order, r).graph
    preimage = reach_preimage(g, order, r)
    rho = VertexAssignment(tuple(len(preimage[u]) for u in g.vertices()))
    scale = wcol_under(g, order, r)
    separated = iterate_separator(power, VertexAssignment.uniform(n), rho, t * scale, a, order)

    cheap = separated.separator - separated.outliers
    deleted = separated.outliers
    blown_up = set()
    for u in cheap:
        blown_up |= preimage[u]
    blown_up = frozenset(blown_up) - deleted

    parts = components(power, separated.separator)
    first, second = split_components([len(part) for part in parts], n)
    side_a = frozenset(v for i in first for v in parts[i]) - blown_up
    side_b = frozenset(v for i in second for v in parts[i]) - blown_up

    larger, smaller = (side_a, side_b) if len(side_a) >= len(side_b) else (side_b, side_a)
    extra = frozenset(sorted(larger)[: min(2 * len(deleted), len(larger) - len(smaller))])
    result = DistanceSeparatorResult(
        Z=deleted | extra,
        C=blown_up,
        A=side_a - extra,
        B=side_b - extra,
        r=r,
    )
    report = verify_distance_separator(g, result)
    if not report:
        raise InvariantViolation(f"distance separator fails {report.clause}: {report.detail}", separated.trace)
    status("OK", f"distance-{r} separator: |C|={len(result.C)} |Z|={len(result.Z)}")
    return result


# ----------------------------------------------------------------------------
# Edge separators
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeSeparatorResult:
    Z: VertexSet
    F: Tuple[Tuple[int, int], ...]


def edge_separator(g: Graph, t: int, a: int = 1) -> EdgeSeparatorResult:
    """Outliers Z and the edges F incident with the non-outlier separator vertices"""
    if t < 1:
        raise ParameterError("t must be >= 1")
    n = g.vertex_count
    if n == 1:
        # a lone vertex is its own heavy component
        return EdgeSeparatorResult(g.vertex_set(), ())
    rho = VertexAssignment(tuple(g.degree(v) for v in g.vertices()))
    separated = iterate_separator(g, VertexAssignment.uniform(n), rho, t, a)
    cut = separated.separator - separated.outliers
    edges = tuple((u, v) for u, v in g.edges() if u in cut or v in cut)
    result = EdgeSeparatorResult(separated.outliers, edges)
    report = verify_edge_separator(g, result.Z, result.F, t)
    if not report:
        raise InvariantViolation(f"edge separator fails {report.clause}: {report.detail}", separated.trace)
    return result


def verify_edge_separator(g: Graph, Z, F, t: int) -> VerificationReport:
    """|F| <= 2|E|/t and every component of (g - Z) - F has <= 2/3 of V(g)"""
    Z = frozenset(Z)
    removed = set()
    for u, v in F:
        if not g.has_edge(u, v):
            return VerificationReport(False, "membership", f"({u}, {v}) is not an edge")
        removed.add((min(u, v), max(u, v)))
    if t * len(removed) > 2 * g.edge_count:
        return VerificationReport(False, "cheapness", f"|F|={len(removed)} exceeds 2|E|/{t}")
    kept = Graph.from_edges(
        g.vertex_count,
        (e for e in g.edges() if e not in removed and e[0] not in Z and e[1] not in Z),
    )
    for part in components(kept, Z):
        if 3 * len(part) > 2 * g.vertex_count:
            return VerificationReport(False, "balance", f"component of size {len(part)}")
    return VerificationReport(True)


# ----------------------------------------------------------------------------
# Oracles
# ----------------------------------------------------------------------------

def min_outliers_oracle(g: Graph, w: VertexAssignment, rho: VertexAssignment, t: int,
                        balance: str = "weighted") -> int:
    """Fewest greedy outliers over all balanced separators of this (w, rho)"""
    if t < 1:
        raise ParameterError("t must be >= 1")
    get_caps().require("separator", g.vertex_count, hint="the oracle enumerates every vertex subset")
    q, separator, _ = exact_outlier_search(g, w, rho, t, balance)
    status("ORACLE", f"n={g.vertex_count} t={t} q={q} |C|={len(separator)}")
    return q


def star_cost_bound_check(n: int) -> bool:
    """Every (unweighted) balanced separator of the lower-bound star costs >= rho(G)/4"""
    if n < 3:
        raise ParameterError("star needs at least 3 leaves")
    get_caps().require("star", n, hint="the check enumerates every vertex subset")
    g = gen_star(n)
    rho = star_lower_bound_costs(n)
    masks = adjacency_masks(g)
    size = g.vertex_count
    full = (1 << size) - 1
    for cut in range(full + 1):
        balanced = all(
            3 * len(mask_members(part)) <= 2 * size
            for part in mask_components(masks, full & ~cut)
        )
        if balanced and 4 * rho.of(mask_members(cut)) < rho.total:
            return False
    return True


def _partitions(total: int, largest: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Integer partitions of total in non-increasing parts"""
    if total == 0:
        yield ()
        return
    largest = total if largest is None else largest
    for part in range(min(total, largest), 0, -1):
        for rest in _partitions(total - part, part):
            yield (part,) + rest


def _greedy_count(groups: Sequence[Tuple[Fraction, int]], budget: Fraction) -> int:
    """Outliers taken greedily from (cost, count) groups in decreasing cost"""
    remaining = sum((cost * count for cost, count in groups), Fraction(0))
    taken = 0
    for cost, count in sorted(groups, key=lambda group: -group[0]):
        if remaining <= budget:
            break
        need = math.ceil((remaining - budget) / cost)
        step = min(count, need)
        taken += step
        remaining -= step * cost
    return taken


def symmetric_family_oracle(s: int, n: int, t: int) -> int:
    """
    Minimum outliers for the subdivided biclique with w = 1 on B and
    rho = n on A, s on B, 1 on subdivision vertices.

    Up to symmetry a candidate is (i chosen A vertices, j chosen B vertices,
    a grouping of the other A vertices into components, and the number of
    B vertices each group keeps). Every path between different components is
    cut by one subdivision vertex; further subdivision vertices never help.
    """
    if s < 3:
        raise ParameterError("s must be at least 3")
    if n < 1 or t < 1:
        raise ParameterError("n and t must be at least 1")
    cap = 2 * n // 3
    budget = Fraction(s * s * n, t)

    cases = 0
    for i in range(s + 1):
        for j in range(n + 1):
            for groups in _partitions(s - i):
                cases += (min(cap, n - j) + 1) ** len(groups)
    get_caps().require("symmetric", cases, hint="orbit enumeration of the biclique family")

    best: Optional[int] = None
    for i in range(s + 1):
        for j in range(n + 1):
            free_b = n - j
            paths = (s - i) * free_b
            for groups in _partitions(s - i):
                for kept in product(range(min(cap, free_b) + 1), repeat=len(groups)):
                    if sum(kept) > free_b:
                        continue
                    cut = paths - sum(a * b for a, b in zip(groups, kept))
                    q = _greedy_count(
                        ((Fraction(n), i), (Fraction(s), j), (Fraction(1), cut)), budget
                    )
                    if best is None or q < best:
                        best = q
    status("ORACLE", f"s={s} n={n} t={t} cases={cases} q={best}")
    return best


def lower_bound_family_check(s: int, n: int, t: int) -> Tuple[Fraction, int, bool]:
    """(s - 3s^2/t, oracle minimum, oracle >= ceil of the analytic bound)"""
    if s < 3 or n <= 3 * s or t < 1:
        raise ParameterError("need s >= 3, n > 3s and t >= 1")
    g, parts = gen_subdivided_biclique(s, n)
    _, rho = biclique_lower_bound_assignments(parts)
    if rho.total != s * s * n:
        raise InvariantViolation(f"rho(G) = {rho.total}, expected {s * s * n}")
    analytic = s - Fraction(3 * s * s, t)
    oracle = symmetric_family_oracle(s, n, t)
    return analytic, oracle, oracle >= math.ceil(analytic)
