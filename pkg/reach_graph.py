"""
Reachability power graphs and shallow-minor oracles.

The radius-m power graph joins every v to each vertex of L_m(v); the restricted form keeps only
the union of L_m(x) over a generating set X. The exhaustive minor oracles are
meant for graphs of at most a handful of vertices.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from config import get_caps
from errors import ParameterError
from graph_core import (
    Graph,
    VertexSet,
    adjacency_masks,
    bfs_distances,
    components,
    induced_subgraph,
    mask_components,
)
from ordering import LinearOrdering, weak_reach_sets, wcol_under


@dataclass(frozen=True)
class PowerGraph:
    base: Graph
    ordering: LinearOrdering
    radius: int
    graph: Graph
    vertex_map: Tuple[int, ...]
    generators: Optional[VertexSet] = None

    def local_ids(self) -> Dict[int, int]:
        """base id -> local id"""
        return {v: i for i, v in enumerate(self.vertex_map)}


@dataclass(frozen=True)
class OmegaBounds:
    lower: int
    upper: int


def _power_edges(g: Graph, order: LinearOrdering, m: int) -> List[Tuple[int, int]]:
    sets = weak_reach_sets(g, order, m)
    return [(u, v) for v in g.vertices() for u in sets[v] if u != v]


def power_reach_graph(g: Graph, order: LinearOrdering, m: int) -> PowerGraph:
    if m < 1:
        raise ParameterError("m must be at least 1")
    graph = Graph.from_edges(g.vertex_count, _power_edges(g, order, m))
    return PowerGraph(g, order, m, graph, tuple(g.vertices()))


def restricted_reach_graph(g: Graph, order: LinearOrdering, m: int, generators: Iterable[int]) -> PowerGraph:
    """Power graph induced on the union of L_m(x) over x in generators"""
    if m < 1:
        raise ParameterError("m must be at least 1")
    generators = frozenset(generators)
    if any(not 0 <= x < g.vertex_count for x in generators):
        raise ParameterError("generating set is not inside the graph")
    sets = weak_reach_sets(g, order, m)
    keep = set()
    for x in generators:
        keep |= sets[x]
    full = Graph.from_edges(g.vertex_count, ((u, v) for v in g.vertices() for u in sets[v] if u != v))
    graph, base_ids = induced_subgraph(full, keep)
    return PowerGraph(g, order, m, graph, base_ids, generators)


def reach_preimage(g: Graph, order: LinearOrdering, r: int) -> Tuple[VertexSet, ...]:
    """R(u) = {v : u in L_r(v)} for every u"""
    sets = weak_reach_sets(g, order, r)
    preimage: List[set] = [set() for _ in g.vertices()]
    for v in g.vertices():
        for u in sets[v]:
            preimage[u].add(v)
    return tuple(frozenset(s) for s in preimage)


# ----------------------------------------------------------------------------
# Shallow minors
# ----------------------------------------------------------------------------

def _bag_ok(masks: Sequence[int], bag: int, depth: int, cache: Dict[int, bool]) -> bool:
    """Connected with a center reaching every member within depth inside the bag"""
    if bag in cache:
        return cache[bag]
    members = [v for v in range(len(masks)) if bag >> v & 1]
    ok = False
    if next(mask_components(masks, bag)) == bag:
        for center in members:
            reached = 1 << center
            frontier = reached
            for _ in range(depth):
                grown = 0
                bits = frontier
                while bits:
                    bit = bits & -bits
                    bits ^= bit
                    grown |= masks[bit.bit_length() - 1]
                frontier = grown & bag & ~reached
                reached |= frontier
                if not frontier:
                    break
            if reached == bag:
                ok = True
                break
    cache[bag] = ok
    return ok


def _minor_models(g: Graph, depth: int) -> Iterator[List[int]]:
    """
    Every family of disjoint depth-bounded bags, as bag bitmasks.

    Vertices are assigned in id order to "deleted" or to a bag index by a
    restricted-growth string, so each family appears exactly once.
    """
    n = g.vertex_count
    masks = adjacency_masks(g)
    cache: Dict[int, bool] = {}
    bags: List[int] = []

    def assign(v: int) -> Iterator[List[int]]:
        if v == n:
            if bags and all(_bag_ok(masks, bag, depth, cache) for bag in bags):
                yield list(bags)
            return
        yield from assign(v + 1)
        for i in range(len(bags)):
            bags[i] |= 1 << v
            yield from assign(v + 1)
            bags[i] ^= 1 << v
        bags.append(1 << v)
        yield from assign(v + 1)
        bags.pop()

    yield from assign(0)


def _bag_adjacency(masks: Sequence[int], bags: Sequence[int]) -> List[int]:
    reach = []
    for bag in bags:
        touched = 0
        bits = bag
        while bits:
            bit = bits & -bits
            bits ^= bit
            touched |= masks[bit.bit_length() - 1]
        reach.append(touched)
    return reach


def nabla_bruteforce(g: Graph, r: int) -> Fraction:
    """Exact nabla_r: the densest depth-r minor, |E|/|V|, by full enumeration"""
    if r < 0:
        raise ParameterError("r must be non-negative")
    get_caps().require("nabla", g.vertex_count, hint="minor enumeration is exhaustive")
    masks = adjacency_masks(g)
    best = Fraction(0)
    for bags in _minor_models(g, r):
        reach = _bag_adjacency(masks, bags)
        edges = sum(
            1
            for i in range(len(bags))
            for j in range(i + 1, len(bags))
            if reach[i] & bags[j]
        )
        value = Fraction(edges, len(bags))
        if value > best:
            best = value
    return best


def densest_subgraph_density(g: Graph) -> Fraction:
    """Greedy peeling estimate of the densest subgraph density"""
    if g.vertex_count == 0:
        return Fraction(0)
    degree = [g.degree(v) for v in g.vertices()]
    alive = set(g.vertices())
    edges = g.edge_count
    best = Fraction(edges, len(alive))
    while len(alive) > 1:
        v = min(alive, key=lambda x: (degree[x], x))
        alive.discard(v)
        for u in g.adjacency[v]:
            if u in alive:
                degree[u] -= 1
                edges -= 1
        best = max(best, Fraction(edges, len(alive)))
    return best


def _greedy_clique(g: Graph) -> List[int]:
    chosen: List[int] = []
    for v in sorted(g.vertices(), key=lambda x: (-g.degree(x), x)):
        if all(g.has_edge(v, u) for u in chosen):
            chosen.append(v)
    return chosen


def omega_shallow(g: Graph, l: int, mode: str = "exact"):
    """
    Largest clique that is a depth-l minor.

    mode "exact" returns an int (exhaustive, tiny graphs only). mode "greedy"
    returns OmegaBounds: a greedy clique as the lower end and
    max(lower, floor(2 * peel density) + 1, 2) as the upper surrogate.
    """
    if l < 0:
        raise ParameterError("l must be non-negative")
    if mode == "exact":
        get_caps().require("nabla", g.vertex_count, hint="use mode='greedy'")
        masks = adjacency_masks(g)
        best = 0
        for bags in _minor_models(g, l):
            if len(bags) <= best:
                continue
            reach = _bag_adjacency(masks, bags)
            if all(
                reach[i] & bags[j]
                for i in range(len(bags))
                for j in range(i + 1, len(bags))
            ):
                best = len(bags)
        return best
    if mode == "greedy":
        lower = len(_greedy_clique(g))
        estimate = densest_subgraph_density(g)
        upper = max(lower, int(2 * estimate) + 1, 2)
        return OmegaBounds(lower, upper)
    raise ParameterError(f"unknown omega mode: {mode}")


def expansion_bound_after_power(c: Fraction, k: int, m: int, wcol_m: int) -> Tuple[Fraction, int]:
    """(c', k') with c' = 5 wcol_m^2 (2m+1)^(k+2) c and k' = k + 2"""
    c = Fraction(c)
    if c < 1 or k < 0 or m < 1 or wcol_m < 1:
        raise ParameterError("need c >= 1, k >= 0, m >= 1, wcol_m >= 1")
    return 5 * wcol_m * wcol_m * (2 * m + 1) ** (k + 2) * c, k + 2


# ----------------------------------------------------------------------------
# Executable statements
# ----------------------------------------------------------------------------

def composition_holds(g: Graph, order: LinearOrdering, r1: int, r2: int, h: Graph) -> bool:
    """
    For h a subgraph of the radius-r1 power graph on the same vertices, every edge
    of the radius-r2 power graph of h is an edge of the radius-r1*r2 power graph of g.
    """
    outer = power_reach_graph(g, order, r1).graph
    if h.vertex_count != g.vertex_count:
        raise ParameterError("h must live on the vertices of g")
    if any(not outer.has_edge(u, v) for u, v in h.edges()):
        raise ParameterError(f"h is not a subgraph of the radius-{r1} power graph")
    inner = power_reach_graph(h, order, r2).graph
    target = power_reach_graph(g, order, r1 * r2).graph
    return all(target.has_edge(u, v) for u, v in inner.edges())


def separation_transfer_holds(g: Graph, order: LinearOrdering, m: int,
                              generators: Iterable[int], cut: Iterable[int]) -> bool:
    """
    If x, y in X fall into different components of the restricted power graph minus C, then
    their distance in G - C exceeds m.
    """
    generators = frozenset(generators)
    cut = frozenset(cut)
    power = restricted_reach_graph(g, order, m, generators)
    local = power.local_ids()
    removed = frozenset(local[v] for v in cut if v in local)
    label: Dict[int, int] = {}
    for index, part in enumerate(components(power.graph, removed)):
        for v in part:
            label[power.vertex_map[v]] = index
    allowed = frozenset(v for v in g.vertices() if v not in cut)
    alive = sorted(x for x in generators if x not in cut)
    for i, x in enumerate(alive):
        dist = bfs_distances(g, (x,), allowed, limit=m)
        for y in alive[i + 1:]:
            if label[x] != label[y] and y in dist:
                return False
    return True


def power_expansion_bound(g: Graph, order: LinearOrdering, m: int, r: int) -> Fraction:
    """
    wcol_m^2 (2m+1)^2 (2r+1)^2 nabla_{(2m+1)r+m}(G) + wcol_m, the bound on
    nabla_r of the radius-m power graph.
    """
    wcol = wcol_under(g, order, m)
    deep = nabla_bruteforce(g, (2 * m + 1) * r + m)
    return wcol * wcol * (2 * m + 1) ** 2 * (2 * r + 1) ** 2 * deep + wcol
