"""
Linear orderings and the generalized coloring numbers defined over them.

L(v) is the set of vertices u reachable from v by a path of length at most r
on which u is the smallest vertex. wcol is the largest |L(v)|, adm the largest
fan of disjoint descending paths.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from config import get_caps, status
from errors import GraphParseError, ParameterError
from graph_core import Graph, VertexSet, ball


@dataclass(frozen=True)
class LinearOrdering:
    """Bijection vertex <-> position; u precedes v iff position[u] < position[v]"""
    position: Tuple[int, ...]
    inverse: Tuple[int, ...]

    def __post_init__(self):
        n = len(self.position)
        if len(self.inverse) != n:
            raise ParameterError("position and inverse differ in length")
        for i, v in enumerate(self.inverse):
            if not 0 <= v < n or self.position[v] != i:
                raise ParameterError("ordering is not a bijection")

    @classmethod
    def from_sequence(cls, sequence: Sequence[int]) -> "LinearOrdering":
        """Ordering whose i-th vertex is sequence[i]"""
        n = len(sequence)
        position = [-1] * n
        for i, v in enumerate(sequence):
            if not 0 <= v < n or position[v] != -1:
                raise ParameterError("sequence is not a permutation of 0..n-1")
            position[v] = i
        return cls(tuple(position), tuple(sequence))

    @classmethod
    def identity(cls, n: int) -> "LinearOrdering":
        return cls(tuple(range(n)), tuple(range(n)))

    def __len__(self) -> int:
        return len(self.position)

    def precedes(self, u: int, v: int) -> bool:
        return self.position[u] < self.position[v]

    def induced(self, base_ids: Sequence[int]) -> "LinearOrdering":
        """
        Restriction to a vertex subset whose local id i is base_ids[i];
        local vertices keep their relative order.
        """
        local = sorted(range(len(base_ids)), key=lambda i: self.position[base_ids[i]])
        return LinearOrdering.from_sequence(local)


def load_ordering(text: str, n: int) -> LinearOrdering:
    """Parse n lines; line i holds the vertex at position i"""
    sequence = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            sequence.append(int(line))
        except ValueError:
            raise GraphParseError(f"expected a vertex id, got {line!r}", number)
    if len(sequence) != n:
        raise GraphParseError(f"expected {n} vertices, found {len(sequence)}")
    try:
        return LinearOrdering.from_sequence(sequence)
    except ParameterError as e:
        raise GraphParseError(str(e))


def save_ordering(order: LinearOrdering) -> str:
    return "".join(f"{v}\n" for v in order.inverse)


def _check_ordering(g: Graph, order: LinearOrdering) -> None:
    if len(order) != g.vertex_count:
        raise ParameterError(
            f"ordering covers {len(order)} vertices, graph has {g.vertex_count}"
        )


def _descending_ball(g: Graph, position: Sequence[int], u: int, r: int) -> List[int]:
    """Vertices within distance r of u using only vertices not before u"""
    floor = position[u]
    dist = {u: 0}
    frontier = [u]
    for depth in range(1, r + 1):
        next_frontier = []
        for x in frontier:
            for y in g.adjacency[x]:
                if y not in dist and position[y] >= floor:
                    dist[y] = depth
                    next_frontier.append(y)
        if not next_frontier:
            break
        frontier = next_frontier
    return list(dist)


def weak_reach_sets(g: Graph, order: LinearOrdering, r: int) -> Tuple[VertexSet, ...]:
    """L(v) for every vertex, by one bounded BFS per vertex u in G[{x : x >= u}]"""
    _check_ordering(g, order)
    if r < 0:
        raise ParameterError("r must be non-negative")
    members: List[Set[int]] = [set() for _ in g.vertices()]
    for u in g.vertices():
        for x in _descending_ball(g, order.position, u, r):
            members[x].add(u)
    return tuple(frozenset(s) for s in members)


def reachable_set(g: Graph, order: LinearOrdering, r: int, v: int) -> VertexSet:
    """L(v): vertices u reachable from v within r steps with u minimal on the path"""
    _check_ordering(g, order)
    if r < 0:
        raise ParameterError("r must be non-negative")
    position = order.position
    result = {v}
    for u in ball(g, (v,), r):
        if u != v and position[u] < position[v]:
            if v in _descending_ball(g, position, u, r):
                result.add(u)
    return frozenset(result)


def wcol_under(g: Graph, order: LinearOrdering, r: int) -> int:
    """max |L(v)| under the given ordering"""
    if g.vertex_count == 0:
        raise ParameterError("weak coloring number of the empty graph is undefined")
    if r == 0:
        return 1
    return max(len(s) for s in weak_reach_sets(g, order, r))


def heuristic_ordering(g: Graph, r: int) -> LinearOrdering:
    """
    Distance-r smallest-last ordering.

    Repeatedly removes the vertex with the fewest remaining vertices within
    distance r (counted in the remaining graph). Removed vertices fill the
    ordering from the back, so the last vertex removed comes first. Ties go to
    the smaller count in the full graph, then to the larger id; on edgeless
    graphs this yields the identity.
    """
    n = g.vertex_count
    if n == 0:
        raise ParameterError("cannot order the empty graph")
    if r < 0:
        raise ParameterError("r must be non-negative")

    removed: Set[int] = set()
    forbidden = frozenset()
    counts = [len(ball(g, (v,), r)) - 1 for v in g.vertices()]
    original = list(counts)
    alive = set(g.vertices())
    sequence = [0] * n

    for slot in range(n - 1, -1, -1):
        v = min(alive, key=lambda x: (counts[x], original[x], -x))
        affected = ball(g, (v,), r, forbidden) - {v}
        alive.discard(v)
        removed.add(v)
        forbidden = frozenset(removed)
        sequence[slot] = v
        for x in affected:
            counts[x] = len(ball(g, (x,), r, forbidden)) - 1

    return LinearOrdering.from_sequence(sequence)


def wcol_exact(g: Graph, r: int) -> Tuple[int, LinearOrdering]:
    """
    Minimum wcol over all orderings, with a witness ordering.

    Branch and bound placing vertices front to back. When u is placed after the
    set P, u joins L(x) for exactly the x in ball(u, r) of G - P, so every
    per-vertex count is final-or-growing and any count reaching the incumbent
    prunes the branch.
    """
    n = g.vertex_count
    if n == 0:
        raise ParameterError("weak coloring number of the empty graph is undefined")
    get_caps().require("wcol", n, hint="use heuristic_ordering for larger graphs")
    if r == 0:
        return 1, LinearOrdering.identity(n)

    start = heuristic_ordering(g, r)
    best_value = wcol_under(g, start, r)
    best_sequence = list(start.inverse)

    counts = [0] * n
    placed: List[int] = []
    placed_set: Set[int] = set()

    def search() -> None:
        nonlocal best_value, best_sequence
        if len(placed) == n:
            value = max(counts)
            if value < best_value:
                best_value = value
                best_sequence = list(placed)
            return
        if best_value == 1:
            return
        forbidden = frozenset(placed_set)
        options = []
        for u in g.vertices():
            if u in placed_set:
                continue
            reach = ball(g, (u,), r, forbidden)
            peak = max(counts[x] + 1 for x in reach)
            if peak < best_value:
                options.append((peak, len(reach), u, reach))
        options.sort()
        for _, _, u, reach in options:
            for x in reach:
                counts[x] += 1
            placed.append(u)
            placed_set.add(u)
            search()
            placed.pop()
            placed_set.discard(u)
            for x in reach:
                counts[x] -= 1
            if best_value == 1:
                return

    search()
    return best_value, LinearOrdering.from_sequence(best_sequence)


# ----------------------------------------------------------------------------
# Admissibility
# ----------------------------------------------------------------------------

def _candidate_paths(g: Graph, v: int, r: int, earlier: FrozenSet[int]) -> Dict[int, List[Tuple[int, ...]]]:
    """
    Paths from v of length <= r whose inner vertices come after v and whose
    last vertex is the first one before v; grouped by their first vertex.
    Each path is stored without v.
    """
    grouped: Dict[int, List[Tuple[int, ...]]] = {}

    def extend(path: List[int], visited: Set[int]) -> None:
        last = path[-1]
        if last in earlier:
            grouped.setdefault(path[0], []).append(tuple(path))
            return
        if len(path) == r:
            return
        for y in g.adjacency[last]:
            if y != v and y not in visited:
                visited.add(y)
                path.append(y)
                extend(path, visited)
                path.pop()
                visited.discard(y)

    for first in g.adjacency[v]:
        extend([first], {first})
    for paths in grouped.values():
        paths.sort(key=lambda p: (len(p), p))
    return grouped


def _flow_upper_bound(g: Graph, v: int, earlier: FrozenSet[int]) -> int:
    """Vertex-disjoint v -> earlier paths ignoring length, by max-flow on split vertices"""
    flow = nx.DiGraph()
    sink = ("sink",)
    for x in g.vertices():
        if x == v:
            continue
        if x in earlier:
            flow.add_edge((x, "in"), sink, capacity=1)
        else:
            flow.add_edge((x, "in"), (x, "out"), capacity=1)
    for y in g.adjacency[v]:
        flow.add_edge(v, (y, "in"), capacity=1)
    for x in g.vertices():
        if x == v or x in earlier:
            continue
        for y in g.adjacency[x]:
            if y != v:
                flow.add_edge((x, "out"), (y, "in"), capacity=1)
    if v not in flow or sink not in flow:
        return 0
    return nx.maximum_flow_value(flow, v, sink)


def kappa_with(g: Graph, v: int, r: int, earlier: Iterable[int]) -> int:
    """
    Largest number of paths from v of length <= r, disjoint apart from v, each
    ending in a vertex of earlier and otherwise avoiding it.
    """
    if r < 1:
        raise ParameterError("r must be at least 1")
    earlier = frozenset(earlier)
    if not earlier:
        return 0
    if r == 1:
        return sum(1 for y in g.adjacency[v] if y in earlier)

    grouped = _candidate_paths(g, v, r, earlier)
    firsts = sorted(grouped)
    if not firsts:
        return 0
    ceiling = min(len(firsts), _flow_upper_bound(g, v, earlier))
    best = 0
    used: Set[int] = set()

    def search(index: int, count: int) -> bool:
        nonlocal best
        if count > best:
            best = count
            if best == ceiling:
                return True
        if index == len(firsts) or count + len(firsts) - index <= best:
            return False
        for path in grouped[firsts[index]]:
            if used.isdisjoint(path):
                used.update(path)
                done = search(index + 1, count + 1)
                used.difference_update(path)
                if done:
                    return True
        return search(index + 1, count)

    search(0, 0)
    return best


def kappa(g: Graph, order: LinearOrdering, r: int, v: int) -> int:
    """kappa(v): disjoint descending fan from v under the ordering"""
    _check_ordering(g, order)
    position = order.position
    earlier = [u for u in g.vertices() if position[u] < position[v]]
    return kappa_with(g, v, r, earlier)


def adm_under(g: Graph, order: LinearOrdering, r: int) -> int:
    """max kappa over vertices; 0 for graphs without edges"""
    _check_ordering(g, order)
    if r < 1:
        raise ParameterError("r must be at least 1")
    return max((kappa(g, order, r, v) for v in g.vertices()), default=0)


def adm_exact(g: Graph, r: int) -> Tuple[int, LinearOrdering]:
    """
    Minimum admissibility over all orderings.

    kappa(v) depends only on the set of vertices placed before v, so the best
    value for a prefix set S is min over its last vertex v of
    max(best[S - v], kappa(v | S - v)).
    """
    n = g.vertex_count
    if r < 1:
        raise ParameterError("r must be at least 1")
    get_caps().require("wcol", n, hint="admissibility is exact only on small graphs")
    if n == 0:
        return 0, LinearOrdering.identity(0)

    full = (1 << n) - 1
    best = [0] * (full + 1)
    last = [-1] * (full + 1)
    for mask in range(1, full + 1):
        value = None
        choice = -1
        bits = mask
        while bits:
            bit = bits & -bits
            bits ^= bit
            v = bit.bit_length() - 1
            rest = mask ^ bit
            earlier = [u for u in range(n) if rest >> u & 1]
            candidate = max(best[rest], kappa_with(g, v, r, earlier))
            if value is None or candidate < value:
                value, choice = candidate, v
        best[mask] = value
        last[mask] = choice

    sequence = []
    mask = full
    while mask:
        v = last[mask]
        sequence.append(v)
        mask ^= 1 << v
    sequence.reverse()
    status("OK", f"adm_{r} exact = {best[full]} over {n} vertices")
    return best[full], LinearOrdering.from_sequence(sequence)


def admissibility_bound_holds(g: Graph, order: LinearOrdering, r: int) -> bool:
    """
    wcol <= (r^2 adm)^r under one ordering.

    Graphs without edges have adm = 0 and wcol = 1. At r = 1 the two numbers
    differ by exactly one (every earlier neighbor is its own path), so the
    checked form there is wcol <= adm + 1.
    """
    if r < 1:
        raise ParameterError("r must be at least 1")
    wcol = wcol_under(g, order, r)
    adm = adm_under(g, order, r)
    if adm == 0:
        return wcol == 1
    if r == 1:
        return wcol <= adm + 1
    return wcol <= (r * r * adm) ** r


def best_ordering(g: Graph, r: int, mode: str = "heuristic", path: Optional[str] = None) -> LinearOrdering:
    """Ordering by mode: heuristic, exact (wcol-optimal) or file"""
    if mode == "heuristic":
        return heuristic_ordering(g, r)
    if mode == "exact":
        return wcol_exact(g, r)[1]
    if mode == "file":
        if path is None:
            raise ParameterError("ordering mode 'file' needs a path")
        with open(path, "r", encoding="utf-8") as f:
            return load_ordering(f.read(), g.vertex_count)
    raise ParameterError(f"unknown ordering mode: {mode}")
