"""
Graph core: immutable simple graphs, exact vertex assignments, traversals,
generators and the plain-text file formats.

Vertex ids are dense integers 0..n-1. Vertex sets are frozensets of ids.
All weights and costs are Fractions so every threshold comparison is exact.

Traversals run directly on the sorted adjacency tuples with a deque, over
frozensets of removed or forbidden vertices, so the engine never converts
to networkx inside its loops. to_networkx is for flows and test oracles.
"""

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx

from errors import GraphParseError, ParameterError

# Vertex sets are hashable frozensets. The exhaustive searches switch to int
# bitmasks (adjacency_masks, mask_components) where they enumerate subsets.
VertexSet = FrozenSet[int]
Rational = Union[int, Fraction]

EMPTY: VertexSet = frozenset()


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph over vertices 0..vertex_count-1"""
    vertex_count: int
    adjacency: Tuple[Tuple[int, ...], ...]
    edge_count: int

    def __post_init__(self):
        if len(self.adjacency) != self.vertex_count:
            raise ParameterError("adjacency length does not match vertex_count")
        degree_sum = 0
        for v, nbrs in enumerate(self.adjacency):
            degree_sum += len(nbrs)
            previous = -1
            for u in nbrs:
                if u <= previous:
                    raise ParameterError(f"adjacency of {v} is not strictly increasing")
                if u == v:
                    raise ParameterError(f"self-loop at {v}")
                if not 0 <= u < self.vertex_count:
                    raise ParameterError(f"neighbor {u} of {v} out of range")
                previous = u
        for v, nbrs in enumerate(self.adjacency):
            for u in nbrs:
                if not _sorted_contains(self.adjacency[u], v):
                    raise ParameterError(f"edge {v}-{u} is not symmetric")
        if degree_sum != 2 * self.edge_count:
            raise ParameterError("edge_count must be half the adjacency total")

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        """Build a graph, collapsing duplicate edges; self-loops are rejected"""
        if vertex_count < 0:
            raise ParameterError("vertex_count must be non-negative")
        neighbor_sets: List[set] = [set() for _ in range(vertex_count)]
        for u, v in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise ParameterError(f"edge {u}-{v} out of range for n={vertex_count}")
            if u == v:
                raise ParameterError(f"self-loop at {u}")
            neighbor_sets[u].add(v)
            neighbor_sets[v].add(u)
        adjacency = tuple(tuple(sorted(nbrs)) for nbrs in neighbor_sets)
        edge_count = sum(len(nbrs) for nbrs in adjacency) // 2
        return cls(vertex_count, adjacency, edge_count)

    def vertices(self) -> range:
        return range(self.vertex_count)

    def vertex_set(self) -> VertexSet:
        return frozenset(range(self.vertex_count))

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return _sorted_contains(self.adjacency[u], v)

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Edges as (u, v) with u < v in lexicographic order"""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield (u, v)


def _sorted_contains(seq: Sequence[int], value: int) -> bool:
    lo, hi = 0, len(seq)
    while lo < hi:
        mid = (lo + hi) // 2
        if seq[mid] < value:
            lo = mid + 1
        else:
            hi = mid
    return lo < len(seq) and seq[lo] == value


@dataclass(frozen=True)
class VertexAssignment:
    """Non-negative exact value per vertex (a weight w or a cost rho)"""
    values: Tuple[Fraction, ...]
    total: Fraction = field(init=False, compare=False)

    def __post_init__(self):
        converted = tuple(Fraction(value) for value in self.values)
        for v, value in enumerate(converted):
            if value < 0:
                raise ParameterError(f"value of vertex {v} is negative: {value}")
        object.__setattr__(self, "values", converted)
        object.__setattr__(self, "total", sum(converted, Fraction(0)))

    @classmethod
    def uniform(cls, n: int, value: Rational = 1) -> "VertexAssignment":
        return cls(tuple(Fraction(value) for _ in range(n)))

    @classmethod
    def from_values(cls, values: Iterable[Rational]) -> "VertexAssignment":
        return cls(tuple(values))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, v: int) -> Fraction:
        return self.values[v]

    def of(self, vertices: Iterable[int]) -> Fraction:
        """f(X) = sum of f(x) over x in X"""
        values = self.values
        return sum((values[v] for v in vertices), Fraction(0))

    def restrict(self, base_ids: Sequence[int]) -> "VertexAssignment":
        """Assignment for an induced subgraph whose local id i is base_ids[i]"""
        return VertexAssignment(tuple(self.values[v] for v in base_ids))


# ----------------------------------------------------------------------------
# File formats
# ----------------------------------------------------------------------------

def _data_lines(text: str) -> Iterator[Tuple[int, str]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield number, line


def _parse_int(token: str, line_number: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise GraphParseError(f"expected an integer, got {token!r}", line_number)


def load_graph(text: str) -> Graph:
    """Parse the edge-list document: header "n m", then m lines "u v" """
    lines = list(_data_lines(text))
    if not lines:
        raise GraphParseError("missing header line \"n m\"", 1)

    header_number, header = lines[0]
    tokens = header.split()
    if len(tokens) != 2:
        raise GraphParseError("header must be \"n m\"", header_number)
    n = _parse_int(tokens[0], header_number)
    m = _parse_int(tokens[1], header_number)
    if n < 0 or m < 0:
        raise GraphParseError("n and m must be non-negative", header_number)

    body = lines[1:]
    if len(body) != m:
        last = body[-1][0] if body else header_number
        raise GraphParseError(f"header announces {m} edges, found {len(body)}", last)

    edges = []
    for number, line in body:
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphParseError("edge line must be \"u v\"", number)
        u = _parse_int(tokens[0], number)
        v = _parse_int(tokens[1], number)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"vertex id out of range 0..{n - 1}", number)
        if u == v:
            raise GraphParseError(f"self-loop at vertex {u}", number)
        edges.append((u, v))
    return Graph.from_edges(n, edges)


def save_graph(g: Graph) -> str:
    lines = [f"{g.vertex_count} {g.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_rational(token: str) -> Fraction:
    """Parse "p/q" or an integer into a non-negative Fraction"""
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParameterError(f"not a rational number: {token!r}")
    if value < 0:
        raise ParameterError(f"negative value: {token!r}")
    return value


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def load_assignment(text: str, n: int) -> VertexAssignment:
    """Parse n lines with one non-negative rational each"""
    values = []
    for number, line in _data_lines(text):
        try:
            values.append(parse_rational(line))
        except ParameterError as e:
            raise GraphParseError(str(e), number)
    if len(values) != n:
        raise GraphParseError(f"expected {n} values, found {len(values)}")
    return VertexAssignment(tuple(values))


def save_assignment(f: VertexAssignment) -> str:
    return "".join(f"{format_rational(value)}\n" for value in f.values)


# ----------------------------------------------------------------------------
# Traversals
# ----------------------------------------------------------------------------

def components(g: Graph, removed: VertexSet = EMPTY) -> List[VertexSet]:
    """Connected components of g - removed, ordered by their smallest vertex"""
    seen = set(removed)
    result = []
    for start in g.vertices():
        if start in seen:
            continue
        seen.add(start)
        members = [start]
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u in g.adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    members.append(u)
                    queue.append(u)
        result.append(frozenset(members))
    return result


def components_within(g: Graph, allowed: Iterable[int]) -> List[VertexSet]:
    """Connected components of the subgraph induced by allowed"""
    allowed = set(allowed)
    return components(g, frozenset(v for v in g.vertices() if v not in allowed))


def ball(g: Graph, sources: Iterable[int], radius: int, forbidden: VertexSet = EMPTY) -> VertexSet:
    """Vertices within radius steps of sources in g - forbidden"""
    sources = frozenset(sources)
    if sources & forbidden:
        raise ParameterError("sources and forbidden must be disjoint")
    if radius < 0:
        raise ParameterError("radius must be non-negative")
    reached = set(sources)
    frontier = sorted(sources)
    for _ in range(radius):
        next_frontier = []
        for v in frontier:
            for u in g.adjacency[v]:
                if u not in reached and u not in forbidden:
                    reached.add(u)
                    next_frontier.append(u)
        if not next_frontier:
            break
        frontier = next_frontier
    return frozenset(reached)


def bfs_distances(g: Graph, sources: Iterable[int], allowed: Optional[VertexSet] = None,
                  limit: Optional[int] = None) -> Dict[int, int]:
    """Distances from sources inside allowed (default: all vertices), up to limit"""
    dist: Dict[int, int] = {}
    queue = deque()
    for s in sorted(set(sources)):
        if allowed is None or s in allowed:
            dist[s] = 0
            queue.append(s)
    while queue:
        v = queue.popleft()
        d = dist[v]
        if limit is not None and d >= limit:
            continue
        for u in g.adjacency[v]:
            if u not in dist and (allowed is None or u in allowed):
                dist[u] = d + 1
                queue.append(u)
    return dist


def bfs_tree(g: Graph, source: int, allowed: Optional[VertexSet] = None) -> Tuple[Dict[int, int], Dict[int, int]]:
    """BFS distances and parents from source; neighbors are scanned in id order"""
    dist = {source: 0}
    parent: Dict[int, int] = {}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u in g.adjacency[v]:
            if u not in dist and (allowed is None or u in allowed):
                dist[u] = dist[v] + 1
                parent[u] = v
                queue.append(u)
    return dist, parent


def tree_path(parent: Dict[int, int], source: int, target: int) -> List[int]:
    """Path source..target read off a BFS parent map"""
    path = [target]
    while path[-1] != source:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def shortest_path(g: Graph, source: int, targets: Iterable[int],
                  allowed: Optional[VertexSet] = None) -> Optional[List[int]]:
    """
    Shortest path from source to the nearest target inside allowed.

    Among nearest targets the smallest id wins; the path itself follows BFS
    parents discovered in id order. Returns None when no target is reachable.
    """
    targets = frozenset(targets)
    if source in targets:
        return [source]
    dist, parent = bfs_tree(g, source, allowed)
    reached = [(dist[v], v) for v in targets if v in dist]
    if not reached:
        return None
    _, target = min(reached)
    return tree_path(parent, source, target)


def set_distance(g: Graph, first: Iterable[int], second: Iterable[int],
                 forbidden: VertexSet = EMPTY) -> Optional[int]:
    """d(X1, X2) in g - forbidden, or None when no path exists"""
    targets = frozenset(second) - forbidden
    if not targets:
        return None
    allowed = frozenset(v for v in g.vertices() if v not in forbidden)
    dist = bfs_distances(g, frozenset(first) - forbidden, allowed)
    found = [dist[v] for v in targets if v in dist]
    return min(found) if found else None


def neighborhood(g: Graph, vertices: Iterable[int], within: Optional[VertexSet] = None) -> VertexSet:
    """N(X): vertices outside X (and inside within, if given) adjacent to X"""
    members = frozenset(vertices)
    result = set()
    for v in members:
        for u in g.adjacency[v]:
            if u not in members and (within is None or u in within):
                result.add(u)
    return frozenset(result)


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> Tuple[Graph, Tuple[int, ...]]:
    """Subgraph induced by vertices, relabelled 0.. in increasing base-id order"""
    base_ids = tuple(sorted(set(vertices)))
    local = {v: i for i, v in enumerate(base_ids)}
    adjacency = tuple(
        tuple(local[u] for u in g.adjacency[v] if u in local) for v in base_ids
    )
    edge_count = sum(len(nbrs) for nbrs in adjacency) // 2
    return Graph(len(base_ids), adjacency, edge_count), base_ids


def density(g: Graph) -> Fraction:
    """|E| / |V|"""
    if g.vertex_count == 0:
        raise ParameterError("density of the empty graph is undefined")
    return Fraction(g.edge_count, g.vertex_count)


def to_networkx(g: Graph) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(g.vertices())
    graph.add_edges_from(g.edges())
    return graph


def from_networkx(graph: nx.Graph) -> Graph:
    """Convert a networkx graph, relabelling nodes 0.. in sorted order"""
    nodes = sorted(graph.nodes())
    index = {node: i for i, node in enumerate(nodes)}
    return Graph.from_edges(len(nodes), ((index[u], index[v]) for u, v in graph.edges() if u != v))


# ----------------------------------------------------------------------------
# Bitmask helpers for the exhaustive oracles
# ----------------------------------------------------------------------------

def adjacency_masks(g: Graph) -> Tuple[int, ...]:
    return tuple(sum(1 << u for u in nbrs) for nbrs in g.adjacency)


def mask_components(masks: Sequence[int], alive: int) -> Iterator[int]:
    """Component bitmasks of the subgraph induced by the alive bitmask"""
    remaining = alive
    while remaining:
        low = remaining & -remaining
        component = low
        frontier = low
        while frontier:
            bit = frontier & -frontier
            frontier ^= bit
            grown = masks[bit.bit_length() - 1] & remaining & ~component
            component |= grown
            frontier |= grown
        remaining &= ~component
        yield component


def mask_members(mask: int) -> List[int]:
    members = []
    while mask:
        bit = mask & -mask
        members.append(bit.bit_length() - 1)
        mask ^= bit
    return members


# ----------------------------------------------------------------------------
# Generators
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class BicliqueParts:
    """Vertex layout of the subdivided biclique G_{s,n}"""
    s: int
    n: int
    a_part: Tuple[int, ...]
    b_part: Tuple[int, ...]
    paths: Dict[Tuple[int, int], Tuple[int, ...]]

    @property
    def subdivision(self) -> Tuple[int, ...]:
        return tuple(range(self.s + self.n, self.s + self.n + self.n * self.s * (self.s - 2)))


def gen_edgeless(n: int) -> Graph:
    return Graph.from_edges(n, ())


def gen_path(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def gen_cycle(n: int) -> Graph:
    if n < 3:
        raise ParameterError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def gen_complete(n: int) -> Graph:
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def gen_grid_rect(rows: int, cols: int) -> Graph:
    """rows x cols grid, vertex id row*cols + col"""
    if rows < 1 or cols < 1:
        raise ParameterError("grid dimensions must be positive")
    edges = []
    for row in range(rows):
        for col in range(cols):
            v = row * cols + col
            if col + 1 < cols:
                edges.append((v, v + 1))
            if row + 1 < rows:
                edges.append((v, v + cols))
    return Graph.from_edges(rows * cols, edges)


def gen_grid(k: int) -> Graph:
    return gen_grid_rect(k, k)


def gen_star(leaves: int) -> Graph:
    """K_{1,leaves}: center 0, leaves 1..leaves"""
    if leaves < 1:
        raise ParameterError("a star needs at least one leaf")
    return Graph.from_edges(leaves + 1, ((0, i) for i in range(1, leaves + 1)))


def gen_subdivided_biclique(s: int, n: int) -> Tuple[Graph, BicliqueParts]:
    """
    G_{s,n}: K_{s,n} with every edge subdivided s-2 times.

    Ids: A = 0..s-1, B = s..s+n-1, then the internal vertices of the a-b path
    for a in A, b in B (a-major), listed from the A end to the B end.
    """
    if s < 3:
        raise ParameterError("s must be at least 3")
    if n < 1:
        raise ParameterError("n must be positive")
    a_part = tuple(range(s))
    b_part = tuple(range(s, s + n))
    next_id = s + n
    edges = []
    paths: Dict[Tuple[int, int], Tuple[int, ...]] = {}
    for a in a_part:
        for b in b_part:
            internal = tuple(range(next_id, next_id + s - 2))
            next_id += s - 2
            chain = (a,) + internal + (b,)
            edges.extend(zip(chain, chain[1:]))
            paths[(a, b)] = internal
    graph = Graph.from_edges(next_id, edges)
    return graph, BicliqueParts(s, n, a_part, b_part, paths)


def gen_random_bounded_degree(n: int, max_degree: int, seed: int = 0,
                              edge_factor: Fraction = Fraction(1, 2)) -> Graph:
    """Seeded random graph with maximum degree at most max_degree"""
    if n < 1 or max_degree < 0:
        raise ParameterError("n must be positive and max_degree non-negative")
    rng = random.Random(seed)
    degree = [0] * n
    edges = set()
    attempts = int(n * max_degree * edge_factor) * 4
    target = int(n * max_degree * edge_factor)
    for _ in range(attempts):
        if len(edges) >= target or n < 2:
            break
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in edges or degree[u] >= max_degree or degree[v] >= max_degree:
            continue
        edges.add(key)
        degree[u] += 1
        degree[v] += 1
    return Graph.from_edges(n, sorted(edges))


def star_lower_bound_costs(leaves: int) -> VertexAssignment:
    """rho(center) = n/3, rho(leaf) = 1"""
    return VertexAssignment((Fraction(leaves, 3),) + tuple(Fraction(1) for _ in range(leaves)))


def biclique_lower_bound_assignments(parts: BicliqueParts) -> Tuple[VertexAssignment, VertexAssignment]:
    """
    Weight 1 on B and 0 elsewhere; cost n on A, s on B, 1 on subdivision vertices.
    """
    total = parts.s + parts.n + parts.n * parts.s * (parts.s - 2)
    weights = [Fraction(0)] * total
    costs = [Fraction(1)] * total
    for a in parts.a_part:
        costs[a] = Fraction(parts.n)
    for b in parts.b_part:
        weights[b] = Fraction(1)
        costs[b] = Fraction(parts.s)
    return VertexAssignment(tuple(weights)), VertexAssignment(tuple(costs))
