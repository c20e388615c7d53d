"""
Non-expansion witnesses.

A graph is a (w, rho, t)-expander when rho(G) > 0 and every X with
w(X) <= w(G)/2 has rho(N(X)) >= rho(X)/t. This module only ever certifies the
opposite: a set Z that breaks the condition.
"""

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Optional

from config import get_caps
from errors import DomainError, InvariantViolation, ParameterError
from graph_core import Graph, VertexAssignment, VertexSet, neighborhood, set_distance

# Above this many bits in (t+1)^l the comparison switches to decimal logarithms
EXACT_POWER_BITS = 1 << 22


def _exceeds(t: int, l: int, num: int, den: int) -> bool:
    """(1 + 1/t)^l > num/den"""
    if l * math.log2(t + 1) <= EXACT_POWER_BITS:
        return (t + 1) ** l * den > num * t ** l
    with localcontext() as ctx:
        ctx.prec = 60
        lhs = Decimal(l) * ((Decimal(t) + 1).ln() - Decimal(t).ln())
        rhs = Decimal(num).ln() - Decimal(den).ln()
        return lhs > rhs


@lru_cache(maxsize=4096)
def _ell(t: int, num: int, den: int) -> int:
    if num <= den:
        # bnd == 1
        return 1
    estimate = (math.log(num) - math.log(den)) / math.log1p(1 / t)
    l = max(0, int(estimate) - 1)
    while not _exceeds(t, l, num, den):
        l += 1
    while l > 0 and _exceeds(t, l - 1, num, den):
        l -= 1
    return l


def ell(t: int, bnd) -> int:
    """Minimum integer l with (1 + 1/t)^l > bnd"""
    bnd = Fraction(bnd)
    if t < 1:
        raise ParameterError("t must be at least 1")
    if bnd < 1:
        raise ParameterError("bnd must be at least 1")
    return _ell(t, bnd.numerator, bnd.denominator)


@dataclass(frozen=True)
class ExpanderWitness:
    """Z with w(Z) <= w_total/2 and rho(N(Z)) < rho(Z)/t; checked on construction"""
    members: VertexSet
    w_of_members: Fraction
    rho_of_members: Fraction
    rho_of_boundary: Fraction
    w_total: Fraction
    t: int

    def __post_init__(self):
        if not self.members:
            raise InvariantViolation("expander witness must be nonempty")
        if 2 * self.w_of_members > self.w_total:
            raise InvariantViolation(
                f"witness weight {self.w_of_members} exceeds half of {self.w_total}"
            )
        if self.t * self.rho_of_boundary >= self.rho_of_members:
            raise InvariantViolation(
                f"witness boundary cost {self.rho_of_boundary} is not below "
                f"{self.rho_of_members}/{self.t}"
            )

    @classmethod
    def certify(cls, g: Graph, w: VertexAssignment, rho: VertexAssignment, t: int,
                members: Iterable[int], within: Optional[VertexSet] = None) -> "ExpanderWitness":
        """Recompute every quantity from the graph and build the certificate"""
        members = frozenset(members)
        scope = g.vertex_set() if within is None else within
        boundary = neighborhood(g, members, scope)
        return cls(members, w.of(members), rho.of(members), rho.of(boundary), w.of(scope), t)


@dataclass(frozen=True)
class GrowthResult:
    reached: VertexSet
    witness: Optional[ExpanderWitness]
    steps: int


def _is_witness(g: Graph, w: VertexAssignment, rho: VertexAssignment, t: int,
                members: VertexSet, half_total: Fraction) -> bool:
    if w.of(members) > half_total:
        return False
    return t * rho.of(neighborhood(g, members)) < rho.of(members)


def find_witness_exhaustive(g: Graph, w: VertexAssignment, rho: VertexAssignment,
                            t: int) -> Optional[ExpanderWitness]:
    """
    Smallest witness of non-expansion, ties broken lexicographically; None
    when g is a (w, rho, t)-expander.
    """
    if t < 1:
        raise ParameterError("t must be at least 1")
    if rho.total == 0:
        raise DomainError("expander undefined: total cost is zero")
    n = g.vertex_count
    get_caps().require("expander", n, hint="use grow_ball_certified instead")
    half_total = w.total / 2
    for size in range(1, n + 1):
        for members in combinations(range(n), size):
            members = frozenset(members)
            if _is_witness(g, w, rho, t, members, half_total):
                return ExpanderWitness.certify(g, w, rho, t, members)
    return None


def grow_ball_certified(g: Graph, w: VertexAssignment, rho: VertexAssignment, t: int,
                        seed: Iterable[int], max_steps: Optional[int] = None,
                        within: Optional[VertexSet] = None) -> GrowthResult:
    """
    Grow X_{i+1} = X_i + N(X_i) from seed inside within (default: all of g).

    Returns a witness the first time X_i is light (w(X_i) <= w(within)/2) and
    stalls (rho(N(X_i)) < rho(X_i)/t). Stops without one once X_i is heavy or
    after max_steps growth steps. While no witness appears and X stays light,
    rho(X_i) >= (1 + 1/t)^i rho(seed).
    """
    if t < 1:
        raise ParameterError("t must be at least 1")
    scope = g.vertex_set() if within is None else frozenset(within)
    current = frozenset(seed)
    if not current <= scope:
        raise ParameterError("seed must lie inside the growth scope")
    seed_cost = rho.of(current)
    if seed_cost == 0:
        raise DomainError("seed has zero cost")
    scope_cost = rho.of(scope)
    half_total = w.of(scope) / 2
    if max_steps is None:
        max_steps = ell(t, max(Fraction(1), Fraction(math.ceil(scope_cost / seed_cost))))

    step = 0
    while True:
        if w.of(current) > half_total:
            return GrowthResult(current, None, step)
        boundary = neighborhood(g, current, scope)
        if t * rho.of(boundary) < rho.of(current):
            witness = ExpanderWitness.certify(g, w, rho, t, current, scope)
            return GrowthResult(current, witness, step)
        if step == max_steps:
            return GrowthResult(current, None, step)
        current = current | boundary
        step += 1


def find_witness_between(g: Graph, w: VertexAssignment, rho: VertexAssignment, t: int,
                         first: Iterable[int], second: Iterable[int],
                         first_steps: int, second_steps: int,
                         within: Optional[VertexSet] = None) -> Optional[ExpanderWitness]:
    """Grow both sets for their step budgets; the first witness found wins"""
    for seed, steps in ((first, first_steps), (second, second_steps)):
        grown = grow_ball_certified(g, w, rho, t, seed, steps, within)
        if grown.witness is not None:
            return grown.witness
    return None


@dataclass(frozen=True)
class GrowthSeparation:
    witness: Optional[ExpanderWitness]
    distance: Optional[int]
    bound: int


def separate_by_growth(g: Graph, w: VertexAssignment, rho: VertexAssignment, t: int,
                       first: Iterable[int], second: Iterable[int], b1, b2,
                       within: Optional[VertexSet] = None) -> GrowthSeparation:
    """
    Distance check between two sets that turns a failure into a witness.

    When d(X1, X2) exceeds ell(t, b1) + ell(t, b2) and both sets are costly
    enough, growing the lighter side stalls before its cost could exceed the
    total, so a witness is returned; otherwise the measured distance is.
    """
    first, second = frozenset(first), frozenset(second)
    scope = g.vertex_set() if within is None else frozenset(within)
    steps1, steps2 = ell(t, b1), ell(t, b2)
    bound = steps1 + steps2
    outside = frozenset(v for v in g.vertices() if v not in scope)
    distance = set_distance(g, first, second, outside)
    if distance is not None and distance <= bound:
        return GrowthSeparation(None, distance, bound)
    witness = find_witness_between(g, w, rho, t, first, second, steps1, steps2, scope)
    return GrowthSeparation(witness, distance, bound)


def check_distance_lemma(g: Graph, w: VertexAssignment, rho: VertexAssignment, t: int,
                         first: Iterable[int], second: Iterable[int], b1, b2) -> bool:
    """d(X1, X2) <= ell(t, b1) + ell(t, b2) on a verified expander"""
    first, second = frozenset(first), frozenset(second)
    if rho.of(first) * Fraction(b1) < rho.total or rho.of(second) * Fraction(b2) < rho.total:
        raise DomainError("sets are too cheap for the given b1, b2")
    if find_witness_exhaustive(g, w, rho, t) is not None:
        raise DomainError("graph is not an expander for these assignments")
    if first & second:
        return True
    distance = set_distance(g, first, second)
    return distance is not None and distance <= ell(t, b1) + ell(t, b2)

