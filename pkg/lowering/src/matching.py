import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple


_logger = logging.getLogger(__name__)

InjectionWitness = Dict[Hashable, Hashable]


class Constraint(str, Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    FREE = "free"


def _coordinates(x) -> Tuple:
    return tuple(x) if isinstance(x, tuple) else (x,)


@dataclass(frozen=True)
class OrderSpec:
    """
    Coordinatewise constraint between a source tuple and its image.

    INCREASING on coordinate k means image[k] >= source[k]; DECREASING means
    image[k] <= source[k]. Coordinates beyond the shorter of the two tuples are free.
    """
    constraints: Tuple[Constraint, ...]

    def __post_init__(self):
        if not self.constraints:
            raise ValueError("OrderSpec should constrain at least one coordinate or mark all of them free")
        object.__setattr__(self, "constraints", tuple(Constraint(c) for c in self.constraints))

    def allows(self, source, target) -> bool:
        source, target = _coordinates(source), _coordinates(target)
        for k, constraint in enumerate(self.constraints):
            if k >= len(source) or k >= len(target):
                break
            if constraint == Constraint.INCREASING and target[k] < source[k]:
                return False
            if constraint == Constraint.DECREASING and target[k] > source[k]:
                return False
        return True

    @classmethod
    def first_decreasing(cls) -> "OrderSpec":
        return cls((Constraint.DECREASING,))

    @classmethod
    def first_increasing(cls) -> "OrderSpec":
        return cls((Constraint.INCREASING,))

    @classmethod
    def increasing_then_decreasing(cls) -> "OrderSpec":
        return cls((Constraint.INCREASING, Constraint.DECREASING))


def augmenting_matching(sources: Sequence, targets: Sequence, adjacent: Callable[[Hashable, Hashable], bool],
                        initial: Optional[InjectionWitness] = None) -> InjectionWitness:
    """
    Maximum bipartite matching by repeated augmenting-path search.

    Sources are processed in the given order and targets tried in the given order, so the
    result is reproducible.

    :param sources: left vertices
    :param targets: right vertices
    :param adjacent: edge predicate adjacent(source, target)
    :param initial: optional partial matching (source -> target) to extend

    :return: matching as a dict source -> target
    """
    edges = {x: [y for y in targets if adjacent(x, y)] for x in sources}
    owner = {}
    if initial:
        for x, y in initial.items():
            owner[y] = x

    def search(x, seen) -> bool:
        for y in edges[x]:
            if y in seen:
                continue
            seen.add(y)
            if y not in owner or search(owner[y], seen):
                owner[y] = x
                return True
        return False

    matched_sources = set(owner.values())
    for x in sources:
        if x not in matched_sources:
            search(x, set())
    return {x: y for y, x in owner.items()}


def find_monotone_injection(A: Iterable, B: Iterable, spec: OrderSpec) -> Optional[InjectionWitness]:
    """
    Searches for an injection A -> B respecting spec.

    :param A: finite source set
    :param B: finite target set
    :param spec: coordinatewise order constraints

    :return: canonical witness, or None when no injection exists
    """
    sources, targets = sorted(set(A)), sorted(set(B))
    if len(sources) > len(targets):
        return None
    witness = augmenting_matching(sources, targets, spec.allows)
    if len(witness) < len(sources):
        return None
    return {x: witness[x] for x in sources}


def validate_injection(witness: InjectionWitness, A: Iterable, B: Iterable, spec: OrderSpec) -> bool:
    A, B = set(A), set(B)
    if set(witness) != A:
        return False
    if len(set(witness.values())) != len(witness):
        return False
    return all(y in B and spec.allows(x, y) for x, y in witness.items())


def hall_order(x, y) -> bool:
    """(a,b) precedes (c,e) iff a <= c and b >= e."""
    return x[0] <= y[0] and x[1] >= y[1]


def cone(S: Iterable, X: Iterable, order: Callable = hall_order) -> set:
    return {y for y in X if any(order(x, y) for x in S)}


def antichains(elements: Sequence, order: Callable = hall_order) -> Iterator[List]:
    """Enumerates every antichain of elements (the empty one first)."""
    elements = sorted(set(elements))

    def extend(start: int, chosen: List) -> Iterator[List]:
        yield list(chosen)
        for k in range(start, len(elements)):
            x = elements[k]
            if all(not order(x, y) and not order(y, x) for y in chosen):
                chosen.append(x)
                yield from extend(k + 1, chosen)
                chosen.pop()

    yield from extend(0, [])


def hall_cone_check(A: Iterable, B: Iterable, order: Callable = hall_order) -> bool:
    """
    Counting criterion: |cone(S) & A| <= |cone(S) & B| for every S.

    Every cone is bounded by the cone over the minimal elements of its intersection with A,
    so checking the cones generated by antichains of A is enough.

    :param A: source set
    :param B: target set
    :param order: partial order on the ambient set

    :return: True when the inequality holds for every cone
    """
    A, B = set(A), set(B)
    for generators in antichains(A, order):
        if not generators:
            continue
        up = cone(generators, A | B, order)
        if len(up & A) > len(up & B):
            _logger.debug("Hall violation at generators %s", generators)
            return False
    return True
