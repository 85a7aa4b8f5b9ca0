import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Sequence, Tuple

from services.action_service import WallAutomorphism
from services.cubulation_service import CubeComplex, Orientation, distance, majority
from services.interval_service import (
    Interval,
    find_endpoints_pair,
    interval,
    interval_between,
)
from services.pocset_service import Halfspace, HalfspaceSystem, has_facing_triple
from services.roller_service import SubsystemSelection, project, restrict_system
from utils.errors import (
    EmptyInputError,
    InconsistentSetError,
    InvalidMeasureError,
    InvariantViolation,
    NotInvariantError,
    VertexNotFoundError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConsistentSet:
    members: FrozenSet[Halfspace]

    def touched_walls(self) -> FrozenSet[int]:
        return frozenset(h.wall for h in self.members)


@dataclass(frozen=True)
class Lift:
    """X(h_S) embedded in X as the vertices containing S"""

    system: HalfspaceSystem
    selection: SubsystemSelection
    consistent: ConsistentSet
    vertices: FrozenSet[Orientation]
    image: FrozenSet[Orientation]
    wall_count: int

    def embed(self, vertex: Orientation) -> Orientation:
        """E -> E u S"""
        sides = [None] * self.wall_count
        for h in self.consistent.members:
            sides[h.wall] = h.side
        for position, wall in enumerate(self.selection.ordered()):
            sides[wall] = vertex.sides[position]
        return Orientation(tuple(sides))


@dataclass(frozen=True)
class Measure:
    """Finitely supported probability measure with exact rational weights"""

    support: Tuple[Tuple[Orientation, Fraction], ...]

    @classmethod
    def from_weights(cls, weights: Dict[Orientation, Fraction]) -> "Measure":
        merged: Dict[Orientation, Fraction] = {}
        for vertex, weight in weights.items():
            merged[vertex] = merged.get(vertex, Fraction(0)) + Fraction(weight)
        return cls(tuple(sorted(merged.items())))

    @classmethod
    def dirac(cls, vertex: Orientation) -> "Measure":
        return cls(((vertex, Fraction(1)),))

    def points(self) -> Tuple[Orientation, ...]:
        return tuple(vertex for vertex, _ in self.support)

    def to_dict(self) -> Dict:
        return {
            "atoms": [
                {"vertex": vertex.bits, "weight": str(weight)} for vertex, weight in self.support
            ]
        }


def is_consistent(sys: HalfspaceSystem, halfspaces: Iterable[Halfspace]) -> bool:
    members = frozenset(halfspaces)
    for h in members:
        sys.check(h)
        if ~h in members:
            return False
        if not sys.up_set(h) <= members:
            return False
    return True


def consistent_set(sys: HalfspaceSystem, halfspaces: Iterable[Halfspace]) -> ConsistentSet:
    members = frozenset(halfspaces)
    if not is_consistent(sys, members):
        raise InconsistentSetError(
            f"Halfspace set {sorted(h.name for h in members)} is not consistent"
        )
    return ConsistentSet(members)


def lift(sys: HalfspaceSystem, cube: CubeComplex, members: Iterable[Halfspace]) -> Lift:
    """Identify the vertices containing S with the complex of the untouched walls"""
    chosen = consistent_set(sys, members)
    untouched = SubsystemSelection.of(
        wall for wall in range(sys.wall_count) if wall not in chosen.touched_walls()
    )
    restricted = restrict_system(sys, untouched)
    image = frozenset(
        v for v in cube.vertices if all(v.selects(h) for h in chosen.members)
    )
    vertices = frozenset(project(v, untouched) for v in image)
    result = Lift(restricted, untouched, chosen, vertices, image, sys.wall_count)

    if frozenset(result.embed(e) for e in vertices) != image:
        raise InvariantViolation("Lifted vertices do not land on the intersection of S")
    ordered = sorted(vertices)
    for e, f in itertools.combinations(ordered, 2):
        if distance(e, f) != distance(result.embed(e), result.embed(f)):
            raise InvariantViolation(f"Lift is not isometric on {e}, {f}")
    logger.debug(
        f"Lifted {len(chosen.members)} halfspaces: {restricted.wall_count} free walls, "
        f"{len(image)} vertices"
    )
    return result


def equivariance_check(
    sys: HalfspaceSystem,
    cube: CubeComplex,
    members: Iterable[Halfspace],
    generators: Sequence[WallAutomorphism],
) -> bool:
    """Whether the lift commutes with each generator"""
    members = frozenset(members)
    for g in generators:
        g.validate(sys)
        if g.apply_set(members) != members:
            raise NotInvariantError(f"{g} does not preserve the set {sorted(h.name for h in members)}")
    lifted = lift(sys, cube, members)
    index = {wall: position for position, wall in enumerate(lifted.selection.ordered())}

    for g in generators:
        # restricted action on the untouched walls
        restricted = {
            Halfspace(index[h.wall], h.side): Halfspace(index[g(h).wall], g(h).side)
            for h in sys.halfspaces()
            if h.wall in index
        }
        for e in sorted(lifted.vertices):
            moved = Orientation.from_halfspaces(
                len(e), (restricted[h] for h in e.halfspaces())
            )
            if lifted.embed(moved) != g.apply(lifted.embed(e)):
                logger.info(f"Lift does not commute with {g} at {e}")
                return False
    return True


def _check_measure(sys: HalfspaceSystem, mu: Measure):
    if not mu.support:
        raise InvalidMeasureError("Measure has empty support")
    total = sum((weight for _, weight in mu.support), Fraction(0))
    if total != 1:
        raise InvalidMeasureError(f"Weights sum to {total}, not 1")
    for vertex, weight in mu.support:
        if weight <= 0:
            raise InvalidMeasureError(f"Non-positive weight {weight} on {vertex}")
        if len(vertex) != sys.wall_count:
            raise InvalidMeasureError(
                f"Support point {vertex} has {len(vertex)} walls, system has {sys.wall_count}"
            )
        if any(vertex.selects(h) and not vertex.selects(k) for h, k in sys.strict_pairs()):
            raise InvalidMeasureError(f"Support point {vertex} is not consistent")


def halfspace_mass(mu: Measure, h: Halfspace) -> Fraction:
    return sum((weight for vertex, weight in mu.support if vertex.selects(h)), Fraction(0))


def majority_halfspaces(
    sys: HalfspaceSystem, mu: Measure
) -> Tuple[FrozenSet[Halfspace], FrozenSet[Halfspace]]:
    """Halfspaces of mass > 1/2 and of mass exactly 1/2"""
    _check_measure(sys, mu)
    half = Fraction(1, 2)
    plus, balanced = set(), set()
    for h in sys.halfspaces():
        mass = halfspace_mass(mu, h)
        if mass > half:
            plus.add(h)
        elif mass == half:
            balanced.add(h)

    if not is_consistent(sys, plus):
        raise InvariantViolation("Majority halfspaces are not consistent")
    if has_facing_triple(sys, balanced):
        raise InvariantViolation("Balanced halfspaces contain a facing triple")
    return frozenset(plus), frozenset(balanced)


def measure_interval(sys: HalfspaceSystem, cube: CubeComplex, mu: Measure) -> Interval:
    """The interval cut out by the majority halfspaces of mu"""
    _check_measure(sys, mu)
    for vertex in mu.points():
        if vertex not in cube:
            raise VertexNotFoundError(f"Support point {vertex} is not a vertex of the complex")
    plus, _ = majority_halfspaces(sys, mu)
    lifted = lift(sys, cube, plus)
    pair = find_endpoints_pair(sys, lifted.image, cube)
    if pair is None:
        raise InvariantViolation("Majority intersection of a measure is not an interval")
    return interval(sys, cube, *pair)


def is_interval_measure(sys: HalfspaceSystem, cube: CubeComplex, mu: Measure) -> bool:
    """Whether the majority halfspaces of mu cut out an interval of the complex"""
    try:
        measure_interval(sys, cube, mu)
    except InvariantViolation as e:
        logger.warning(f"Measure {mu.to_dict()} breaks the interval property: {e}")
        return False
    return True


def median(
    sys: HalfspaceSystem, cube: CubeComplex, x: Orientation, y: Orientation, z: Orientation
) -> Orientation:
    """The orientation on the majority side of every wall"""
    cube.require(x, y, z)
    result = majority(x, y, z)
    if result not in cube:
        raise InvariantViolation(f"Median of {x}, {y}, {z} left the complex")
    return result


def median_by_intervals(cube: CubeComplex, x: Orientation, y: Orientation, z: Orientation) -> Orientation:
    """The unique vertex in I(x,y), I(y,z) and I(x,z)"""
    common = (
        interval_between(cube, x, y)
        & interval_between(cube, y, z)
        & interval_between(cube, x, z)
    )
    if len(common) != 1:
        raise InvariantViolation(f"Triple interval intersection has {len(common)} vertices")
    return next(iter(common))


def median_by_distance_sum(
    cube: CubeComplex, x: Orientation, y: Orientation, z: Orientation
) -> Orientation:
    """The unique minimiser of d(x,.) + d(y,.) + d(z,.)"""
    scores = {v: distance(x, v) + distance(y, v) + distance(z, v) for v in cube.vertices}
    best = min(scores.values())
    winners = [v for v, score in scores.items() if score == best]
    if len(winners) != 1:
        raise InvariantViolation(f"{len(winners)} vertices minimise the distance sum")
    return winners[0]


def invariant_measure_from_orbit(orbit: Iterable[Orientation]) -> Measure:
    """Uniform measure on a finite orbit"""
    points = sorted(set(orbit))
    if not points:
        raise EmptyInputError("Cannot average over an empty orbit")
    weight = Fraction(1, len(points))
    return Measure(tuple((vertex, weight) for vertex in points))


def invariant_interval(
    sys: HalfspaceSystem,
    cube: CubeComplex,
    orbit: Iterable[Orientation],
    generators: Sequence[WallAutomorphism],
) -> Interval:
    """Interval of the uniform measure on an orbit; every generator maps it onto itself"""
    points = frozenset(orbit)
    for g in generators:
        g.validate(sys)
        if frozenset(g.apply(v) for v in points) != points:
            raise NotInvariantError(f"{g} does not preserve the orbit")
    found = measure_interval(sys, cube, invariant_measure_from_orbit(points))
    for g in generators:
        if frozenset(g.apply(v) for v in found.members) != found.members:
            raise InvariantViolation(f"Interval of an invariant measure moved under {g}")
    return found
