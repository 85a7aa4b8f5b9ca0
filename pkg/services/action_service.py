import itertools
import logging
import math
import re
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import pandas as pd

from services.cubulation_service import CubeComplex, Orientation
from services.interval_service import Interval, endpoints
from services.pocset_service import Halfspace, HalfspaceSystem
from utils.config import get_config
from utils.errors import (
    DegreeLimitError,
    FormatError,
    InvalidAutomorphismError,
    InvariantViolation,
    LengthMismatchError,
    NotInvariantError,
)

logger = logging.getLogger(__name__)

Corner = Tuple[int, ...]

_GENERATOR_PATTERN = re.compile(r"^\s*flips=([01]*)\s+perm=\(([\d\s]*)\)\s*$")


@dataclass(frozen=True, order=True)
class SignedPermutation:
    """(v, sigma) in {0,1}^D semidirect Sym(D), acting by x -> v + sigma.x.

    `perm` is 0-based one-line notation: coordinate i is sent to perm[i].
    Ordering is lexicographic on (flips, perm).
    """

    flips: Tuple[int, ...]
    perm: Tuple[int, ...]

    def __post_init__(self):
        if len(self.flips) != len(self.perm):
            raise LengthMismatchError(
                f"Flip vector of length {len(self.flips)} with a permutation of {len(self.perm)}"
            )
        if sorted(self.perm) != list(range(len(self.perm))):
            raise FormatError(f"Not a permutation: {self.perm}")
        if any(bit not in (0, 1) for bit in self.flips):
            raise FormatError(f"Flip vector must be 0/1: {self.flips}")

    @property
    def degree(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, degree: int) -> "SignedPermutation":
        return cls((0,) * degree, tuple(range(degree)))

    @classmethod
    def flip(cls, degree: int, coordinate: int) -> "SignedPermutation":
        flips = tuple(1 if i == coordinate else 0 for i in range(degree))
        return cls(flips, tuple(range(degree)))

    @classmethod
    def from_text(cls, text: str) -> "SignedPermutation":
        """Parse `flips=0110 perm=(2 1 4 3)` (1-based one-line permutation)"""
        match = _GENERATOR_PATTERN.match(text)
        if not match:
            raise FormatError(f"Bad generator line: {text!r}")
        flips = tuple(int(ch) for ch in match.group(1))
        perm = tuple(int(token) - 1 for token in match.group(2).split())
        return cls(flips, perm)

    def to_text(self) -> str:
        flips = "".join(str(bit) for bit in self.flips)
        perm = " ".join(str(image + 1) for image in self.perm)
        return f"flips={flips} perm=({perm})"

    def __str__(self) -> str:
        return self.to_text()

    def permute(self, x: Sequence[int]) -> Corner:
        """sigma.x, with (sigma.x)[sigma(i)] = x[i]"""
        out = [0] * self.degree
        for i, image in enumerate(self.perm):
            out[image] = x[i]
        return tuple(out)

    def __mul__(self, other: "SignedPermutation") -> "SignedPermutation":
        """(v, s)(w, t) = (v + s.w, st); the right factor acts first"""
        if self.degree != other.degree:
            raise LengthMismatchError("Cannot compose signed permutations of different degree")
        moved = self.permute(other.flips)
        flips = tuple((a + b) % 2 for a, b in zip(self.flips, moved))
        perm = tuple(self.perm[other.perm[i]] for i in range(self.degree))
        return SignedPermutation(flips, perm)

    def inverse(self) -> "SignedPermutation":
        inverse_perm = [0] * self.degree
        for i, image in enumerate(self.perm):
            inverse_perm[image] = i
        inverse = SignedPermutation((0,) * self.degree, tuple(inverse_perm))
        return SignedPermutation(inverse.permute(self.flips), inverse.perm)

    def is_pure_flip(self) -> bool:
        return self.perm == tuple(range(self.degree))


@dataclass(frozen=True)
class GroupClosure:
    degree: int
    elements: Tuple[SignedPermutation, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, g: SignedPermutation) -> bool:
        return g in set(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)


@dataclass
class TheoremReport:
    degree: int
    orbit_sizes: List[int]
    witness: List[Corner]
    N: int
    group_order: int

    def to_dict(self) -> Dict:
        return {
            "degree": self.degree,
            "group_order": self.group_order,
            "orbit_sizes": self.orbit_sizes,
            "witness": ["".join(map(str, corner)) for corner in self.witness],
            "N": self.N,
        }


@dataclass
class RecipeReport:
    degree: int
    coset_reps_exist: bool
    orbit_of_O: int
    kernel_orbit_of_O: int
    kernel_order: int
    counter_coset: List[SignedPermutation] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "degree": self.degree,
            "coset_reps_exist": self.coset_reps_exist,
            "orbit_of_O": self.orbit_of_O,
            "Gamma0_orbit_of_O": self.kernel_orbit_of_O,
            "Gamma0_order": self.kernel_order,
            "counter_coset": [g.to_text() for g in self.counter_coset],
        }


def _check_degree(degree: int):
    cap = get_config().get("limits.max_degree", 7)
    if degree > cap:
        raise DegreeLimitError(
            f"Degree {degree} exceeds the cap of {cap} (limits.max_degree)"
        )


def _degree_of(generators: Sequence[SignedPermutation], degree: Optional[int]) -> int:
    degrees = {g.degree for g in generators}
    if degree is not None:
        degrees.add(degree)
    if len(degrees) > 1:
        raise LengthMismatchError(f"Generators of mixed degree: {sorted(degrees)}")
    return degrees.pop() if degrees else 0


def act(g: SignedPermutation, x: Sequence[int]) -> Corner:
    if len(x) != g.degree:
        raise LengthMismatchError(f"Vector of length {len(x)} for degree {g.degree}")
    return tuple((a + b) % 2 for a, b in zip(g.flips, g.permute(x)))


def closure(
    generators: Sequence[SignedPermutation], degree: Optional[int] = None
) -> GroupClosure:
    """Every product of the generators, by breadth-first search"""
    degree = _degree_of(generators, degree)
    _check_degree(degree)
    cap = get_config().get("limits.max_group_order", 645120)

    identity = SignedPermutation.identity(degree)
    seen = {identity}
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for s in generators:
            product = g * s
            if product not in seen:
                seen.add(product)
                queue.append(product)
                if len(seen) > cap:
                    raise DegreeLimitError(f"Group order exceeds {cap}")

    full_order = 2**degree * math.factorial(degree)
    if full_order % len(seen):
        raise InvariantViolation(
            f"Closure of order {len(seen)} does not divide {full_order}"
        )
    logger.debug(f"Closure of {len(generators)} generators in degree {degree}: {len(seen)} elements")
    return GroupClosure(degree, tuple(sorted(seen)))


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def sign_kernel(group: GroupClosure) -> GroupClosure:
    """Gamma_0: the elements with trivial permutation part"""
    kernel = tuple(g for g in group.elements if g.is_pure_flip())
    if not _is_power_of_two(len(kernel)):
        raise InvariantViolation(f"Sign kernel has order {len(kernel)}, not a power of two")
    members = frozenset(kernel)
    for g in group.elements:
        g_inv = g.inverse()
        for k in kernel:
            if g * k * g_inv not in members:
                raise InvariantViolation(f"Sign kernel is not normal: conjugate by {g}")
    return GroupClosure(group.degree, kernel)


def orbit(generators: Sequence[SignedPermutation], x: Sequence[int]) -> Tuple[Corner, ...]:
    """Orbit of x, sorted"""
    start = tuple(x)
    seen = {start}
    queue = deque([start])
    while queue:
        point = queue.popleft()
        for g in generators:
            image = act(g, point)
            if image not in seen:
                seen.add(image)
                queue.append(image)
    return tuple(sorted(seen))


def orbit_partition(
    generators: Sequence[SignedPermutation], degree: int
) -> List[Tuple[Corner, ...]]:
    """Orbits of all 2^D corners, ordered by their least element"""
    remaining = set(itertools.product((0, 1), repeat=degree))
    orbits = []
    while remaining:
        start = min(remaining)
        found = orbit(generators, start)
        orbits.append(found)
        remaining -= set(found)
    return orbits


def main_theorem_check(
    generators: Sequence[SignedPermutation], degree: int
) -> TheoremReport:
    """Find an orbit of size 2^N among the corners of {0,1}^D"""
    degree = _degree_of(generators, degree)
    _check_degree(degree)
    group = closure(generators, degree)
    orbits = orbit_partition(generators, degree)

    for found in orbits:
        if group.order % len(found):
            raise InvariantViolation(
                f"Orbit of size {len(found)} does not divide group order {group.order}"
            )

    candidates = [found for found in orbits if _is_power_of_two(len(found))]
    if not candidates:
        raise InvariantViolation(
            f"No orbit of power-of-two size; orbit sizes {sorted(map(len, orbits))}"
        )
    witness = min(candidates, key=lambda found: (len(found), found))
    exponent = len(witness).bit_length() - 1
    if exponent > degree:
        raise InvariantViolation(f"Witness orbit 2^{exponent} exceeds degree {degree}")
    return TheoremReport(
        degree=degree,
        orbit_sizes=sorted((len(found) for found in orbits), reverse=True),
        witness=list(witness),
        N=exponent,
        group_order=group.order,
    )


def proof_recipe_check(
    generators: Sequence[SignedPermutation], degree: int
) -> RecipeReport:
    """Do right Gamma_0-cosets all have a representative with zero flip vector?"""
    degree = _degree_of(generators, degree)
    _check_degree(degree)
    group = closure(generators, degree)
    kernel = sign_kernel(group)

    covered = set()
    counter_coset: List[SignedPermutation] = []
    for g in group.elements:
        if g in covered:
            continue
        coset = sorted(k * g for k in kernel.elements)
        covered.update(coset)
        if not any(c.flips == (0,) * degree for c in coset) and not counter_coset:
            counter_coset = coset
    reps_exist = not counter_coset

    origin = (0,) * degree
    full_orbit = len(orbit(generators, origin))
    kernel_orbit = len(orbit(kernel.elements, origin))
    if reps_exist and not full_orbit == kernel_orbit == kernel.order:
        raise InvariantViolation(
            f"Coset representatives exist but |orbit| = {full_orbit}, "
            f"|Gamma_0 orbit| = {kernel_orbit}, |Gamma_0| = {kernel.order}"
        )
    if not reps_exist:
        logger.info(
            f"No zero-flip representative in coset {[g.to_text() for g in counter_coset]}"
        )
    return RecipeReport(
        degree=degree,
        coset_reps_exist=reps_exist,
        orbit_of_O=full_orbit,
        kernel_orbit_of_O=kernel_orbit,
        kernel_order=kernel.order,
        counter_coset=counter_coset,
    )


def orbit_table(report: TheoremReport) -> pd.DataFrame:
    """Orbit-size histogram"""
    counts = Counter(report.orbit_sizes)
    return pd.DataFrame(
        [
            {"orbit_size": size, "count": counts[size], "power_of_two": _is_power_of_two(size)}
            for size in sorted(counts, reverse=True)
        ]
    )


class WallAutomorphism:
    """Bijection of halfspaces commuting with complement and preserving the order"""

    def __init__(self, image: Dict[Halfspace, Halfspace]):
        self.image = dict(image)

    @classmethod
    def from_wall_map(
        cls, sys: HalfspaceSystem, perm: Sequence[int], flips: Optional[Sequence[int]] = None
    ) -> "WallAutomorphism":
        """Wall i goes to wall perm[i], with its sides swapped when flips[i] is set"""
        flips = flips or [0] * len(perm)
        if len(perm) != sys.wall_count or len(flips) != sys.wall_count:
            raise InvalidAutomorphismError(
                f"Wall map of length {len(perm)} for {sys.wall_count} walls"
            )
        image = {}
        for wall, target in enumerate(perm):
            for side in (True, False):
                image[Halfspace(wall, side)] = Halfspace(target, side != bool(flips[wall]))
        automorphism = cls(image)
        automorphism.validate(sys)
        return automorphism

    @classmethod
    def identity(cls, sys: HalfspaceSystem) -> "WallAutomorphism":
        return cls({h: h for h in sys.halfspaces()})

    def __call__(self, h: Halfspace) -> Halfspace:
        return self.image[h]

    def validate(self, sys: HalfspaceSystem):
        halfspaces = set(sys.halfspaces())
        if set(self.image) != halfspaces or set(self.image.values()) != halfspaces:
            raise InvalidAutomorphismError("Automorphism is not a bijection of the halfspaces")
        for h in halfspaces:
            if self.image[~h] != ~self.image[h]:
                raise InvalidAutomorphismError(f"Automorphism does not commute with complement at {h}")
        for h in halfspaces:
            for k in halfspaces:
                if sys.leq(h, k) != sys.leq(self.image[h], self.image[k]):
                    raise InvalidAutomorphismError(
                        f"Automorphism does not preserve {h} <= {k}"
                    )

    def apply(self, vertex: Orientation) -> Orientation:
        """g.x selects g(h) wherever x selects h"""
        return Orientation.from_halfspaces(
            len(vertex), (self.image[h] for h in vertex.halfspaces())
        )

    def apply_set(self, halfspaces: Iterable[Halfspace]) -> FrozenSet[Halfspace]:
        return frozenset(self.image[h] for h in halfspaces)

    def __repr__(self) -> str:
        moved = sorted((h, k) for h, k in self.image.items() if h != k)
        return f"WallAutomorphism({', '.join(f'{h}->{k}' for h, k in moved)})"


def automorphism_orbits(
    sys: HalfspaceSystem,
    cube: CubeComplex,
    generators: Sequence[WallAutomorphism],
    x: Orientation,
) -> FrozenSet[Orientation]:
    for g in generators:
        g.validate(sys)
    cube.require(x)
    seen = {x}
    queue = deque([x])
    while queue:
        vertex = queue.popleft()
        for g in generators:
            image = g.apply(vertex)
            if image not in cube:
                raise InvalidAutomorphismError(
                    f"Automorphism {g} sends vertex {vertex} outside the complex"
                )
            if image not in seen:
                seen.add(image)
                queue.append(image)
    return frozenset(seen)


@dataclass(frozen=True)
class EndpointCube:
    """Endpoints of an interval identified with the corners of {0,1}^D'

    Coordinate i is a class of separating walls on which every endpoint agrees
    with either both or neither of the chosen pair; x is the zero corner and y
    the all-ones corner.
    """

    interval: Interval
    classes: Tuple[Tuple[int, ...], ...]
    corners: Dict[Orientation, Corner]

    @property
    def degree(self) -> int:
        return len(self.classes)

    def class_of(self, wall: int) -> int:
        for index, walls in enumerate(self.classes):
            if wall in walls:
                return index
        raise InvariantViolation(f"Wall {wall} does not separate the interval")


def endpoint_cube(sys: HalfspaceSystem, interval_: Interval) -> EndpointCube:
    x, y = interval_.endpoints_pair
    ends = sorted(endpoints(sys, interval_))
    separating = [wall for wall in range(sys.wall_count) if x.sides[wall] != y.sides[wall]]

    by_pattern: Dict[Tuple[bool, ...], List[int]] = {}
    for wall in separating:
        pattern = tuple(e.sides[wall] == y.sides[wall] for e in ends)
        by_pattern.setdefault(pattern, []).append(wall)
    classes = tuple(sorted(tuple(walls) for walls in by_pattern.values()))

    corners = {
        e: tuple(int(e.sides[walls[0]] == y.sides[walls[0]]) for walls in classes)
        for e in ends
    }
    if len(set(corners.values())) != len(ends) or len(ends) != 2 ** len(classes):
        raise InvariantViolation(
            f"{len(ends)} endpoints do not form a cube over {len(classes)} wall classes"
        )
    return EndpointCube(interval_, classes, corners)


def endpoint_action(
    sys: HalfspaceSystem, interval_: Interval, generators: Sequence[WallAutomorphism]
) -> List[SignedPermutation]:
    """Each generator, restricted to the endpoints of an invariant interval"""
    corner_map = endpoint_cube(sys, interval_)
    x = interval_.endpoints_pair[0]
    projected = []
    for g in generators:
        g.validate(sys)
        if frozenset(g.apply(v) for v in interval_.members) != interval_.members:
            raise NotInvariantError(f"{g} does not preserve the interval")
        perm = tuple(
            corner_map.class_of(g(Halfspace(walls[0])).wall) for walls in corner_map.classes
        )
        if sorted(perm) != list(range(corner_map.degree)):
            raise InvariantViolation(f"{g} does not permute the wall classes")
        flips = corner_map.corners[g.apply(x)]
        s = SignedPermutation(flips, perm)
        for e, corner in corner_map.corners.items():
            if act(s, corner) != corner_map.corners[g.apply(e)]:
                raise InvariantViolation(f"{g} does not act on the endpoints by {s}")
        projected.append(s)
    logger.debug(
        f"Projected {len(generators)} automorphisms onto {len(corner_map.corners)} endpoints "
        f"(degree {corner_map.degree})"
    )
    return projected
