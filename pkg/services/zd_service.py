import functools
import itertools
import logging
import re
from collections import deque
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence, Tuple, Union

from services.cubulation_service import CubeComplex, Orientation
from services.pocset_service import Halfspace, HalfspaceSystem
from utils.config import get_config
from utils.errors import FormatError, LengthMismatchError

logger = logging.getLogger(__name__)


@functools.total_ordering
@dataclass(frozen=True)
class ExtInt:
    """An integer or one of the two infinities of Z-bar.

    kind is -1 for -inf, +1 for +inf and 0 for a finite value.
    """

    kind: int = 0
    value: int = 0

    @classmethod
    def of(cls, n: int) -> "ExtInt":
        return cls(0, n)

    @classmethod
    def pos_inf(cls) -> "ExtInt":
        return cls(1, 0)

    @classmethod
    def neg_inf(cls) -> "ExtInt":
        return cls(-1, 0)

    @classmethod
    def parse(cls, text: str) -> "ExtInt":
        text = text.strip().lower()
        if text in ("+inf", "inf", "+oo", "oo"):
            return cls.pos_inf()
        if text in ("-inf", "-oo"):
            return cls.neg_inf()
        try:
            return cls.of(int(text))
        except ValueError:
            raise FormatError(f"Not an extended integer: {text!r}")

    @property
    def is_finite(self) -> bool:
        return self.kind == 0

    def _key(self) -> Tuple[int, int]:
        return (self.kind, self.value if self.kind == 0 else 0)

    def __lt__(self, other: "ExtInt") -> bool:
        return self._key() < other._key()

    def __neg__(self) -> "ExtInt":
        return ExtInt(-self.kind, -self.value if self.kind == 0 else 0)

    def affine(self, sign: int, shift: int) -> "ExtInt":
        """n -> sign*n + shift, with +-inf -> +-sign*inf"""
        if self.kind:
            return ExtInt(self.kind * sign, 0)
        return ExtInt(0, sign * self.value + shift)

    def __str__(self) -> str:
        if self.kind > 0:
            return "+inf"
        if self.kind < 0:
            return "-inf"
        return str(self.value)


@dataclass(frozen=True, order=True)
class ZBarPoint:
    coords: Tuple[ExtInt, ...]

    @classmethod
    def parse(cls, text: str) -> "ZBarPoint":
        """`(-inf, 3, +inf)`"""
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise FormatError(f"Point must be parenthesised: {text!r}")
        inner = body[1:-1].strip()
        if not inner:
            return cls(())
        return cls(tuple(ExtInt.parse(token) for token in inner.split(",")))

    @classmethod
    def of(cls, *values: Union[int, str]) -> "ZBarPoint":
        return cls(
            tuple(ExtInt.parse(v) if isinstance(v, str) else ExtInt.of(v) for v in values)
        )

    def __len__(self) -> int:
        return len(self.coords)

    @property
    def is_corner(self) -> bool:
        return all(not c.is_finite for c in self.coords)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


_COORD_CLAUSE = re.compile(r"^coord\s*=\s*(\d+)\s*:\s*([+-]?)\s*n\s*(?:([+-])\s*(\d+))?$")
_PERM_CLAUSE = re.compile(r"^perm\s*=\s*\(([\d\s]*)\)$")


@dataclass(frozen=True)
class ZdIsometry:
    """Coordinate i goes to coordinate perm[i] via n -> signs[i]*n + shifts[i]"""

    perm: Tuple[int, ...]
    signs: Tuple[int, ...]
    shifts: Tuple[int, ...]

    def __post_init__(self):
        if not len(self.perm) == len(self.signs) == len(self.shifts):
            raise LengthMismatchError("Isometry parts have different lengths")
        if sorted(self.perm) != list(range(len(self.perm))):
            raise FormatError(f"Not a permutation: {self.perm}")
        if any(sign not in (1, -1) for sign in self.signs):
            raise FormatError(f"Signs must be +-1: {self.signs}")

    @property
    def dimension(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, dimension: int) -> "ZdIsometry":
        return cls(tuple(range(dimension)), (1,) * dimension, (0,) * dimension)

    @classmethod
    def parse(cls, text: str, dimension: int) -> "ZdIsometry":
        """`perm=(2 1 3); coord=2: -n+5`, coordinates 1-based, unnamed ones fixed"""
        perm = list(range(dimension))
        signs = [1] * dimension
        shifts = [0] * dimension
        for clause in filter(None, (part.strip() for part in text.split(";"))):
            perm_match = _PERM_CLAUSE.match(clause)
            coord_match = _COORD_CLAUSE.match(clause)
            if perm_match:
                perm = [int(token) - 1 for token in perm_match.group(1).split()]
            elif coord_match:
                index = int(coord_match.group(1)) - 1
                if not 0 <= index < dimension:
                    raise FormatError(f"Coordinate {index + 1} outside 1..{dimension}")
                signs[index] = -1 if coord_match.group(2) == "-" else 1
                if coord_match.group(4):
                    shift = int(coord_match.group(4))
                    shifts[index] = -shift if coord_match.group(3) == "-" else shift
            else:
                raise FormatError(f"Bad isometry clause: {clause!r}")
        return cls(tuple(perm), tuple(signs), tuple(shifts))

    def __call__(self, p: ZBarPoint) -> ZBarPoint:
        if len(p) != self.dimension:
            raise LengthMismatchError(f"Point of dimension {len(p)} for isometry of {self.dimension}")
        out: List[Optional[ExtInt]] = [None] * self.dimension
        for i, target in enumerate(self.perm):
            out[target] = p.coords[i].affine(self.signs[i], self.shifts[i])
        return ZBarPoint(tuple(out))


@dataclass(frozen=True)
class ZdInterval:
    ranges: Tuple[Tuple[ExtInt, ExtInt], ...]
    endpoints: FrozenSet[ZBarPoint]

    def __contains__(self, p: ZBarPoint) -> bool:
        return all(low <= c <= high for c, (low, high) in zip(p.coords, self.ranges))

    def lattice_points(self) -> Tuple[ZBarPoint, ...]:
        if any(not (low.is_finite and high.is_finite) for low, high in self.ranges):
            raise FormatError("Interval has an infinite side; its points cannot be listed")
        axes = [range(low.value, high.value + 1) for low, high in self.ranges]
        return tuple(ZBarPoint.of(*values) for values in itertools.product(*axes))


@dataclass(frozen=True)
class InfiniteOrbit:
    radius: int
    explored: int


def halfspace_member(p: ZBarPoint, i: int, t: int, direction: str) -> bool:
    """Is p_i in {n >= t} (direction '>=') or {n < t} (direction '<')"""
    if not 1 <= i <= len(p):
        raise LengthMismatchError(f"Coordinate {i} outside 1..{len(p)}")
    above = p.coords[i - 1] >= ExtInt.of(t)
    if direction == ">=":
        return above
    if direction == "<":
        return not above
    raise FormatError(f"Direction must be '>=' or '<', got {direction!r}")


def _check_lengths(*points: ZBarPoint):
    if len({len(p) for p in points}) > 1:
        raise LengthMismatchError("Points of different dimension")


def median_zd(x: ZBarPoint, y: ZBarPoint, z: ZBarPoint) -> ZBarPoint:
    _check_lengths(x, y, z)
    return ZBarPoint(
        tuple(sorted(triple)[1] for triple in zip(x.coords, y.coords, z.coords))
    )


def interval_zd(x: ZBarPoint, y: ZBarPoint) -> ZdInterval:
    _check_lengths(x, y)
    ranges = tuple((min(a, b), max(a, b)) for a, b in zip(x.coords, y.coords))
    corners = itertools.product(*({a, b} for a, b in zip(x.coords, y.coords)))
    return ZdInterval(ranges, frozenset(ZBarPoint(tuple(c)) for c in corners))


def dinfty_generators(n: int) -> List[ZdIsometry]:
    """Reflection n -> -n and translation n -> n+1 on each coordinate"""
    if n < 1:
        raise FormatError(f"D_infinity^N needs N >= 1, got {n}")
    identity = tuple(range(n))
    generators = []
    for i in range(n):
        signs = tuple(-1 if j == i else 1 for j in range(n))
        shifts = tuple(1 if j == i else 0 for j in range(n))
        generators.append(ZdIsometry(identity, signs, (0,) * n))
        generators.append(ZdIsometry(identity, (1,) * n, shifts))
    return generators


def corner_orbit(
    generators: Sequence[ZdIsometry], p: ZBarPoint, radius: Optional[int] = None
) -> Union[FrozenSet[ZBarPoint], InfiniteOrbit]:
    """Orbit of p, or InfiniteOrbit if it is still growing after `radius` BFS layers"""
    if radius is None:
        radius = get_config().get("zd.escape_radius_per_dim", 10) * max(len(p), 1)
    if p.is_corner:
        # corners form a finite invariant set of 2^D points
        radius = max(radius, 2 ** len(p))

    seen = {p}
    frontier = deque([p])
    for _ in range(radius):
        next_frontier = deque()
        for point in frontier:
            for g in generators:
                image = g(point)
                if image not in seen:
                    seen.add(image)
                    next_frontier.append(image)
        if not next_frontier:
            return frozenset(seen)
        frontier = next_frontier

    logger.info(f"Orbit of {p} still growing after {radius} layers ({len(seen)} points)")
    return InfiniteOrbit(radius, len(seen))


def grid_system(sizes: Sequence[int]) -> HalfspaceSystem:
    """Threshold walls {x_i >= t}, t = 1..k_i, of the box [0,k_1] x ... x [0,k_D]"""
    order = []
    names = []
    offset = 0
    for axis, size in enumerate(sizes):
        for t in range(1, size + 1):
            names.append(f"x{axis + 1}>={t}")
            if t > 1:
                # {x >= t} inside {x >= t-1}
                order.append((Halfspace(offset + t - 1), Halfspace(offset + t - 2)))
        offset += size
    return HalfspaceSystem.from_generators(offset, order, names)


def grid_orientation(p: ZBarPoint, sizes: Sequence[int]) -> Orientation:
    """The vertex of the box closest to p (infinities land on the box faces)"""
    if len(p) != len(sizes):
        raise LengthMismatchError(f"Point of dimension {len(p)} for a box of dimension {len(sizes)}")
    sides = []
    for c, size in zip(p.coords, sizes):
        sides.extend(c >= ExtInt.of(t) for t in range(1, size + 1))
    return Orientation(tuple(sides))


def grid_complex(sizes: Sequence[int]) -> CubeComplex:
    sys = grid_system(sizes)
    points = itertools.product(*(range(size + 1) for size in sizes))
    return CubeComplex(
        sys, frozenset(grid_orientation(ZBarPoint.of(*p), sizes) for p in points)
    )
