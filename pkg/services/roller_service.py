import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Sequence, Tuple

import pandas as pd

from services.cubulation_service import (
    CubeComplex,
    Orientation,
    distance,
    enumerate_consistent,
)
from services.pocset_service import Halfspace, HalfspaceSystem, WallId, product
from utils.errors import LengthMismatchError, UnknownWallError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubsystemSelection:
    """Walls kept by a restriction; wall-level, so involution invariant"""

    kept: FrozenSet[WallId]

    @classmethod
    def of(cls, walls: Iterable[WallId]) -> "SubsystemSelection":
        return cls(frozenset(walls))

    def ordered(self) -> Tuple[WallId, ...]:
        return tuple(sorted(self.kept))

    def intersect(self, other: "SubsystemSelection") -> "SubsystemSelection":
        return SubsystemSelection(self.kept & other.kept)

    def relative_to(self, outer: "SubsystemSelection") -> "SubsystemSelection":
        """Re-index this selection inside the system already restricted by `outer`"""
        position = {wall: index for index, wall in enumerate(outer.ordered())}
        return SubsystemSelection(
            frozenset(position[wall] for wall in self.kept if wall in position)
        )


def roller_points(sys: HalfspaceSystem) -> Tuple[Orientation, ...]:
    """Every consistent orientation: the Roller compactification of a finite system"""
    return enumerate_consistent(sys)


def full_complex(sys: HalfspaceSystem) -> CubeComplex:
    return CubeComplex(sys, frozenset(roller_points(sys)))


def restrict_system(sys: HalfspaceSystem, sel: SubsystemSelection) -> HalfspaceSystem:
    kept = sel.ordered()
    for wall in kept:
        if not 0 <= wall < sys.wall_count:
            raise UnknownWallError(
                f"Selection keeps wall {wall}, system has {sys.wall_count} walls"
            )
    index = {wall: position for position, wall in enumerate(kept)}
    order = [
        (Halfspace(index[h.wall], h.side), Halfspace(index[k.wall], k.side))
        for h, k in sys.strict_pairs()
        if h.wall in index and k.wall in index
    ]
    return HalfspaceSystem(len(kept), order, [sys.wall_names[w] for w in kept])


def project(vertex: Orientation, sel: SubsystemSelection) -> Orientation:
    """S -> S n h' on orientations"""
    return Orientation(tuple(vertex.sides[wall] for wall in sel.ordered()))


def restrict(
    sys: HalfspaceSystem, sel: SubsystemSelection, pts: Iterable[Orientation]
) -> Tuple[HalfspaceSystem, FrozenSet[Orientation]]:
    """Forget every wall outside the selection; a 1-Lipschitz projection"""
    restricted = restrict_system(sys, sel)
    projected = set()
    for vertex in pts:
        if len(vertex) != sys.wall_count:
            raise LengthMismatchError(
                f"Orientation {vertex} has {len(vertex)} walls, system has {sys.wall_count}"
            )
        projected.add(project(vertex, sel))
    logger.debug(
        f"Restricted {sys.wall_count} walls to {restricted.wall_count}; "
        f"{len(projected)} distinct images"
    )
    return restricted, frozenset(projected)


def product_points(p1: Orientation, p2: Orientation) -> Orientation:
    return Orientation(p1.sides + p2.sides)


def split_point(point: Orientation, first_wall_count: int) -> Tuple[Orientation, Orientation]:
    if not 0 <= first_wall_count <= len(point):
        raise LengthMismatchError(
            f"Cannot split an orientation of length {len(point)} after {first_wall_count} walls"
        )
    return (
        Orientation(point.sides[:first_wall_count]),
        Orientation(point.sides[first_wall_count:]),
    )


def product_complex(c1: CubeComplex, c2: CubeComplex) -> CubeComplex:
    return CubeComplex(
        product(c1.system, c2.system),
        frozenset(product_points(a, b) for a in c1.vertices for b in c2.vertices),
    )


def distance_matrix(pts: Sequence[Orientation]) -> pd.DataFrame:
    labels = [p.bits for p in pts]
    return pd.DataFrame(
        [[distance(u, v) for v in pts] for u in pts], index=labels, columns=labels
    )


def lipschitz_report(
    sys: HalfspaceSystem, sel: SubsystemSelection, pts: Sequence[Orientation]
) -> pd.DataFrame:
    """Original against projected distance for every pair; `stretch` must stay <= 0"""
    pts = sorted(pts)
    restrict_system(sys, sel)
    before = distance_matrix(pts).to_numpy()
    after = distance_matrix([project(p, sel) for p in pts]).to_numpy()
    rows = [
        {"u": u.bits, "v": pts[j].bits, "before": int(before[i, j]), "after": int(after[i, j])}
        for i, u in enumerate(pts)
        for j in range(i + 1, len(pts))
    ]
    frame = pd.DataFrame(rows, columns=["u", "v", "before", "after"])
    frame["stretch"] = frame["after"] - frame["before"]
    return frame
