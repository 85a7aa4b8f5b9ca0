import itertools
import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from utils.config import get_config
from utils.errors import (
    FormatError,
    InvalidSystemError,
    RepeatedWallError,
    UnknownWallError,
    WallLimitError,
)

logger = logging.getLogger(__name__)

WallId = int

_HALFSPACE_PATTERN = re.compile(r"^w(\d+)([+-])$")


@dataclass(frozen=True, order=True)
class Halfspace:
    """One side of a wall; side=True is the positive side"""

    wall: WallId
    side: bool = True

    @property
    def complement(self) -> "Halfspace":
        return Halfspace(self.wall, not self.side)

    def __invert__(self) -> "Halfspace":
        return self.complement

    @property
    def name(self) -> str:
        return f"w{self.wall}{'+' if self.side else '-'}"

    def __str__(self) -> str:
        return self.name

    @classmethod
    def parse(cls, text: str) -> "Halfspace":
        """Parse the `w3+` / `w3-` notation"""
        match = _HALFSPACE_PATTERN.match(text.strip())
        if not match:
            raise FormatError(f"Not a halfspace name: {text!r} (expected e.g. 'w0+')")
        return cls(int(match.group(1)), match.group(2) == "+")


class PairRelation(Enum):
    EQUAL = "Equal"
    COMPLEMENTARY = "Complementary"
    FIRST_CONTAINS_SECOND = "FirstContainsSecond"
    SECOND_CONTAINS_FIRST = "SecondContainsFirst"
    DISJOINT = "Disjoint"
    FACING = "Facing"
    TRANSVERSE = "Transverse"

    @property
    def mirror(self) -> "PairRelation":
        """Relation of (k, h) given the relation of (h, k)"""
        if self is PairRelation.FIRST_CONTAINS_SECOND:
            return PairRelation.SECOND_CONTAINS_FIRST
        if self is PairRelation.SECOND_CONTAINS_FIRST:
            return PairRelation.FIRST_CONTAINS_SECOND
        return self


def default_wall_names(wall_count: int) -> Tuple[str, ...]:
    return tuple(f"w{i}" for i in range(wall_count))


class HalfspaceSystem:
    """Finite pocset: 2W halfspaces with complementation and a containment order.

    `order` lists pairs (h, k) meaning h <= k. The constructor only adds the
    diagonal; use `from_generators` to take the involutive and transitive
    closure of a generating set. Instances are never mutated after __init__.
    """

    def __init__(
        self,
        wall_count: int,
        order: Iterable[Tuple[Halfspace, Halfspace]] = (),
        wall_names: Optional[Sequence[str]] = None,
    ):
        if wall_count < 0:
            raise InvalidSystemError(f"Wall count must be non-negative, got {wall_count}")
        self.wall_count = wall_count
        self.wall_names = (
            tuple(wall_names) if wall_names is not None else default_wall_names(wall_count)
        )
        if len(self.wall_names) != wall_count:
            raise InvalidSystemError(
                f"{len(self.wall_names)} wall names given for {wall_count} walls"
            )

        pairs = set()
        for h, k in order:
            self.check(h)
            self.check(k)
            pairs.add((h, k))
        for h in self.halfspaces():
            pairs.add((h, h))
        self._order: FrozenSet[Tuple[Halfspace, Halfspace]] = frozenset(pairs)

        up: Dict[Halfspace, set] = {h: set() for h in self.halfspaces()}
        for h, k in self._order:
            up[h].add(k)
        self._up: Dict[Halfspace, FrozenSet[Halfspace]] = {
            h: frozenset(ks) for h, ks in up.items()
        }
        self._strict = tuple(sorted(p for p in self._order if p[0] != p[1]))

    @classmethod
    def from_generators(
        cls,
        wall_count: int,
        generators: Iterable[Tuple[Halfspace, Halfspace]],
        wall_names: Optional[Sequence[str]] = None,
    ) -> "HalfspaceSystem":
        """Close a generating set of containments under h<=k => k*<=h* and transitivity"""
        graph = nx.DiGraph()
        graph.add_nodes_from(
            Halfspace(w, side) for w in range(wall_count) for side in (True, False)
        )
        for h, k in generators:
            if h.wall >= wall_count or k.wall >= wall_count:
                raise UnknownWallError(
                    f"Containment {h} <= {k} names a wall outside 0..{wall_count - 1}"
                )
            graph.add_edge(h, k)
            graph.add_edge(~k, ~h)
        closure = nx.transitive_closure(graph, reflexive=True)
        logger.debug(
            f"Closed {graph.number_of_edges()} generating containments into "
            f"{closure.number_of_edges()} pairs"
        )
        return cls(wall_count, closure.edges(), wall_names)

    def halfspaces(self) -> Tuple[Halfspace, ...]:
        return tuple(
            Halfspace(w, side) for w in range(self.wall_count) for side in (True, False)
        )

    def check(self, h: Halfspace):
        if not 0 <= h.wall < self.wall_count:
            raise UnknownWallError(
                f"Unknown wall index {h.wall} (system has {self.wall_count} walls)"
            )

    def leq(self, h: Halfspace, k: Halfspace) -> bool:
        """h <= k, i.e. h is contained in k"""
        self.check(h)
        self.check(k)
        return k in self._up[h]

    def up_set(self, h: Halfspace) -> FrozenSet[Halfspace]:
        self.check(h)
        return self._up[h]

    @property
    def order_pairs(self) -> Tuple[Tuple[Halfspace, Halfspace], ...]:
        return tuple(sorted(self._order))

    def strict_pairs(self) -> Tuple[Tuple[Halfspace, Halfspace], ...]:
        return self._strict

    def has_default_names(self) -> bool:
        return self.wall_names == default_wall_names(self.wall_count)

    def to_dict(self) -> Dict:
        """Pocset JSON: one representative per dual pair of strict containments"""
        seen = set()
        order = []
        for h, k in self.strict_pairs():
            dual = (~k, ~h)
            if dual in seen:
                continue
            seen.add((h, k))
            order.append([h.name, k.name])
        data = {"walls": self.wall_count, "order": order}
        if not self.has_default_names():
            data["names"] = list(self.wall_names)
        return data

    def __eq__(self, other) -> bool:
        if not isinstance(other, HalfspaceSystem):
            return NotImplemented
        return self.wall_count == other.wall_count and self._order == other._order

    def __hash__(self) -> int:
        return hash((self.wall_count, self._order))

    def __repr__(self) -> str:
        return (
            f"HalfspaceSystem(walls={self.wall_count}, "
            f"strict_pairs={len(self.strict_pairs())})"
        )


def validate_system(sys: HalfspaceSystem) -> List[str]:
    """Return the pocset-axiom violations of sys, empty when valid"""
    violations = []
    pairs = set(sys.order_pairs)

    for h, k in sorted(pairs):
        if h < k and (k, h) in pairs:
            violations.append(f"antisymmetry: {h} <= {k} and {k} <= {h}")

    for h in sys.halfspaces():
        for k in sorted(sys.up_set(h)):
            for l in sorted(sys.up_set(k)):
                if (h, l) not in pairs:
                    violations.append(
                        f"transitivity: {h} <= {k} <= {l} but not {h} <= {l}"
                    )

    for h, k in sorted(pairs):
        if (~k, ~h) not in pairs:
            violations.append(
                f"involution: {h} <= {k} but not {~k} <= {~h}"
            )

    for h in sys.halfspaces():
        if (h, ~h) in pairs:
            violations.append(f"complement: {h} <= {~h}")

    if violations:
        logger.warning(f"System has {len(violations)} pocset violations")
    return violations


def classify_pair(sys: HalfspaceSystem, h: Halfspace, k: Halfspace) -> PairRelation:
    """Which of the seven relationships holds between h and k"""
    sys.check(h)
    sys.check(k)
    if h == k:
        return PairRelation.EQUAL
    if k == ~h:
        return PairRelation.COMPLEMENTARY
    if sys.leq(k, h):
        return PairRelation.FIRST_CONTAINS_SECOND
    if sys.leq(h, k):
        return PairRelation.SECOND_CONTAINS_FIRST
    # h and k disjoint
    if sys.leq(h, ~k):
        return PairRelation.DISJOINT
    # complements disjoint
    if sys.leq(~k, h):
        return PairRelation.FACING
    return PairRelation.TRANSVERSE


def walls_transverse(sys: HalfspaceSystem, i: WallId, j: WallId) -> bool:
    return classify_pair(sys, Halfspace(i), Halfspace(j)) is PairRelation.TRANSVERSE


def is_facing_triple(
    sys: HalfspaceSystem, h: Halfspace, k: Halfspace, l: Halfspace
) -> bool:
    if len({h.wall, k.wall, l.wall}) < 3:
        raise RepeatedWallError(f"Facing triple needs three distinct walls: {h}, {k}, {l}")
    return all(
        classify_pair(sys, a, b) is PairRelation.FACING
        for a, b in ((h, k), (h, l), (k, l))
    )


def has_facing_triple(sys: HalfspaceSystem, halfspaces: Iterable[Halfspace]) -> bool:
    members = sorted(set(halfspaces))
    for h, k, l in itertools.combinations(members, 3):
        if len({h.wall, k.wall, l.wall}) < 3:
            continue
        if is_facing_triple(sys, h, k, l):
            return True
    return False


def transversality_graph(sys: HalfspaceSystem) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(sys.wall_count))
    for i, j in itertools.combinations(range(sys.wall_count), 2):
        if walls_transverse(sys, i, j):
            graph.add_edge(i, j)
    return graph


def check_wall_cap(sys: HalfspaceSystem):
    cap = get_config().get("limits.max_walls", 64)
    if sys.wall_count > cap:
        raise WallLimitError(
            f"System has {sys.wall_count} walls, above the cap of {cap} "
            f"(raise it with CUBIST_MAX_WALLS)"
        )


def dimension(sys: HalfspaceSystem) -> int:
    """Size of a largest family of pairwise transverse walls"""
    check_wall_cap(sys)
    if sys.wall_count == 0:
        return 0
    # exact branch-and-bound; unit node weights make it a maximum clique search
    clique, _ = nx.max_weight_clique(transversality_graph(sys), weight=None)
    logger.debug(f"Maximum transverse family: {sorted(clique)}")
    return len(clique)


def irreducible_components(sys: HalfspaceSystem) -> Tuple[Tuple[WallId, ...], ...]:
    """Components of the non-transversality graph on walls, lowest wall first"""
    graph = nx.Graph()
    graph.add_nodes_from(range(sys.wall_count))
    for i, j in itertools.combinations(range(sys.wall_count), 2):
        if not walls_transverse(sys, i, j):
            graph.add_edge(i, j)
    components = [tuple(sorted(c)) for c in nx.connected_components(graph)]
    return tuple(sorted(components))


def _product_names(a: HalfspaceSystem, b: HalfspaceSystem) -> Optional[Tuple[str, ...]]:
    if a.has_default_names() and b.has_default_names():
        return None
    names = list(a.wall_names)
    taken = set(names)
    for name in b.wall_names:
        while name in taken:
            name = f"{name}'"
        taken.add(name)
        names.append(name)
    return tuple(names)


def shift(h: Halfspace, offset: int) -> Halfspace:
    return Halfspace(h.wall + offset, h.side)


def product(a: HalfspaceSystem, b: HalfspaceSystem) -> HalfspaceSystem:
    """Disjoint union of walls; every cross-factor pair is transverse"""
    offset = a.wall_count
    order = list(a.order_pairs)
    order.extend((shift(h, offset), shift(k, offset)) for h, k in b.order_pairs)
    return HalfspaceSystem(a.wall_count + b.wall_count, order, _product_names(a, b))
