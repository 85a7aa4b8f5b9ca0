import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx
from networkx.utils import UnionFind

from services.pocset_service import Halfspace, HalfspaceSystem, WallId
from utils.config import get_config
from utils.errors import (
    EmptyInputError,
    FormatError,
    InconsistentOrientationError,
    InvalidWalledSpaceError,
    LengthMismatchError,
    NotCubeComplexError,
    VertexNotFoundError,
    WallLimitError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Orientation:
    """A choice of one side of every wall, indexed by wall id"""

    sides: Tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.sides)

    @property
    def bits(self) -> str:
        return "".join("1" if side else "0" for side in self.sides)

    def __str__(self) -> str:
        return self.bits

    @classmethod
    def from_bits(cls, bits: str) -> "Orientation":
        bits = bits.strip()
        if any(ch not in "01" for ch in bits):
            raise FormatError(f"Orientation must be a 0/1 string, got {bits!r}")
        return cls(tuple(ch == "1" for ch in bits))

    @classmethod
    def from_halfspaces(cls, wall_count: int, halfspaces: Iterable[Halfspace]) -> "Orientation":
        sides: List[Optional[bool]] = [None] * wall_count
        for h in halfspaces:
            if sides[h.wall] is not None and sides[h.wall] != h.side:
                raise InconsistentOrientationError(f"Both sides of wall {h.wall} selected")
            sides[h.wall] = h.side
        if any(side is None for side in sides):
            raise InconsistentOrientationError("Halfspace set does not orient every wall")
        return cls(tuple(sides))

    def selects(self, h: Halfspace) -> bool:
        return self.sides[h.wall] == h.side

    def halfspaces(self) -> FrozenSet[Halfspace]:
        return frozenset(Halfspace(w, side) for w, side in enumerate(self.sides))

    def flip(self, wall: WallId) -> "Orientation":
        sides = list(self.sides)
        sides[wall] = not sides[wall]
        return Orientation(tuple(sides))


@dataclass(frozen=True)
class Wall:
    name: str
    positive: FrozenSet[str]


@dataclass(frozen=True)
class WalledSpace:
    """Points plus walls; each wall is given by its positive side"""

    points: Tuple[str, ...]
    walls: Tuple[Wall, ...]

    def check(self):
        if len(set(self.points)) != len(self.points):
            raise InvalidWalledSpaceError("Point names must be unique")
        names = [wall.name for wall in self.walls]
        if len(set(names)) != len(names):
            raise InvalidWalledSpaceError("Wall names must be unique")

        universe = set(self.points)
        for wall in self.walls:
            unknown = wall.positive - universe
            if unknown:
                raise InvalidWalledSpaceError(
                    f"Wall {wall.name} names unknown points: {sorted(unknown)}"
                )
            if not wall.positive:
                raise InvalidWalledSpaceError(f"Wall {wall.name} has an empty positive side")
            if wall.positive == universe:
                raise InvalidWalledSpaceError(f"Wall {wall.name} has an empty negative side")

    def side(self, h: Halfspace) -> FrozenSet[str]:
        positive = self.walls[h.wall].positive
        return positive if h.side else frozenset(self.points) - positive

    def signature(self, point: str) -> Orientation:
        return Orientation(tuple(point in wall.positive for wall in self.walls))


@dataclass(frozen=True)
class CubeComplex:
    """Median-closed set of consistent orientations of a system"""

    system: HalfspaceSystem
    vertices: FrozenSet[Orientation]

    def sorted_vertices(self) -> Tuple[Orientation, ...]:
        return tuple(sorted(self.vertices))

    def __contains__(self, vertex: Orientation) -> bool:
        return vertex in self.vertices

    def __len__(self) -> int:
        return len(self.vertices)

    def require(self, *vertices: Orientation):
        for vertex in vertices:
            if len(vertex) != self.system.wall_count:
                raise LengthMismatchError(
                    f"Orientation {vertex} has {len(vertex)} walls, "
                    f"system has {self.system.wall_count}"
                )
            if vertex not in self.vertices:
                raise VertexNotFoundError(f"{vertex} is not a vertex of the complex")

    def edges(self) -> Tuple[Tuple[Orientation, Orientation, WallId], ...]:
        """Pairs of vertices differing on exactly one wall, with that wall"""
        edges = []
        for vertex in self.sorted_vertices():
            for wall in range(self.system.wall_count):
                neighbour = vertex.flip(wall)
                if vertex < neighbour and neighbour in self.vertices:
                    edges.append((vertex, neighbour, wall))
        return tuple(sorted(edges))


def distance(u: Orientation, v: Orientation) -> int:
    """Number of walls separating u and v"""
    if len(u) != len(v):
        raise LengthMismatchError(f"Cannot compare orientations of length {len(u)} and {len(v)}")
    return sum(a != b for a, b in zip(u.sides, v.sides))


def majority(a: Orientation, b: Orientation, c: Orientation) -> Orientation:
    if not len(a) == len(b) == len(c):
        raise LengthMismatchError("Majority needs three orientations of equal length")
    return Orientation(tuple((x + y + z) >= 2 for x, y, z in zip(a.sides, b.sides, c.sides)))


def is_consistent_orientation(sys: HalfspaceSystem, vertex: Orientation) -> bool:
    if len(vertex) != sys.wall_count:
        raise LengthMismatchError(
            f"Orientation {vertex} has {len(vertex)} walls, system has {sys.wall_count}"
        )
    return all(
        vertex.selects(k) for h, k in sys.strict_pairs() if vertex.selects(h)
    )


def enumerate_consistent(
    sys: HalfspaceSystem, fixed: Optional[Dict[WallId, bool]] = None
) -> Tuple[Orientation, ...]:
    """All consistent orientations agreeing with `fixed`, in lexicographic order"""
    fixed = fixed or {}
    cap = get_config().get("limits.max_vertices", 65536)

    # constraints checked once the later of the two walls is assigned
    constraints = defaultdict(list)
    for h, k in sys.strict_pairs():
        constraints[max(h.wall, k.wall)].append((h, k))

    found: List[Orientation] = []
    sides: List[bool] = []

    def admissible() -> bool:
        for h, k in constraints[len(sides) - 1]:
            if sides[h.wall] == h.side and sides[k.wall] != k.side:
                return False
        return True

    def extend():
        wall = len(sides)
        if wall == sys.wall_count:
            found.append(Orientation(tuple(sides)))
            if len(found) > cap:
                raise WallLimitError(
                    f"More than {cap} consistent orientations (limits.max_vertices)"
                )
            return
        choices = (fixed[wall],) if wall in fixed else (False, True)
        for side in choices:
            sides.append(side)
            if admissible():
                extend()
            sides.pop()

    extend()
    return tuple(found)


def derive_system(ws: WalledSpace) -> HalfspaceSystem:
    """h <= k iff the side of h is a subset of the side of k"""
    ws.check()
    walls = range(len(ws.walls))
    for i in walls:
        for j in walls:
            if i < j and ws.walls[i].positive in (
                ws.walls[j].positive,
                ws.side(Halfspace(j, False)),
            ):
                raise InvalidWalledSpaceError(
                    f"Walls {ws.walls[i].name} and {ws.walls[j].name} induce the same partition"
                )

    halfspaces = [Halfspace(w, side) for w in walls for side in (True, False)]
    order = [
        (h, k)
        for h in halfspaces
        for k in halfspaces
        if h.wall != k.wall and ws.side(h) <= ws.side(k)
    ]
    return HalfspaceSystem(len(ws.walls), order, [wall.name for wall in ws.walls])


def regions(ws: WalledSpace) -> FrozenSet[Orientation]:
    """Side signatures realised by the points, one per nonempty region"""
    ws.check()
    return frozenset(ws.signature(point) for point in ws.points)


def median_closure(sys: HalfspaceSystem, seed: Iterable[Orientation]) -> CubeComplex:
    """Cubical completion of a seed set of consistent orientations.

    The result is the smallest set of consistent orientations containing the
    seed that is closed under majority and under geodesic betweenness: the
    consistent orientations agreeing with the seed wherever the seed is constant.
    """
    seed = sorted(set(seed))
    for vertex in seed:
        if not is_consistent_orientation(sys, vertex):
            raise InconsistentOrientationError(f"Seed orientation {vertex} is not consistent")
    if not seed:
        return CubeComplex(sys, frozenset())

    fixed = {
        wall: seed[0].sides[wall]
        for wall in range(sys.wall_count)
        if all(vertex.sides[wall] == seed[0].sides[wall] for vertex in seed)
    }
    vertices = enumerate_consistent(sys, fixed)
    logger.info(
        f"Completed {len(seed)} seed orientations to {len(vertices)} vertices "
        f"({sys.wall_count} walls, {sys.wall_count - len(fixed)} free)"
    )
    return CubeComplex(sys, frozenset(vertices))


def cubulate(ws: WalledSpace) -> CubeComplex:
    return median_closure(derive_system(ws), regions(ws))


def complex_graph(cube: CubeComplex) -> nx.Graph:
    """1-skeleton with bit-string nodes and edges labelled by wall name"""
    graph = nx.Graph()
    graph.add_nodes_from(vertex.bits for vertex in cube.sorted_vertices())
    for u, v, wall in cube.edges():
        graph.add_edge(u.bits, v.bits, wall=cube.system.wall_names[wall])
    return graph


def node_key(node) -> Tuple:
    """Numeric names sort numerically, everything else as text"""
    text = str(node)
    return (0, int(text), "") if text.isdigit() else (1, 0, text)


def walls_from_graph(graph: nx.Graph) -> WalledSpace:
    """Walls of a cube-complex 1-skeleton: classes of edges parallel across squares"""
    if graph.number_of_nodes() == 0:
        raise EmptyInputError("Graph has no vertices")
    if not nx.is_connected(graph):
        raise NotCubeComplexError("Graph is not connected")

    nodes = sorted(graph.nodes, key=node_key)
    base = nodes[0]

    def edge_key(u, v):
        return tuple(sorted((u, v), key=node_key))

    edges = sorted((edge_key(u, v) for u, v in graph.edges), key=lambda e: tuple(map(node_key, e)))
    parallel = UnionFind(edges)
    for u, v in edges:
        for x in graph[u]:
            if x == v:
                continue
            for w in graph[v]:
                if w in (u, x):
                    continue
                if graph.has_edge(x, w):
                    # square u-v-w-x: uv is opposite xw
                    parallel.union((u, v), edge_key(x, w))

    classes = sorted(
        (sorted(group, key=lambda e: tuple(map(node_key, e))) for group in parallel.to_sets()),
        key=lambda group: tuple(map(node_key, group[0])),
    )
    logger.debug(f"{len(edges)} edges fall into {len(classes)} parallelism classes")

    walls = []
    for index, group in enumerate(classes):
        cut = graph.copy()
        cut.remove_edges_from(group)
        components = list(nx.connected_components(cut))
        if len(components) != 2:
            raise NotCubeComplexError(
                f"Edge class of {group[0]} splits the graph into {len(components)} pieces"
            )
        negative = next(c for c in components if base in c)
        for u, v in group:
            if (u in negative) == (v in negative):
                raise NotCubeComplexError(f"Edge {u}-{v} does not cross its own wall")
        positive = frozenset(str(n) for n in graph.nodes if n not in negative)
        walls.append(Wall(f"w{index}", positive))

    ws = WalledSpace(tuple(str(n) for n in nodes), tuple(walls))

    signatures = {str(n): ws.signature(str(n)) for n in nodes}
    if len(set(signatures.values())) != len(nodes):
        raise NotCubeComplexError("Two vertices are not separated by any wall")
    for u, v in graph.edges:
        if distance(signatures[str(u)], signatures[str(v)]) != 1:
            raise NotCubeComplexError(f"Edge {u}-{v} crosses more than one wall")
    completed = cubulate(ws)
    if len(completed) != len(nodes) or len(completed.edges()) != graph.number_of_edges():
        raise NotCubeComplexError(
            "Graph is not the 1-skeleton of a CAT(0) cube complex "
            f"(its cubulation has {len(completed)} vertices, graph has {len(nodes)})"
        )
    return ws
