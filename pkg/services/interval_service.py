import itertools
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx

from services.cubulation_service import CubeComplex, Orientation, distance
from services.pocset_service import (
    Halfspace,
    HalfspaceSystem,
    PairRelation,
    classify_pair,
    dimension,
    has_facing_triple,
)
from services.roller_service import full_complex
from utils.errors import EmptyInputError, InvariantViolation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Trichotomy:
    separating: FrozenSet[Halfspace]
    containing: FrozenSet[Halfspace]
    avoiding: FrozenSet[Halfspace]

    def separating_walls(self) -> Tuple[int, ...]:
        return tuple(sorted({h.wall for h in self.separating}))


@dataclass(frozen=True)
class Interval:
    endpoints_pair: Tuple[Orientation, Orientation]
    members: FrozenSet[Orientation]

    def sorted_members(self) -> Tuple[Orientation, ...]:
        return tuple(sorted(self.members))


@dataclass(frozen=True)
class DilworthEmbedding:
    """Members of an interval as points of Z^N, one axis per chain of walls"""

    chain_count: int
    chains: Tuple[Tuple[Halfspace, ...], ...]
    coordinates: Dict[Orientation, Tuple[int, ...]]

    def to_dict(self) -> Dict:
        return {
            "N": self.chain_count,
            "chains": [[h.name for h in chain] for chain in self.chains],
            "coordinates": {
                vertex.bits: list(self.coordinates[vertex])
                for vertex in sorted(self.coordinates)
            },
        }


@dataclass(frozen=True)
class HellyResult:
    vertex: Optional[Orientation] = None
    witness: Optional[Tuple[Halfspace, Halfspace]] = None

    @property
    def found(self) -> bool:
        return self.vertex is not None


def trichotomy(sys: HalfspaceSystem, pts: Iterable[Orientation]) -> Trichotomy:
    """Split the halfspaces into those separating pts, containing pts, and missing pts"""
    pts = list(pts)
    if not pts:
        raise EmptyInputError("Trichotomy of an empty point set")
    separating, containing, avoiding = set(), set(), set()
    for h in sys.halfspaces():
        hits = [p.selects(h) for p in pts]
        if all(hits):
            containing.add(h)
        elif any(hits):
            separating.add(h)
        else:
            avoiding.add(h)
    return Trichotomy(frozenset(separating), frozenset(containing), frozenset(avoiding))


def interval_between(cube: CubeComplex, x: Orientation, y: Orientation) -> FrozenSet[Orientation]:
    """Vertices z with d(x,z) + d(z,y) = d(x,y)"""
    span = distance(x, y)
    return frozenset(z for z in cube.vertices if distance(x, z) + distance(z, y) == span)


def interval(sys: HalfspaceSystem, cube: CubeComplex, x: Orientation, y: Orientation) -> Interval:
    cube.require(x, y)
    between = interval_between(cube, x, y)
    containing = trichotomy(sys, (x, y)).containing
    intersection = frozenset(
        z for z in cube.vertices if all(z.selects(h) for h in containing)
    )
    if between != intersection:
        raise InvariantViolation(
            f"Interval {x}..{y}: geodesic and halfspace definitions disagree "
            f"({len(between)} vs {len(intersection)} vertices)"
        )
    return Interval((x, y), between)


def _ambient(sys: HalfspaceSystem, cube: Optional[CubeComplex]) -> CubeComplex:
    return cube if cube is not None else full_complex(sys)


def is_interval(
    sys: HalfspaceSystem, pts: Iterable[Orientation], cube: Optional[CubeComplex] = None
) -> bool:
    """Whether pts = I(x, y) for some x, y in pts; ambient defaults to all Roller points"""
    return find_endpoints_pair(sys, pts, cube) is not None


def find_endpoints_pair(
    sys: HalfspaceSystem, pts: Iterable[Orientation], cube: Optional[CubeComplex] = None
) -> Optional[Tuple[Orientation, Orientation]]:
    pts = frozenset(pts)
    if not pts:
        raise EmptyInputError("An interval is never empty")
    ambient = _ambient(sys, cube)
    if not pts <= ambient.vertices:
        return None
    # I(x, y) = pts forces x and y apart on every wall that separates pts
    span = len(trichotomy(sys, pts).separating_walls())
    ordered = sorted(pts)
    for i, x in enumerate(ordered):
        for y in ordered[i:]:
            if distance(x, y) == span and interval_between(ambient, x, y) == pts:
                return x, y
    return None


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def endpoints(sys: HalfspaceSystem, interval_: Interval) -> FrozenSet[Orientation]:
    """All points occurring in a pair (x, y) with I(x, y) = I"""
    members = interval_.sorted_members()
    # I(x, y) lies inside the convex set I, so equality means x, y are
    # separated by every wall separating I
    span = len(trichotomy(sys, members).separating_walls())
    found = set()
    for i, x in enumerate(members):
        for y in members[i:]:
            if distance(x, y) == span:
                found.update((x, y))

    count = len(found)
    if not _is_power_of_two(count):
        raise InvariantViolation(f"Interval has {count} endpoints, not a power of two")
    exponent = count.bit_length() - 1
    bound = dimension(sys)
    if exponent > bound:
        raise InvariantViolation(
            f"Interval has 2^{exponent} endpoints in a system of dimension {bound}"
        )
    return frozenset(found)


def _containment_dag(sys: HalfspaceSystem, oriented: List[Halfspace]) -> nx.DiGraph:
    dag = nx.DiGraph()
    dag.add_nodes_from(oriented)
    for h, k in itertools.permutations(oriented, 2):
        if sys.leq(h, k):
            dag.add_edge(h, k)
    return dag


def _greedy_chains(dag: nx.DiGraph) -> List[List[Halfspace]]:
    """Repeatedly peel a longest chain"""
    remaining = dag.copy()
    chains = []
    while remaining.number_of_nodes():
        order = list(nx.lexicographical_topological_sort(remaining))
        chain = nx.dag_longest_path(remaining, topo_order=order)
        if not chain:
            chain = [min(remaining.nodes)]
        chains.append(chain)
        remaining.remove_nodes_from(chain)
    return chains


def _minimum_chain_cover(dag: nx.DiGraph) -> List[List[Halfspace]]:
    """Exact cover via maximum matching in the split bipartite graph (Dilworth/Fulkerson)"""
    bipartite = nx.Graph()
    left = [("out", h) for h in dag.nodes]
    bipartite.add_nodes_from(left, bipartite=0)
    bipartite.add_nodes_from((("in", h) for h in dag.nodes), bipartite=1)
    bipartite.add_edges_from((("out", h), ("in", k)) for h, k in dag.edges)
    matching = nx.bipartite.hopcroft_karp_matching(bipartite, top_nodes=left)

    successor = {
        h: matching[("out", h)][1] for h in dag.nodes if ("out", h) in matching
    }
    has_predecessor = set(successor.values())
    chains = []
    for start in sorted(h for h in dag.nodes if h not in has_predecessor):
        chain = [start]
        while chain[-1] in successor:
            chain.append(successor[chain[-1]])
        chains.append(chain)
    return chains


def dilworth_embed(sys: HalfspaceSystem, interval_: Interval) -> DilworthEmbedding:
    """Isometric embedding of an interval into Z^N with N <= dimension"""
    x, y = interval_.endpoints_pair
    walls = trichotomy(sys, interval_.members).separating_walls()
    # halfspaces oriented to contain the second endpoint
    oriented = [Halfspace(wall, y.sides[wall]) for wall in walls]
    dag = _containment_dag(sys, oriented)

    bound = dimension(sys)
    chains = _greedy_chains(dag)
    if len(chains) > bound:
        logger.info(
            f"Greedy peeling used {len(chains)} chains, above dimension {bound}; "
            "falling back to an exact minimum chain cover"
        )
        chains = _minimum_chain_cover(dag)
    if len(chains) > bound:
        raise InvariantViolation(
            f"Separating walls need {len(chains)} chains, more than dimension {bound}"
        )

    chains = sorted(
        (sorted(chain, key=lambda h: len(sys.up_set(h)), reverse=True) for chain in chains),
        key=lambda chain: min(h.wall for h in chain),
    )
    coordinates = {
        z: tuple(sum(z.selects(h) for h in chain) for chain in chains)
        for z in interval_.sorted_members()
    }

    for u, v in itertools.combinations(interval_.sorted_members(), 2):
        l1 = sum(abs(a - b) for a, b in zip(coordinates[u], coordinates[v]))
        if l1 != distance(u, v):
            raise InvariantViolation(f"Embedding is not isometric on {u}, {v}")

    return DilworthEmbedding(
        len(chains), tuple(tuple(chain) for chain in chains), coordinates
    )


def helly(sys: HalfspaceSystem, cube: CubeComplex, family: Iterable[Halfspace]) -> HellyResult:
    """A vertex in every member of a pairwise-intersecting family, or a disjoint pair"""
    family = sorted(set(family))
    for h in family:
        sys.check(h)

    for h, k in itertools.combinations(family, 2):
        if classify_pair(sys, h, k) in (PairRelation.DISJOINT, PairRelation.COMPLEMENTARY):
            return HellyResult(witness=(h, k))
    for h, k in itertools.combinations(family, 2):
        if not any(v.selects(h) and v.selects(k) for v in cube.vertices):
            return HellyResult(witness=(h, k))
    for h in family:
        if not any(v.selects(h) for v in cube.vertices):
            return HellyResult(witness=(h, h))

    for vertex in cube.sorted_vertices():
        if all(vertex.selects(h) for h in family):
            return HellyResult(vertex=vertex)
    raise InvariantViolation(
        f"Pairwise intersecting family {[h.name for h in family]} has no common vertex"
    )


def check_interval_invariants(sys: HalfspaceSystem, interval_: Interval):
    """Raise if the separating walls of an interval contain a facing triple"""
    separating = trichotomy(sys, interval_.members).separating
    if has_facing_triple(sys, separating):
        raise InvariantViolation("Separating halfspaces of an interval contain a facing triple")
