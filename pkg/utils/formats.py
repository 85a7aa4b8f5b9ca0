"""
File formats

Readers for the input files the command line accepts (pocset JSON, walled-space
JSON, edge lists, measure JSON, generator files) and writers for JSON and DOT.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx

from services.action_service import SignedPermutation
from services.cubulation_service import (
    CubeComplex,
    Orientation,
    Wall,
    WalledSpace,
    complex_graph,
    cubulate,
    derive_system,
    walls_from_graph,
)
from services.lifting_service import Measure
from services.pocset_service import Halfspace, HalfspaceSystem, check_wall_cap
from services.roller_service import full_complex
from services.zd_service import ZdIsometry
from utils.errors import EmptyInputError, FormatError, LengthMismatchError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_text(path: PathLike) -> str:
    try:
        with open(path, "r") as f:
            return f.read()
    except OSError as e:
        raise FormatError(f"Cannot read {path}: {e}")


def load_json(path: PathLike) -> Any:
    try:
        return json.loads(read_text(path))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path} is not valid JSON: {e}")


def system_from_dict(data: Dict) -> HalfspaceSystem:
    """`{"walls": W, "order": [["w0+", "w1+"], ...], "names": [...]}`"""
    wall_count = data.get("walls")
    if not isinstance(wall_count, int) or isinstance(wall_count, bool):
        raise FormatError("Pocset JSON needs an integer 'walls' entry")
    generators = []
    for entry in data.get("order", []):
        if not isinstance(entry, list) or len(entry) != 2:
            raise FormatError(f"Order entries are [a, b] pairs, got {entry!r}")
        generators.append((Halfspace.parse(entry[0]), Halfspace.parse(entry[1])))
    return HalfspaceSystem.from_generators(wall_count, generators, data.get("names"))


def walled_space_from_dict(data: Dict) -> WalledSpace:
    points = data.get("points")
    walls = data.get("walls")
    if not isinstance(points, list) or not isinstance(walls, list):
        raise FormatError("Walled-space JSON needs 'points' and 'walls' lists")
    try:
        parsed = tuple(
            Wall(str(wall["name"]), frozenset(str(p) for p in wall["positive"]))
            for wall in walls
        )
    except (KeyError, TypeError):
        raise FormatError("Each wall needs a 'name' and a 'positive' list")
    return WalledSpace(tuple(str(p) for p in points), parsed)


def walled_space_to_dict(ws: WalledSpace) -> Dict:
    return {
        "points": list(ws.points),
        "walls": [
            {"name": wall.name, "positive": sorted(wall.positive)} for wall in ws.walls
        ],
    }


def parse_edge_list(text: str) -> nx.Graph:
    """One `u v` pair per line; `#` starts a comment, a lone name is an isolated vertex"""
    graph = nx.Graph()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) == 1:
            graph.add_node(tokens[0])
        elif len(tokens) == 2:
            if tokens[0] == tokens[1]:
                raise FormatError(f"Line {number}: self-loop on {tokens[0]}")
            graph.add_edge(tokens[0], tokens[1])
        else:
            raise FormatError(f"Line {number}: expected 'u v', got {raw!r}")
    return graph


def measure_from_dict(data: Dict) -> Measure:
    """`{"atoms": [{"vertex": "0110", "weight": "1/4"}, ...]}`"""
    atoms = data.get("atoms")
    if not isinstance(atoms, list) or not atoms:
        raise FormatError("Measure JSON needs a non-empty 'atoms' list")
    weights: Dict[Orientation, Fraction] = {}
    for atom in atoms:
        try:
            vertex = Orientation.from_bits(str(atom["vertex"]))
            weight = Fraction(str(atom["weight"]))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
            raise FormatError(f"Bad measure atom {atom!r}: {e}")
        weights[vertex] = weights.get(vertex, Fraction(0)) + weight
    return Measure.from_weights(weights)


def _content_lines(text: str) -> List[str]:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def parse_generators(text: str) -> List[SignedPermutation]:
    return [SignedPermutation.from_text(line) for line in _content_lines(text)]


def load_generators(path: PathLike) -> List[SignedPermutation]:
    generators = parse_generators(read_text(path))
    if not generators:
        raise EmptyInputError(f"{path} lists no generators")
    return generators


def load_isometries(path: PathLike, dimension: int) -> List[ZdIsometry]:
    return [ZdIsometry.parse(line, dimension) for line in _content_lines(read_text(path))]


def parse_orientation(text: str, sys: HalfspaceSystem) -> Orientation:
    vertex = Orientation.from_bits(text)
    if len(vertex) != sys.wall_count:
        raise LengthMismatchError(
            f"Orientation {text!r} has {len(vertex)} bits, system has {sys.wall_count} walls"
        )
    return vertex


def parse_halfspaces(text: str) -> Tuple[Halfspace, ...]:
    """Comma or space separated halfspace names, e.g. `w0+,w2-`"""
    tokens = text.replace(",", " ").split()
    return tuple(Halfspace.parse(token) for token in tokens)


def parse_corner(text: str) -> Tuple[int, ...]:
    text = text.strip()
    if not text or any(ch not in "01" for ch in text):
        raise FormatError(f"Corner must be a 0/1 string, got {text!r}")
    return tuple(int(ch) for ch in text)


def parse_walls(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(token) for token in text.replace(",", " ").split())
    except ValueError:
        raise FormatError(f"Wall list must be integers, got {text!r}")


@dataclass
class LoadedInput:
    """A system together with whatever it was read from"""

    path: str
    kind: str
    system: HalfspaceSystem
    walled_space: Optional[WalledSpace] = None
    graph: Optional[nx.Graph] = None
    _cube: Optional[CubeComplex] = field(default=None, repr=False)

    @property
    def complex(self) -> CubeComplex:
        """Cubulation for walled spaces and graphs, every Roller point for pocsets"""
        if self._cube is None:
            if self.walled_space is not None:
                self._cube = cubulate(self.walled_space)
            else:
                self._cube = full_complex(self.system)
        return self._cube


def detect_kind(text: str) -> str:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise FormatError(f"Input looks like JSON but does not parse: {e}")
        walls = data.get("walls")
        if isinstance(walls, int) and not isinstance(walls, bool):
            return "pocset"
        if "points" in data:
            return "walled"
        raise FormatError("JSON input is neither a pocset nor a walled space")
    return "graph"


def load_input(path: PathLike) -> LoadedInput:
    text = read_text(path)
    kind = detect_kind(text)
    logger.debug(f"Reading {path} as {kind}")

    if kind == "pocset":
        sys = system_from_dict(json.loads(text))
        check_wall_cap(sys)
        return LoadedInput(str(path), kind, sys)
    if kind == "walled":
        ws = walled_space_from_dict(json.loads(text))
        sys = derive_system(ws)
        check_wall_cap(sys)
        return LoadedInput(str(path), kind, sys, walled_space=ws)

    graph = parse_edge_list(text)
    ws = walls_from_graph(graph)
    sys = derive_system(ws)
    check_wall_cap(sys)
    return LoadedInput(str(path), kind, sys, walled_space=ws, graph=graph)


def to_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True)


def bits(vertices: Sequence[Orientation]) -> List[str]:
    return [vertex.bits for vertex in sorted(vertices)]


def complex_to_dict(cube: CubeComplex) -> Dict:
    names = cube.system.wall_names
    return {
        "walls": list(names),
        "vertices": bits(cube.vertices),
        "edges": [[u.bits, v.bits, names[wall]] for u, v, wall in cube.edges()],
    }


def complex_to_dot(cube: CubeComplex, name: str = "cubist") -> str:
    """Undirected DOT, vertices sorted, edges labelled by wall name"""
    graph = complex_graph(cube)
    lines = [f"graph {name} {{"]
    for node in sorted(graph.nodes):
        lines.append(f'  "{node}";')
    edges = sorted(
        (min(u, v), max(u, v), label) for u, v, label in graph.edges(data="wall")
    )
    for u, v, label in edges:
        lines.append(f'  "{u}" -- "{v}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
