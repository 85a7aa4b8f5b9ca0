import itertools
import logging
import random
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from services.action_service import (
    SignedPermutation,
    WallAutomorphism,
    automorphism_orbits,
    endpoint_action,
    main_theorem_check,
    proof_recipe_check,
)
from services.cubulation_service import (
    CubeComplex,
    Orientation,
    Wall,
    WalledSpace,
    complex_graph,
    cubulate,
    distance,
    majority,
    walls_from_graph,
)
from services.interval_service import (
    dilworth_embed,
    endpoints,
    helly,
    interval,
)
from services.lifting_service import (
    Measure,
    invariant_interval,
    is_interval_measure,
    lift,
    median,
    median_by_distance_sum,
    median_by_intervals,
)
from services.pocset_service import (
    Halfspace,
    HalfspaceSystem,
    dimension,
    irreducible_components,
    product,
    validate_system,
)
from services.roller_service import (
    SubsystemSelection,
    full_complex,
    lipschitz_report,
    product_complex,
)
from services.zd_service import ZBarPoint, corner_orbit, dinfty_generators
from utils.config import get_config
from utils.errors import CubistError
from utils.formats import (
    LoadedInput,
    load_generators,
    load_input,
    system_from_dict,
    walled_space_from_dict,
    walled_space_to_dict,
)

logger = logging.getLogger(__name__)

# minimum trial counts for a full acceptance run
ACCEPTANCE_TRIALS = {
    "theorem": 2000,
    "invariant_interval": 200,
    "median": 100,
    "helly": 500,
    "endpoints": 200,
    "lifting": 200,
    "measure": 200,
    "restriction": 200,
    "product": 200,
}


@dataclass
class SweepResult:
    name: str
    trials: int
    failures: int
    seconds: float

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["seconds"] = round(self.seconds, 3)
        return data


# Random inputs


def random_walled_space(
    rng: random.Random, max_walls: int = 10, max_points: int = 8
) -> WalledSpace:
    """Random points and walls; repeated partitions are skipped"""
    point_count = rng.randint(2, max_points)
    points = tuple(f"p{i}" for i in range(point_count))
    universe = frozenset(points)
    wall_target = rng.randint(1, max_walls)

    walls: List[Wall] = []
    partitions = set()
    for _ in range(wall_target * 4):
        if len(walls) == wall_target:
            break
        size = rng.randint(1, point_count - 1)
        positive = frozenset(rng.sample(points, size))
        if positive in partitions or universe - positive in partitions:
            continue
        partitions.add(positive)
        walls.append(Wall(f"w{len(walls)}", positive))
    return WalledSpace(points, tuple(walls))


def random_complex(rng: random.Random, max_walls: int = 10) -> CubeComplex:
    return cubulate(random_walled_space(rng, max_walls))


def random_generators(
    rng: random.Random, degree: int, max_count: int = 3
) -> List[SignedPermutation]:
    generators = []
    for _ in range(rng.randint(1, max_count)):
        flips = tuple(rng.randint(0, 1) for _ in range(degree))
        perm = tuple(rng.sample(range(degree), degree))
        generators.append(SignedPermutation(flips, perm))
    return generators


def random_measure(rng: random.Random, cube: CubeComplex, max_atoms: int = 5) -> Measure:
    vertices = cube.sorted_vertices()
    atoms = rng.sample(vertices, rng.randint(1, min(max_atoms, len(vertices))))
    raw = {vertex: rng.randint(1, 6) for vertex in atoms}
    total = sum(raw.values())
    return Measure.from_weights(
        {vertex: Fraction(weight, total) for vertex, weight in raw.items()}
    )


def random_intersecting_family(
    rng: random.Random, cube: CubeComplex, max_size: int = 6
) -> List[Halfspace]:
    """Greedy random family whose members pairwise meet inside the complex"""
    candidates = list(cube.system.halfspaces())
    rng.shuffle(candidates)
    family: List[Halfspace] = []
    for h in candidates:
        if len(family) == max_size:
            break
        if not any(v.selects(h) for v in cube.vertices):
            continue
        if all(any(v.selects(h) and v.selects(k) for v in cube.vertices) for k in family):
            family.append(h)
    return family


def random_consistent_set(rng: random.Random, cube: CubeComplex) -> frozenset:
    """Upward closure of some halfspaces of a random vertex"""
    vertex = rng.choice(cube.sorted_vertices())
    chosen = [h for h in vertex.halfspaces() if rng.random() < 0.3]
    members = set()
    for h in chosen:
        members.update(cube.system.up_set(h))
    return frozenset(members)


def random_selection(rng: random.Random, wall_count: int) -> SubsystemSelection:
    return SubsystemSelection.of(w for w in range(wall_count) if rng.random() < 0.5)


# Sweeps


def _sweep(name: str, trials: int, trial: Callable[[int], bool]) -> SweepResult:
    started = time.perf_counter()
    failures = 0
    for index in range(trials):
        try:
            ok = trial(index)
        except (CubistError, AssertionError) as e:
            logger.warning(f"{name} trial {index} raised {type(e).__name__}: {e}")
            ok = False
        if not ok:
            failures += 1
    seconds = time.perf_counter() - started
    logger.info(f"{name}: {trials - failures}/{trials} passed in {seconds:.2f}s")
    return SweepResult(name, trials, failures, seconds)


def sweep_dinfty_orbits(max_n: int = 6) -> SweepResult:
    def trial(index: int) -> bool:
        n = index + 1
        corner = ZBarPoint.of(*(["+inf"] * n))
        found = corner_orbit(dinfty_generators(n), corner)
        return isinstance(found, frozenset) and len(found) == 2**n

    return _sweep("dinfty_orbits", max_n, trial)


def sweep_theorem(
    rng: random.Random, trials: int, degrees: Sequence[int] = (2, 3, 4, 5)
) -> SweepResult:
    def trial(index: int) -> bool:
        degree = degrees[index % len(degrees)]
        report = main_theorem_check(random_generators(rng, degree), degree)
        return len(report.witness) == 2**report.N and report.N <= degree

    return _sweep("theorem", trials, trial)


def sweep_recipe() -> SweepResult:
    def trial(_: int) -> bool:
        report = proof_recipe_check([SignedPermutation((1, 0), (1, 0))], 2)
        return (
            not report.coset_reps_exist
            and report.orbit_of_O == 4
            and report.kernel_orbit_of_O == 2
        )

    return _sweep("recipe", 1, trial)


def sweep_invariant_interval(
    rng: random.Random, trials: int, degrees: Sequence[int] = (2, 3, 4)
) -> SweepResult:
    """Orbit, invariant measure, invariant interval, endpoint action, power-of-two orbit"""

    def trial(index: int) -> bool:
        degree = degrees[index % len(degrees)]
        sys = HalfspaceSystem(degree)
        cube = full_complex(sys)
        automorphisms = [
            WallAutomorphism.from_wall_map(sys, g.perm, g.flips)
            for g in random_generators(rng, degree)
        ]
        start = rng.choice(cube.sorted_vertices())
        found = invariant_interval(
            sys, cube, automorphism_orbits(sys, cube, automorphisms, start), automorphisms
        )
        projected = endpoint_action(sys, found, automorphisms)
        width = projected[0].degree
        report = main_theorem_check(projected, width)
        return len(endpoints(sys, found)) == 2**width and report.N <= width

    return _sweep("invariant_interval", trials, trial)


def octants_walled_space() -> WalledSpace:
    """Seven of the eight octants of R^3 cut by the coordinate planes"""
    octants = [bits for bits in itertools.product("01", repeat=3) if bits != ("1", "1", "1")]
    points = tuple("".join(bits) for bits in octants)
    walls = tuple(
        Wall(axis, frozenset(p for p in points if p[i] == "1"))
        for i, axis in enumerate(("x", "y", "z"))
    )
    return WalledSpace(points, walls)


def sweep_completion() -> SweepResult:
    def trial(_: int) -> bool:
        cube = cubulate(octants_walled_space())
        return len(cube) == 8 and Orientation((True, True, True)) in cube

    return _sweep("completion", 1, trial)


def sweep_median(rng: random.Random, trials: int) -> SweepResult:
    def trial(_: int) -> bool:
        cube = random_complex(rng)
        x, y, z = (rng.choice(cube.sorted_vertices()) for _ in range(3))
        m = median(cube.system, cube, x, y, z)
        return m == median_by_intervals(cube, x, y, z) == median_by_distance_sum(cube, x, y, z)

    return _sweep("median", trials, trial)


def sweep_helly(
    rng: random.Random, trials: int, cubes: Optional[Sequence[CubeComplex]] = None
) -> SweepResult:
    def trial(_: int) -> bool:
        cube = rng.choice(cubes) if cubes else random_complex(rng)
        family = random_intersecting_family(rng, cube)
        result = helly(cube.system, cube, family)
        return result.found and all(result.vertex.selects(h) for h in family)

    return _sweep("helly", trials, trial)


def sweep_endpoints(rng: random.Random, trials: int) -> SweepResult:
    def trial(_: int) -> bool:
        cube = random_complex(rng)
        x, y = rng.choice(cube.sorted_vertices()), rng.choice(cube.sorted_vertices())
        found = interval(cube.system, cube, x, y)
        ends = endpoints(cube.system, found)
        embedding = dilworth_embed(cube.system, found)
        return {x, y} <= ends and embedding.chain_count <= dimension(cube.system)

    return _sweep("endpoints", trials, trial)


def sweep_lifting(rng: random.Random, trials: int) -> SweepResult:
    def trial(_: int) -> bool:
        cube = random_complex(rng)
        members = random_consistent_set(rng, cube)
        lifted = lift(cube.system, cube, members)
        expected = {v for v in cube.vertices if all(v.selects(h) for h in members)}
        return lifted.image == expected

    return _sweep("lifting", trials, trial)


def sweep_measure(rng: random.Random, trials: int) -> SweepResult:
    def trial(_: int) -> bool:
        cube = random_complex(rng)
        return is_interval_measure(cube.system, cube, random_measure(rng, cube))

    return _sweep("measure", trials, trial)


def sweep_restriction(rng: random.Random, trials: int) -> SweepResult:
    def trial(_: int) -> bool:
        cube = random_complex(rng)
        selection = random_selection(rng, cube.system.wall_count)
        report = lipschitz_report(cube.system, selection, cube.sorted_vertices())
        return bool((report["stretch"] <= 0).all())

    return _sweep("restriction", trials, trial)


def sweep_product(rng: random.Random, trials: int) -> SweepResult:
    def trial(_: int) -> bool:
        c1, c2 = random_complex(rng, max_walls=5), random_complex(rng, max_walls=5)
        s1, s2 = c1.system, c2.system
        joined = product(s1, s2)
        if dimension(joined) != dimension(s1) + dimension(s2):
            return False
        if len(irreducible_components(joined)) != len(irreducible_components(s1)) + len(
            irreducible_components(s2)
        ):
            return False
        combined = product_complex(c1, c2)
        if len(combined) != len(c1) * len(c2):
            return False
        return combined.vertices == full_complex(joined).vertices

    return _sweep("product", trials, trial)


def run_sweeps(
    trials: Optional[int] = None, seed: Optional[int] = None, acceptance: bool = False
) -> List[SweepResult]:
    """Every randomized sweep; `acceptance` raises each count to its acceptance minimum"""
    config = get_config()
    trials = trials if trials is not None else config.get("sweeps.trials", 200)
    seed = seed if seed is not None else config.get("sweeps.seed", 0)
    rng = random.Random(seed)

    def count(name: str) -> int:
        return max(trials, ACCEPTANCE_TRIALS[name]) if acceptance else trials

    logger.info(f"Running property sweeps (seed={seed}, trials={trials})")
    return [
        sweep_dinfty_orbits(),
        sweep_theorem(rng, count("theorem")),
        sweep_recipe(),
        sweep_invariant_interval(rng, count("invariant_interval")),
        sweep_completion(),
        sweep_median(rng, count("median")),
        sweep_helly(rng, count("helly"), corpus_complexes()),
        sweep_endpoints(rng, count("endpoints")),
        sweep_lifting(rng, count("lifting")),
        sweep_measure(rng, count("measure")),
        sweep_restriction(rng, count("restriction")),
        sweep_product(rng, count("product")),
    ]


def sweep_table(results: Sequence[SweepResult]) -> pd.DataFrame:
    return pd.DataFrame(
        [result.to_dict() for result in results],
        columns=["name", "trials", "failures", "seconds"],
    )


# Corpus


def corpus_dir() -> Path:
    return Path(get_config().get("paths.corpus"))


def _corpus_inputs(directory: Path) -> List[Path]:
    return sorted(
        p for p in directory.iterdir() if p.is_file() and p.suffix in (".json", ".txt")
    )


def corpus_complexes(directory: Optional[Path] = None) -> List[CubeComplex]:
    directory = directory or corpus_dir()
    if not directory.is_dir():
        return []
    cubes = []
    for path in _corpus_inputs(directory):
        loaded = load_input(path)
        if loaded.system.wall_count:
            cubes.append(loaded.complex)
    return cubes


MEDIAN_CHECK_LIMIT = 64


def _row(name: str, kind: str = "") -> Dict:
    return {
        "file": name,
        "kind": kind,
        "walls": None,
        "vertices": None,
        "dimension": None,
        "ok": False,
        "detail": "",
    }


def _check_complex(cube: CubeComplex) -> Tuple[bool, str]:
    sys = cube.system
    violations = validate_system(sys)
    if violations:
        return False, violations[0]
    vertices = cube.sorted_vertices()
    # every triple only on small complexes
    triples = itertools.combinations(vertices, 3) if len(vertices) <= MEDIAN_CHECK_LIMIT else ()
    for x, y, z in triples:
        if majority(x, y, z) not in cube:
            return False, f"not median closed at {x}, {y}, {z}"
    rebuilt = walls_from_graph(complex_graph(cube))
    if len(cubulate(rebuilt)) != len(cube):
        return False, "graph round trip changed the vertex count"
    if vertices:
        far = max(vertices, key=lambda v: (distance(vertices[0], v), v))
        endpoints(sys, interval(sys, cube, vertices[0], far))
    return True, ""


def _check_serialization(loaded: LoadedInput) -> Tuple[bool, str]:
    if system_from_dict(loaded.system.to_dict()) != loaded.system:
        return False, "pocset JSON round trip changed the system"
    if loaded.walled_space is not None:
        again = walled_space_from_dict(walled_space_to_dict(loaded.walled_space))
        if again != loaded.walled_space or cubulate(again) != loaded.complex:
            return False, "walled-space JSON round trip changed the complex"
    return True, ""


def run_corpus(directory: Optional[Path] = None) -> pd.DataFrame:
    """Load every corpus input, run its checks and tabulate the outcome"""
    directory = directory or corpus_dir()
    rows = []
    for path in _corpus_inputs(directory):
        row = _row(path.name)
        try:
            loaded = load_input(path)
            cube = loaded.complex
            row.update(
                kind=loaded.kind,
                walls=loaded.system.wall_count,
                vertices=len(cube),
                dimension=dimension(loaded.system),
            )
            row["ok"], row["detail"] = _check_complex(cube)
            if row["ok"]:
                row["ok"], row["detail"] = _check_serialization(loaded)
        except CubistError as e:
            row["detail"] = f"{type(e).__name__}: {e}"
        rows.append(row)

    gens_dir = directory / "gens"
    if gens_dir.is_dir():
        for path in sorted(gens_dir.glob("*.txt")):
            row = _row(f"gens/{path.name}", "generators")
            try:
                generators = load_generators(path)
                report = main_theorem_check(generators, generators[0].degree)
                row.update(
                    dimension=report.degree, ok=True, detail=f"orbit of size 2^{report.N}"
                )
            except CubistError as e:
                row["detail"] = f"{type(e).__name__}: {e}"
            rows.append(row)

    failed = [row["file"] for row in rows if not row["ok"]]
    if failed:
        logger.warning(f"Corpus checks failed for {failed}")
    return pd.DataFrame(
        rows, columns=["file", "kind", "walls", "vertices", "dimension", "ok", "detail"]
    )
