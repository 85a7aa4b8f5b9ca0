#!/usr/bin/env python3
"""
cubist - halfspace calculus of finite CAT(0) cube complexes

Usage:
    python3 app.py cubulate --in corpus/tripod.json --format dot
    python3 app.py median --in corpus/grid34.json --x 00000 --y 11110 --z 10111
    python3 app.py theorem-check --gens corpus/gens/tricycle.txt --dim 3 --format json

Inputs given with --in may be a pocset JSON, a walled-space JSON or an edge list.
Output goes to stdout, logs to stderr. Exit codes: 0 success, 1 domain error,
2 usage error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, TextIO

from services.action_service import (
    closure,
    main_theorem_check,
    orbit,
    orbit_table,
    proof_recipe_check,
)
from services.cubulation_service import CubeComplex
from services.interval_service import dilworth_embed, endpoints, helly, interval
from services.lifting_service import (
    lift,
    majority_halfspaces,
    measure_interval,
    median,
    median_by_distance_sum,
    median_by_intervals,
)
from services.pocset_service import (
    dimension,
    irreducible_components,
    product,
    validate_system,
)
from services.roller_service import (
    SubsystemSelection,
    lipschitz_report,
    product_complex,
    restrict,
)
from services.suite_service import run_corpus
from services.zd_service import (
    InfiniteOrbit,
    ZBarPoint,
    ZdIsometry,
    corner_orbit,
    dinfty_generators,
    halfspace_member,
    interval_zd,
    median_zd,
)
from utils.config import Config, load_config
from utils.errors import CubistError, InvariantViolation
from utils.formats import (
    bits,
    complex_to_dict,
    complex_to_dot,
    load_generators,
    load_input,
    load_isometries,
    load_json,
    measure_from_dict,
    parse_corner,
    parse_halfspaces,
    parse_orientation,
    parse_walls,
    to_json,
)

logger = logging.getLogger("cubist")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class CubistApp:
    """One handler per subcommand; each returns the process exit code"""

    def __init__(self, config: Config, out: Optional[TextIO] = None):
        self.config = config
        self.out = out or sys.stdout

    def write(self, text: str):
        self.out.write(text if text.endswith("\n") else text + "\n")

    def write_lines(self, lines: Sequence[str]):
        self.write("\n".join(lines))

    def emit(self, args, data: Dict, lines: Sequence[str]):
        if args.format == "json":
            self.write(to_json(data))
        else:
            self.write_lines(lines)

    def emit_complex(self, args, cube: CubeComplex, data: Optional[Dict] = None):
        if args.format == "dot":
            self.write(complex_to_dot(cube))
        elif args.format == "json":
            self.write(to_json(data if data is not None else complex_to_dict(cube)))
        else:
            self.write_lines(bits(cube.vertices))

    def run(self, args) -> int:
        handler = getattr(self, "cmd_" + args.command.replace("-", "_"))
        return handler(args) or 0

    # Complexes and systems

    def cmd_cubulate(self, args):
        loaded = load_input(args.input)
        self.emit_complex(args, loaded.complex)

    def cmd_dot(self, args):
        self.write(complex_to_dot(load_input(args.input).complex))

    def cmd_validate(self, args):
        sys_ = load_input(args.input).system
        violations = validate_system(sys_)
        self.emit(
            args,
            {"valid": not violations, "violations": violations},
            violations or ["valid"],
        )
        return 1 if violations else 0

    def cmd_dimension(self, args):
        value = dimension(load_input(args.input).system)
        self.emit(args, {"dimension": value}, [str(value)])

    def cmd_decompose(self, args):
        sys_ = load_input(args.input).system
        components = [
            [sys_.wall_names[wall] for wall in component]
            for component in irreducible_components(sys_)
        ]
        self.emit(
            args,
            {"components": components},
            [" ".join(component) for component in components],
        )

    def cmd_restrict(self, args):
        loaded = load_input(args.input)
        selection = SubsystemSelection.of(parse_walls(args.walls))
        restricted, projected = restrict(loaded.system, selection, loaded.complex.vertices)
        report = lipschitz_report(loaded.system, selection, loaded.complex.sorted_vertices())
        if len(report) and report["stretch"].max() > 0:
            raise InvariantViolation("Restriction increased a distance")
        cube = CubeComplex(restricted, projected)
        data = complex_to_dict(cube)
        data["system"] = restricted.to_dict()
        self.emit_complex(args, cube, data)

    def cmd_product(self, args):
        first, second = load_input(args.input), load_input(args.other)
        cube = product_complex(first.complex, second.complex)
        joined = product(first.system, second.system)
        if args.format == "dot":
            self.write(complex_to_dot(cube))
            return
        summary = {
            "walls": joined.wall_count,
            "vertices": len(cube),
            "dimension": dimension(joined),
            "components": len(irreducible_components(joined)),
            "system": joined.to_dict(),
        }
        self.emit(
            args,
            summary,
            [f"{key} {summary[key]}" for key in ("walls", "vertices", "dimension", "components")],
        )

    # Intervals

    def cmd_interval(self, args):
        loaded = load_input(args.input)
        x = parse_orientation(args.x, loaded.system)
        y = parse_orientation(args.y, loaded.system)
        found = interval(loaded.system, loaded.complex, x, y)
        members = bits(found.members)
        self.emit(args, {"x": x.bits, "y": y.bits, "members": members}, members)

    def cmd_endpoints(self, args):
        loaded = load_input(args.input)
        x = parse_orientation(args.x, loaded.system)
        y = parse_orientation(args.y, loaded.system)
        found = endpoints(loaded.system, interval(loaded.system, loaded.complex, x, y))
        ends = bits(found)
        self.emit(args, {"count": len(ends), "endpoints": ends}, ends)

    def cmd_embed(self, args):
        loaded = load_input(args.input)
        x = parse_orientation(args.x, loaded.system)
        y = parse_orientation(args.y, loaded.system)
        embedding = dilworth_embed(
            loaded.system, interval(loaded.system, loaded.complex, x, y)
        )
        data = embedding.to_dict()
        lines = [f"N {embedding.chain_count}"]
        lines.extend(
            f"{vertex} {' '.join(map(str, coords))}"
            for vertex, coords in data["coordinates"].items()
        )
        self.emit(args, data, lines)

    def cmd_helly(self, args):
        loaded = load_input(args.input)
        result = helly(loaded.system, loaded.complex, parse_halfspaces(args.family))
        if result.found:
            self.emit(args, {"vertex": result.vertex.bits}, [f"vertex {result.vertex}"])
        else:
            h, k = result.witness
            self.emit(args, {"witness": [h.name, k.name]}, [f"disjoint {h} {k}"])

    # Lifting and medians

    def cmd_lift(self, args):
        loaded = load_input(args.input)
        lifted = lift(loaded.system, loaded.complex, parse_halfspaces(args.set))
        cube = CubeComplex(lifted.system, lifted.vertices)
        data = complex_to_dict(cube)
        data["image"] = bits(lifted.image)
        self.emit_complex(args, cube, data)

    def cmd_measure_interval(self, args):
        loaded = load_input(args.input)
        mu = measure_from_dict(load_json(args.measure))
        plus, balanced = majority_halfspaces(loaded.system, mu)
        found = measure_interval(loaded.system, loaded.complex, mu)
        members = bits(found.members)
        data = {
            "plus": [h.name for h in sorted(plus)],
            "balanced": [h.name for h in sorted(balanced)],
            "endpoints": [found.endpoints_pair[0].bits, found.endpoints_pair[1].bits],
            "members": members,
        }
        self.emit(args, data, members)

    def cmd_median(self, args):
        loaded = load_input(args.input)
        sys_, cube = loaded.system, loaded.complex
        x, y, z = (parse_orientation(text, sys_) for text in (args.x, args.y, args.z))
        m = median(sys_, cube, x, y, z)
        if not m == median_by_intervals(cube, x, y, z) == median_by_distance_sum(cube, x, y, z):
            raise InvariantViolation(f"Median oracles disagree on {x}, {y}, {z}")
        self.emit(args, {"median": m.bits}, [m.bits])

    # Signed permutation groups

    def cmd_closure(self, args):
        generators = load_generators(args.gens)
        group = closure(generators, args.dim)
        elements = [g.to_text() for g in group.elements]
        self.emit(
            args,
            {"degree": group.degree, "order": group.order, "elements": elements},
            [f"order {group.order}"] + elements,
        )

    def cmd_orbit(self, args):
        generators = load_generators(args.gens)
        found = orbit(generators, parse_corner(args.x))
        corners = ["".join(map(str, corner)) for corner in found]
        self.emit(args, {"size": len(corners), "orbit": corners}, corners)

    def cmd_theorem_check(self, args):
        report = main_theorem_check(load_generators(args.gens), args.dim)
        data = report.to_dict()
        lines = [
            f"group order {report.group_order}",
            orbit_table(report).to_string(index=False),
            f"witness {' '.join(data['witness'])}",
            f"N {report.N}",
        ]
        self.emit(args, data, lines)

    def cmd_recipe_check(self, args):
        report = proof_recipe_check(load_generators(args.gens), args.dim)
        data = report.to_dict()
        lines = [f"{key} {value}" for key, value in sorted(data.items()) if key != "counter_coset"]
        if report.counter_coset:
            lines.append("counter_coset " + " | ".join(data["counter_coset"]))
        self.emit(args, data, lines)

    # Z-bar^D

    def cmd_zd(self, args):
        op = args.zd_op
        if op == "member":
            p = ZBarPoint.parse(args.point)
            inside = halfspace_member(p, args.coord, args.threshold, args.dir)
            self.emit(args, {"member": inside}, [str(inside).lower()])
        elif op == "median":
            m = median_zd(*(ZBarPoint.parse(text) for text in (args.x, args.y, args.z)))
            self.emit(args, {"median": str(m)}, [str(m)])
        elif op == "interval":
            found = interval_zd(ZBarPoint.parse(args.x), ZBarPoint.parse(args.y))
            ends = [str(p) for p in sorted(found.endpoints)]
            data = {
                "ranges": [[str(low), str(high)] for low, high in found.ranges],
                "endpoints": ends,
            }
            if args.points:
                data["points"] = [str(p) for p in found.lattice_points()]
            lines = [f"endpoints {len(ends)}"] + ends + data.get("points", [])
            self.emit(args, data, lines)
        elif op == "apply":
            p = ZBarPoint.parse(args.point)
            image = ZdIsometry.parse(args.isometry, len(p))(p)
            self.emit(args, {"image": str(image)}, [str(image)])
        elif op == "orbit":
            p = ZBarPoint.parse(args.point)
            if args.isometries:
                generators = load_isometries(args.isometries, len(p))
            else:
                generators = dinfty_generators(args.dinfty or len(p))
            found = corner_orbit(generators, p, args.radius)
            if isinstance(found, InfiniteOrbit):
                self.emit(
                    args,
                    {"infinite": True, "radius": found.radius, "explored": found.explored},
                    [f"infinite orbit (radius {found.radius}, {found.explored} points explored)"],
                )
            else:
                points = [str(q) for q in sorted(found)]
                self.emit(args, {"size": len(points), "orbit": points}, points)

    # Corpus

    def cmd_corpus(self, args):
        table = run_corpus(args.dir)
        if args.format == "json":
            self.write(to_json(table.to_dict(orient="records")))
        else:
            self.write(table.to_string(index=False))
        return 0 if bool(table["ok"].all()) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubist", description="Halfspace calculus of finite CAT(0) cube complexes"
    )
    parser.add_argument("--config", help="JSON or YAML configuration file")
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Log level for stderr (default WARNING)",
    )
    parser.add_argument("--log-file", help="Also write logs to this file")
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str, formats=("text", "json")):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("--format", choices=formats, default="text", help="Output format")
        return sub

    def with_input(sub):
        sub.add_argument(
            "--in", dest="input", required=True,
            help="Pocset JSON, walled-space JSON or edge list",
        )
        return sub

    complex_formats = ("text", "json", "dot")
    with_input(command("cubulate", "Cube complex of the input", complex_formats))
    sub = commands.add_parser("dot", help="DOT graph of the input's cube complex")
    sub.add_argument("--in", dest="input", required=True)
    with_input(command("validate", "Check the pocset axioms"))
    with_input(command("dimension", "Largest pairwise transverse family of walls"))
    with_input(command("decompose", "Irreducible factors as groups of walls"))

    for name, help_text in (
        ("interval", "Vertices between two vertices"),
        ("endpoints", "Endpoints of the interval of two vertices"),
        ("embed", "Isometric embedding of an interval into Z^N"),
    ):
        sub = with_input(command(name, help_text))
        sub.add_argument("--x", required=True, help="0/1 orientation string")
        sub.add_argument("--y", required=True, help="0/1 orientation string")

    sub = with_input(command("helly", "Common vertex of a halfspace family"))
    sub.add_argument("--family", required=True, help="Halfspaces, e.g. 'w0+,w2-'")

    sub = with_input(command("lift", "Lift a consistent halfspace set", complex_formats))
    sub.add_argument("--set", required=True, help="Halfspaces, e.g. 'w0+,w2-'")

    sub = with_input(command("measure-interval", "Interval cut out by a measure"))
    sub.add_argument("--measure", required=True, help="Measure JSON")

    sub = with_input(command("median", "Median of three vertices"))
    for name in ("--x", "--y", "--z"):
        sub.add_argument(name, required=True, help="0/1 orientation string")

    sub = with_input(command("restrict", "Forget walls outside a selection", complex_formats))
    sub.add_argument("--walls", required=True, help="Wall indices to keep, e.g. '0,2'")

    sub = with_input(command("product", "Product with a second input", complex_formats))
    sub.add_argument("--with", dest="other", required=True, help="Second input")

    for name, help_text in (
        ("closure", "Group generated by signed permutations"),
        ("theorem-check", "Find a corner orbit of size 2^N"),
        ("recipe-check", "Zero-flip coset representative diagnostic"),
    ):
        sub = command(name, help_text)
        sub.add_argument("--gens", required=True, help="Generator file")
        sub.add_argument("--dim", type=int, help="Degree D'")

    sub = command("orbit", "Orbit of a corner of {0,1}^D")
    sub.add_argument("--gens", required=True, help="Generator file")
    sub.add_argument("--x", required=True, help="Corner as a 0/1 string")

    zd = commands.add_parser("zd", help="Z-bar^D model")
    zd_ops = zd.add_subparsers(dest="zd_op", required=True)

    def zd_command(name: str, help_text: str):
        sub = zd_ops.add_parser(name, help=help_text)
        sub.add_argument(
            "--format", choices=("text", "json"), default="text", help="Output format"
        )
        return sub

    member = zd_command("member", "Threshold halfspace membership")
    member.add_argument("--point", required=True, help="e.g. '(3, -inf)'")
    member.add_argument("--coord", type=int, required=True, help="1-based coordinate")
    member.add_argument("--threshold", type=int, required=True)
    member.add_argument("--dir", choices=[">=", "<"], default=">=")
    zd_median = zd_command("median", "Coordinatewise median")
    for name in ("--x", "--y", "--z"):
        zd_median.add_argument(name, required=True)
    zd_interval = zd_command("interval", "Interval and its endpoints")
    zd_interval.add_argument("--x", required=True)
    zd_interval.add_argument("--y", required=True)
    zd_interval.add_argument("--points", action="store_true", help="List lattice points")
    apply = zd_command("apply", "Apply an isometry to a point")
    apply.add_argument("--point", required=True)
    apply.add_argument("--isometry", required=True, help="e.g. 'perm=(2 1); coord=2: -n+5'")
    zd_orbit = zd_command("orbit", "Orbit of a point")
    zd_orbit.add_argument("--point", required=True)
    zd_orbit.add_argument("--dinfty", type=int, help="Use the D_infinity^N generators")
    zd_orbit.add_argument("--isometries", help="File with one isometry per line")
    zd_orbit.add_argument("--radius", type=int, help="Search radius (default 10*D)")

    sub = command("corpus", "Run the checks over the shipped corpus")
    sub.add_argument("--dir", type=Path, help="Corpus directory")
    return parser


def setup_logging(level: str = "WARNING", log_file: Optional[str] = None):
    """Logs go to stderr, and to log_file when given"""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, level), format=LOG_FORMAT, handlers=handlers, force=True
    )


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    setup_logging(args.log_level, args.log_file)
    config = load_config(args.config)
    app = CubistApp(config, out)
    try:
        return app.run(args)
    except CubistError as e:
        logger.debug(f"{args.command} failed", exc_info=True)
        print(e, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
