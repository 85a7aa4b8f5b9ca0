import argparse
import json
import shlex
from io import StringIO
from pathlib import Path

import pytest

import app
from app import CubistApp, build_parser, main


@pytest.fixture
def cli(corpus_dir):
    """Run the command line, returning (exit code, stdout)"""

    def run(*argv):
        out = StringIO()
        resolved = [
            str(corpus_dir / arg.split("/", 1)[1]) if arg.startswith("corpus/") else arg
            for arg in argv
        ]
        code = main(resolved, out=out)
        return code, out.getvalue()

    return run


def test_tripod_dot(cli):
    code, out = cli("cubulate", "--in", "corpus/tripod.json", "--format", "dot")
    assert code == 0
    assert out.splitlines() == [
        "graph cubist {",
        '  "000";',
        '  "001";',
        '  "010";',
        '  "100";',
        '  "000" -- "001" [label="wc"];',
        '  "000" -- "010" [label="wb"];',
        '  "000" -- "100" [label="wa"];',
        "}",
    ]
    assert cli("dot", "--in", "corpus/tripod.json")[1] == out


def test_cubulate_octants(cli):
    code, out = cli("cubulate", "--in", "corpus/octants7.json")
    assert code == 0
    assert len(out.split()) == 8
    data = json.loads(cli("cubulate", "--in", "corpus/octants7.json", "--format", "json")[1])
    assert data["walls"] == ["x", "y", "z"]
    assert "111" in data["vertices"]


def test_grid_median(cli):
    code, out = cli(
        "median", "--in", "corpus/grid34.json", "--x", "00000", "--y", "11110", "--z", "10111"
    )
    assert code == 0
    assert out == "10110\n"


def test_median_of_a_non_vertex_fails(cli, capsys):
    code, out = cli(
        "median", "--in", "corpus/grid34.json", "--x", "01000", "--y", "11110", "--z", "10111"
    )
    assert code == 1
    assert out == ""
    assert "not a vertex" in capsys.readouterr().err


def test_dimension_and_decompose(cli):
    assert cli("dimension", "--in", "corpus/tripod_x_edge.json") == (0, "2\n")
    assert cli("dimension", "--in", "corpus/cube3.txt") == (0, "3\n")
    code, out = cli("decompose", "--in", "corpus/grid33.json")
    assert out.splitlines() == ["x1>=1 x1>=2", "x2>=1 x2>=2"]


def test_validate(cli, tmp_path):
    assert cli("validate", "--in", "corpus/path3.json") == (0, "valid\n")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"walls": 1, "order": [["w0+", "w0-"]]}))
    code, out = cli("validate", "--in", str(bad), "--format", "json")
    assert code == 1
    data = json.loads(out)
    assert not data["valid"]
    assert data["violations"] == ["complement: w0+ <= w0-"]


def test_interval_commands(cli):
    code, out = cli("interval", "--in", "corpus/grid34.json", "--x", "00000", "--y", "11111")
    assert len(out.split()) == 12
    code, out = cli("endpoints", "--in", "corpus/grid34.json", "--x", "00000", "--y", "11111")
    assert out.split() == ["00000", "00111", "11000", "11111"]
    code, out = cli(
        "embed", "--in", "corpus/grid34.json", "--x", "00000", "--y", "11111", "--format", "json"
    )
    data = json.loads(out)
    assert data["N"] == 2
    assert data["coordinates"]["10110"] == [1, 2]


def test_helly(cli):
    assert cli("helly", "--in", "corpus/grid34.json", "--family", "w0+,w2+,w1-") == (
        0,
        "vertex 10100\n",
    )
    assert cli("helly", "--in", "corpus/tripod.json", "--family", "w0+,w1+") == (
        0,
        "disjoint w0+ w1+\n",
    )


def test_lift_and_restrict(cli):
    code, out = cli("lift", "--in", "corpus/grid34.json", "--set", "w0+,w1-")
    assert out.split() == ["000", "100", "110", "111"]
    code, out = cli("restrict", "--in", "corpus/grid34.json", "--walls", "0,1", "--format", "json")
    data = json.loads(out)
    assert data["vertices"] == ["00", "10", "11"]
    assert data["walls"] == ["x1>=1", "x1>=2"]


def test_lift_of_an_inconsistent_set_fails(cli):
    assert cli("lift", "--in", "corpus/grid34.json", "--set", "w1+")[0] == 1


def test_product(cli):
    code, out = cli("product", "--in", "corpus/path3.json", "--with", "corpus/square.txt")
    assert code == 0
    assert out.splitlines() == ["walls 5", "vertices 16", "dimension 3", "components 3"]


def test_measure_interval(cli, corpus_dir):
    code, out = cli(
        "measure-interval",
        "--in",
        "corpus/cube3.json",
        "--measure",
        str(corpus_dir / "measures" / "face.json"),
        "--format",
        "json",
    )
    data = json.loads(out)
    assert data["plus"] == ["w0+"]
    assert data["balanced"] == ["w1-", "w1+", "w2-", "w2+"]
    assert data["members"] == ["100", "101", "110", "111"]


def test_group_commands(cli):
    code, out = cli("closure", "--gens", "corpus/gens/swap_flip.txt", "--format", "json")
    assert json.loads(out)["order"] == 4
    code, out = cli("orbit", "--gens", "corpus/gens/tricycle.txt", "--x", "010")
    assert out.split() == ["010", "101"]


def test_theorem_check(cli):
    code, out = cli(
        "theorem-check", "--gens", "corpus/gens/tricycle.txt", "--dim", "3", "--format", "json"
    )
    assert code == 0
    data = json.loads(out)
    assert data["orbit_sizes"] == [6, 2]
    assert data["witness"] == ["010", "101"]
    assert data["N"] == 1
    code, out = cli("theorem-check", "--gens", "corpus/gens/sym3.txt")
    assert out.splitlines()[-2:] == ["witness 000", "N 0"]


def test_recipe_check(cli):
    code, out = cli("recipe-check", "--gens", "corpus/gens/swap_flip.txt", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["coset_reps_exist"] is False
    assert data["orbit_of_O"] == 4
    assert data["Gamma0_orbit_of_O"] == 2
    assert data["Gamma0_order"] == 2


def test_zd_commands(cli):
    assert cli("zd", "orbit", "--point", "(+inf, -inf)", "--dinfty", "2")[1].splitlines() == [
        "(-inf, -inf)",
        "(-inf, +inf)",
        "(+inf, -inf)",
        "(+inf, +inf)",
    ]
    code, out = cli("zd", "orbit", "--point", "(0, +inf)", "--format", "json")
    assert json.loads(out)["infinite"] is True
    code, out = cli(
        "zd", "apply", "--point", "(1, 2, 3)", "--isometry", "perm=(2 1 3); coord=2: -n+5"
    )
    assert out == "(3, 1, 3)\n"
    code, out = cli("zd", "median", "--x", "(0, 5)", "--y", "(3, +inf)", "--z", "(1, 1)")
    assert out == "(1, 5)\n"
    code, out = cli("zd", "member", "--point", "(-inf, 3)", "--coord", "2", "--threshold", "3")
    assert out == "true\n"
    code, out = cli("zd", "interval", "--x", "(0, 0)", "--y", "(1, 1)", "--points")
    assert out.splitlines()[0] == "endpoints 4"


@pytest.mark.parametrize(
    "argv, key",
    [
        (("member", "--point", "(3, -inf)", "--coord", "1", "--threshold", "3"), "member"),
        (("median", "--x", "(0, 5)", "--y", "(3, +inf)", "--z", "(1, 1)"), "median"),
        (("interval", "--x", "(0, 0)", "--y", "(1, 1)"), "endpoints"),
        (("apply", "--point", "(1, 2)", "--isometry", "perm=(2 1)"), "image"),
        (("orbit", "--point", "(+inf, -inf)"), "orbit"),
    ],
)
def test_zd_operations_take_the_format_flag(cli, argv, key):
    code, out = cli("zd", *argv, "--format", "json")
    assert code == 0
    assert key in json.loads(out)


def test_zd_format_belongs_to_the_operation(cli):
    argv = ("zd", "--format", "json", "median", "--x", "(0, 0)", "--y", "(1, 1)", "--z", "(2, 2)")
    assert cli(*argv)[0] == 2


def test_corpus_passes(cli):
    code, out = cli("corpus")
    assert code == 0
    assert "tripod.json" in out
    assert "gens/tricycle.txt" in out


def test_usage_errors_exit_2(cli):
    assert cli()[0] == 2
    assert cli("median", "--in", "corpus/grid34.json")[0] == 2
    assert cli("cubulate", "--in", "corpus/tripod.json", "--format", "svg")[0] == 2


def test_wall_cap_from_environment(cli, monkeypatch):
    monkeypatch.setenv("CUBIST_MAX_WALLS", "4")
    assert cli("dimension", "--in", "corpus/grid34.json")[0] == 1
    assert cli("dimension", "--in", "corpus/grid33.json") == (0, "2\n")


def test_output_is_deterministic(cli):
    argv = ("cubulate", "--in", "corpus/cube3.txt", "--format", "json")
    assert cli(*argv) == cli(*argv)


def test_every_command_has_a_handler():
    parser = build_parser()
    commands = next(
        action.choices
        for action in parser._actions
        if isinstance(action, argparse._SubParsersAction)
    )
    for name in commands:
        assert hasattr(CubistApp, "cmd_" + name.replace("-", "_"))


TRIPOD_DOT = """graph cubist {
  "000";
  "001";
  "010";
  "100";
  "000" -- "001" [label="wc"];
  "000" -- "010" [label="wb"];
  "000" -- "100" [label="wa"];
}
"""

GRID_EMBEDDING = "N 2\n" + "".join(
    f"{x1}{x2} {x1.count('1')} {x2.count('1')}\n"
    for x1 in ("00", "10", "11")
    for x2 in ("000", "100", "110", "111")
)

TRICYCLE_REPORT = """{
  "N": 1,
  "degree": 3,
  "group_order": 6,
  "orbit_sizes": [
    6,
    2
  ],
  "witness": [
    "010",
    "101"
  ]
}
"""

SWAP_FLIP_RECIPE = """Gamma0_orbit_of_O 2
Gamma0_order 2
coset_reps_exist False
degree 2
orbit_of_O 4
counter_coset flips=01 perm=(2 1) | flips=10 perm=(2 1)
"""

DOCUMENTED_OUTPUT = {
    "cubulate --in corpus/tripod.json --format dot": TRIPOD_DOT,
    "median --in corpus/grid34.json --x 00000 --y 11110 --z 10111": "10110\n",
    "endpoints --in corpus/grid34.json --x 00000 --y 11111": "00000\n00111\n11000\n11111\n",
    "embed --in corpus/grid34.json --x 00000 --y 11111": GRID_EMBEDDING,
    'helly --in corpus/grid34.json --family "w0+,w2+,w1-"': "vertex 10100\n",
    "theorem-check --gens corpus/gens/tricycle.txt --dim 3 --format json": TRICYCLE_REPORT,
    "recipe-check --gens corpus/gens/swap_flip.txt": SWAP_FLIP_RECIPE,
    'zd median --x "(0, 5)" --y "(3, +inf)" --z "(1, 1)"': "(1, 5)\n",
    'zd orbit --point "(+inf, -inf)" --dinfty 2': (
        "(-inf, -inf)\n(-inf, +inf)\n(+inf, -inf)\n(+inf, +inf)\n"
    ),
    "corpus": None,
}


def documented_commands():
    """Every `python3 app.py ...` line in the README and the module docstring"""
    readme = (Path(__file__).resolve().parent.parent / "README.md").read_text()
    found = []
    for line in readme.splitlines() + app.__doc__.splitlines():
        line = line.strip()
        if line.startswith("python3 app.py "):
            found.append(line[len("python3 app.py "):])
    return found


def test_every_documented_command_has_a_golden_output():
    assert set(documented_commands()) == set(DOCUMENTED_OUTPUT)


@pytest.mark.parametrize("command", sorted(DOCUMENTED_OUTPUT))
def test_documented_command_output(cli, command):
    code, out = cli(*shlex.split(command))
    assert code == 0
    expected = DOCUMENTED_OUTPUT[command]
    if expected is None:
        rows = out.splitlines()
        assert rows[0].split()[:6] == ["file", "kind", "walls", "vertices", "dimension", "ok"]
        assert all("True" in row for row in rows[1:])
    else:
        assert out == expected
