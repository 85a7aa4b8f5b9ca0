import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from services.action_service import WallAutomorphism, automorphism_orbits
from services.cubulation_service import Orientation, median_closure
from services.lifting_service import (
    Measure,
    consistent_set,
    equivariance_check,
    halfspace_mass,
    invariant_interval,
    invariant_measure_from_orbit,
    is_consistent,
    is_interval_measure,
    lift,
    majority_halfspaces,
    measure_interval,
    median,
    median_by_distance_sum,
    median_by_intervals,
)
from services.pocset_service import Halfspace, HalfspaceSystem
from services.roller_service import full_complex
from tests.strategies import complexes
from utils.errors import (
    InconsistentSetError,
    InvalidMeasureError,
    NotInvariantError,
    VertexNotFoundError,
)
from utils.formats import load_json, measure_from_dict

O = Orientation.from_bits
H = Halfspace


@pytest.fixture
def grid(corpus):
    return corpus("grid34.json")


@pytest.fixture
def cube3():
    sys = HalfspaceSystem(3)
    return sys, full_complex(sys)


def load_measure(corpus_dir, name):
    return measure_from_dict(load_json(corpus_dir / "measures" / name))


def test_consistency_needs_up_closure(grid):
    assert is_consistent(grid.system, [H(0), H(1, False)])
    assert not is_consistent(grid.system, [H(1)])
    assert is_consistent(grid.system, [H(1), H(0)])
    assert not is_consistent(grid.system, [H(2), H(2, False)])
    assert is_consistent(grid.system, [])


def test_consistent_set_rejects_bad_input(grid):
    with pytest.raises(InconsistentSetError):
        consistent_set(grid.system, [H(1)])


def test_lift_one_column_of_the_grid(grid):
    lifted = lift(grid.system, grid.complex, [H(0), H(1, False)])
    assert lifted.selection.ordered() == (2, 3, 4)
    assert lifted.system.wall_names == ("x2>=1", "x2>=2", "x2>=3")
    assert sorted(v.bits for v in lifted.vertices) == ["000", "100", "110", "111"]
    assert sorted(v.bits for v in lifted.image) == ["10000", "10100", "10110", "10111"]
    assert lifted.embed(O("110")) == O("10110")


def test_lift_of_nothing_is_everything(grid):
    lifted = lift(grid.system, grid.complex, [])
    assert lifted.image == grid.complex.vertices
    assert lifted.system == grid.system


@given(complexes(max_walls=5), st.data())
def test_lift_is_an_isometric_embedding(cube, data):
    sys = cube.system
    vertex = data.draw(st.sampled_from(cube.sorted_vertices()))
    walls = data.draw(st.sets(st.integers(0, sys.wall_count - 1)))
    members = set()
    for wall in walls:
        members |= sys.up_set(H(wall, vertex.sides[wall]))
    lifted = lift(sys, cube, members)
    assert vertex in lifted.image
    assert {lifted.embed(e) for e in lifted.vertices} == set(lifted.image)


def test_equivariant_lift(cube3):
    sys, cube = cube3
    swap = WallAutomorphism.from_wall_map(sys, [0, 2, 1])
    assert equivariance_check(sys, cube, [H(0)], [swap])


def test_equivariance_needs_an_invariant_set(cube3):
    sys, cube = cube3
    swap = WallAutomorphism.from_wall_map(sys, [1, 0, 2])
    with pytest.raises(NotInvariantError):
        equivariance_check(sys, cube, [H(0)], [swap])


def test_face_measure(corpus_dir, cube3):
    sys, cube = cube3
    mu = load_measure(corpus_dir, "face.json")
    plus, balanced = majority_halfspaces(sys, mu)
    assert plus == frozenset({H(0)})
    assert balanced == frozenset({H(1), H(1, False), H(2), H(2, False)})
    result = measure_interval(sys, cube, mu)
    assert sorted(v.bits for v in result.members) == ["100", "101", "110", "111"]
    assert is_interval_measure(sys, cube, mu)


def test_leaves_of_a_path_span_the_path(corpus_dir, corpus):
    sys = corpus("path3.json").system
    cube = full_complex(sys)
    mu = load_measure(corpus_dir, "path_leaves.json")
    assert len(measure_interval(sys, cube, mu).members) == 4


def test_dirac_measure_is_a_point(grid):
    result = measure_interval(grid.system, grid.complex, Measure.dirac(O("10110")))
    assert result.members == frozenset({O("10110")})


def test_halfspace_mass(corpus_dir):
    mu = load_measure(corpus_dir, "face.json")
    assert halfspace_mass(mu, H(0)) == 1
    assert halfspace_mass(mu, H(1, False)) == Fraction(1, 2)
    assert halfspace_mass(mu, H(0, False)) == 0


@pytest.mark.parametrize(
    "weights",
    [
        {"00": Fraction(1, 2)},
        {"00": Fraction(3, 2), "11": Fraction(-1, 2)},
        {"000": Fraction(1)},
    ],
)
def test_invalid_measures(square, weights):
    mu = Measure.from_weights({O(k): v for k, v in weights.items()})
    with pytest.raises(InvalidMeasureError):
        majority_halfspaces(square, mu)


def test_measure_on_an_inconsistent_point(grid):
    with pytest.raises(InvalidMeasureError):
        majority_halfspaces(grid.system, Measure.dirac(O("01000")))


def test_measure_support_must_lie_in_the_complex(square):
    edge = median_closure(square, [O("00"), O("01")])
    with pytest.raises(VertexNotFoundError):
        measure_interval(square, edge, Measure.dirac(O("10")))


def test_measure_weights_merge():
    mu = Measure.from_weights({O("01"): Fraction(1, 4), O("10"): Fraction(3, 4)})
    assert mu.points() == (O("01"), O("10"))
    assert mu.to_dict() == {
        "atoms": [{"vertex": "01", "weight": "1/4"}, {"vertex": "10", "weight": "3/4"}]
    }


def test_uniform_orbit_measure_spans_the_square(square):
    rotation = WallAutomorphism.from_wall_map(square, [1, 0], [0, 1])
    orbit = [O("00")]
    while rotation.apply(orbit[-1]) != orbit[0]:
        orbit.append(rotation.apply(orbit[-1]))
    assert [v.bits for v in orbit] == ["00", "10", "11", "01"]
    mu = invariant_measure_from_orbit(orbit)
    assert all(weight == Fraction(1, 4) for _, weight in mu.support)
    assert len(measure_interval(square, full_complex(square), mu).members) == 4


def test_grid_median(grid):
    x, y, z = O("00000"), O("11110"), O("10111")
    assert median(grid.system, grid.complex, x, y, z) == O("10110")
    assert median_by_intervals(grid.complex, x, y, z) == O("10110")
    assert median_by_distance_sum(grid.complex, x, y, z) == O("10110")


def test_median_needs_vertices(grid):
    with pytest.raises(VertexNotFoundError):
        median(grid.system, grid.complex, O("00000"), O("11111"), O("01000"))


@given(complexes(max_walls=4, max_points=5))
def test_median_oracles_agree(cube):
    for x, y, z in itertools.combinations_with_replacement(cube.sorted_vertices(), 3):
        m = median(cube.system, cube, x, y, z)
        assert median_by_intervals(cube, x, y, z) == m
        assert median_by_distance_sum(cube, x, y, z) == m


def test_orbit_interval_is_fixed_by_the_path_flip(corpus):
    sys = corpus("path3.json").system
    flip = WallAutomorphism.from_wall_map(sys, [2, 1, 0], [1, 1, 1])
    found = invariant_interval(sys, full_complex(sys), [O("100"), O("110")], [flip])
    assert found.members == {O("100"), O("110")}


def test_orbit_interval_is_fixed_by_the_square_rotation(square):
    cube = full_complex(square)
    rotation = WallAutomorphism.from_wall_map(square, [1, 0], [0, 1])
    orbit = automorphism_orbits(square, cube, [rotation], O("00"))
    found = invariant_interval(square, cube, orbit, [rotation])
    assert found.members == cube.vertices
    assert {rotation.apply(v) for v in found.members} == found.members


def test_orbit_interval_needs_an_invariant_orbit(square):
    rotation = WallAutomorphism.from_wall_map(square, [1, 0], [0, 1])
    with pytest.raises(NotInvariantError):
        invariant_interval(square, full_complex(square), [O("00")], [rotation])
