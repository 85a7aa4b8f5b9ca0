import itertools

import pytest
from hypothesis import given

from services.cubulation_service import Orientation
from services.interval_service import (
    check_interval_invariants,
    dilworth_embed,
    endpoints,
    find_endpoints_pair,
    helly,
    interval,
    interval_between,
    is_interval,
    trichotomy,
)
from services.pocset_service import Halfspace, HalfspaceSystem, dimension
from services.roller_service import full_complex
from tests.strategies import complexes
from utils.errors import EmptyInputError, VertexNotFoundError

O = Orientation.from_bits
H = Halfspace


@pytest.fixture
def grid(corpus):
    return corpus("grid34.json")


def test_trichotomy_of_opposite_corners():
    parts = trichotomy(HalfspaceSystem(3), [O("000"), O("111")])
    assert len(parts.separating) == 6
    assert not parts.containing
    assert not parts.avoiding
    assert parts.separating_walls() == (0, 1, 2)


def test_trichotomy_of_one_point():
    parts = trichotomy(HalfspaceSystem(2), [O("10")])
    assert parts.containing == frozenset({H(0), H(1, False)})
    assert parts.avoiding == frozenset({H(0, False), H(1)})
    assert not parts.separating


def test_trichotomy_needs_points(square):
    with pytest.raises(EmptyInputError):
        trichotomy(square, [])


def test_whole_grid_is_one_interval(grid):
    result = interval(grid.system, grid.complex, O("00000"), O("11111"))
    assert len(result.members) == 12
    assert result.members == grid.complex.vertices


def test_small_grid_interval(grid):
    result = interval(grid.system, grid.complex, O("10000"), O("11110"))
    assert [v.bits for v in result.sorted_members()] == [
        "10000",
        "10100",
        "10110",
        "11000",
        "11100",
        "11110",
    ]


def test_interval_needs_vertices(grid):
    with pytest.raises(VertexNotFoundError):
        # x1 >= 2 without x1 >= 1
        interval(grid.system, grid.complex, O("01000"), O("11111"))


def test_is_interval(square):
    assert is_interval(square, [O("00"), O("01")])
    assert not is_interval(square, [O("00"), O("11")])
    assert is_interval(square, [O("00"), O("01"), O("10"), O("11")])
    assert find_endpoints_pair(square, [O("11")]) == (O("11"), O("11"))


def test_is_interval_rejects_empty(square):
    with pytest.raises(EmptyInputError):
        is_interval(square, [])


def test_grid_endpoints_are_its_corners(grid):
    result = interval(grid.system, grid.complex, O("00000"), O("11111"))
    assert sorted(v.bits for v in endpoints(grid.system, result)) == [
        "00000",
        "00111",
        "11000",
        "11111",
    ]


def test_cube_has_eight_endpoints():
    sys = HalfspaceSystem(3)
    cube = full_complex(sys)
    result = interval(sys, cube, O("000"), O("111"))
    assert len(endpoints(sys, result)) == 8


def test_tripod_interval_has_two_endpoints(corpus):
    tripod = corpus("tripod.json")
    result = interval(tripod.system, tripod.complex, O("100"), O("010"))
    assert result.members == frozenset({O("100"), O("000"), O("010")})
    assert endpoints(tripod.system, result) == frozenset({O("100"), O("010")})


def test_grid_embeds_on_its_own_coordinates(grid):
    result = interval(grid.system, grid.complex, O("00000"), O("11111"))
    embedding = dilworth_embed(grid.system, result)
    assert embedding.chain_count == 2
    assert embedding.coordinates[O("10110")] == (1, 2)
    assert embedding.coordinates[O("11111")] == (2, 3)
    assert embedding.coordinates[O("00000")] == (0, 0)
    assert [[h.name for h in chain] for chain in embedding.chains] == [
        ["w1+", "w0+"],
        ["w4+", "w3+", "w2+"],
    ]


def test_path_embeds_on_a_line(corpus):
    sys = corpus("path3.json").system
    cube = full_complex(sys)
    embedding = dilworth_embed(sys, interval(sys, cube, O("000"), O("111")))
    assert embedding.chain_count == 1
    assert sorted(embedding.coordinates.values()) == [(0,), (1,), (2,), (3,)]


def test_embedding_to_dict(square):
    cube = full_complex(square)
    data = dilworth_embed(square, interval(square, cube, O("00"), O("11"))).to_dict()
    assert data["N"] == 2
    assert data["coordinates"]["01"] == [0, 1]


@given(complexes(max_walls=4, max_points=5))
def test_interval_invariants_hold_everywhere(cube):
    sys = cube.system
    bound = dimension(sys)
    for x, y in itertools.combinations(cube.sorted_vertices(), 2):
        result = interval(sys, cube, x, y)
        check_interval_invariants(sys, result)
        assert is_interval(sys, result.members, cube)
        count = len(endpoints(sys, result))
        assert count & (count - 1) == 0
        assert count <= 2 ** bound
        embedding = dilworth_embed(sys, result)
        assert embedding.chain_count <= bound


def test_grid_helly_finds_lowest_common_vertex(grid):
    result = helly(grid.system, grid.complex, [H(0), H(2), H(1, False)])
    assert result.found
    assert result.vertex == O("10100")


def test_helly_reports_disjoint_pair(corpus):
    tripod = corpus("tripod.json")
    result = helly(tripod.system, tripod.complex, [H(0), H(1)])
    assert not result.found
    assert result.witness == (H(0), H(1))


def test_helly_reports_complementary_pair(square):
    result = helly(square, full_complex(square), [H(0), H(0, False)])
    assert result.witness == (H(0, False), H(0))


def test_tripod_facing_family_meets_at_the_centre(corpus):
    tripod = corpus("tripod.json")
    result = helly(tripod.system, tripod.complex, [H(0, False), H(1, False), H(2, False)])
    assert result.vertex == O("000")


def test_helly_of_empty_family_is_lowest_vertex(grid):
    assert helly(grid.system, grid.complex, []).vertex == O("00000")


def test_geodesic_interval_passes_through_the_tripod_centre(corpus):
    tripod = corpus("tripod.json").complex
    assert interval_between(tripod, O("100"), O("010")) == {O("100"), O("000"), O("010")}
