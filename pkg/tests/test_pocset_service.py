import itertools

import pytest
from hypothesis import given

from services.pocset_service import (
    Halfspace,
    HalfspaceSystem,
    PairRelation,
    classify_pair,
    dimension,
    has_facing_triple,
    irreducible_components,
    is_facing_triple,
    product,
    transversality_graph,
    validate_system,
)
from tests.strategies import complexes
from utils.config import reset_config
from utils.errors import FormatError, RepeatedWallError, UnknownWallError, WallLimitError
from utils.formats import system_from_dict

H = Halfspace


def test_halfspace_complement_is_a_fixed_point_free_involution():
    h = H(3)
    assert ~h == H(3, False)
    assert ~~h == h
    assert ~h != h
    assert h.name == "w3+"
    assert H.parse("w3-") == H(3, False)


def test_halfspace_parse_rejects_garbage():
    with pytest.raises(FormatError):
        H.parse("3+")


def test_single_wall_is_valid():
    assert validate_system(HalfspaceSystem(1)) == []


def test_halfspace_below_its_complement_is_one_violation():
    sys = HalfspaceSystem(1, [(H(0), H(0, False))])
    violations = validate_system(sys)
    assert len(violations) == 1
    assert violations[0].startswith("complement")


def test_missing_dual_containment_is_one_violation():
    sys = HalfspaceSystem(2, [(H(0), H(1))])
    violations = validate_system(sys)
    assert len(violations) == 1
    assert violations[0].startswith("involution")


def test_from_generators_closes_order(corpus):
    sys = corpus("path3.json").system
    assert sys.leq(H(2), H(0))
    assert sys.leq(H(0, False), H(2, False))
    assert validate_system(sys) == []


def test_nested_thresholds_contain(path2):
    # h = {n >= 1}, k = {n >= 2}
    assert classify_pair(path2, H(0), H(1)) is PairRelation.FIRST_CONTAINS_SECOND
    assert classify_pair(path2, H(1), H(0)) is PairRelation.SECOND_CONTAINS_FIRST


def test_square_walls_are_transverse(square):
    assert classify_pair(square, H(0), H(1)) is PairRelation.TRANSVERSE


def test_equal_and_complementary(square):
    assert classify_pair(square, H(0), H(0)) is PairRelation.EQUAL
    assert classify_pair(square, H(0), H(0, False)) is PairRelation.COMPLEMENTARY


def test_tripod_relations(corpus):
    sys = corpus("tripod.json").system
    assert classify_pair(sys, H(0), H(1)) is PairRelation.DISJOINT
    assert classify_pair(sys, H(0, False), H(1, False)) is PairRelation.FACING


def test_classify_rejects_unknown_wall(square):
    with pytest.raises(UnknownWallError):
        classify_pair(square, H(0), H(5))


@given(complexes(max_walls=5))
def test_classification_mirrors(cube):
    sys = cube.system
    for h, k in itertools.product(sys.halfspaces(), repeat=2):
        assert classify_pair(sys, k, h) is classify_pair(sys, h, k).mirror


def test_tripod_outward_triple_faces(corpus):
    sys = corpus("tripod.json").system
    assert is_facing_triple(sys, H(0, False), H(1, False), H(2, False))
    assert has_facing_triple(sys, sys.halfspaces())


def test_facing_triple_needs_distinct_walls(corpus):
    sys = corpus("tripod.json").system
    with pytest.raises(RepeatedWallError):
        is_facing_triple(sys, H(0), H(0, False), H(1))


def test_grid_has_no_facing_triple(corpus):
    sys = corpus("grid34.json").system
    assert not has_facing_triple(sys, sys.halfspaces())


@pytest.mark.parametrize(
    "name, expected",
    [("path3.json", 1), ("grid33.json", 2), ("cube3.json", 3), ("tripod_x_edge.json", 2)],
)
def test_dimension(corpus, name, expected):
    assert dimension(corpus(name).system) == expected


def test_dimension_of_empty_system():
    assert dimension(HalfspaceSystem(0)) == 0


def test_dimension_respects_wall_cap(monkeypatch):
    monkeypatch.setenv("CUBIST_MAX_WALLS", "2")
    reset_config()
    with pytest.raises(WallLimitError):
        dimension(HalfspaceSystem(3))


def test_transversality_graph_of_cube_is_complete(corpus):
    graph = transversality_graph(corpus("cube3.json").system)
    assert graph.number_of_edges() == 3


def test_irreducible_components(square, path2, corpus):
    assert irreducible_components(square) == ((0,), (1,))
    assert irreducible_components(path2) == ((0, 1),)
    assert irreducible_components(corpus("grid33.json").system) == ((0, 1), (2, 3))


def test_edge_times_edge_is_square(square):
    edge = HalfspaceSystem(1)
    assert product(edge, edge) == square


def test_path_times_path_is_grid(path2, corpus):
    grid = product(path2, path2)
    assert grid == corpus("grid33.json").system
    assert dimension(grid) == 2


@given(complexes(max_walls=4), complexes(max_walls=4))
def test_product_is_additive(a, b):
    joined = product(a.system, b.system)
    assert dimension(joined) == dimension(a.system) + dimension(b.system)
    assert len(irreducible_components(joined)) == len(
        irreducible_components(a.system)
    ) + len(irreducible_components(b.system))


def test_pocset_json_round_trip(corpus):
    sys = corpus("tripod_x_edge.json").system
    again = system_from_dict(sys.to_dict())
    assert again == sys
    assert again.wall_names == sys.wall_names
