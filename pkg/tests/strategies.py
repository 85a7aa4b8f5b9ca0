from hypothesis import strategies as st

from services.action_service import SignedPermutation
from services.cubulation_service import Wall, WalledSpace, cubulate
from services.zd_service import ExtInt, ZBarPoint


@st.composite
def walled_spaces(draw, max_walls: int = 6, max_points: int = 6):
    """Walled spaces on p0..pn with distinct partitions"""
    n = draw(st.integers(2, max_points))
    points = tuple(f"p{i}" for i in range(n))
    universe = frozenset(points)
    sides = draw(
        st.lists(
            st.frozensets(st.sampled_from(points), min_size=1, max_size=n - 1),
            min_size=1,
            max_size=max_walls,
        )
    )
    walls, seen = [], set()
    for side in sides:
        if side in seen or universe - side in seen:
            continue
        seen.add(side)
        walls.append(Wall(f"w{len(walls)}", side))
    return WalledSpace(points, tuple(walls))


def complexes(max_walls: int = 6, max_points: int = 6):
    return walled_spaces(max_walls, max_points).map(cubulate)


def signed_permutations(degree: int):
    flips = st.lists(st.integers(0, 1), min_size=degree, max_size=degree).map(tuple)
    perms = st.permutations(range(degree)).map(tuple)
    return st.builds(SignedPermutation, flips, perms)


def generator_sets(degree: int, max_size: int = 3):
    return st.lists(signed_permutations(degree), min_size=1, max_size=max_size)


def corners(degree: int):
    return st.lists(st.integers(0, 1), min_size=degree, max_size=degree).map(tuple)


ext_ints = st.one_of(
    st.integers(-20, 20).map(ExtInt.of),
    st.sampled_from([ExtInt.neg_inf(), ExtInt.pos_inf()]),
)


def zbar_points(dimension: int):
    return st.lists(ext_ints, min_size=dimension, max_size=dimension).map(
        lambda coords: ZBarPoint(tuple(coords))
    )
