from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from medianforge import (
    Orientation,
    consistent_orientations,
    cubulate,
    principal_orientation,
    validate_wallspace,
)
from medianforge.errors import EmptyPointSet, EmptySide, NotPartition, SizeLimitExceeded, UnknownPoint
from medianforge.wallspace import enumerate_orientations


def brute_force_orientations(w) -> list[Orientation]:
    """Every side assignment that obeys the inclusion rule, checked literally."""
    halves = []
    for a, b in w.walls:
        halves.append((set(a), set(b)))
    out = []
    for choice in product((0, 1), repeat=len(w.walls)):
        chosen = [halves[i][s] for i, s in enumerate(choice)]
        ok = True
        for i, s in enumerate(choice):
            for j in range(len(w.walls)):
                for t in (0, 1):
                    # chosen side inside halves[j][t] forces choosing t on wall j
                    if chosen[i] <= halves[j][t] and choice[j] != t:
                        ok = False
        if ok:
            out.append(Orientation(choice))
    return out


def test_smallest_wallspace():
    w = validate_wallspace({"points": [0, 1], "walls": [[[0], [1]]]})
    assert w.points == ("0", "1")
    assert w.walls == ((("0",), ("1",)),)


def test_overlap_is_not_a_partition():
    with pytest.raises(NotPartition):
        validate_wallspace({"points": [0, 1], "walls": [[[0], [0, 1]]]})


def test_missing_point_is_not_a_partition():
    with pytest.raises(NotPartition):
        validate_wallspace({"points": [0, 1, 2], "walls": [[[0], [1]]]})


def test_empty_side_and_empty_points():
    with pytest.raises(EmptySide):
        validate_wallspace({"points": [0, 1], "walls": [[[], [0, 1]]]})
    with pytest.raises(EmptyPointSet):
        validate_wallspace({"points": [], "walls": []})


def test_duplicate_walls_are_dropped_with_warning():
    w = validate_wallspace({"points": [0, 1, 2, 3], "walls": [[[0, 1], [2, 3]], [[2, 3], [0, 1]]]})
    assert len(w.walls) == 1
    assert len(w.warnings) == 1


def test_sides_are_canonically_ordered():
    w = validate_wallspace({"points": ["b", "a", "c"], "walls": [[["c", "b"], ["a"]]]})
    assert w.walls == ((("a",), ("b", "c")),)


def test_principal_orientation_single_wall():
    w = validate_wallspace({"points": [0, 1], "walls": [[[0], [1]]]})
    assert principal_orientation(w, 0) == Orientation((0,))
    assert principal_orientation(w, "1") == Orientation((1,))
    with pytest.raises(UnknownPoint):
        principal_orientation(w, 7)


def test_principal_orientation_crossing_walls():
    w = validate_wallspace({"points": [0, 1, 2, 3], "walls": [[[0, 1], [2, 3]], [[0, 2], [1, 3]]]})
    assert principal_orientation(w, 3) == Orientation((1, 1))
    assert principal_orientation(w, 2) == Orientation((1, 0))


def test_nested_walls_principal_chooses_both():
    w = validate_wallspace({"points": [0, 1, 2], "walls": [[[0], [1, 2]], [[0, 1], [2]]]})
    o = principal_orientation(w, 0)
    assert o == Orientation((0, 0))
    assert o in consistent_orientations(w)


@pytest.mark.parametrize(
    "raw, count",
    [
        ({"points": [0, 1], "walls": [[[0], [1]]]}, 2),
        ({"points": [0, 1, 2, 3], "walls": [[[0, 1], [2, 3]], [[0, 2], [1, 3]]]}, 4),
        ({"points": [0, 1, 2], "walls": [[[0], [1, 2]], [[0, 1], [2]]]}, 3),
    ],
)
def test_orientation_counts(raw, count):
    w = validate_wallspace(raw)
    assert len(consistent_orientations(w)) == count
    assert consistent_orientations(w) == brute_force_orientations(w)


def test_nested_rejects_inner_without_outer():
    w = validate_wallspace({"points": [0, 1, 2], "walls": [[[0], [1, 2]], [[0, 1], [2]]]})
    # choose {0} on wall 0 and {2} on wall 1: {0} is inside {0,1}, which was not chosen
    assert Orientation((0, 1)) not in consistent_orientations(w)


@pytest.mark.parametrize(
    "raw, shape",
    [
        ({"points": [0, 1], "walls": [[[0], [1]]]}, (2, 1, 0)),
        ({"points": [0, 1, 2, 3], "walls": [[[0, 1], [2, 3]], [[0, 2], [1, 3]]]}, (4, 4, 1)),
        ({"points": [0, 1, 2], "walls": [[[0], [1, 2]], [[0, 1], [2]]]}, (3, 2, 0)),
    ],
)
def test_cubulate_small(raw, shape):
    x = cubulate(validate_wallspace(raw))
    assert (x.n, len(x.edges), len(x.cubes)) == shape


def test_unseparated_points_share_a_vertex():
    x = cubulate(validate_wallspace({"points": ["a", "b", "c"], "walls": [[["a", "b"], ["c"]]]}))
    assert x.vertices == ("a", "c")
    assert x.provenance["a"] == ("a", "b")


def test_non_principal_vertex_naming():
    # any two sides of different walls share a point, so all 8 assignments are consistent
    raw = {"points": ["p", "q", "r", "s"],
           "walls": [[["p", "q"], ["r", "s"]], [["p", "r"], ["q", "s"]], [["p", "s"], ["q", "r"]]]}
    x = cubulate(raw)
    assert x.n == 8
    assert sorted(v for v in x.vertices if not v.startswith("o")) == ["p", "q", "r", "s"]
    # principal: p=000 q=011 r=101 s=110; the rest get their bit string, wall 0 first
    assert sorted(v for v in x.vertices if v.startswith("o")) == ["o001", "o010", "o100", "o111"]
    assert x.provenance == {"p": ("p",), "q": ("q",), "r": ("r",), "s": ("s",)}


def test_size_cap():
    masks = [(1 << i, ((1 << 12) - 1) ^ (1 << i)) for i in range(12)]
    assert len(enumerate_orientations(masks)) == 13
    with pytest.raises(SizeLimitExceeded):
        enumerate_orientations(masks, max_count=5)


@st.composite
def wallspaces(draw):
    n = draw(st.integers(1, 6))
    points = [f"p{i}" for i in range(n)]
    walls = []
    for _ in range(draw(st.integers(0, 7))):
        bits = draw(st.lists(st.booleans(), min_size=n, max_size=n))
        a = [p for p, b in zip(points, bits) if b]
        b = [p for p, b in zip(points, bits) if not b]
        if a and b:
            walls.append([a, b])
    return {"points": points, "walls": walls}


@settings(max_examples=150, deadline=None)
@given(wallspaces())
def test_enumeration_matches_brute_force(raw):
    w = validate_wallspace(raw)
    got = consistent_orientations(w)
    assert got == brute_force_orientations(w)
    for p in w.points:
        assert principal_orientation(w, p) in got


@settings(max_examples=100, deadline=None)
@given(wallspaces())
def test_cubulation_edges_change_one_wall(raw):
    w = validate_wallspace(raw)
    x = cubulate(w)
    assert x.n == len(consistent_orientations(w))
    # every wall splits some pair of orientations, so hyperplanes and walls correspond
    assert len(x.hyperplanes) == len(w.walls)
    principal = {principal_orientation(w, p) for p in w.points}
    assert len(x.provenance) == len(principal)
