from itertools import permutations

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import to_nx
from medianforge import (
    ActionSpec,
    Generator,
    contracting_witness,
    double_skewer_search,
    facing_tuples,
    median_trap,
    median_vertex,
    orbit,
    replay_witness,
)
from medianforge.actions import ABSENT, FOUND, INCONCLUSIVE
from medianforge.errors import (
    EmptyDomain,
    InvalidAction,
    NotNested,
    SearchExhausted,
    UnknownVertex,
    XiInsideTwoOuters,
)
from medianforge.generators import grid, grid_symmetries, tree_ball
from medianforge.lattice import FacingTuple


# -- free group oracle -------------------------------------------------------------


def reduce(word: str) -> str:
    out = []
    for ch in word:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def inverse(word: str) -> str:
    return "".join(ch.swapcase() for ch in reversed(word))


def tree_dist(u: str, v: str) -> int:
    return len(reduce(inverse(u) + v))


def word_of(name: str) -> str:
    return "" if name == "e" else name


def in_half(v: str, edge: tuple[str, str]) -> bool:
    """v lies on the side of directed edge p->q that contains q (infinite tree)."""
    p, q = edge
    return tree_dist(v, q) < tree_dist(v, p)


def strictly_inside(inner: tuple[str, str], outer: tuple[str, str]) -> bool:
    """H(inner) is a proper subset of H(outer) in the infinite tree."""
    if {*inner} == {*outer}:
        return False
    return in_half(inner[1], outer) and not in_half(outer[0], inner)


def directed_edge(x, hs_id: str) -> tuple[str, str]:
    k, side = x.halfspace_index(hs_id)
    p, q = next(iter(x.hyperplanes[k].edges))
    inside = x.hs[k][side]
    if inside >> x.index[p] & 1:
        p, q = q, p
    return word_of(p), word_of(q)


def halfspace_toward(x, p: str, q: str) -> str:
    k = x.hyperplane_of_edge(p, q).index
    side = 0 if x.hs[k][0] >> x.index[q] & 1 else 1
    return x.halfspace_id(k, side)


# -- ActionSpec --------------------------------------------------------------------


def test_rejects_bad_generators():
    x = grid([1, 1])
    ident = {v: v for v in x.vertices}
    with pytest.raises(InvalidAction):
        ActionSpec(x, [Generator("s", {**ident, "0,0": "1,1"})])
    with pytest.raises(InvalidAction):
        ActionSpec(x, [Generator("s", {"0,0": "0,0"})])
    # the anti-diagonal reflection is a genuine symmetry
    flip = {"0,0": "1,1", "1,1": "0,0", "0,1": "0,1", "1,0": "1,0"}
    ActionSpec(x, [Generator("s", flip)])
    path = grid([2])
    with pytest.raises(InvalidAction):
        ActionSpec(path, [Generator("s", {"0": "1", "1": "0", "2": "2"})])
    with pytest.raises(InvalidAction):
        ActionSpec(x, [Generator("s", {"0,0": "0,0", "1,1": "1,1"}, partial=True)])
    with pytest.raises(InvalidAction):
        ActionSpec(x, [Generator("s", {"0,0": "zz"}, partial=True)])


def test_word_round_trip():
    _, a = tree_ball(4, 2)
    for text in ("1", "a", "aB", "BBa"):
        assert a.format_word(a.parse_word(text)) == text
    g = grid_symmetries([2, 2])
    w = g.parse_word("r0.q01^-1")
    assert w == (("r0", 1), ("q01", -1))
    assert g.format_word(w) == "r0.q01^-1"
    with pytest.raises(InvalidAction):
        a.parse_word("c")


def test_words_are_reduced_and_ordered():
    _, a = tree_ball(4, 2)
    words = [a.format_word(w) for w in a.words(2)]
    assert len(words) == 12
    assert words[:3] == ["aa", "ab", "aB"]
    assert "aA" not in words


# -- orbits ------------------------------------------------------------------------


def test_identity_orbit():
    x = grid([1, 1])
    a = ActionSpec(x, [Generator("i", {v: v for v in x.vertices})])
    res = orbit(a, "0,1", 3)
    assert res.vertices == ("0,1",) and res.certified


def test_rotation_orbit():
    a = grid_symmetries([1, 1])
    rot = ActionSpec(a.complex, [a.generators["q01"]])
    res = orbit(rot, "0,0", 4)
    assert set(res.vertices) == {"0,0", "0,1", "1,0", "1,1"} and res.certified


def test_tree_orbit_inconclusive():
    x, a = tree_ball(4, 3)
    res = orbit(a, "e", 3)
    assert res.status == INCONCLUSIVE
    assert len(res.vertices) == x.n


def test_orbit_unknown_vertex():
    _, a = tree_ball(4, 1)
    with pytest.raises(UnknownVertex):
        orbit(a, "zz", 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 4), st.sampled_from(["e", "a", "Ab", "bb"]))
def test_orbit_monotone(k, v):
    _, a = tree_ball(4, 3)
    assert set(orbit(a, v, k).vertices) <= set(orbit(a, v, k + 1).vertices)
    # free group oracle: g.v for reduced g of length <= k, kept when the path stays in the ball
    expect = {v}
    frontier = {v}
    for _ in range(k):
        step = set()
        for u in frontier:
            for ch in "aAbB":
                w = reduce(ch + word_of(u)) or "e"
                if len(word_of(w)) <= 3:
                    step.add(w)
        frontier = step - expect
        expect |= step
    assert set(orbit(a, v, k).vertices) == expect


# -- contracting witnesses ------------------------------------------------------------


def test_identity_has_no_witness():
    x, a = tree_ball(4, 2)
    res = contracting_witness(a, "1", 3)
    assert res.witness is None
    res = contracting_witness(a, "aA", 3)
    assert res.witness is None


@pytest.mark.parametrize("radius", [2, 3])
@pytest.mark.parametrize("g", ["a", "b", "A", "B"])
def test_tree_translation_witness(radius, g):
    x, a = tree_ball(4, radius)
    res = contracting_witness(a, g, search_depth=4)
    assert res.status == FOUND
    w = res.witness
    assert all(replay_witness(a, w).values())
    assert w.base == g and w.element == g * w.power
    inner, outer = directed_edge(x, w.inner), directed_edge(x, w.outer)
    assert strictly_inside(inner, outer)
    p, q = outer
    gw = word_of(w.element) if w.element != "1" else ""
    image = (reduce(gw + p), reduce(gw + q))
    assert strictly_inside(image, inner)


def test_power_propagates():
    x, a = tree_ball(4, 3)
    one = contracting_witness(a, "a", 4).witness
    two = contracting_witness(a, "aa", 4).witness
    assert one is not None and two is not None
    assert two.power == 1 and two.element == "aa"


def test_grid_symmetries_have_no_witness():
    for dims in ([2, 2], [3, 3], [2, 2, 2]):
        a = grid_symmetries(dims)
        for length in (1, 2):
            for word in a.words(length):
                res = contracting_witness(a, word, 3)
                assert res.witness is None and res.status in (ABSENT, INCONCLUSIVE)


def test_empty_domain():
    _, a = tree_ball(4, 1)
    with pytest.raises(EmptyDomain):
        contracting_witness(a, "aaa", 1)


# -- double skewer -----------------------------------------------------------------


def test_skewer_along_axis():
    x, a = tree_ball(4, 3)
    outer = halfspace_toward(x, "e", "a")
    inner = halfspace_toward(x, "a", "aa")
    res = double_skewer_search(a, inner, outer, 3)
    assert res.status == FOUND and res.word == "aa"
    # brute force in the free group: no shorter word pushes the outer halfspace strictly inside
    o = directed_edge(x, outer)
    i = directed_edge(x, inner)
    for length in (1,):
        for word in a.words(length):
            g = a.format_word(word)
            assert not strictly_inside((reduce(g + o[0]), reduce(g + o[1])), i)
    assert strictly_inside((reduce("aa" + o[0]), reduce("aa" + o[1])), i)


def test_skewer_equal_halfspaces_rejects_identity():
    x, a = tree_ball(4, 2)
    b = halfspace_toward(x, "e", "a")
    res = double_skewer_search(a, b, b, 2)
    assert res.word not in ("1", "")
    if res.word is not None:
        o = directed_edge(x, b)
        assert strictly_inside((reduce(res.word + o[0]), reduce(res.word + o[1])), o)


def test_skewer_without_generators():
    x = grid([2, 2])
    res = double_skewer_search(ActionSpec(x, []), "h0+", "h0+", 3)
    assert res.word is None and res.status == ABSENT


def test_skewer_not_nested():
    x, a = tree_ball(4, 2)
    with pytest.raises(NotNested):
        double_skewer_search(a, halfspace_toward(x, "a", "e"), halfspace_toward(x, "e", "a"), 2)


# -- median trap -------------------------------------------------------------------


def root_quads(x):
    root = x.index["e"]
    return [q for q in facing_tuples(x, 4) if all(x.carrier(k) >> root & 1 for k in q.hyperplanes)]


@pytest.mark.parametrize("radius", [2, 3])
def test_median_trap_at_root(radius):
    x, a = tree_ball(4, radius)
    quads = root_quads(x)
    assert len(quads) == 1
    t = median_trap(a, quads[0], "e", 2)
    assert t.mu == "e" and t.bound_ok and t.bound == 0
    assert all(len(w) == 1 for w in t.words)


def test_median_trap_bound_against_networkx():
    x, a = tree_ball(4, 3)
    g = to_nx(x)
    d = dict(nx.all_pairs_shortest_path_length(g))
    for q in facing_tuples(x, 4)[:40]:
        for xi in ("e", "a", "Ab"):
            try:
                t = median_trap(a, q, xi, 2)
            except (SearchExhausted, XiInsideTwoOuters):
                continue
            ends = [{v for e in x.hyperplane(h).edges for v in e} for h in t.hyperplanes]
            bound = sum(min(d[xi][v] for v in c) for c in ends)
            assert t.bound == bound
            assert d[xi][t.mu] <= bound
            for p in permutations(t.images):
                assert median_vertex(x, *p) == t.mu


def test_median_trap_relabels():
    x, a = tree_ball(4, 2)
    (q,) = root_quads(x)
    t = median_trap(a, q, "a", 2)
    a_hyp = x.hyperplane_of_edge("e", "a").id
    assert a_hyp not in t.hyperplanes
    assert len(t.hyperplanes) == 3


def test_median_trap_errors():
    x, a = tree_ball(4, 2)
    (q,) = root_quads(x)
    with pytest.raises(SearchExhausted):
        median_trap(a, q, "e", 0)
    flipped = FacingTuple(q.hyperplanes, tuple(1 - s for s in q.outer_sides))
    with pytest.raises(XiInsideTwoOuters):
        median_trap(a, flipped, "e", 2)
