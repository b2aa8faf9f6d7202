"""Deterministic builders for test corpora.

Vertex names are part of the output contract:

* grids: comma-joined coordinates, ``"0,2"``;
* tree balls: freely reduced words over ``a, b, ...`` with upper case for
  inverses, the root being ``"e"``;
* products: ``"(u,v)"``;
* staircases: planar coordinates ``"x,y"``.
"""

from __future__ import annotations

from itertools import product as cartesian
from math import prod
from typing import Any, Mapping

from .actions import ActionSpec, Generator
from .cubecomplex import CubeComplex, validate_complex
from .errors import MalformedInput, SizeLimitExceeded
from .wallspace import Wallspace, _canonical_wall, cubulate

DEFAULT_MAX_VERTICES = 5000

MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 (Steele, Lea, Flood 2014), chosen because it is trivial to
    reproduce bit-for-bit in any language."""

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection."""
        limit = MASK64 - (MASK64 + 1) % bound
        while True:
            r = self.next()
            if r <= limit:
                return r % bound


def _cap(count: int, max_vertices: int) -> None:
    if count > max_vertices:
        raise SizeLimitExceeded(f"{count} vertices exceeds the cap of {max_vertices}", limit=max_vertices)


def grid(dims: list[int], max_vertices: int = DEFAULT_MAX_VERTICES) -> CubeComplex:
    """Box ``[0,d1] x ... x [0,dk]`` with unit cubes."""
    if not dims or any(d < 1 for d in dims):
        raise MalformedInput("grid dimensions must be positive", dims=list(dims))
    _cap(prod(d + 1 for d in dims), max_vertices)
    coords = list(cartesian(*(range(d + 1) for d in dims)))
    name = {c: ",".join(map(str, c)) for c in coords}
    edges = []
    for c in coords:
        for axis, d in enumerate(dims):
            if c[axis] < d:
                nxt = c[:axis] + (c[axis] + 1,) + c[axis + 1 :]
                edges.append((name[c], name[nxt]))
    return CubeComplex.from_graph([name[c] for c in coords], edges)


def grid_symmetries(dims: list[int]) -> ActionSpec:
    """Total automorphisms of a grid: a reflection per axis and, for each pair of
    equal axes, the quarter turn in that plane."""
    x = grid(dims)
    coords = list(cartesian(*(range(d + 1) for d in dims)))

    def name(c) -> str:
        return ",".join(map(str, c))

    gens = []
    for axis, d in enumerate(dims):
        mapping = {name(c): name(c[:axis] + (d - c[axis],) + c[axis + 1 :]) for c in coords}
        gens.append(Generator(f"r{axis}", mapping))
    for i in range(len(dims)):
        for j in range(i + 1, len(dims)):
            if dims[i] != dims[j]:
                continue
            mapping = {}
            for c in coords:
                t = list(c)
                t[i], t[j] = dims[j] - c[j], c[i]
                mapping[name(c)] = name(t)
            gens.append(Generator(f"q{i}{j}", mapping))
    return ActionSpec(x, gens)


def _letters(valence: int) -> list[str]:
    if valence < 2 or valence % 2:
        raise MalformedInput("tree valence must be even and at least 2", valence=valence)
    gens = "abcdefghijklmnopqrstuvwxyz"[: valence // 2]
    return [t for g in gens for t in (g, g.upper())]


def _inverse(t: str) -> str:
    return t.lower() if t.isupper() else t.upper()


def _times(word: str, t: str) -> str:
    return word[:-1] if word and word[-1] == _inverse(t) else word + t


def _left(t: str, word: str) -> str:
    return word[1:] if word and word[0] == _inverse(t) else t + word


def tree_ball(valence: int, radius: int, max_vertices: int = DEFAULT_MAX_VERTICES) -> tuple[CubeComplex, ActionSpec]:
    """Ball of the Cayley tree of the free group of rank ``valence/2``.

    The generators are left multiplications, restricted to where they keep the
    ball: partial translations along each generator's axis.
    """
    letters = _letters(valence)
    if radius < 1:
        raise MalformedInput("radius must be at least 1", radius=radius)
    _cap(1 + sum(valence * (valence - 1) ** (r - 1) for r in range(1, radius + 1)), max_vertices)
    layers = [[""]]
    for _ in range(radius):
        layers.append([_times(w, t) for w in layers[-1] for t in letters if not w or w[-1] != _inverse(t)])
    words = [w for layer in layers for w in layer]

    def label(w: str) -> str:
        return w or "e"

    edges = [(label(w[:-1]), label(w)) for w in words if w]
    x = CubeComplex.from_graph([label(w) for w in words], edges)
    inside = set(words)
    gens = []
    for g in letters[::2]:
        mapping = {label(w): label(_left(g, w)) for w in words if _left(g, w) in inside}
        gens.append(Generator(g, mapping, partial=True))
    return x, ActionSpec(x, gens, truncated=True)


def product(a: CubeComplex, b: CubeComplex, max_vertices: int = DEFAULT_MAX_VERTICES) -> CubeComplex:
    _cap(a.n * b.n, max_vertices)

    def name(u: str, v: str) -> str:
        return f"({u},{v})"

    vertices = [name(u, v) for u in a.vertices for v in b.vertices]
    edges = [(name(p, v), name(q, v)) for p, q in a.edges for v in b.vertices]
    edges += [(name(u, p), name(u, q)) for u in a.vertices for p, q in b.edges]
    return CubeComplex.from_graph(vertices, edges)


def point() -> CubeComplex:
    return CubeComplex.from_graph(["*"], [])


def staircase(steps: int, max_vertices: int = DEFAULT_MAX_VERTICES) -> CubeComplex:
    """Unit squares ``[i,i+1]^2`` for ``i < steps``, consecutive ones sharing a corner."""
    if steps < 1:
        raise MalformedInput("staircase needs at least one step", steps=steps)
    _cap(3 * steps + 1, max_vertices)
    vertices: list[tuple[int, int]] = []
    edges = []
    for i in range(steps):
        corners = [(i, i), (i + 1, i), (i, i + 1), (i + 1, i + 1)]
        for c in corners:
            if c not in vertices:
                vertices.append(c)
        edges += [(corners[0], corners[1]), (corners[0], corners[2]), (corners[1], corners[3]), (corners[2], corners[3])]

    def name(c: tuple[int, int]) -> str:
        return f"{c[0]},{c[1]}"

    return CubeComplex.from_graph([name(c) for c in vertices], [(name(p), name(q)) for p, q in edges])


def random_wallspace(points: int, walls: int, seed: int, max_retries: int = 64) -> Wallspace:
    """Pseudo-random wallspace on points ``p0 .. p{points-1}``.

    Each wall assigns every point a side with one SplitMix64 draw; one-sided
    and repeated walls are redrawn up to ``max_retries`` times per wall, after
    which the wallspace is returned with fewer walls and a notice.
    """
    if points < 1:
        raise MalformedInput("need at least one point", points=points)
    rng = SplitMix64(seed)
    names = [f"p{i}" for i in range(points)]
    seen = set()
    chosen = []
    notices = []
    for i in range(walls):
        for _ in range(max_retries):
            bits = [rng.below(2) for _ in names]
            a = [p for p, b in zip(names, bits) if b == 0]
            b = [p for p, b in zip(names, bits) if b == 1]
            if not a or not b:
                continue
            canon = _canonical_wall(a, b)
            if canon in seen:
                continue
            seen.add(canon)
            chosen.append(canon)
            break
        else:
            notices.append(f"wall {i}: no new wall after {max_retries} draws")
    if notices:
        notices.append(f"returned {len(chosen)} of {walls} requested walls")
    return Wallspace(tuple(names), tuple(chosen), tuple(notices))


# -- recipes -------------------------------------------------------------------


def build_recipe(recipe: Mapping[str, Any], max_vertices: int = DEFAULT_MAX_VERTICES) -> CubeComplex:
    """Build the complex described by a recipe dict (see :func:`default_corpus`)."""
    kind = recipe.get("kind")
    if kind == "grid":
        return grid(list(recipe["dims"]), max_vertices)
    if kind == "tree_ball":
        return tree_ball(int(recipe["valence"]), int(recipe["radius"]), max_vertices)[0]
    if kind == "staircase":
        return staircase(int(recipe["steps"]), max_vertices)
    if kind == "product":
        factors = [build_recipe(r, max_vertices) for r in recipe["factors"]]
        out = factors[0]
        for f in factors[1:]:
            out = product(out, f, max_vertices)
        return out
    if kind == "random_wallspace":
        w = random_wallspace(int(recipe["points"]), int(recipe["walls"]), int(recipe["seed"]))
        x = cubulate(w)
        _cap(x.n, max_vertices)
        return x
    if kind == "inline":
        return validate_complex(recipe["complex"])
    raise MalformedInput(f"unknown recipe kind {kind!r}", recipe=dict(recipe))


def recipe_name(recipe: Mapping[str, Any]) -> str:
    kind = recipe.get("kind")
    if "name" in recipe:
        return str(recipe["name"])
    if kind == "grid":
        return "grid" + "x".join(map(str, recipe["dims"]))
    if kind == "tree_ball":
        return f"tree{recipe['valence']}r{recipe['radius']}"
    if kind == "staircase":
        return f"staircase{recipe['steps']}"
    if kind == "product":
        return "*".join(recipe_name(r) for r in recipe["factors"])
    if kind == "random_wallspace":
        return f"random-p{recipe['points']}w{recipe['walls']}s{recipe['seed']}"
    return str(kind)


def default_corpus() -> list[dict[str, Any]]:
    """Recipes for the standard property corpus (every member has at most 200 vertices)."""
    recipes: list[dict[str, Any]] = []
    for dims in ([1], [2], [4], [1, 1], [2, 1], [2, 2], [3, 2], [3, 3], [4, 4],
                 [1, 1, 1], [2, 2, 2], [3, 3, 3], [4, 4, 4]):
        recipes.append({"kind": "grid", "dims": dims})
    for radius in (1, 2, 3):
        recipes.append({"kind": "tree_ball", "valence": 4, "radius": radius})
    recipes.append({"kind": "tree_ball", "valence": 6, "radius": 2})
    for steps in range(1, 6):
        recipes.append({"kind": "staircase", "steps": steps})
    edge = {"kind": "grid", "dims": [1]}
    recipes += [
        {"kind": "product", "factors": [{"kind": "tree_ball", "valence": 4, "radius": 1}, edge]},
        {"kind": "product", "factors": [{"kind": "tree_ball", "valence": 4, "radius": 2}, edge]},
        {"kind": "product", "factors": [{"kind": "tree_ball", "valence": 4, "radius": 1},
                                        {"kind": "tree_ball", "valence": 4, "radius": 1}]},
        {"kind": "product", "factors": [{"kind": "staircase", "steps": 2}, {"kind": "grid", "dims": [2]}]},
    ]
    for seed in range(50):
        recipes.append({"kind": "random_wallspace", "points": 5 + seed % 4, "walls": 3 + seed % 5, "seed": seed})
    return recipes
