"""Finite wallspaces and their cubulations.

Walls are stored with their sides in canonical order: each side is sorted,
and the lexicographically smaller side comes first (side ``0``). An
orientation picks side ``0`` or ``1`` for every wall.

Consistency of an orientation (choosing ``A`` with ``A`` inside ``B`` forces
``B``) is equivalent to the chosen sides pairwise intersecting, which is how
it is checked and enumerated here.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Any, Iterable, Mapping, Sequence

from .errors import (
    EmptyPointSet,
    EmptySide,
    MalformedInput,
    NotPartition,
    SizeLimitExceeded,
    UnknownPoint,
)

if TYPE_CHECKING:
    from .cubecomplex import CubeComplex

DEFAULT_MAX_ORIENTATIONS = 100_000


@dataclass(frozen=True)
class Orientation:
    """One side (0 or 1) per wall, indexed like the walls."""

    choice: tuple[int, ...]

    @classmethod
    def from_bits(cls, bits: int, size: int) -> "Orientation":
        return cls(tuple((bits >> i) & 1 for i in range(size)))

    @cached_property
    def bits(self) -> int:
        out = 0
        for i, s in enumerate(self.choice):
            if s:
                out |= 1 << i
        return out

    def __len__(self) -> int:
        return len(self.choice)

    def flip(self, wall: int) -> "Orientation":
        c = list(self.choice)
        c[wall] ^= 1
        return Orientation(tuple(c))

    def differs_on(self, other: "Orientation") -> list[int]:
        return [i for i, (a, b) in enumerate(zip(self.choice, other.choice)) if a != b]

    def __str__(self) -> str:
        return "".join(map(str, self.choice))


@dataclass(frozen=True)
class Wallspace:
    points: tuple[str, ...]
    walls: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @cached_property
    def point_index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def side_masks(self) -> list[tuple[int, int]]:
        idx = self.point_index
        out = []
        for a, b in self.walls:
            out.append((sum(1 << idx[p] for p in a), sum(1 << idx[p] for p in b)))
        return out

    def to_json(self) -> dict[str, Any]:
        return {"points": list(self.points), "walls": [[list(a), list(b)] for a, b in self.walls]}


def _canonical_wall(a: Iterable[str], b: Iterable[str]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    sa, sb = tuple(sorted(a)), tuple(sorted(b))
    return (sa, sb) if sa <= sb else (sb, sa)


def _scalar(v: Any) -> bool:
    return isinstance(v, (str, int)) and not isinstance(v, bool)


def validate_wallspace(raw: Mapping[str, Any] | Wallspace) -> Wallspace:
    """Normalise ``{"points": [...], "walls": [[sideA, sideB], ...]}``.

    Duplicate walls (the same partition, in either order) are dropped and a
    warning is recorded on the result.
    """
    if isinstance(raw, Wallspace):
        raw = raw.to_json()
    if not isinstance(raw, Mapping) or "points" not in raw:
        raise MalformedInput("wallspace needs 'points' and 'walls'")
    if not isinstance(raw["points"], list) or not isinstance(raw.get("walls", []), list):
        raise MalformedInput("'points' and 'walls' must be lists")
    if any(not _scalar(p) for p in raw["points"]):
        raise MalformedInput("point names must be strings or integers")
    points = [str(p) for p in raw["points"]]
    if not points:
        raise EmptyPointSet("wallspace has no points")
    if len(set(points)) != len(points):
        raise MalformedInput("duplicate point identifiers")
    universe = set(points)
    walls = []
    seen: dict[tuple, int] = {}
    warnings = []
    for i, wall in enumerate(raw.get("walls", [])):
        if not isinstance(wall, (list, tuple)) or len(wall) != 2:
            raise MalformedInput(f"wall {i} is not a pair of sides", wall=i)
        if not all(isinstance(side, list) and all(_scalar(p) for p in side) for side in wall):
            raise MalformedInput(f"wall {i}: each side must be a list of point names", wall=i)
        a = [str(p) for p in wall[0]]
        b = [str(p) for p in wall[1]]
        if not a or not b:
            raise EmptySide(f"wall {i} has an empty side", wall=i)
        sa, sb = set(a), set(b)
        unknown = (sa | sb) - universe
        if unknown:
            raise NotPartition(f"wall {i} mentions unknown points {sorted(unknown)}", wall=i)
        overlap = sa & sb
        if overlap:
            raise NotPartition(f"wall {i}: sides overlap on {sorted(overlap)}", wall=i)
        missing = universe - sa - sb
        if missing:
            raise NotPartition(f"wall {i}: points {sorted(missing)} on neither side", wall=i)
        canon = _canonical_wall(sa, sb)
        if canon in seen:
            warnings.append(f"wall {i} duplicates wall {seen[canon]}; dropped")
            continue
        seen[canon] = i
        walls.append(canon)
    return Wallspace(tuple(points), tuple(walls), tuple(warnings))


def principal_orientation(w: Wallspace, p: Any) -> Orientation:
    """Orientation choosing, for every wall, the side that contains ``p``."""
    p = str(p)
    if p not in w.point_index:
        raise UnknownPoint(f"unknown point {p!r}", point=p)
    bit = 1 << w.point_index[p]
    return Orientation(tuple(0 if a & bit else 1 for a, _ in w.side_masks))


def _disjointness(masks: Sequence[tuple[int, int]]) -> list[list[int]]:
    """For each halfspace ``2*i+s``, the halfspaces of other walls disjoint from it."""
    flat = [m for pair in masks for m in pair]
    out = []
    for h, m in enumerate(flat):
        out.append([g for g, q in enumerate(flat) if g >> 1 != h >> 1 and not m & q])
    return out


def enumerate_orientations(
    masks: Sequence[tuple[int, int]], max_count: int = DEFAULT_MAX_ORIENTATIONS
) -> list[int]:
    """All consistent orientations of the given walls as bitsets, in lexicographic order.

    Depth-first over walls in order, side 0 first. Choosing a halfspace forces
    the opposite side of every wall that has a side disjoint from it; this is
    a 2-SAT system, so a propagated partial assignment without conflict always
    extends and the search never dead-ends.
    """
    k = len(masks)
    if k == 0:
        return [0]
    disjoint = _disjointness(masks)
    out: list[int] = []

    def propagate(assign: list[int], h: int) -> bool:
        stack = [h]
        while stack:
            cur = stack.pop()
            for g in disjoint[cur]:
                wall, need = g >> 1, (g & 1) ^ 1
                have = assign[wall]
                if have < 0:
                    assign[wall] = need
                    stack.append(2 * wall + need)
                elif have != need:
                    return False
        return True

    def search(assign: list[int], start: int) -> None:
        i = start
        while i < k and assign[i] >= 0:
            i += 1
        if i == k:
            if len(out) >= max_count:
                raise SizeLimitExceeded(
                    f"more than {max_count} consistent orientations", limit=max_count
                )
            out.append(sum(1 << j for j in range(k) if assign[j]))
            return
        for side in (0, 1):
            trial = list(assign)
            trial[i] = side
            if propagate(trial, 2 * i + side):
                search(trial, i + 1)

    limit = sys.getrecursionlimit()
    if k + 100 > limit:
        sys.setrecursionlimit(k + 100)
    search([-1] * k, 0)
    return out


def consistent_orientations(w: Wallspace, max_count: int = DEFAULT_MAX_ORIENTATIONS) -> list[Orientation]:
    k = len(w.walls)
    return [Orientation.from_bits(b, k) for b in enumerate_orientations(w.side_masks, max_count)]


@dataclass(frozen=True)
class Cubulation:
    """A cubulation together with the orientation behind each vertex."""

    complex: "CubeComplex"
    orientations: tuple[int, ...]
    wall_hyperplane: tuple[int, ...]


def cubulate_masks(
    point_names: Sequence[str],
    masks: Sequence[tuple[int, int]],
    max_count: int = DEFAULT_MAX_ORIENTATIONS,
) -> Cubulation:
    """Cubulate walls given as bitset pairs over ``point_names``.

    Principal vertices come first, in the order of their first point, and are
    named after the lexicographically smallest point they come from. The other
    orientations follow in lexicographic order with an ``o``-prefixed bit string.
    """
    from .cubecomplex import CubeComplex

    k = len(masks)
    fibres: dict[int, list[str]] = {}
    for p, name in enumerate(point_names):
        o = sum(1 << i for i, (a, _) in enumerate(masks) if not a >> p & 1)
        fibres.setdefault(o, []).append(name)
    found = enumerate_orientations(masks, max_count)
    orients = list(fibres) + [o for o in found if o not in fibres]
    where = {o: i for i, o in enumerate(orients)}

    used = set(point_names)
    names = []
    provenance = {}
    for o in orients:
        if o in fibres:
            name = min(fibres[o])
            provenance[name] = sorted(fibres[o])
        else:
            name = "o" + "".join(str((o >> i) & 1) for i in range(k))
            while name in used:
                name = "_" + name
        used.add(name)
        names.append(name)

    edges = []
    edge_wall = {}
    for i, o in enumerate(orients):
        for wall in range(k):
            j = where.get(o ^ (1 << wall))
            if j is not None and j > i:
                edges.append((names[i], names[j]))
                edge_wall.setdefault(wall, (names[i], names[j]))

    x = CubeComplex.from_graph(names, edges, provenance)
    wall_hyp = tuple(x.hyperplane_of_edge(*edge_wall[wall]).index for wall in range(k))
    return Cubulation(x, tuple(orients), wall_hyp)


def cubulate(w: Wallspace, max_count: int = DEFAULT_MAX_ORIENTATIONS) -> "CubeComplex":
    """Dual cube complex of a finite wallspace.

    Vertices are the consistent orientations, edges join orientations that
    differ on exactly one wall, and every induced cube one-skeleton is filled.
    Points that no wall separates collapse to one vertex; ``provenance`` maps
    each principal vertex to the points it comes from.
    """
    if not isinstance(w, Wallspace):
        w = validate_wallspace(w)
    return cubulate_masks(w.points, w.side_masks, max_count).complex
