"""Relations among hyperplanes: transversality, strong separation, nesting,
facing tuples and strongly separated halfspace chains."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .cubecomplex import CubeComplex, bits_of, transverse


@dataclass(frozen=True)
class HyperplaneRelationTable:
    """Pairwise relations, stored as one bitset row per hyperplane / halfspace.

    Halfspace ``2*k + side`` is side ``side`` of hyperplane ``k``;
    ``inclusion[p]`` has bit ``q`` set when halfspace ``p`` is contained in ``q``.
    """

    hyperplane_ids: tuple[str, ...]
    transverse: tuple[int, ...]
    strongly_separated: tuple[int, ...]
    inclusion: tuple[int, ...]

    def is_transverse(self, j: int, h: int) -> bool:
        return bool(self.transverse[j] >> h & 1)

    def is_strongly_separated(self, j: int, h: int) -> bool:
        return bool(self.strongly_separated[j] >> h & 1)

    def includes(self, p: int, q: int) -> bool:
        """Halfspace ``p`` is contained in halfspace ``q``."""
        return bool(self.inclusion[p] >> q & 1)

    def transverse_pairs(self) -> list[tuple[int, int]]:
        return [(j, h) for j, row in enumerate(self.transverse) for h in bits_of(row) if j < h]

    def strongly_separated_pairs(self) -> list[tuple[int, int]]:
        return [(j, h) for j, row in enumerate(self.strongly_separated) for h in bits_of(row) if j < h]


def relation_table(x: CubeComplex) -> HyperplaneRelationTable:
    m = len(x.hyperplanes)
    trans = [0] * m
    for j in range(m):
        for h in range(j + 1, m):
            if transverse(x, j, h):
                trans[j] |= 1 << h
                trans[h] |= 1 << j
    ss = [0] * m
    for j in range(m):
        for h in range(j + 1, m):
            if not trans[j] >> h & 1 and not trans[j] & trans[h]:
                ss[j] |= 1 << h
                ss[h] |= 1 << j
    flat = [mask for pair in x.hs for mask in pair]
    inclusion = [0] * len(flat)
    for p, a in enumerate(flat):
        for q, b in enumerate(flat):
            if not a & ~b:
                inclusion[p] |= 1 << q
    return HyperplaneRelationTable(
        tuple(h.id for h in x.hyperplanes), tuple(trans), tuple(ss), tuple(inclusion)
    )


@dataclass(frozen=True)
class FacingTuple:
    """Hyperplanes (by index) and, for each, the outer halfspace side."""

    hyperplanes: tuple[int, ...]
    outer_sides: tuple[int, ...]

    def outer(self, i: int) -> int:
        """Halfspace index (``2*k + side``) of member ``i``'s outer halfspace."""
        return 2 * self.hyperplanes[i] + self.outer_sides[i]

    def ids(self, x: CubeComplex) -> dict[str, list[str]]:
        return {
            "hyperplanes": [x.hyperplanes[k].id for k in self.hyperplanes],
            "outer": [x.halfspace_id(k, s) for k, s in zip(self.hyperplanes, self.outer_sides)],
        }


def side_table(x: CubeComplex, table: HyperplaneRelationTable) -> list[list[int]]:
    """``side[j][h]``: side of ``j`` containing every edge of ``h`` (-1 if transverse or equal)."""
    m = len(x.hyperplanes)
    carriers = [x.carrier(k) for k in range(m)]
    side = [[-1] * m for _ in range(m)]
    for j in range(m):
        s0 = x.hs[j][0]
        for h in range(m):
            if h == j or table.is_transverse(j, h):
                continue
            side[j][h] = 0 if not carriers[h] & ~s0 else 1
    return side


def facing_tuples(x: CubeComplex, k: int, require_ss: bool = False) -> list[FacingTuple]:
    """k-sets of pairwise non-transverse hyperplanes none of which separates two others.

    Each member's outer halfspace is its side that contains no other member.
    Results are sorted by hyperplane indices.
    """
    if k < 2:
        raise ValueError("facing tuples need k >= 2")
    table = relation_table(x)
    side = side_table(x, table)
    m = len(x.hyperplanes)
    allowed = [
        (table.strongly_separated[j] if require_ss else ~table.transverse[j] & ((1 << m) - 1)) & ~(1 << j)
        for j in range(m)
    ]
    out: list[FacingTuple] = []

    def grow(members: list[int], inner: list[int], candidates: int) -> None:
        if len(members) == k:
            outer = tuple(s ^ 1 for s in inner)
            _assert_disjoint_outer(x, members, outer)
            out.append(FacingTuple(tuple(members), outer))
            return
        while candidates:
            low = candidates & -candidates
            h = low.bit_length() - 1
            candidates ^= low
            if len(members) + 1 + candidates.bit_count() < k:
                return
            new_inner = []
            ok = True
            for j, s in zip(members, inner):
                t = side[j][h]
                if s >= 0 and t != s:
                    ok = False
                    break
                new_inner.append(t)
            if not ok:
                continue
            sides_of_h = {side[h][j] for j in members}
            if len(sides_of_h) > 1:
                continue
            h_inner = sides_of_h.pop() if sides_of_h else -1
            grow(members + [h], new_inner + [h_inner], candidates & allowed[h])

    for j in range(m):
        grow([j], [-1], allowed[j] & ~((1 << (j + 1)) - 1))
    return out


def _assert_disjoint_outer(x: CubeComplex, members: list[int], outer: tuple[int, ...]) -> None:
    halves = [x.hs[j][s] for j, s in zip(members, outer)]
    for a, b in combinations(halves, 2):
        assert not a & b, "outer halfspaces of a facing tuple must be disjoint"


def ss_chains(x: CubeComplex, length: int) -> list[tuple[int, ...]]:
    """Strictly decreasing halfspace chains with pairwise strongly separated boundaries.

    Returns every chain of exactly ``length`` halfspaces (as halfspace indices),
    outermost first, in lexicographic order.
    """
    if length < 1:
        raise ValueError("chain length must be positive")
    flat = [mask for pair in x.hs for mask in pair]
    if length == 1:
        return [(p,) for p in range(len(flat))]
    table = relation_table(x)
    below = [0] * len(flat)
    for p, a in enumerate(flat):
        for q, b in enumerate(flat):
            if p >> 1 != q >> 1 and table.is_strongly_separated(p >> 1, q >> 1) and not b & ~a:
                below[p] |= 1 << q
    out: list[tuple[int, ...]] = []

    def walk(chain: list[int], candidates: int) -> None:
        if len(chain) == length:
            out.append(tuple(chain))
            return
        for q in bits_of(candidates):
            walk(chain + [q], candidates & below[q])

    for p in range(len(flat)):
        walk([p], below[p])
    return out


def chain_proxy_vertex(x: CubeComplex, chain: tuple[int, ...]) -> str:
    """First vertex (canonical order) of the innermost halfspace of a chain."""
    inner = x.hs[chain[-1] >> 1][chain[-1] & 1]
    return x.names[bits_of(inner)[0]]
