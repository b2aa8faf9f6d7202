"""Cubical quotients, built two independent ways, and complex isomorphism.

``cubical_quotient`` restricts every principal orientation to the hyperplanes
that are kept and cubulates the resulting wallspace. ``cut_and_glue`` removes
one hyperplane's edges and glues the two sides of its carrier together. Both
name a quotient vertex after the lexicographically smallest vertex of its
fibre.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .cubecomplex import CubeComplex
from .errors import UnknownHyperplane
from .wallspace import DEFAULT_MAX_ORIENTATIONS, cubulate_masks


@dataclass(frozen=True)
class QuotientMap:
    source: CubeComplex
    target: CubeComplex
    collapsed: frozenset[str]
    vertex_map: Mapping[str, str]
    hyperplane_map: Mapping[str, str] = field(default_factory=dict)


def _collapse_indices(x: CubeComplex, collapse: Iterable[str | int]) -> set[int]:
    out = set()
    for h in collapse:
        out.add(x.hyperplane(h).index)
    return out


def cubical_quotient(
    x: CubeComplex, collapse: Iterable[str | int], max_count: int = DEFAULT_MAX_ORIENTATIONS
) -> QuotientMap:
    """Quotient of ``x`` by the hyperplanes in ``collapse`` (ids or indices)."""
    removed = _collapse_indices(x, collapse)
    kept = [k for k in range(len(x.hyperplanes)) if k not in removed]
    masks = [x.hs[k] for k in kept]
    cub = cubulate_masks(x.names, masks, max_count)
    target = cub.complex
    where = {o: i for i, o in enumerate(cub.orientations)}
    vertex_map = {}
    for v in range(x.n):
        o = sum(1 << i for i, k in enumerate(kept) if x.orient[v] >> k & 1)
        vertex_map[x.names[v]] = target.names[where[o]]
    hyperplane_map = {
        x.hyperplanes[k].id: target.hyperplanes[cub.wall_hyperplane[i]].id for i, k in enumerate(kept)
    }
    return QuotientMap(
        x, target, frozenset(x.hyperplanes[k].id for k in removed), vertex_map, hyperplane_map
    )


def cut_and_glue(x: CubeComplex, j: str | int) -> QuotientMap:
    """Collapse one hyperplane by identifying the two sides of its carrier."""
    k = x.hyperplane(j).index
    rep = list(range(x.n))
    for e in x.hyp_edges[k]:
        p, q = x.edge_list[e]
        rep[p] = rep[q] = min(p, q, key=lambda i: x.names[i])
    name = [x.names[rep[v]] for v in range(x.n)]
    vertices = []
    seen = set()
    for v in range(x.n):
        if name[v] not in seen:
            seen.add(name[v])
            vertices.append(name[v])
    cut = set(x.hyp_edges[k])
    edges = {
        tuple(sorted((name[p], name[q])))
        for e, (p, q) in enumerate(x.edge_list)
        if e not in cut
    }
    target = CubeComplex.from_graph(vertices, sorted(edges))
    vertex_map = {x.names[v]: name[v] for v in range(x.n)}
    hyperplane_map = {}
    for h in range(len(x.hyperplanes)):
        if h == k:
            continue
        p, q = x.edge_list[x.hyp_edges[h][0]]
        hyperplane_map[x.hyperplanes[h].id] = target.hyperplane_of_edge(name[p], name[q]).id
    return QuotientMap(x, target, frozenset({x.hyperplanes[k].id}), vertex_map, hyperplane_map)


def collapse_in_sequence(x: CubeComplex, collapse: Iterable[str]) -> QuotientMap:
    """Collapse hyperplanes one at a time with :func:`cut_and_glue`."""
    ids = [x.hyperplane(h).id for h in collapse]
    current = x
    vmap = {v: v for v in x.vertices}
    hmap = {h.id: h.id for h in x.hyperplanes}
    for hid in ids:
        q = cut_and_glue(current, hmap.pop(hid))
        vmap = {v: q.vertex_map[w] for v, w in vmap.items()}
        hmap = {h: q.hyperplane_map[w] for h, w in hmap.items()}
        current = q.target
    return QuotientMap(x, current, frozenset(ids), vmap, hmap)


@dataclass(frozen=True)
class QuotientReport:
    checked_pairs: int
    counterexample_count: int
    counterexamples: tuple[tuple[str, str, int, int], ...]

    @property
    def ok(self) -> bool:
        return self.counterexample_count == 0

    def as_dict(self) -> dict:
        return {
            "checked_pairs": self.checked_pairs,
            "counterexample_count": self.counterexample_count,
            "counterexamples": [
                {"pair": [u, v], "expected": e, "target_distance": d} for u, v, e, d in self.counterexamples
            ],
        }


def verify_quotient_distance(q: QuotientMap, keep: int = 10) -> QuotientReport:
    """Check that the image distance of every vertex pair counts the separating
    hyperplanes outside the collapsed set. Counterexamples come smallest pair first."""
    x, t = q.source, q.target
    removed = 0
    for hid in q.collapsed:
        removed |= 1 << x.hyperplane(hid).index
    image = []
    for v in x.names:
        w = q.vertex_map.get(v)
        image.append(t.index.get(w, -1) if w is not None else -1)
    bad = []
    count = 0
    pairs = 0
    for u in range(x.n):
        for v in range(u + 1, x.n):
            pairs += 1
            expected = ((x.orient[u] ^ x.orient[v]) & ~removed).bit_count()
            iu, iv = image[u], image[v]
            got = (t.orient[iu] ^ t.orient[iv]).bit_count() if iu >= 0 and iv >= 0 else -1
            if got != expected:
                count += 1
                if len(bad) < keep:
                    bad.append((x.names[u], x.names[v], expected, got))
    return QuotientReport(pairs, count, tuple(bad))


def induced_isomorphism(p: QuotientMap, q: QuotientMap) -> dict[str, str] | None:
    """The map ``p.target -> q.target`` sending ``p(v)`` to ``q(v)``, if it is an isomorphism.

    Returning a map means the two quotients agree and their vertex maps commute.
    """
    if p.source is not q.source and p.source.vertices != q.source.vertices:
        return None
    phi: dict[str, str] = {}
    for v, w in p.vertex_map.items():
        if phi.setdefault(w, q.vertex_map[v]) != q.vertex_map[v]:
            return None
    if len(set(phi.values())) != len(phi) or len(phi) != q.target.n or len(phi) != p.target.n:
        return None
    return phi if _is_isomorphism(p.target, q.target, phi) else None


def _is_isomorphism(a: CubeComplex, b: CubeComplex, phi: Mapping[str, str]) -> bool:
    if a.n != b.n or len(a.edge_list) != len(b.edge_list):
        return False
    if sorted(phi) != sorted(a.vertices) or sorted(phi.values()) != sorted(b.vertices):
        return False
    return all(
        b.adj[b.index[phi[u]]] >> b.index[phi[v]] & 1 for u, v in a.edges
    )


def are_isomorphic(a: CubeComplex, b: CubeComplex) -> dict[str, str] | None:
    """An edge-preserving vertex bijection ``a -> b``, or None.

    Colour refinement on the disjoint union, then individualise a vertex of
    the first non-singleton class (smallest class first) against each
    same-coloured candidate and backtrack. The returned map is re-checked.
    """
    if a.n != b.n or len(a.edge_list) != len(b.edge_list):
        return None
    if sorted(len(x) for x in a.nbrs) != sorted(len(x) for x in b.nbrs):
        return None
    n = a.n
    nbrs = [list(x) for x in a.nbrs] + [[u + n for u in x] for x in b.nbrs]
    colours = _refine([len(x) for x in nbrs], nbrs)
    found = _search(colours, nbrs, n)
    if found is None:
        return None
    phi = {a.names[i]: b.names[j - n] for i, j in found.items()}
    return phi if _is_isomorphism(a, b, phi) else None


def _refine(colours: list[int], nbrs: list[list[int]]) -> list[int]:
    count = len(set(colours))
    while True:
        sigs = [(colours[v], tuple(sorted(colours[u] for u in nbrs[v]))) for v in range(len(nbrs))]
        palette = {s: i for i, s in enumerate(sorted(set(sigs)))}
        colours = [palette[s] for s in sigs]
        if len(palette) == count:
            return colours
        count = len(palette)


def _balanced(colours: list[int], n: int) -> bool:
    return sorted(colours[:n]) == sorted(colours[n:])


def _search(colours: list[int], nbrs: list[list[int]], n: int) -> dict[int, int] | None:
    if not _balanced(colours, n):
        return None
    cells: dict[int, list[int]] = {}
    for v in range(n):
        cells.setdefault(colours[v], []).append(v)
    open_cells = [(len(vs), c) for c, vs in cells.items() if len(vs) > 1]
    if not open_cells:
        where = {colours[w]: w for w in range(n, 2 * n)}
        mapping = {v: where[colours[v]] for v in range(n)}
        for v in range(n):
            image = {mapping[u] for u in nbrs[v]}
            if image != set(nbrs[mapping[v]]):
                return None
        return mapping
    _, cell = min(open_cells)
    v = cells[cell][0]
    fresh = max(colours) + 1
    for w in range(n, 2 * n):
        if colours[w] != cell:
            continue
        trial = list(colours)
        trial[v] = trial[w] = fresh
        found = _search(_refine(trial, nbrs), nbrs, n)
        if found is not None:
            return found
    return None


def check_collapse_ids(x: CubeComplex, ids: Iterable[str]) -> list[str]:
    out = []
    for h in ids:
        if h not in x.hyp_index:
            raise UnknownHyperplane(f"unknown hyperplane {h!r}", hyperplane=h)
        out.append(h)
    return out
