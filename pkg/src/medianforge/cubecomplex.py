"""Finite CAT(0) cube complexes given by their one-skeleton.

A :class:`CubeComplex` is built once by :func:`validate_complex`, which checks
connectivity, the link (flag) condition and the median property, then derives
cubes, hyperplanes and halfspaces. Everything afterwards is a pure query.

Vertex sets are stored internally as Python ints used as bitsets over the
canonical vertex order (input order). Names are only used at the API surface.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from .errors import (
    Disconnected,
    FlagViolation,
    InconsistentInput,
    MalformedInput,
    NotMedian,
    UnknownHyperplane,
    UnknownVertex,
    ValidationError,
)
from .wallspace import Orientation

SIDE_MARK = ("+", "-")


def bits_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class UnionFind:
    """Disjoint sets over ``range(n)`` with path halving and union by size."""

    def __init__(self, n: int) -> None:
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


@dataclass(frozen=True)
class Hyperplane:
    """An edge-parallelism class together with the two halfspaces it bounds.

    ``halfspaces[0]`` (the ``+`` side) always contains the first vertex of the
    complex in canonical order.
    """

    id: str
    index: int
    edges: tuple[tuple[str, str], ...]
    halfspaces: tuple[frozenset[str], frozenset[str]]

    def halfspace_id(self, side: int) -> str:
        return f"{self.id}{SIDE_MARK[side]}"


class CubeComplex:
    """Validated one-skeleton of a finite CAT(0) cube complex.

    Do not instantiate directly; use :func:`validate_complex` or
    :meth:`CubeComplex.from_graph`.

    Index-level attributes (used by the other modules):

    ``n``             number of vertices
    ``nbrs[i]``       sorted neighbour indices
    ``adj[i]``        neighbour bitset
    ``edge_list``     sorted ``(i, j)`` pairs with ``i < j``
    ``edge_hyp[e]``   hyperplane index of edge ``e``
    ``hs[k]``         ``(side0_mask, side1_mask)`` of hyperplane ``k``
    ``orient[i]``     bit ``k`` set iff vertex ``i`` lies on side 1 of ``k``
    ``dist[i][j]``    graph distance
    """

    def __init__(self) -> None:  # pragma: no cover - guarded constructor
        raise TypeError("use validate_complex() or CubeComplex.from_graph()")

    @classmethod
    def from_graph(
        cls,
        vertices: Sequence[Any],
        edges: Iterable[Sequence[Any]],
        provenance: Mapping[Any, Any] | None = None,
    ) -> "CubeComplex":
        self = object.__new__(cls)
        self._build(vertices, edges, provenance)
        return self

    # -- construction -----------------------------------------------------

    def _build(self, vertices, edges, provenance) -> None:
        names = [str(v) for v in vertices]
        if not names:
            raise MalformedInput("complex has no vertices")
        index: dict[str, int] = {}
        for i, name in enumerate(names):
            if name in index:
                raise MalformedInput(f"duplicate vertex {name!r}", vertex=name)
            index[name] = i
        n = len(names)
        adj = [0] * n
        pairs = set()
        for edge in edges:
            if len(edge) != 2:
                raise MalformedInput(f"edge {edge!r} is not a pair")
            a, b = (str(e) for e in edge)
            for end in (a, b):
                if end not in index:
                    raise UnknownVertex(f"edge endpoint {end!r} is not a vertex", vertex=end)
            i, j = index[a], index[b]
            if i == j:
                raise MalformedInput(f"loop at {a!r}", vertex=a)
            if i > j:
                i, j = j, i
            pairs.add((i, j))
            adj[i] |= 1 << j
            adj[j] |= 1 << i

        self.names = tuple(names)
        self.index = index
        self.n = n
        self.adj = adj
        self.nbrs = [bits_of(m) for m in adj]
        self.edge_list = sorted(pairs)
        self.edge_index = {e: k for k, e in enumerate(self.edge_list)}
        self.full_mask = (1 << n) - 1

        self._check_connected()
        self.cube_masks = self._cubes_and_links()
        self.dist = [self._bfs(s) for s in range(n)]
        self.intervals = self._intervals()
        self._check_medians()
        self._derive_hyperplanes()

        prov: dict[str, tuple[str, ...]] = {}
        for key, value in (provenance or {}).items():
            key = str(key)
            if key not in index:
                raise UnknownVertex(f"provenance for unknown vertex {key!r}", vertex=key)
            if isinstance(value, (list, tuple, set, frozenset)):
                prov[key] = tuple(str(v) for v in value)
            else:
                prov[key] = (str(value),)
        self.provenance = {k: prov[k] for k in names if k in prov}

    def _bfs(self, src: int) -> list[int]:
        dist = [-1] * self.n
        dist[src] = 0
        queue = deque([src])
        nbrs = self.nbrs
        while queue:
            v = queue.popleft()
            for u in nbrs[v]:
                if dist[u] < 0:
                    dist[u] = dist[v] + 1
                    queue.append(u)
        return dist

    def _check_connected(self) -> None:
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            for v in bits_of(frontier):
                nxt |= self.adj[v]
            frontier = nxt & ~seen
            seen |= frontier
        if seen != self.full_mask:
            missing = bits_of(self.full_mask & ~seen)[0]
            raise Disconnected(
                f"vertex {self.names[missing]!r} is not reachable from {self.names[0]!r}",
                vertex=self.names[missing],
                root=self.names[0],
            )

    def _cubes_and_links(self) -> list[int]:
        """Check every vertex link is a simplicial flag complex and collect cubes.

        The link of ``v`` has one vertex per edge at ``v`` and a simplex per
        cube corner at ``v``. A triangle, or two squares sharing two
        consecutive edges, makes the link non-simplicial; a set of edges
        pairwise spanning squares without spanning a cube breaks the flag
        condition.
        """
        adj = self.adj
        cubes: set[int] = set()
        for v in range(self.n):
            ns = self.nbrs[v]
            link = [0] * len(ns)
            for i, u in enumerate(ns):
                for j in range(i + 1, len(ns)):
                    w = ns[j]
                    if adj[u] >> w & 1:
                        raise FlagViolation(
                            f"triangle {self.names[v]!r}-{self.names[u]!r}-{self.names[w]!r}:"
                            " the link is not a simplicial complex",
                            vertex=self.names[v],
                            link=[self.names[u], self.names[w]],
                            reason="triangle",
                        )
                    common = adj[u] & adj[w] & ~(1 << v)
                    count = common.bit_count()
                    if count >= 2:
                        raise FlagViolation(
                            f"edges {self.names[v]!r}-{self.names[u]!r} and"
                            f" {self.names[v]!r}-{self.names[w]!r} span {count} squares",
                            vertex=self.names[v],
                            link=[self.names[u], self.names[w]],
                            reason="double square",
                        )
                    if count == 1:
                        link[i] |= 1 << j
                        link[j] |= 1 << i

            def extend(clique: list[int], candidates: int) -> None:
                if len(clique) >= 2:
                    cubes.add(self._span_cube(v, [ns[i] for i in clique]))
                while candidates:
                    low = candidates & -candidates
                    i = low.bit_length() - 1
                    candidates ^= low
                    extend(clique + [i], candidates & link[i])

            for i in range(len(ns)):
                # only grow cliques upward to visit each one once
                extend([i], link[i] & ~((1 << (i + 1)) - 1))
        return sorted(cubes, key=lambda m: (m.bit_count(), m))

    def _span_cube(self, v: int, corner: list[int]) -> int:
        adj = self.adj
        k = len(corner)
        pts = [0] * (1 << k)
        pts[0] = v
        for i, u in enumerate(corner):
            pts[1 << i] = u

        def fail() -> FlagViolation:
            return FlagViolation(
                f"edges at {self.names[v]!r} towards"
                f" {[self.names[u] for u in corner]} pairwise span squares but no {k}-cube",
                vertex=self.names[v],
                link=[self.names[u] for u in corner],
                reason="missing cube",
            )

        for s in range(3, 1 << k):
            if s & (s - 1) == 0:
                continue
            low = s & -s
            rest = s ^ low
            second = rest & -rest
            common = adj[pts[s ^ low]] & adj[pts[s ^ second]] & ~(1 << pts[rest ^ second])
            if common.bit_count() != 1:
                raise fail()
            t = common.bit_length() - 1
            for b in bits_of(s):
                if not adj[t] >> pts[s ^ (1 << b)] & 1:
                    raise fail()
            pts[s] = t
        mask = 0
        for p in pts:
            mask |= 1 << p
        if mask.bit_count() != 1 << k:
            raise fail()
        inner = sum((adj[p] & mask).bit_count() for p in pts) // 2
        if inner != k << (k - 1):
            raise fail()
        return mask

    def _intervals(self) -> list[list[int]]:
        n, dist, nbrs = self.n, self.dist, self.nbrs
        out = []
        for a in range(n):
            da = dist[a]
            row = [0] * n
            for b in sorted(range(n), key=da.__getitem__):
                m = 1 << b
                db = da[b] - 1
                for c in nbrs[b]:
                    if da[c] == db:
                        m |= row[c]
                row[b] = m
            out.append(row)
        return out

    def _check_medians(self) -> None:
        n, iv = self.n, self.intervals
        for a in range(n):
            ia = iv[a]
            for b in range(a + 1, n):
                iab = ia[b]
                ib = iv[b]
                for c in range(b + 1, n):
                    m = iab & ia[c] & ib[c]
                    if not m or m & (m - 1):
                        found = [self.names[i] for i in bits_of(m)]
                        raise NotMedian(
                            f"triple ({self.names[a]!r}, {self.names[b]!r}, {self.names[c]!r})"
                            f" has {len(found)} medians",
                            triple=[self.names[a], self.names[b], self.names[c]],
                            medians=found,
                        )

    def _derive_hyperplanes(self) -> None:
        uf = UnionFind(len(self.edge_list))
        eidx = self.edge_index

        def key(a: int, b: int) -> int:
            return eidx[(a, b) if a < b else (b, a)]

        for cube in self.cube_masks:
            if cube.bit_count() != 4:
                continue
            v, *rest = bits_of(cube)
            u, w = [p for p in rest if self.adj[v] >> p & 1]
            (x,) = [p for p in rest if p not in (u, w)]
            uf.union(key(v, u), key(w, x))
            uf.union(key(v, w), key(u, x))

        classes: dict[int, list[int]] = {}
        for e in range(len(self.edge_list)):
            classes.setdefault(uf.find(e), []).append(e)
        ordered = sorted(classes.values(), key=lambda es: es[0])

        self.edge_hyp = [0] * len(self.edge_list)
        self.hs: list[tuple[int, int]] = []
        self.hyp_edges: list[list[int]] = []
        self.orient = [0] * self.n
        hyperplanes = []
        for k, es in enumerate(ordered):
            for e in es:
                self.edge_hyp[e] = k
            cut = {self.edge_list[e] for e in es}
            side0 = self._component(0, cut)
            side1 = self.full_mask & ~side0
            a, b = self.edge_list[es[0]]
            if not side1 or self._component(bits_of(side1)[0], cut) != side1:
                raise ValidationError(
                    f"hyperplane h{k} does not cut the complex into two components",
                    hyperplane=f"h{k}",
                )
            for e in es:
                a, b = self.edge_list[e]
                if (side0 >> a & 1) == (side0 >> b & 1):
                    raise ValidationError(f"edge of h{k} does not cross it", hyperplane=f"h{k}")
            for side in (side0, side1):
                if not self._is_convex(side):
                    raise ValidationError(f"halfspace of h{k} is not convex", hyperplane=f"h{k}")
            for i in bits_of(side1):
                self.orient[i] |= 1 << k
            self.hs.append((side0, side1))
            self.hyp_edges.append(es)
            hyperplanes.append(
                Hyperplane(
                    id=f"h{k}",
                    index=k,
                    edges=tuple(
                        (self.names[self.edge_list[e][0]], self.names[self.edge_list[e][1]]) for e in es
                    ),
                    halfspaces=(self.names_of(side0), self.names_of(side1)),
                )
            )
        self._hyperplanes = tuple(hyperplanes)
        self.hyp_index = {h.id: h.index for h in hyperplanes}
        self.vertex_of_orient = {o: i for i, o in enumerate(self.orient)}

    def _component(self, start: int, cut: set[tuple[int, int]]) -> int:
        seen = 1 << start
        stack = [start]
        while stack:
            v = stack.pop()
            for u in self.nbrs[v]:
                if seen >> u & 1:
                    continue
                if (min(u, v), max(u, v)) in cut:
                    continue
                seen |= 1 << u
                stack.append(u)
        return seen

    def _is_convex(self, mask: int) -> bool:
        members = bits_of(mask)
        for a in members:
            row = self.intervals[a]
            for b in members:
                if row[b] & ~mask:
                    return False
        return True

    # -- name-level accessors ---------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.names

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return tuple((self.names[a], self.names[b]) for a, b in self.edge_list)

    @property
    def hyperplanes(self) -> tuple[Hyperplane, ...]:
        return self._hyperplanes

    @property
    def cubes(self) -> tuple[frozenset[str], ...]:
        return tuple(self.names_of(m) for m in self.cube_masks)

    def names_of(self, mask: int) -> frozenset[str]:
        return frozenset(self.names[i] for i in bits_of(mask))

    def mask_of(self, names: Iterable[str]) -> int:
        m = 0
        for v in names:
            m |= 1 << self.vertex_index(v)
        return m

    def sorted_names(self, mask: int) -> list[str]:
        return [self.names[i] for i in bits_of(mask)]

    def vertex_index(self, v: Any) -> int:
        try:
            return self.index[str(v)]
        except KeyError:
            raise UnknownVertex(f"unknown vertex {v!r}", vertex=str(v)) from None

    def hyperplane(self, hid: str | int) -> Hyperplane:
        if isinstance(hid, int):
            if 0 <= hid < len(self._hyperplanes):
                return self._hyperplanes[hid]
        elif hid in self.hyp_index:
            return self._hyperplanes[self.hyp_index[hid]]
        raise UnknownHyperplane(f"unknown hyperplane {hid!r}", hyperplane=str(hid))

    def hyperplane_of_edge(self, u: str, v: str) -> Hyperplane:
        a, b = self.vertex_index(u), self.vertex_index(v)
        key = (min(a, b), max(a, b))
        if key not in self.edge_index:
            raise UnknownVertex(f"{u!r} and {v!r} are not adjacent", edge=[u, v])
        return self._hyperplanes[self.edge_hyp[self.edge_index[key]]]

    def neighbors(self, v: str) -> list[str]:
        return [self.names[u] for u in self.nbrs[self.vertex_index(v)]]

    def halfspace_index(self, hsid: str) -> tuple[int, int]:
        """Parse ``'h3+'`` / ``'h3-'`` into ``(hyperplane index, side)``."""
        if not hsid or hsid[-1] not in SIDE_MARK:
            raise UnknownHyperplane(f"bad halfspace id {hsid!r}", halfspace=hsid)
        k = self.hyperplane(hsid[:-1]).index
        return k, SIDE_MARK.index(hsid[-1])

    def halfspace_id(self, k: int, side: int) -> str:
        return f"h{k}{SIDE_MARK[side]}"

    def halfspace(self, hsid: str) -> frozenset[str]:
        k, side = self.halfspace_index(hsid)
        return self.names_of(self.hs[k][side])

    def orientation(self, v: str) -> Orientation:
        """Principal orientation of a vertex."""
        return Orientation.from_bits(self.orient[self.vertex_index(v)], len(self._hyperplanes))

    def vertex_at(self, o: Orientation) -> str | None:
        """Vertex whose principal orientation is ``o``, if any."""
        i = self.vertex_of_orient.get(o.bits)
        return None if i is None else self.names[i]

    def is_consistent(self, o: Orientation) -> bool:
        if len(o.choice) != len(self._hyperplanes):
            return False
        chosen = [self.hs[k][s] for k, s in enumerate(o.choice)]
        for i in range(len(chosen)):
            for j in range(i + 1, len(chosen)):
                if not chosen[i] & chosen[j]:
                    return False
        return True

    def carrier(self, k: int) -> int:
        m = 0
        for e in self.hyp_edges[k]:
            a, b = self.edge_list[e]
            m |= (1 << a) | (1 << b)
        return m

    def interval(self, u: str, v: str) -> frozenset[str]:
        """Vertices on some geodesic from ``u`` to ``v``."""
        return self.names_of(self.intervals[self.vertex_index(u)][self.vertex_index(v)])

    def __repr__(self) -> str:
        return (
            f"CubeComplex(vertices={self.n}, edges={len(self.edge_list)},"
            f" hyperplanes={len(self._hyperplanes)}, dim={dimension(self)})"
        )


def validate_complex(g: Mapping[str, Any] | CubeComplex) -> CubeComplex:
    """Validate a graph description ``{"vertices": [...], "edges": [[u, v], ...]}``.

    Raises :class:`Disconnected`, :class:`FlagViolation` or :class:`NotMedian`
    with a witness when the graph is not the one-skeleton of a CAT(0) cube
    complex. Local link failures are reported before the global median check.
    """
    if isinstance(g, CubeComplex):
        return g
    if not isinstance(g, Mapping) or "vertices" not in g or "edges" not in g:
        raise MalformedInput("complex description needs 'vertices' and 'edges'")
    vertices, edges = g["vertices"], g["edges"]
    if not isinstance(vertices, list) or not isinstance(edges, list):
        raise MalformedInput("'vertices' and 'edges' must be lists")
    if any(not isinstance(e, (list, tuple)) for e in edges):
        raise MalformedInput("every edge must be a pair")
    labels = list(vertices) + [v for e in edges for v in e]
    if any(not isinstance(v, (str, int)) or isinstance(v, bool) for v in labels):
        raise MalformedInput("vertex names must be strings or integers")
    provenance = g.get("provenance")
    if provenance is not None and not isinstance(provenance, Mapping):
        raise MalformedInput("'provenance' must map vertices to point lists")
    return CubeComplex.from_graph(vertices, edges, provenance)


def hyperplanes(x: CubeComplex) -> list[Hyperplane]:
    return list(x.hyperplanes)


def distance(x: CubeComplex, u: str, v: str) -> int:
    """Number of hyperplanes separating ``u`` and ``v``."""
    return (x.orient[x.vertex_index(u)] ^ x.orient[x.vertex_index(v)]).bit_count()


def separating_hyperplanes(x: CubeComplex, u: str, v: str) -> list[Hyperplane]:
    diff = x.orient[x.vertex_index(u)] ^ x.orient[x.vertex_index(v)]
    return [x.hyperplanes[k] for k in bits_of(diff)]


def median(x: CubeComplex, a: Orientation, b: Orientation, c: Orientation) -> Orientation:
    """Majority vote of three consistent orientations, hyperplane by hyperplane."""
    for name, o in (("a", a), ("b", b), ("c", c)):
        if not x.is_consistent(o):
            raise InconsistentInput(f"orientation {name} is not consistent", argument=name)
    ab, bb, cb = a.bits, b.bits, c.bits
    return Orientation.from_bits((ab & bb) | (bb & cb) | (ab & cb), len(x.hyperplanes))


def median_vertex(x: CubeComplex, u: str, v: str, w: str) -> str:
    """Median of three vertices, by majority vote on their principal orientations.

    Principal orientations are consistent by construction, so the checks done
    by :func:`median` are skipped.
    """
    i, j, k = (x.vertex_index(t) for t in (u, v, w))
    return x.names[median_index(x, i, j, k)]


def median_index(x: CubeComplex, a: int, b: int, c: int) -> int:
    oa, ob, oc = x.orient[a], x.orient[b], x.orient[c]
    return x.vertex_of_orient[(oa & ob) | (ob & oc) | (oa & oc)]


def dimension(x: CubeComplex) -> int:
    """Largest k such that the complex contains a k-cube."""
    if x.cube_masks:
        return x.cube_masks[-1].bit_count().bit_length() - 1
    return 1 if x.edge_list else 0


def transverse(x: CubeComplex, j: int, h: int) -> bool:
    """True when all four quarter-spaces of hyperplanes ``j`` and ``h`` are non-empty."""
    if j == h:
        return False
    return all(p & q for p in x.hs[j] for q in x.hs[h])


def transverse_dimension(x: CubeComplex) -> int:
    """Size of the largest family of pairwise transverse hyperplanes."""
    m = len(x.hyperplanes)
    nb = [0] * m
    for j in range(m):
        for h in range(j + 1, m):
            if transverse(x, j, h):
                nb[j] |= 1 << h
                nb[h] |= 1 << j
    best = 0

    def grow(size: int, candidates: int) -> None:
        nonlocal best
        if size + candidates.bit_count() <= best:
            return
        if not candidates:
            best = size
            return
        while candidates:
            if size + candidates.bit_count() <= best:
                return
            low = candidates & -candidates
            candidates ^= low
            grow(size + 1, candidates & nb[low.bit_length() - 1])

    grow(0, (1 << m) - 1)
    return best
