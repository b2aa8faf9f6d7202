"""Generators acting on a complex: orbits, strongly contracting witnesses,
double-skewer searches and the three-translate median trap.

Group elements are words over named generators and their formal inverses. A
word ``t1 t2 ... tk`` acts on a vertex right to left, as ``t1(t2(...tk(v)))``.
Partial generators (truncations of an ambient action to a ball) are only
applied where they are defined; any search that runs into an undefined image
or a word-length cutoff reports ``inconclusive`` rather than ``absent``.

The image of a halfspace ``B`` under a word is taken to be the halfspace
bounded by the image of one of ``B``'s edges, on the side of the image of its
inner endpoint. For total automorphisms that is exact; for partial ones it is
what the ambient isometry does to ``B``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import product
from typing import Any, Iterator, Mapping

from .cubecomplex import CubeComplex, bits_of, median_index, transverse
from .errors import (
    EmptyDomain,
    InvalidAction,
    NotNested,
    SearchExhausted,
    UnknownVertex,
    XiInsideTwoOuters,
)
from .lattice import FacingTuple, relation_table

FOUND, ABSENT, INCONCLUSIVE = "found", "absent", "inconclusive"

Letter = tuple[str, int]
Word = tuple[Letter, ...]


@dataclass(frozen=True)
class Generator:
    name: str
    mapping: Mapping[str, str]
    partial: bool = False


class ActionSpec:
    """Named generators acting on a complex by (partial) isometries."""

    def __init__(
        self,
        complex: CubeComplex,
        generators: Mapping[str, Generator] | list[Generator],
        truncated: bool | None = None,
    ) -> None:
        if not isinstance(generators, Mapping):
            generators = {g.name: g for g in generators}
        self.complex = complex
        self.generators = dict(sorted(generators.items()))
        self.truncated = any(g.partial for g in self.generators.values()) if truncated is None else truncated
        self.table: dict[Letter, list[int]] = {}
        for name, gen in self.generators.items():
            fwd = self._compile(gen)
            inv = [-1] * complex.n
            for i, j in enumerate(fwd):
                if j >= 0:
                    inv[j] = i
            self.table[(name, 1)] = fwd
            self.table[(name, -1)] = inv
        self.letters: list[Letter] = sorted(self.table, key=lambda t: (t[0], t[1] < 0))
        self.compact = all(len(n) == 1 and n.islower() for n in self.generators)

    def _compile(self, gen: Generator) -> list[int]:
        x = self.complex
        fwd = [-1] * x.n
        for src, dst in gen.mapping.items():
            try:
                i, j = x.vertex_index(src), x.vertex_index(dst)
            except UnknownVertex as err:
                raise InvalidAction(f"generator {gen.name!r}: {err}", generator=gen.name) from None
            fwd[i] = j
        domain = [i for i in range(x.n) if fwd[i] >= 0]
        if not domain:
            raise InvalidAction(f"generator {gen.name!r} has an empty domain", generator=gen.name)
        if len({fwd[i] for i in domain}) != len(domain):
            raise InvalidAction(f"generator {gen.name!r} is not injective", generator=gen.name)
        if not gen.partial and len(domain) != x.n:
            raise InvalidAction(f"total generator {gen.name!r} is not defined everywhere", generator=gen.name)
        dmask = sum(1 << i for i in domain)
        for i in domain:
            for j in domain:
                if i < j and bool(x.adj[i] >> j & 1) != bool(x.adj[fwd[i]] >> fwd[j] & 1):
                    raise InvalidAction(
                        f"generator {gen.name!r} does not preserve adjacency of"
                        f" {x.names[i]!r}, {x.names[j]!r}",
                        generator=gen.name,
                        pair=[x.names[i], x.names[j]],
                    )
        if gen.partial:
            image = sum(1 << fwd[i] for i in domain)
            for label, mask in (("domain", dmask), ("image", image)):
                if not _convex(x, mask):
                    raise InvalidAction(f"generator {gen.name!r}: {label} is not convex", generator=gen.name)
        return fwd

    # -- words ------------------------------------------------------------

    def format_word(self, word: Word) -> str:
        if not word:
            return "1"
        if self.compact:
            return "".join(n if e > 0 else n.upper() for n, e in word)
        return ".".join(n if e > 0 else f"{n}^-1" for n, e in word)

    def parse_word(self, text: str) -> Word:
        text = text.strip()
        if text in ("", "1"):
            return ()
        if "." in text or "^" in text or not self.compact:
            tokens = text.split(".") if ("." in text or "^" in text) else [text]
            word = []
            for tok in tokens:
                name, exp = (tok[:-3], -1) if tok.endswith("^-1") else (tok, 1)
                if name not in self.generators:
                    raise InvalidAction(f"unknown generator {name!r} in word {text!r}", word=text)
                word.append((name, exp))
            return tuple(word)
        word = []
        for ch in text:
            if ch in self.generators:
                word.append((ch, 1))
            elif ch.lower() in self.generators:
                word.append((ch.lower(), -1))
            else:
                raise InvalidAction(f"unknown generator {ch!r} in word {text!r}", word=text)
        return tuple(word)

    def apply(self, word: Word, v: int) -> int:
        """Image of vertex index ``v``, or -1 where the word is undefined."""
        for letter in reversed(word):
            v = self.table[letter][v]
            if v < 0:
                return -1
        return v

    def as_map(self, word: Word) -> list[int]:
        return [self.apply(word, v) for v in range(self.complex.n)]

    def words(self, length: int) -> Iterator[Word]:
        """Freely reduced words of the given length, in lexicographic order."""
        for word in product(self.letters, repeat=length):
            if all(word[i][0] != word[i + 1][0] or word[i][1] == word[i + 1][1] for i in range(length - 1)):
                yield word

    def image_halfspace(self, mapping: list[int], k: int, side: int) -> tuple[int, int] | None:
        """Image of halfspace ``(k, side)`` under a vertex map, or None if undetermined."""
        x = self.complex
        inside = x.hs[k][side]
        for e in x.hyp_edges[k]:
            p, q = x.edge_list[e]
            gp, gq = mapping[p], mapping[q]
            if gp < 0 or gq < 0:
                continue
            key = (min(gp, gq), max(gp, gq))
            if key not in x.edge_index:
                return None
            kk = x.edge_hyp[x.edge_index[key]]
            inner = gp if inside >> p & 1 else gq
            return kk, 0 if x.hs[kk][0] >> inner & 1 else 1
        return None

    def image_is_consistent(self, mapping: list[int], source: int, target: int) -> bool:
        for v in bits_of(source):
            if mapping[v] >= 0 and not target >> mapping[v] & 1:
                return False
        return True

    def closure_is_finite(self, max_len: int) -> bool:
        """True when the generated group (total generators only) closes within ``max_len``."""
        if self.truncated:
            return False
        n = self.complex.n
        seen = {tuple(range(n))}
        frontier = list(seen)
        for _ in range(max_len):
            nxt = []
            for perm in frontier:
                for letter in self.letters:
                    t = self.table[letter]
                    q = tuple(t[v] for v in perm)
                    if q not in seen:
                        seen.add(q)
                        nxt.append(q)
            if not nxt:
                return True
            frontier = nxt
        return False


def _convex(x: CubeComplex, mask: int) -> bool:
    members = bits_of(mask)
    for a in members:
        row = x.intervals[a]
        for b in members:
            if row[b] & ~mask:
                return False
    return True


# -- orbits -----------------------------------------------------------------


@dataclass(frozen=True)
class OrbitResult:
    vertices: tuple[str, ...]
    certified: bool
    reason: str

    @property
    def status(self) -> str:
        return "bounded" if self.certified else INCONCLUSIVE


def orbit(a: ActionSpec, v: str, max_word_len: int) -> OrbitResult:
    """Images of ``v`` under all words of length at most ``max_word_len``.

    ``certified`` means the set is closed under every generator and inverse,
    each defined on all of it: a genuine bounded orbit.
    """
    x = a.complex
    start = x.vertex_index(v)
    seen = 1 << start
    frontier = [start]
    for _ in range(max_word_len):
        nxt = []
        for u in frontier:
            for letter in a.letters:
                w = a.table[letter][u]
                if w >= 0 and not seen >> w & 1:
                    seen |= 1 << w
                    nxt.append(w)
        frontier = nxt
        if not frontier:
            break
    names = tuple(x.sorted_names(seen))
    for u in bits_of(seen):
        for letter in a.letters:
            w = a.table[letter][u]
            if w < 0:
                return OrbitResult(names, False, f"{a.format_word((letter,))} undefined at {x.names[u]!r}")
            if not seen >> w & 1:
                return OrbitResult(names, False, f"word length cutoff {max_word_len} reached")
    return OrbitResult(names, True, "closed under all generators")


# -- strongly contracting witnesses -------------------------------------------


@dataclass(frozen=True)
class Witness:
    """``element`` (a power of ``base``) maps ``outer`` strictly inside ``inner``.

    ``inner`` is contained in ``outer`` and their hyperplanes are strongly separated.
    """

    element: str
    base: str
    power: int
    inner: str
    outer: str
    image: str
    certificate: dict[str, bool] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return {
            "element": self.element,
            "base": self.base,
            "power": self.power,
            "halfspace_pair": [self.inner, self.outer],
            "image_of_outer": self.image,
            "certificate": dict(self.certificate),
        }


@dataclass(frozen=True)
class WitnessSearch:
    witness: Witness | None
    status: str
    reason: str = ""


def contracting_witness(a: ActionSpec, g: str | Word, search_depth: int = 1) -> WitnessSearch:
    """Look for halfspaces ``A`` inside ``B`` with ``g^n . B`` strictly inside ``A``.

    Powers ``n = 1 .. search_depth`` are tried in order; ``search_depth=1``
    tests ``g`` itself. Pairs are scanned with ``B`` outermost loop in
    halfspace order, then ``A``.
    """
    x = a.complex
    word = a.parse_word(g) if isinstance(g, str) else tuple(g)
    base = a.as_map(word)
    if all(v < 0 for v in base):
        raise EmptyDomain(f"{a.format_word(word)} is defined nowhere", word=a.format_word(word))
    table = relation_table(x)
    if not any(table.strongly_separated):
        return WitnessSearch(None, ABSENT, "no strongly separated hyperplanes")
    flat = [m for pair in x.hs for m in pair]
    undetermined = False
    for n in range(1, search_depth + 1):
        element = word * n
        mapping = a.as_map(element)
        if all(v < 0 for v in mapping):
            undetermined = True
            break
        for b_idx, b_mask in enumerate(flat):
            img = a.image_halfspace(mapping, b_idx >> 1, b_idx & 1)
            if img is None:
                undetermined = True
                continue
            gb_idx = 2 * img[0] + img[1]
            gb = flat[gb_idx]
            if not a.image_is_consistent(mapping, b_mask, gb):
                continue
            for a_idx, a_mask in enumerate(flat):
                if a_idx >> 1 == b_idx >> 1 or not table.is_strongly_separated(a_idx >> 1, b_idx >> 1):
                    continue
                if a_mask & ~b_mask or gb & ~a_mask or gb == a_mask:
                    continue
                w = Witness(
                    element=a.format_word(element),
                    base=a.format_word(word),
                    power=n,
                    inner=x.halfspace_id(a_idx >> 1, a_idx & 1),
                    outer=x.halfspace_id(b_idx >> 1, b_idx & 1),
                    image=x.halfspace_id(img[0], img[1]),
                )
                return WitnessSearch(replace(w, certificate=replay_witness(a, w)), FOUND)
    if not a.truncated:
        # an automorphism of a finite complex has finite order, and
        # g.B < A < B would force g^n.B < B for every n
        return WitnessSearch(None, ABSENT, "total action on a finite complex")
    reason = "image undetermined on the truncation" if undetermined else f"powers up to {search_depth} exhausted"
    return WitnessSearch(None, INCONCLUSIVE, reason)


def replay_witness(a: ActionSpec, w: Witness) -> dict[str, bool]:
    """Recheck a witness from the raw complex; every value must be True."""
    x = a.complex
    ja, sa = x.halfspace_index(w.inner)
    jb, sb = x.halfspace_index(w.outer)
    inner, outer = x.hs[ja][sa], x.hs[jb][sb]
    crossing_both = [
        k for k in range(len(x.hyperplanes)) if transverse(x, k, ja) and transverse(x, k, jb)
    ]
    mapping = a.as_map(a.parse_word(w.element))
    img = a.image_halfspace(mapping, jb, sb)
    image = x.hs[img[0]][img[1]] if img else None
    moved = [mapping[v] for v in bits_of(outer) if mapping[v] >= 0]
    return {
        "distinct_hyperplanes": ja != jb,
        "not_transverse": not transverse(x, ja, jb),
        "strongly_separated": ja != jb and not transverse(x, ja, jb) and not crossing_both,
        "inner_in_outer": not inner & ~outer and inner != outer,
        "image_determined": img is not None and x.halfspace_id(*img) == w.image,
        "image_strictly_in_inner": image is not None and not image & ~inner and image != inner,
        "domain_points_land_in_image": image is not None and bool(moved) and all(image >> v & 1 for v in moved),
    }


# -- double skewer ------------------------------------------------------------


@dataclass(frozen=True)
class SkewerResult:
    word: str | None
    status: str
    reason: str = ""


def double_skewer_search(a: ActionSpec, inner: str, outer: str, max_word_len: int) -> SkewerResult:
    """Shortest word ``g`` (then lexicographic) with ``g . outer`` strictly inside ``inner``."""
    x = a.complex
    ja, sa = x.halfspace_index(inner)
    jb, sb = x.halfspace_index(outer)
    a_mask, b_mask = x.hs[ja][sa], x.hs[jb][sb]
    if a_mask & ~b_mask:
        raise NotNested(f"{inner} is not contained in {outer}", inner=inner, outer=outer)
    if not a.generators:
        return SkewerResult(None, ABSENT, "no generators")
    undetermined = False
    for length in range(1, max_word_len + 1):
        for word in a.words(length):
            mapping = a.as_map(word)
            img = a.image_halfspace(mapping, jb, sb)
            if img is None:
                undetermined = True
                continue
            gb = x.hs[img[0]][img[1]]
            if not gb & ~a_mask and gb != a_mask and a.image_is_consistent(mapping, b_mask, gb):
                return SkewerResult(a.format_word(word), FOUND)
    if a.closure_is_finite(max_word_len):
        return SkewerResult(None, ABSENT, "every group element checked")
    reason = "image undetermined on the truncation" if undetermined else f"word length {max_word_len} reached"
    return SkewerResult(None, INCONCLUSIVE, reason)


# -- median trap --------------------------------------------------------------


@dataclass(frozen=True)
class MedianTrap:
    hyperplanes: tuple[str, str, str]
    outer: tuple[str, str, str]
    words: tuple[str, str, str]
    images: tuple[str, str, str]
    mu: str
    mu_distance: int
    bound: int
    bound_ok: bool

    def as_dict(self) -> dict[str, Any]:
        return {
            "hyperplanes": list(self.hyperplanes),
            "outer": list(self.outer),
            "words": list(self.words),
            "images": list(self.images),
            "mu": self.mu,
            "d_xi_mu": self.mu_distance,
            "bound": self.bound,
            "bound_ok": self.bound_ok,
        }


def carrier_distance(x: CubeComplex, v: int, k: int) -> int:
    """Distance from vertex index ``v`` to the carrier of hyperplane ``k``."""
    row = x.dist[v]
    return min(row[c] for c in bits_of(x.carrier(k)))


def translate_into(a: ActionSpec, v: int, target: int, max_word_len: int) -> Word | None:
    """Shortest word (then lexicographic) moving ``v`` into the vertex set ``target``."""
    if target >> v & 1:
        return ()
    for length in range(1, max_word_len + 1):
        for word in a.words(length):
            u = a.apply(word, v)
            if u >= 0 and target >> u & 1:
                return word
    return None


def median_trap(a: ActionSpec, quad: FacingTuple, xi: str, max_word_len: int) -> MedianTrap:
    """Push ``xi`` into three outer halfspaces of a facing quadruple and take the median.

    The three halfspaces are the first ones (in quadruple order) not
    containing ``xi``. The returned ``bound`` is the sum of distances from
    ``xi`` to the three chosen hyperplanes' carriers; ``bound_ok`` records
    whether ``d(xi, mu)`` stays within it.
    """
    x = a.complex
    v = x.vertex_index(xi)
    outers = [x.hs[k][s] for k, s in zip(quad.hyperplanes, quad.outer_sides)]
    inside = [i for i, m in enumerate(outers) if m >> v & 1]
    if len(inside) >= 2:
        raise XiInsideTwoOuters(
            f"{xi!r} lies in {len(inside)} outer halfspaces",
            vertex=xi,
            outer=[x.halfspace_id(quad.hyperplanes[i], quad.outer_sides[i]) for i in inside],
        )
    chosen = [i for i in range(len(outers)) if i not in inside][:3]
    words = []
    images = []
    for i in chosen:
        word = translate_into(a, v, outers[i], max_word_len)
        if word is None:
            raise SearchExhausted(
                f"no word of length <= {max_word_len} moves {xi!r} into"
                f" {x.halfspace_id(quad.hyperplanes[i], quad.outer_sides[i])}",
                vertex=xi,
                outer=x.halfspace_id(quad.hyperplanes[i], quad.outer_sides[i]),
            )
        words.append(word)
        images.append(a.apply(word, v))
    mu = median_index(x, *images)
    bound = sum(carrier_distance(x, v, quad.hyperplanes[i]) for i in chosen)
    d = x.dist[v][mu]
    return MedianTrap(
        hyperplanes=tuple(x.hyperplanes[quad.hyperplanes[i]].id for i in chosen),
        outer=tuple(x.halfspace_id(quad.hyperplanes[i], quad.outer_sides[i]) for i in chosen),
        words=tuple(a.format_word(w) for w in words),
        images=tuple(x.names[u] for u in images),
        mu=x.names[mu],
        mu_distance=d,
        bound=bound,
        bound_ok=d <= bound,
    )
