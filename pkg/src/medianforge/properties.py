"""Property checks run by ``medianforge suite``.

Each check takes a :class:`Case` and returns a :class:`Check` with a verdict
of ``pass``, ``fail``, ``inconclusive`` or ``skip``. Failures carry a small
replayable witness (a vertex pair, a triple, a hyperplane set or a word).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Any, Callable

from .actions import ActionSpec, FOUND, contracting_witness, median_trap, replay_witness
from .cubecomplex import CubeComplex, dimension, median_index, transverse_dimension
from .errors import MedianForgeError
from .generators import SplitMix64, grid_symmetries, tree_ball
from .lattice import facing_tuples, relation_table
from .quotient import (
    are_isomorphic,
    cubical_quotient,
    cut_and_glue,
    induced_isomorphism,
    verify_quotient_distance,
)
from .wallspace import cubulate_masks

PASS, FAIL, INCONCLUSIVE, SKIP = "pass", "fail", "inconclusive", "skip"


@dataclass
class Case:
    name: str
    recipe: dict[str, Any]
    complex: CubeComplex
    action: ActionSpec | None = None


@dataclass
class Check:
    group: str
    case: str
    verdict: str
    detail: dict[str, Any] = field(default_factory=dict)
    witness: dict[str, Any] | None = None

    def as_dict(self) -> dict[str, Any]:
        out = {"group": self.group, "case": self.case, "verdict": self.verdict, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def bfs_distances(x: CubeComplex, src: int) -> list[int]:
    dist = [-1] * x.n
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for w in x.nbrs[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def check_metric(case: Case) -> Check:
    """Graph distance equals the number of separating hyperplanes, on all pairs."""
    x = case.complex
    pairs = 0
    for u in range(x.n):
        row = bfs_distances(x, u)
        for v in range(u + 1, x.n):
            pairs += 1
            walls = (x.orient[u] ^ x.orient[v]).bit_count()
            if row[v] != walls or x.dist[u][v] != walls:
                return Check("metric", case.name, FAIL, {"pairs": pairs}, {
                    "pair": [x.names[u], x.names[v]], "bfs": row[v], "separating": walls,
                })
    return Check("metric", case.name, PASS, {"pairs": pairs})


def check_duality(case: Case) -> Check:
    """Cubulating the hyperplane wallspace gives back the complex."""
    x = case.complex
    back = cubulate_masks(x.names, x.hs).complex
    phi = are_isomorphic(back, x)
    if phi is None:
        return Check("duality", case.name, FAIL, {"vertices": [back.n, x.n]},
                     {"reason": "cubulation is not isomorphic to the input"})
    return Check("duality", case.name, PASS, {"vertices": x.n, "isomorphism_checked": True})


def random_collapse_sets(x: CubeComplex, count: int, seed: int) -> list[list[str]]:
    rng = SplitMix64(seed)
    out = []
    for _ in range(count):
        out.append([h.id for h in x.hyperplanes if rng.below(2)])
    return out


def check_quotient(case: Case, seed: int = 0, samples: int = 10) -> Check:
    """Distance in X/J counts separating hyperplanes outside J, for random J."""
    x = case.complex
    pairs = 0
    for collapse in random_collapse_sets(x, samples, seed ^ _case_salt(case.name)):
        report = verify_quotient_distance(cubical_quotient(x, collapse))
        pairs += report.checked_pairs
        if not report.ok:
            u, v, expected, got = report.counterexamples[0]
            return Check("quotient", case.name, FAIL, {"checked_pairs": pairs}, {
                "collapse": collapse, "pair": [u, v], "expected": expected, "target_distance": got,
            })
    return Check("quotient", case.name, PASS, {"collapse_sets": samples, "checked_pairs": pairs})


def _case_salt(name: str) -> int:
    # FNV-1a, so collapse sets depend on the case but not on Python's hash seed
    h = 0xCBF29CE484222325
    for byte in name.encode():
        h = ((h ^ byte) * 0x100000001B3) & ((1 << 64) - 1)
    return h


def check_cross(case: Case, max_vertices: int = 150) -> Check:
    """Cut-and-glue and cubical quotient agree for every single hyperplane."""
    x = case.complex
    if x.n > max_vertices:
        return Check("cross", case.name, SKIP, {"reason": f"more than {max_vertices} vertices"})
    for h in x.hyperplanes:
        p = cubical_quotient(x, [h.id])
        q = cut_and_glue(x, h.id)
        if induced_isomorphism(p, q) is None:
            return Check("cross", case.name, FAIL, {}, {"hyperplane": h.id})
    return Check("cross", case.name, PASS, {"hyperplanes": len(x.hyperplanes)})


def brute_force_facing(x: CubeComplex, k: int) -> list[tuple[int, ...]]:
    """k-sets of hyperplanes with pairwise disjoint chosen sides, from first principles."""
    m = len(x.hyperplanes)
    out = []
    for combo in combinations(range(m), k):
        for sides in range(1 << k):
            halves = [x.hs[j][sides >> i & 1] for i, j in enumerate(combo)]
            if all(not a & b for a, b in combinations(halves, 2)):
                out.append(combo)
                break
    return out


def check_separation(case: Case, max_hyperplanes: int = 12) -> Check:
    """Facing triples and quadruples agree with a brute-force k-subset search."""
    x = case.complex
    table = relation_table(x)
    detail: dict[str, Any] = {
        "hyperplanes": len(x.hyperplanes),
        "strongly_separated_pairs": len(table.strongly_separated_pairs()),
        "dimension": dimension(x),
    }
    if dimension(x) != transverse_dimension(x):
        return Check("separation", case.name, FAIL, detail, {"reason": "cube dimension differs from transverse clique size"})
    if len(x.hyperplanes) > max_hyperplanes:
        detail["facing_oracle"] = "skipped"
        return Check("separation", case.name, PASS, detail)
    for k in (2, 3, 4):
        got = [t.hyperplanes for t in facing_tuples(x, k)]
        want = brute_force_facing(x, k)
        if got != want:
            diff = sorted(set(got) ^ set(want))
            return Check("separation", case.name, FAIL, detail, {
                "k": k, "hyperplanes": [x.hyperplanes[j].id for j in diff[0]],
            })
        detail[f"facing_{k}"] = len(got)
    return Check("separation", case.name, PASS, detail)


def check_median(case: Case, max_vertices: int = 100) -> Check:
    """Majority median is the unique minimiser of the distance sum; symmetric and absorptive.

    Every vertex's distance sum to a, b, c is at least half the perimeter, and
    a vertex attains that bound exactly when it lies in all three intervals.
    The majority vertex attains it, so it is the unique minimiser precisely
    when the three intervals meet in that vertex alone.
    """
    x = case.complex
    if x.n > max_vertices:
        return Check("median", case.name, SKIP, {"reason": f"more than {max_vertices} vertices"})
    iv, dist = x.intervals, x.dist
    triples = 0
    for a in range(x.n):
        for b in range(a, x.n):
            for c in range(b, x.n):
                triples += 1
                m = median_index(x, a, b, c)
                if (a == b and m != a) or (b == c and m != b):
                    return Check("median", case.name, FAIL, {}, {"absorption": [x.names[a], x.names[b], x.names[c]]})
                common = iv[a][b] & iv[b][c] & iv[a][c]
                perimeter = dist[a][b] + dist[b][c] + dist[a][c]
                if common != 1 << m or 2 * (dist[m][a] + dist[m][b] + dist[m][c]) != perimeter:
                    return Check("median", case.name, FAIL, {"triples": triples}, {
                        "triple": [x.names[a], x.names[b], x.names[c]], "majority": x.names[m],
                        "minimisers": x.sorted_names(common),
                    })
                if any(median_index(x, *p) != m for p in permutations((a, b, c))):
                    return Check("median", case.name, FAIL, {}, {"symmetry": [x.names[a], x.names[b], x.names[c]]})
    return Check("median", case.name, PASS, {"triples": triples})


def _root_quadruples(x: CubeComplex, root: int) -> list:
    return [
        q for q in facing_tuples(x, 4)
        if all(x.carrier(k) >> root & 1 for k in q.hyperplanes)
    ]


def check_trap(case: Case, max_word_len: int = 2) -> Check:
    """Median trap at the root of a tree ball, for every root facing quadruple."""
    x, a = case.complex, case.action
    if a is None or case.recipe.get("kind") != "tree_ball":
        return Check("trap", case.name, SKIP, {"reason": "needs a tree ball with its translations"})
    root = x.vertex_index("e")
    quads = _root_quadruples(x, root)
    if not quads:
        return Check("trap", case.name, FAIL, {}, {"reason": "no facing quadruple at the root"})
    for i, q in enumerate(quads):
        try:
            t = median_trap(a, q, "e", max_word_len)
        except MedianForgeError as err:
            return Check("trap", case.name, FAIL, {"quadruples": len(quads)}, {"quadruple": i, **err.as_dict()})
        if not t.bound_ok:
            return Check("trap", case.name, FAIL, {}, {"quadruple": i, **t.as_dict()})
    return Check("trap", case.name, PASS, {"quadruples": len(quads)})


def check_witness(case: Case) -> Check:
    """Tree translations have replayable witnesses; grid symmetries never do."""
    a = case.action
    kind = case.recipe.get("kind")
    if a is None or kind not in ("tree_ball", "grid"):
        return Check("witness", case.name, SKIP, {"reason": "needs a tree ball or a grid"})
    if kind == "tree_ball":
        if int(case.recipe["radius"]) < 2:
            return Check("witness", case.name, SKIP, {"reason": "radius below 2"})
        found = {}
        for g in a.generators:
            search = contracting_witness(a, g, search_depth=case.complex.n)
            if search.status != FOUND or not all(replay_witness(a, search.witness).values()):
                return Check("witness", case.name, FAIL, {}, {"word": g, "status": search.status, "reason": search.reason})
            found[g] = search.witness.element
        return Check("witness", case.name, PASS, {"elements": found})
    statuses = {}
    for length in (1, 2):
        for word in a.words(length):
            search = contracting_witness(a, word)
            name = a.format_word(word)
            if search.witness is not None:
                return Check("witness", case.name, FAIL, {}, {"word": name, **search.witness.as_dict()})
            statuses[name] = search.status
    return Check("witness", case.name, PASS, {"words": len(statuses), "statuses": sorted(set(statuses.values()))})


GROUPS: dict[str, Callable[..., Check]] = {
    "metric": check_metric,
    "duality": check_duality,
    "quotient": check_quotient,
    "cross": check_cross,
    "separation": check_separation,
    "median": check_median,
    "trap": check_trap,
    "witness": check_witness,
}


def attach_action(case: Case) -> None:
    """Canonical action for tree balls (translations) and small grids (symmetries)."""
    kind = case.recipe.get("kind")
    if kind == "tree_ball":
        case.action = tree_ball(int(case.recipe["valence"]), int(case.recipe["radius"]))[1]
    elif kind == "grid":
        case.action = grid_symmetries(list(case.recipe["dims"]))

