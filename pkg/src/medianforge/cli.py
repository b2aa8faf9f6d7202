"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 size cap hit or only inconclusive outcomes.

Commands that produce an artifact (``generate``, ``cubulate``, ``export-dot``)
print it to stdout, or write it to ``-o FILE`` and print the run report
instead. Every other command prints a run report.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .actions import (
    FOUND,
    INCONCLUSIVE,
    contracting_witness,
    double_skewer_search,
    median_trap,
    orbit,
)
from .cubecomplex import CubeComplex, dimension
from .errors import InputError, MalformedInput, MedianForgeError, SearchExhausted, SizeLimitExceeded, ValidationError
from .formats import (
    action_to_json,
    complex_to_json,
    digest,
    dumps,
    load_action,
    load_complex,
    load_wallspace,
    read_json,
    to_dot,
)
from .generators import (
    DEFAULT_MAX_VERTICES,
    build_recipe,
    default_corpus,
    grid,
    grid_symmetries,
    random_wallspace,
    recipe_name,
    staircase,
    tree_ball,
)
from .lattice import facing_tuples, relation_table, ss_chains
from .properties import FAIL, GROUPS, INCONCLUSIVE as CHECK_INCONCLUSIVE, PASS, SKIP, Case, Check, attach_action
from .quotient import collapse_in_sequence, cubical_quotient, induced_isomorphism, verify_quotient_distance
from .wallspace import cubulate_masks

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3

DEFAULT_DEPTH = {"orbit": 3, "witness": 4, "skewer": 3, "trap": 2}


class Outcome(Exception):
    """Raised by a command to finish with a given exit code and results."""

    def __init__(self, code: int, results: dict[str, Any], verdicts: list[dict[str, Any]] | None = None):
        super().__init__(code)
        self.code = code
        self.results = results
        self.verdicts = verdicts or []


class Context:
    def __init__(self, args: argparse.Namespace) -> None:
        self.args = args
        self.inputs: dict[str, str] = {}
        self.artifact: str | None = None

    def track(self, path: str) -> str:
        try:
            self.inputs[path] = digest(path)
        except OSError as err:
            raise MalformedInput(f"cannot read {path}: {err.strerror}", path=path) from None
        return path

    def complex(self, path: str) -> CubeComplex:
        x = load_complex(self.track(path))
        self.cap(x.n)
        return x

    def cap(self, n: int) -> None:
        if n > self.args.max_vertices:
            raise SizeLimitExceeded(f"{n} vertices exceeds --max-vertices {self.args.max_vertices}",
                                    limit=self.args.max_vertices)


# -- argument parsing ------------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    def default(value: Any) -> Any:
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--seed", type=int, default=default(0), help="seed for every random choice")
    parser.add_argument("--max-vertices", type=int, default=default(DEFAULT_MAX_VERTICES),
                        help="size cap for generated and loaded complexes")
    parser.add_argument("--format", choices=("json", "text"), default=default("json"))
    parser.add_argument("--fail-fast", action="store_true", default=default(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="medianforge", description="Finite CAT(0) cube complex toolkit.")
    parser.add_argument("--version", action="version", version=f"medianforge {__version__}")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help, parents=[common])

    gen = add("generate", "build a corpus complex or wallspace")
    gsub = gen.add_subparsers(dest="kind", required=True)
    g = gsub.add_parser("grid", parents=[common], help="box complex, e.g. 3x3")
    g.add_argument("dims")
    g.add_argument("--action", action="store_true", help="emit an action file with the grid symmetries")
    g.add_argument("-o", "--output")
    t = gsub.add_parser("tree", parents=[common], help="ball in the regular tree")
    t.add_argument("valence", type=int)
    t.add_argument("radius", type=int)
    t.add_argument("--action", action="store_true", help="emit an action file with the partial translations")
    t.add_argument("-o", "--output")
    s = gsub.add_parser("staircase", parents=[common], help="corner-glued unit squares")
    s.add_argument("steps", type=int)
    s.add_argument("-o", "--output")
    r = gsub.add_parser("random", parents=[common], help="seeded random wallspace")
    r.add_argument("-p", "--points", type=int, required=True)
    r.add_argument("-w", "--walls", type=int, required=True)
    r.add_argument("-o", "--output")

    an = add("analyze", "validate a complex and count its cells")
    an.add_argument("file")

    cu = add("cubulate", "dual cube complex of a wallspace")
    cu.add_argument("file")
    cu.add_argument("-o", "--output")

    qu = add("quotient", "collapse hyperplanes")
    qu.add_argument("file")
    qu.add_argument("--collapse", default="", help="comma-separated hyperplane ids")
    qu.add_argument("--verify", action="store_true", help="check the quotient distance formula on all pairs")
    qu.add_argument("--cross-check", action="store_true",
                    help="compare against collapsing one hyperplane at a time by cut and glue")

    se = add("separation", "hyperplane relations, facing tuples, chains")
    se.add_argument("file")
    se.add_argument("--facing", type=int, metavar="K")
    se.add_argument("--ss", action="store_true", help="facing tuples must be pairwise strongly separated")
    se.add_argument("--chains", type=int, metavar="LEN")

    ac = add("action", "searches on an action file")
    ac.add_argument("file")
    mode = ac.add_mutually_exclusive_group(required=True)
    mode.add_argument("--orbit", metavar="V")
    mode.add_argument("--witness", metavar="G")
    mode.add_argument("--skewer", nargs=2, metavar=("A", "B"), help="inner halfspace A, outer halfspace B")
    mode.add_argument("--median-trap", nargs=2, metavar=("QUAD", "XI"),
                      help="facing quadruple (index or comma-separated ids) and base vertex")
    ac.add_argument("--depth", type=int, help="word length, or largest power for --witness")

    su = add("suite", "run the property matrix over a corpus")
    su.add_argument("config", nargs="?")

    ex = add("export-dot", "DOT drawing with edges coloured by hyperplane")
    ex.add_argument("file")
    ex.add_argument("-o", "--output")
    return parser


# -- commands --------------------------------------------------------------------


def _emit(ctx: Context, text: str, summary: dict[str, Any]) -> dict[str, Any]:
    out = getattr(ctx.args, "output", None)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        summary["output"] = out
    else:
        ctx.artifact = text
    return summary


def _parse_dims(text: str) -> list[int]:
    try:
        dims = [int(d) for d in text.lower().split("x")]
    except ValueError:
        raise MalformedInput(f"bad grid dimensions {text!r}; use e.g. 3x3", dims=text) from None
    return dims


def cmd_generate(ctx: Context) -> dict[str, Any]:
    a = ctx.args
    cap = a.max_vertices
    if a.kind == "grid":
        dims = _parse_dims(a.dims)
        x = grid(dims, cap)
        payload = action_to_json(grid_symmetries(dims)) if a.action else complex_to_json(x)
        return _emit(ctx, dumps(payload), {"kind": "grid", "dims": dims, "vertices": x.n})
    if a.kind == "tree":
        x, act = tree_ball(a.valence, a.radius, cap)
        payload = action_to_json(act) if a.action else complex_to_json(x)
        return _emit(ctx, dumps(payload), {"kind": "tree", "vertices": x.n})
    if a.kind == "staircase":
        x = staircase(a.steps, cap)
        return _emit(ctx, dumps(complex_to_json(x)), {"kind": "staircase", "vertices": x.n})
    w = random_wallspace(a.points, a.walls, a.seed)
    return _emit(ctx, dumps(w.to_json()), {"kind": "random", "seed": a.seed, "walls": len(w.walls),
                                           "notices": list(w.warnings)})


def _counts(x: CubeComplex) -> dict[str, Any]:
    by_dim: dict[int, int] = {}
    for m in x.cube_masks:
        d = m.bit_count().bit_length() - 1
        by_dim[d] = by_dim.get(d, 0) + 1
    return {
        "vertices": x.n,
        "edges": len(x.edge_list),
        "hyperplanes": len(x.hyperplanes),
        "cubes": {str(d): c for d, c in sorted(by_dim.items())},
        "dimension": dimension(x),
    }


def cmd_analyze(ctx: Context) -> dict[str, Any]:
    x = ctx.complex(ctx.args.file)
    return {**_counts(x), "valid": True}


def cmd_cubulate(ctx: Context) -> dict[str, Any]:
    w = load_wallspace(ctx.track(ctx.args.file))
    x = cubulate_masks(w.points, w.side_masks, ctx.args.max_vertices).complex
    return _emit(ctx, dumps(complex_to_json(x)), {**_counts(x), "warnings": list(w.warnings)})


def cmd_quotient(ctx: Context) -> dict[str, Any]:
    a = ctx.args
    x = ctx.complex(a.file)
    collapse = [h.strip() for h in a.collapse.split(",") if h.strip()]
    for h in collapse:
        x.hyperplane(h)
    q = cubical_quotient(x, collapse, a.max_vertices)
    results: dict[str, Any] = {
        "collapsed": sorted(q.collapsed, key=x.hyp_index.get),
        "target": complex_to_json(q.target),
        "vertex_map": dict(q.vertex_map),
        "hyperplane_map": dict(q.hyperplane_map),
        "target_counts": _counts(q.target),
    }
    failed = False
    verdicts = []
    if a.verify:
        report = verify_quotient_distance(q)
        results["verification"] = report.as_dict()
        verdicts.append({"check": "quotient_distance", "verdict": PASS if report.ok else FAIL})
        failed |= not report.ok
    if a.cross_check:
        phi = induced_isomorphism(q, collapse_in_sequence(x, results["collapsed"]))
        ok = phi is not None
        results["cross_check"] = {"isomorphic": ok, "vertex_maps_commute": ok}
        verdicts.append({"check": "cut_and_glue", "verdict": PASS if ok else FAIL})
        failed |= not ok
    if failed:
        raise Outcome(EXIT_FAIL, results, verdicts)
    return results if not verdicts else {**results, "_verdicts": verdicts}


def cmd_separation(ctx: Context) -> dict[str, Any]:
    a = ctx.args
    x = ctx.complex(a.file)
    table = relation_table(x)
    ids = table.hyperplane_ids
    results: dict[str, Any] = {
        "hyperplanes": list(ids),
        "transverse": [[ids[j], ids[h]] for j, h in table.transverse_pairs()],
        "strongly_separated": [[ids[j], ids[h]] for j, h in table.strongly_separated_pairs()],
    }
    if a.facing is not None:
        if a.facing < 2:
            raise MalformedInput("--facing needs K >= 2", facing=a.facing)
        tuples = facing_tuples(x, a.facing, require_ss=a.ss)
        results["facing"] = {"k": a.facing, "pairwise_strongly_separated": a.ss,
                             "tuples": [t.ids(x) for t in tuples]}
    if a.chains is not None:
        if a.chains < 1:
            raise MalformedInput("--chains needs LEN >= 1", chains=a.chains)
        chains = ss_chains(x, a.chains)
        results["chains"] = {"length": a.chains,
                             "chains": [[x.halfspace_id(p >> 1, p & 1) for p in c] for c in chains]}
    return results


def _quad(x: CubeComplex, text: str):
    quads = facing_tuples(x, 4)
    if text.isdigit():
        i = int(text)
        if i >= len(quads):
            raise MalformedInput(f"facing quadruple {i} does not exist ({len(quads)} found)", quadruple=i)
        return quads[i]
    want = sorted(x.hyperplane(h.strip()).index for h in text.split(","))
    for q in quads:
        if sorted(q.hyperplanes) == want:
            return q
    raise MalformedInput(f"{text!r} is not a facing quadruple", quadruple=text)


def cmd_action(ctx: Context) -> dict[str, Any]:
    a = ctx.args
    act = load_action(ctx.track(a.file))
    ctx.cap(act.complex.n)
    x = act.complex
    if a.orbit is not None:
        depth = a.depth if a.depth is not None else DEFAULT_DEPTH["orbit"]
        res = orbit(act, a.orbit, depth)
        results = {"orbit": list(res.vertices), "status": res.status, "reason": res.reason, "depth": depth}
        if not res.certified:
            raise Outcome(EXIT_LIMIT, results, [{"check": "orbit", "verdict": CHECK_INCONCLUSIVE}])
        return results
    if a.witness is not None:
        depth = a.depth if a.depth is not None else DEFAULT_DEPTH["witness"]
        found = contracting_witness(act, a.witness, depth)
        results = {"status": found.status, "reason": found.reason, "max_power": depth,
                   "witness": found.witness.as_dict() if found.witness else None}
        if found.status == FOUND and not all(found.witness.certificate.values()):
            raise Outcome(EXIT_FAIL, results, [{"check": "witness_replay", "verdict": FAIL}])
        if found.status == INCONCLUSIVE:
            raise Outcome(EXIT_LIMIT, results, [{"check": "witness", "verdict": CHECK_INCONCLUSIVE}])
        return results
    if a.skewer is not None:
        depth = a.depth if a.depth is not None else DEFAULT_DEPTH["skewer"]
        res = double_skewer_search(act, a.skewer[0], a.skewer[1], depth)
        results = {"word": res.word, "status": res.status, "reason": res.reason, "max_word_len": depth}
        if res.status == INCONCLUSIVE:
            raise Outcome(EXIT_LIMIT, results, [{"check": "skewer", "verdict": CHECK_INCONCLUSIVE}])
        return results
    depth = a.depth if a.depth is not None else DEFAULT_DEPTH["trap"]
    quad = _quad(x, a.median_trap[0])
    trap = median_trap(act, quad, a.median_trap[1], depth)
    results = {"quadruple": quad.ids(x), "xi": a.median_trap[1], "trap": trap.as_dict()}
    if not trap.bound_ok:
        raise Outcome(EXIT_FAIL, results, [{"check": "median_trap_bound", "verdict": FAIL}])
    return results


def _load_config(ctx: Context) -> tuple[list[dict[str, Any]], list[str], int]:
    a = ctx.args
    if a.config is None:
        return default_corpus(), list(GROUPS), a.seed
    raw = read_json(ctx.track(a.config))
    if isinstance(raw, list):
        raw = {"recipes": raw}
    if not isinstance(raw, dict):
        raise MalformedInput("suite config must be an object or a list of recipes")
    recipes = raw.get("recipes") or []
    if not recipes:
        raise MalformedInput("suite config lists no recipes")
    groups = raw.get("groups") or list(GROUPS)
    unknown = [g for g in groups if g not in GROUPS]
    if unknown:
        raise MalformedInput(f"unknown property groups {unknown}", groups=unknown)
    return recipes, groups, int(raw.get("seed", a.seed))


def cmd_suite(ctx: Context) -> dict[str, Any]:
    a = ctx.args
    recipes, groups, seed = _load_config(ctx)
    checks: list[Check] = []
    timing: dict[str, float] = {}
    stop = False
    for i, recipe in enumerate(recipes):
        name = recipe_name(recipe) if isinstance(recipe, dict) else f"case{i}"
        try:
            if not isinstance(recipe, dict):
                raise MalformedInput(f"recipe {i} is not an object")
            case = Case(name, recipe, build_recipe(recipe, a.max_vertices))
            attach_action(case)
        except MedianForgeError as err:
            checks.append(Check("build", name, FAIL, {}, err.as_dict()))
            if a.fail_fast:
                break
            continue
        for group in groups:
            start = time.perf_counter()
            fn = GROUPS[group]
            check = fn(case, seed=seed) if group == "quotient" else fn(case)
            timing[group] = timing.get(group, 0.0) + time.perf_counter() - start
            checks.append(check)
            if check.verdict == FAIL and a.fail_fast:
                stop = True
                break
        if stop:
            break
    tally = {v: sum(c.verdict == v for c in checks) for v in (PASS, FAIL, CHECK_INCONCLUSIVE, SKIP)}
    failures = [c.as_dict() for c in checks if c.verdict == FAIL]
    results = {
        "cases": len(recipes),
        "groups": groups,
        "seed": seed,
        "tally": tally,
        "failures": failures,
        "failed_cases": sorted({c.case for c in checks if c.verdict == FAIL}),
        "checks": [c.as_dict() for c in checks],
        "_timing": {g: round(t, 6) for g, t in timing.items()},
    }
    verdicts = [{"check": f"{c.group}:{c.case}", "verdict": c.verdict} for c in checks]
    if failures:
        raise Outcome(EXIT_FAIL, results, verdicts)
    if tally[CHECK_INCONCLUSIVE] and not tally[PASS]:
        raise Outcome(EXIT_LIMIT, results, verdicts)
    return {**results, "_verdicts": verdicts}


def cmd_export_dot(ctx: Context) -> dict[str, Any]:
    x = ctx.complex(ctx.args.file)
    return _emit(ctx, to_dot(x, Path(ctx.args.file).stem), _counts(x))


COMMANDS = {
    "generate": cmd_generate,
    "analyze": cmd_analyze,
    "cubulate": cmd_cubulate,
    "quotient": cmd_quotient,
    "separation": cmd_separation,
    "action": cmd_action,
    "suite": cmd_suite,
    "export-dot": cmd_export_dot,
}


# -- driver ----------------------------------------------------------------------


def _status(code: int) -> str:
    return {EXIT_OK: "pass", EXIT_FAIL: "fail", EXIT_INPUT: "error", EXIT_LIMIT: "inconclusive"}[code]


@dataclass
class RunResult:
    code: int
    report: dict[str, Any]
    artifact: str | None = None
    format: str = "json"


def run(argv: Sequence[str] | None = None) -> RunResult:
    """Run one command and return its exit code, run report and any artifact text."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as stop:
        code = EXIT_OK if stop.code in (0, None) else EXIT_INPUT
        return RunResult(code, {"command": argv, "status": _status(code), "exit_code": code})
    ctx = Context(args)
    start = time.perf_counter()
    verdicts: list[dict[str, Any]] = []
    try:
        results = COMMANDS[args.command](ctx)
        verdicts = results.pop("_verdicts", [])
        code = EXIT_OK
    except Outcome as out:
        results, verdicts, code = out.results, out.verdicts, out.code
    except ValidationError as err:
        results, code = {"valid": False, **err.as_dict()}, EXIT_FAIL
        verdicts = [{"check": "validation", "verdict": FAIL, "witness": err.witness}]
    except (SizeLimitExceeded, SearchExhausted) as err:
        results, code = err.as_dict(), EXIT_LIMIT
    except InputError as err:
        results, code = err.as_dict(), EXIT_INPUT
    timing = {"seconds": round(time.perf_counter() - start, 6), **results.pop("_timing", {})}
    report = {
        "command": argv,
        "inputs": dict(sorted(ctx.inputs.items())),
        "results": results,
        "verdicts": verdicts,
        "status": _status(code),
        "exit_code": code,
        "timing": timing,
        "version": __version__,
    }
    return RunResult(code, report, ctx.artifact, args.format)


def _text(report: dict[str, Any]) -> str:
    lines = [f"status: {report['status']} (exit {report['exit_code']})"]
    for key, value in report["results"].items():
        if key != "checks":
            lines.append(f"{key}: {json.dumps(value, sort_keys=True)}")
    for v in report["verdicts"]:
        if v["verdict"] in (FAIL, CHECK_INCONCLUSIVE):
            lines.append(f"{v['verdict']}: {v['check']}")
    return "\n".join(lines) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    res = run(argv)
    if "results" not in res.report:
        return res.code
    if res.artifact is not None:
        sys.stdout.write(res.artifact)
        return res.code
    sys.stdout.write(_text(res.report) if res.format == "text" else dumps(res.report))
    message = res.report["results"].get("message")
    if res.code != EXIT_OK and message:
        print(f"medianforge: {message}", file=sys.stderr)
    return res.code


if __name__ == "__main__":
    raise SystemExit(main())
