"""JSON and DOT input/output.

Complex files look like ``{"vertices": [...], "edges": [[u, v], ...]}`` with an
optional ``"provenance"``; wallspace files like ``{"points": [...], "walls":
[[sideA, sideB], ...]}``; action files like ``{"complex": <inline or path>,
"generators": {"x": {"map": {...}, "partial": true}}}``.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from .actions import ActionSpec, Generator
from .cubecomplex import CubeComplex, validate_complex
from .errors import MalformedInput
from .wallspace import Wallspace, validate_wallspace


def read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise MalformedInput(f"cannot read {path}: {err.strerror}", path=str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise MalformedInput(f"{path}: invalid JSON ({err.msg} at line {err.lineno})", path=str(path)) from None


def digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def dumps(obj: Any) -> str:
    """Stable JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def complex_to_json(x: CubeComplex) -> dict[str, Any]:
    out: dict[str, Any] = {"vertices": list(x.vertices), "edges": [list(e) for e in x.edges]}
    if x.provenance:
        out["provenance"] = {k: list(v) for k, v in sorted(x.provenance.items())}
    return out


def load_complex(path: str | Path) -> CubeComplex:
    return validate_complex(read_json(path))


def load_wallspace(path: str | Path) -> Wallspace:
    return validate_wallspace(read_json(path))


def action_from_json(raw: Any, base: Path | None = None) -> ActionSpec:
    if not isinstance(raw, dict) or "complex" not in raw or "generators" not in raw:
        raise MalformedInput("action needs 'complex' and 'generators'")
    cx = raw["complex"]
    if isinstance(cx, str):
        path = Path(cx)
        if base is not None and not path.is_absolute():
            path = base / path
        x = load_complex(path)
    else:
        x = validate_complex(cx)
    gens = raw["generators"]
    if not isinstance(gens, dict):
        raise MalformedInput("'generators' must be an object keyed by name")
    built = []
    for name, entry in gens.items():
        if not isinstance(entry, dict) or not isinstance(entry.get("map"), dict):
            raise MalformedInput(f"generator {name!r} needs a 'map' object", generator=name)
        if not all(isinstance(v, (str, int)) and not isinstance(v, bool) for v in entry["map"].values()):
            raise MalformedInput(f"generator {name!r}: map values must be vertex names", generator=name)
        mapping = {str(k): str(v) for k, v in entry["map"].items()}
        built.append(Generator(str(name), mapping, bool(entry.get("partial", False))))
    truncated = raw.get("truncated")
    return ActionSpec(x, built, None if truncated is None else bool(truncated))


def action_to_json(a: ActionSpec) -> dict[str, Any]:
    return {
        "complex": complex_to_json(a.complex),
        "generators": {
            name: {"map": dict(sorted(g.mapping.items())), "partial": g.partial}
            for name, g in a.generators.items()
        },
        "truncated": a.truncated,
    }


def load_action(path: str | Path) -> ActionSpec:
    path = Path(path)
    return action_from_json(read_json(path), path.parent)


# A qualitative palette; hyperplanes beyond its length reuse colours with a new style.
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
STYLES = ("solid", "dashed", "dotted", "bold")


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(x: CubeComplex, name: str = "complex") -> str:
    """Undirected DOT graph; each edge is coloured and labelled by its hyperplane."""
    lines = [f"graph {_quote(name)} {{", "  node [shape=circle];"]
    for v in x.vertices:
        lines.append(f"  {_quote(v)};")
    for e, (p, q) in enumerate(x.edge_list):
        k = x.edge_hyp[e]
        colour = PALETTE[k % len(PALETTE)]
        style = STYLES[(k // len(PALETTE)) % len(STYLES)]
        hid = x.hyperplanes[k].id
        lines.append(
            f"  {_quote(x.names[p])} -- {_quote(x.names[q])}"
            f' [color="{colour}", style={style}, label="{hid}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
