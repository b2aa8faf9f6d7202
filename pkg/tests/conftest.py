from __future__ import annotations

import sys

import networkx as nx
import pytest

from medianforge import CubeComplex, validate_complex
from medianforge.generators import build_recipe, default_corpus, recipe_name


def to_nx(x: CubeComplex) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(x.vertices)
    g.add_edges_from(x.edges)
    return g


def cycle(n: int) -> dict:
    names = [f"c{i}" for i in range(n)]
    return {"vertices": names, "edges": [[names[i], names[(i + 1) % n]] for i in range(n)]}


SQUARE = {"vertices": ["a", "b", "c", "d"], "edges": [["a", "b"], ["b", "c"], ["c", "d"], ["d", "a"]]}
PATH4 = {"vertices": ["a", "b", "c", "d"], "edges": [["a", "b"], ["b", "c"], ["c", "d"]]}


@pytest.fixture(scope="session")
def corpus() -> list[tuple[str, dict, CubeComplex]]:
    return [(recipe_name(r), r, build_recipe(r)) for r in default_corpus()]


@pytest.fixture
def square() -> CubeComplex:
    return validate_complex(SQUARE)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
