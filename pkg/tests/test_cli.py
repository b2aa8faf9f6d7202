import json
import subprocess
import sys

import pytest

from conftest import SQUARE, cycle
from medianforge.cli import main, run
from medianforge.formats import dumps


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def strip_timing(report):
    return {k: v for k, v in report.items() if k != "timing"}


@pytest.fixture
def square_file(tmp_path):
    return write(tmp_path / "square.json", SQUARE)


@pytest.fixture
def cube_file(tmp_path):
    res = run(["generate", "grid", "1x1x1", "-o", str(tmp_path / "cube3.json")])
    assert res.code == 0
    return str(tmp_path / "cube3.json")


def test_analyze_square(square_file):
    res = run(["analyze", square_file])
    assert res.code == 0
    r = res.report["results"]
    assert r["hyperplanes"] == 2 and r["valid"] and r["dimension"] == 2
    assert res.report["status"] == "pass"
    assert set(res.report) >= {"command", "inputs", "results", "verdicts", "timing", "version"}


def test_quotient_cube_verify(cube_file):
    res = run(["quotient", cube_file, "--collapse", "h0", "--verify", "--cross-check"])
    assert res.code == 0
    r = res.report["results"]
    assert r["verification"]["counterexample_count"] == 0
    assert r["verification"]["checked_pairs"] == 28
    assert r["target_counts"]["vertices"] == 4
    assert r["cross_check"]["isomorphic"]


def test_hexagon_rejected(tmp_path):
    res = run(["analyze", write(tmp_path / "hexagon.json", cycle(6))])
    assert res.code == 1
    r = res.report["results"]
    assert r["error"] == "NotMedian" and len(r["witness"]["triple"]) == 3
    assert res.report["verdicts"][0]["verdict"] == "fail"


def test_unknown_collapse_is_input_error(cube_file):
    res = run(["quotient", cube_file, "--collapse", "h9"])
    assert res.code == 2
    assert res.report["results"]["error"] == "UnknownHyperplane"


@pytest.mark.parametrize("content", ["{not json", "[1, 2]", '{"vertices": "ab", "edges": []}',
                                     '{"vertices": [["x"]], "edges": []}'])
def test_malformed_inputs_exit_2(tmp_path, content):
    p = tmp_path / "bad.json"
    p.write_text(content)
    for cmd in (["analyze", str(p)], ["cubulate", str(p)], ["export-dot", str(p)]):
        assert run(cmd).code == 2


def test_missing_file_and_usage_errors(tmp_path):
    assert run(["analyze", str(tmp_path / "nope.json")]).code == 2
    assert run([]).code == 2
    assert run(["generate", "grid", "3y3"]).code == 2
    assert run(["action", "x.json"]).code == 2


def test_size_cap_exit_3():
    res = run(["--max-vertices", "10", "generate", "grid", "4x4"])
    assert res.code == 3
    assert res.report["results"]["error"] == "SizeLimitExceeded"


def test_generate_outputs_round_trip(tmp_path):
    for args, name in ((["grid", "3x3"], "g"), (["tree", "4", "2"], "t"), (["staircase", "3"], "s")):
        out = tmp_path / f"{name}.json"
        assert run(["generate", *args, "-o", str(out)]).code == 0
        assert run(["analyze", str(out)]).code == 0
    w = tmp_path / "w.json"
    assert run(["--seed", "42", "generate", "random", "-p", "8", "-w", "6", "-o", str(w)]).code == 0
    first = w.read_text()
    run(["--seed", "42", "generate", "random", "-p", "8", "-w", "6", "-o", str(w)])
    assert w.read_text() == first
    cub = tmp_path / "c.json"
    assert run(["cubulate", str(w), "-o", str(cub)]).code == 0
    assert run(["analyze", str(cub)]).code == 0


def test_artifact_printed_without_output(capsys):
    assert main(["generate", "grid", "1x1"]) == 0
    raw = json.loads(capsys.readouterr().out)
    assert len(raw["vertices"]) == 4 and len(raw["edges"]) == 4


def test_idempotent_reports(cube_file, tmp_path):
    cmds = [["analyze", cube_file], ["quotient", cube_file, "--collapse", "h0,h2", "--verify"],
            ["separation", cube_file, "--facing", "2", "--chains", "2"]]
    for cmd in cmds:
        a, b = run(cmd), run(cmd)
        assert dumps(strip_timing(a.report)) == dumps(strip_timing(b.report))
    # an emitted artifact fed back in yields the same report and the same artifact
    w = write(tmp_path / "w.json", {"points": [0, 1, 2], "walls": [[[0], [1, 2]], [[0, 1], [2]]]})
    once = run(["cubulate", w]).artifact
    assert run(["cubulate", w]).artifact == once
    p = tmp_path / "x.json"
    p.write_text(once)
    a, b = run(["analyze", str(p)]), run(["analyze", str(p)])
    assert strip_timing(a.report) == strip_timing(b.report)
    ident = run(["quotient", str(p)]).report["results"]["target"]
    assert ident["vertices"] == json.loads(once)["vertices"]
    assert sorted(map(sorted, ident["edges"])) == sorted(map(sorted, json.loads(once)["edges"]))


def test_separation_tree(tmp_path):
    t = tmp_path / "t.json"
    run(["generate", "tree", "4", "2", "-o", str(t)])
    res = run(["separation", str(t), "--facing", "4", "--ss"])
    r = res.report["results"]
    assert res.code == 0
    assert len(r["strongly_separated"]) == 120 and r["transverse"] == []
    assert r["facing"]["tuples"]
    assert run(["separation", str(t), "--facing", "1"]).code == 2


def test_action_commands(tmp_path):
    act = tmp_path / "tree.json"
    assert run(["generate", "tree", "4", "2", "--action", "-o", str(act)]).code == 0
    res = run(["action", str(act), "--witness", "a"])
    assert res.code == 0 and res.report["results"]["witness"]["element"] == "aa"
    assert all(res.report["results"]["witness"]["certificate"].values())
    assert run(["action", str(act), "--orbit", "e"]).code == 3
    res = run(["action", str(act), "--median-trap", "0", "e"])
    assert res.code == 0 and res.report["results"]["trap"]["mu"] == "e"
    grid_act = tmp_path / "grid.json"
    run(["generate", "grid", "2x2", "--action", "-o", str(grid_act)])
    res = run(["action", str(grid_act), "--witness", "r0"])
    assert res.report["results"]["witness"] is None and res.code in (0, 3)
    assert run(["action", str(grid_act), "--orbit", "0,0"]).code == 0


def test_suite_default_passes():
    res = run(["suite"])
    assert res.code == 0
    tally = res.report["results"]["tally"]
    assert tally["fail"] == 0 and tally["pass"] > 400


def test_suite_empty_config(tmp_path):
    assert run(["suite", write(tmp_path / "c.json", {"recipes": []})]).code == 2
    assert run(["suite", write(tmp_path / "d.json", [])]).code == 2


def test_suite_names_corrupted_case(tmp_path):
    config = {"recipes": [{"kind": "grid", "dims": [2, 2]},
                          {"kind": "inline", "name": "broken-hexagon", "complex": cycle(6)}],
              "groups": ["metric", "duality"]}
    res = run(["suite", write(tmp_path / "c.json", config)])
    assert res.code == 1
    assert res.report["results"]["failed_cases"] == ["broken-hexagon"]
    assert res.report["results"]["tally"]["pass"] == 2


def test_fail_fast_stops_early(tmp_path):
    config = {"recipes": [{"kind": "inline", "name": "bad", "complex": cycle(6)},
                          {"kind": "grid", "dims": [2, 2]}]}
    res = run(["--fail-fast", "suite", write(tmp_path / "c.json", config)])
    assert res.code == 1 and len(res.report["results"]["checks"]) == 1


def test_export_dot(square_file):
    res = run(["export-dot", square_file])
    assert res.code == 0
    dot = res.artifact
    assert dot.startswith("graph") and dot.count("--") == 4
    assert "h0" in dot and "h1" in dot and "color=" in dot


def test_text_format(square_file, tmp_path, capsys):
    assert main(["--format", "text", "analyze", square_file]) == 0
    out = capsys.readouterr().out
    assert out.startswith("status: pass") and "hyperplanes: 2" in out
    assert main(["--format", "text", "analyze", write(tmp_path / "h.json", cycle(6))]) == 1
    captured = capsys.readouterr()
    assert "fail: validation" in captured.out and "medianforge:" in captured.err


def test_module_entry_point(square_file):
    proc = subprocess.run([sys.executable, "-m", "medianforge", "analyze", square_file],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["hyperplanes"] == 2
