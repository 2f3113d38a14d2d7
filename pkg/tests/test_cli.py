"""Tests for the command line."""

from __future__ import annotations

import json
import logging

import pytest

from gk3shift.cli import main, version
from gk3shift.const import DOMAIN
from gk3shift.gk3 import is_normal_form
from gk3shift.graph import is_isomorphic, load_graph, new_graph
from gk3shift.models import PartitionSpec
from gk3shift.moves import apply_trace, out_split, trace_from_list

from .conftest import loop1, m1

TRIANGLE = new_graph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")])
FIGURE_EIGHT = new_graph(["u", "v"], [("u", "u"), ("u", "v"), ("v", "u")])


@pytest.fixture(autouse=True)
def detach_handlers():
    """Drop the console handler main() installs so later tests get fresh streams."""
    yield
    root = logging.getLogger()
    for handler in [h for h in root.handlers if getattr(h, DOMAIN, False)]:
        root.removeHandler(handler)


def test_version(capsys):
    with pytest.raises(SystemExit) as err:
        main(["--version"])
    assert err.value.code == 0
    assert capsys.readouterr().out.strip() == f"gk3shift {version()}"


def test_info(capsys, write_graph):
    assert main(["info", write_graph("m1", m1())]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[:5] == [
        "vertices=2",
        "edges=3",
        "essential=true",
        "connected=true",
        "disjoint_cycles=true",
    ]
    assert "gkdim=3, m=1, n=1" in out
    assert "cycle: u" in out

    assert main(["info", write_graph("triangle", TRIANGLE)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "gkdim=1" in out
    assert "cycle: a -> b -> c" in out

    assert main(["info", write_graph("eight", FIGURE_EIGHT)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "disjoint_cycles=false" in out
    assert "gkdim=∞" in out


def test_info_writes_dot(tmp_path, write_graph):
    dot = tmp_path / "m1.dot"
    assert main(["info", write_graph("m1", m1()), "--dot", str(dot)]) == 0
    assert dot.read_text(encoding="utf-8").lstrip().startswith(("digraph", "strict digraph"))


def test_invariants_report(tmp_path, write_graph):
    report = tmp_path / "report.json"
    assert main(["invariants", write_graph("m1", m1()), "--output", str(report)]) == 0
    data = json.loads(report.read_text(encoding="utf-8"))
    assert data["trail_classes"] == [{"residue": 0, "modulus": 1}]
    assert "invariant_table" in data


def test_normal_form_emits_replayable_moves(tmp_path, write_graph, long_trail):
    output, moves = tmp_path / "normal.json", tmp_path / "moves.json"
    path = write_graph("long", long_trail)
    assert main(["normal-form", path, "--output", str(output), "--emit-moves", str(moves)]) == 0
    normal = load_graph(output)
    assert is_normal_form(normal)
    trace = trace_from_list(json.loads(moves.read_text(encoding="utf-8")))
    assert is_isomorphic(apply_trace(long_trail, trace), normal)


def test_normal_form_of_non_gk3_graph(write_graph):
    assert main(["normal-form", write_graph("loop", loop1())]) == 2


def test_decide_and_verify(tmp_path, capsys, write_graph, long_trail):
    first, second = write_graph("long", long_trail), write_graph("m1", m1())
    certificate = tmp_path / "certificate.json"
    assert main(["decide", "sse", first, second, "--certificate", str(certificate)]) == 0
    assert capsys.readouterr().out.startswith("verdict: yes")
    assert certificate.exists()

    assert main(["verify", first, second, str(certificate)]) == 0
    assert capsys.readouterr().out.strip() == "valid"

    data = json.loads(certificate.read_text(encoding="utf-8"))
    data["bijection"] = {"u": "u"}
    certificate.write_text(json.dumps(data), encoding="utf-8")
    assert main(["verify", first, second, str(certificate)]) == 1
    assert capsys.readouterr().out.strip() == "invalid: bijection"


def test_decide_no_prints_refutations(capsys, write_graph, crossed_e, crossed_f):
    first, second = write_graph("e", crossed_e), write_graph("f", crossed_f)
    assert main(["decide", "se", first, second]) == 1
    out = capsys.readouterr().out
    assert out.startswith("verdict: no")
    assert "contradiction:" in out


def test_decide_unsupported(capsys, write_graph):
    assert main(["decide", "sse", write_graph("m1", m1()), write_graph("t", TRIANGLE)]) == 2
    assert capsys.readouterr().out.startswith("verdict: unsupported")


def test_input_errors(tmp_path, write_graph):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    good = write_graph("m1", m1())
    assert main(["decide", "sse", str(broken), good]) == 3
    assert main(["info", str(tmp_path / "missing.json")]) == 3
    assert main(["verify", good, good, str(tmp_path / "missing.json")]) == 3
    assert main(["monoid", "canon", good, "u(0"]) == 3


def test_monoid_commands(capsys, write_graph):
    graph = write_graph("m1", m1())
    assert main(["monoid", "canon", graph, "u(1)+w(1)"]) == 0
    assert capsys.readouterr().out.strip() == "u(0)"

    assert main(["monoid", "atom", graph, "w(0)"]) == 0
    assert capsys.readouterr().out.strip() == "true"
    assert main(["monoid", "atom", graph, "u(0)"]) == 0
    assert capsys.readouterr().out.strip() == "false"

    assert main(["monoid", "equal", graph, "u(0)", "u(1)+w(1)"]) == 0
    assert capsys.readouterr().out.strip() == "equal (level 1)"
    assert main(["monoid", "equal", graph, "u(0)", "u(1)", "--level", "4"]) == 1
    assert capsys.readouterr().out.strip() == "not_equal_up_to (level 4)"
    assert main(["monoid", "equal", graph, "u(0)"]) == 3

    assert main(["monoid", "flow", graph, "u(0)", "--level", "2"]) == 0
    flowed = json.loads(capsys.readouterr().out)
    assert flowed == {"level": 2, "counts": {"u": 1, "w": 2}}


def test_oracle_commands(tmp_path, capsys, write_graph):
    split, _ = out_split(m1(), PartitionSpec("u", (("e0",), ("e1",))))
    first, second = write_graph("m1", m1()), write_graph("split", split)
    output = tmp_path / "trace.json"
    args = ["oracle", "sse", first, second, "--depth", "1", "--max-vertices", "3"]
    assert main([*args, "--output", str(output)]) == 0
    trace = trace_from_list(json.loads(output.read_text(encoding="utf-8")))
    assert is_isomorphic(apply_trace(m1(), trace), split)

    assert main(["oracle", "sse", first, second, "--max-vertices", "2"]) == 3

    assert main(["oracle", "se", first, first]) == 0
    witness = json.loads(capsys.readouterr().out)
    assert witness["lag"] == 1


def test_config_file(tmp_path, write_graph):
    graph = write_graph("m1", m1())
    bad = tmp_path / "bad.yaml"
    bad.write_text("oracle:\n  max_depth: 0\n", encoding="utf-8")
    assert main(["--config", str(bad), "info", graph]) == 3

    good = tmp_path / "good.yaml"
    good.write_text("logger:\n  default: warning\n", encoding="utf-8")
    assert main(["--config", str(good), "-v", "info", graph]) == 0
    assert logging.getLogger(DOMAIN).level == logging.DEBUG
