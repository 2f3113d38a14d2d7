"""Shared fixtures: small named graphs and a seeded random source."""

from __future__ import annotations

import json
import os
import random
from pathlib import Path

import pytest

from gk3shift.const import SEED_ENV_VAR
from gk3shift.graph import MultiGraph, graph_to_dict, new_graph


def loop1() -> MultiGraph:
    """One vertex with one loop."""
    return new_graph(["u"], [("u", "u")])


def m1() -> MultiGraph:
    """Loop at u, one edge u -> w, loop at w; edges e0, e1, e2."""
    return new_graph(["u", "w"], [("u", "u"), ("u", "w"), ("w", "w")])


def two_cycles(trails: list[tuple[str, str]]) -> MultiGraph:
    """Source 2-cycle v0 -> v1 -> v0 and sink 2-cycle w0 -> w1 -> w0 plus trail edges."""
    return new_graph(
        ["v0", "v1", "w0", "w1"],
        [("v0", "v1"), ("v1", "v0"), ("w0", "w1"), ("w1", "w0"), *trails],
    )


def crossed_pair(ranges: dict[tuple[int, int], int]) -> MultiGraph:
    """
    Two source and two sink 2-cycles with one trail per pair.

    ranges[(i, j)] is the index on sink cycle j hit by the trail from the
    index-0 vertex of source cycle i.
    """
    vertices = [f"{prefix}{k}_{n}" for prefix in ("s", "d") for k in (1, 2) for n in (0, 1)]
    edges = []
    for prefix in ("s", "d"):
        for k in (1, 2):
            first, second = f"{prefix}{k}_0", f"{prefix}{k}_1"
            edges.extend([(first, second), (second, first)])
    edges.extend(
        (f"s{i + 1}_0", f"d{j + 1}_{b}") for (i, j), b in sorted(ranges.items())
    )
    return new_graph(vertices, edges)


@pytest.fixture
def rng() -> random.Random:
    """Random source seeded from the environment for reproducible runs."""
    seed = int(os.environ.get(SEED_ENV_VAR, "20240611"))
    return random.Random(seed)


@pytest.fixture
def loop_graph() -> MultiGraph:
    return loop1()


@pytest.fixture
def m1_graph() -> MultiGraph:
    return m1()


@pytest.fixture
def e2_graph() -> MultiGraph:
    """Two parallel trail edges v0 -> w0."""
    return two_cycles([("v0", "w0"), ("v0", "w0")])


@pytest.fixture
def f2_graph() -> MultiGraph:
    """Trail edges v0 -> w0 and v0 -> w1."""
    return two_cycles([("v0", "w0"), ("v0", "w1")])


@pytest.fixture
def crossed_e() -> MultiGraph:
    """Every trail lands on index 0."""
    return crossed_pair({(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 0})


@pytest.fixture
def crossed_f() -> MultiGraph:
    """Like crossed_e with three of the four trails moved to index 1."""
    return crossed_pair({(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 1})


@pytest.fixture
def chain3() -> MultiGraph:
    """Loops at a, b and c with edges a -> b -> c."""
    return new_graph(
        ["a", "b", "c"], [("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c")]
    )


@pytest.fixture
def long_trail() -> MultiGraph:
    """M1 with the trail u -> w subdivided by x."""
    return new_graph(["u", "x", "w"], [("u", "u"), ("u", "x"), ("x", "w"), ("w", "w")])


@pytest.fixture
def write_graph(tmp_path: Path):
    """Write a graph as JSON under tmp_path and return the path as a string."""

    def write(name: str, graph: MultiGraph) -> str:
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(graph_to_dict(graph)), encoding="utf-8")
        return str(path)

    return write
