"""Random graph and element generators for property tests."""

from __future__ import annotations

import random

from gk3shift.graph import MultiGraph, new_graph
from gk3shift.models import MonoidElement
from gk3shift.moves import successors


def _add_cycle(
    prefix: str, length: int, vertices: list[str], edges: list[tuple[str, str]]
) -> list[str]:
    names = [f"{prefix}_{k}" for k in range(length)]
    vertices.extend(names)
    edges.extend((names[k], names[(k + 1) % length]) for k in range(length))
    return names


def _cycle_pairs(rng: random.Random, m: int, n: int) -> list[tuple[int, int]]:
    """Source/sink pairs joined by trails; always connected."""
    pairs = {(0, j) for j in range(n)} | {(i, 0) for i in range(m)}
    pairs |= {(i, j) for i in range(m) for j in range(n) if rng.random() < 0.3}
    return sorted(pairs)


def random_gk3(
    rng: random.Random,
    *,
    max_cycles: int = 2,
    max_length: int = 2,
    max_interior: int = 2,
) -> MultiGraph:
    """Connected essential graph of GK dimension 3, trails of length 1 or 2."""
    m, n = rng.randint(1, max_cycles), rng.randint(1, max_cycles)
    vertices: list[str] = []
    edges: list[tuple[str, str]] = []
    sources = [_add_cycle(f"s{i}", rng.randint(1, max_length), vertices, edges) for i in range(m)]
    sinks = [_add_cycle(f"t{j}", rng.randint(1, max_length), vertices, edges) for j in range(n)]

    interior = 0
    for i, j in _cycle_pairs(rng, m, n):
        start, end = rng.choice(sources[i]), rng.choice(sinks[j])
        if interior < max_interior and rng.random() < 0.4:
            middle = f"x{interior}"
            interior += 1
            vertices.append(middle)
            edges.extend([(start, middle), (middle, end)])
            if n > 1 and rng.random() < 0.3:
                edges.append((middle, rng.choice(sinks[(j + 1) % n])))
        else:
            edges.append((start, end))
        if rng.random() < 0.2:
            edges.append((start, end))
    return new_graph(vertices, edges)


def random_normal_form(
    rng: random.Random, *, max_cycles: int = 2, max_length: int = 3
) -> MultiGraph:
    """GK3 graph in normal form: single-edge trails from index 0 of each source cycle."""
    m, n = rng.randint(1, max_cycles), rng.randint(1, max_cycles)
    vertices: list[str] = []
    edges: list[tuple[str, str]] = []
    sources = [_add_cycle(f"s{i}", rng.randint(1, max_length), vertices, edges) for i in range(m)]
    sinks = [_add_cycle(f"t{j}", rng.randint(1, max_length), vertices, edges) for j in range(n)]
    for i, j in _cycle_pairs(rng, m, n):
        for _ in range(rng.randint(1, 2)):
            edges.append((sources[i][0], rng.choice(sinks[j])))
    return new_graph(vertices, edges)


def random_element(
    rng: random.Random, graph: MultiGraph, *, terms: int = 3, shifts: range = range(-1, 4)
) -> MonoidElement:
    """Sum of a few random generators with small coefficients."""
    counts: dict[tuple[str, int], int] = {}
    for _ in range(rng.randint(1, terms)):
        key = (rng.choice(graph.vertices), rng.choice(shifts))
        counts[key] = counts.get(key, 0) + rng.randint(1, 2)
    return MonoidElement(counts)


def random_moves(
    rng: random.Random, graph: MultiGraph, count: int, max_vertices: int | None = None
) -> tuple[MultiGraph, int]:
    """Apply count random legal moves; returns the graph and the largest size seen."""
    largest = len(graph.vertices)
    for _ in range(count):
        options = [
            (moved, move)
            for moved, move in successors(graph)
            if max_vertices is None or len(moved.vertices) <= max_vertices
        ]
        graph, _ = rng.choice(options)
        largest = max(largest, len(graph.vertices))
    return graph, largest
