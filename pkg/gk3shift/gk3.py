"""Structure of GK3 graphs: pointed cycles, trails, normal form and trail shifting."""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Sequence
from functools import cache
from math import gcd

from sympy.core.intfunc import igcdex

from .exceptions import (
    MixedCycleError,
    NotGK3Error,
    NotInteriorError,
    SharedTrailError,
    UnknownTrailError,
)
from .gk import is_gk3
from .graph import MultiGraph, cycle_poset
from .models import (
    Cycle,
    IndexedCycle,
    Move,
    MoveTrace,
    PartitionSpec,
    PointedGK3,
    Trail,
    TrailClass,
)
from .moves import in_amalgamate, in_split, out_split

_LOGGER = logging.getLogger(__name__)


def _indexed(cycle: Cycle, start: str) -> IndexedCycle:
    offset = cycle.vertices.index(start)
    return IndexedCycle(
        cycle.vertices[offset:] + cycle.vertices[:offset],
        cycle.edges[offset:] + cycle.edges[:offset],
    )


def _source_start(cycle: Cycle, heads: Counter[str]) -> str:
    """Start where the trail counts read around the cycle are largest; names break ties."""
    counts = [heads[v] for v in cycle.vertices]
    rotations = {
        vertex: tuple(counts[k:] + counts[:k]) for k, vertex in enumerate(cycle.vertices)
    }
    best = max(rotations.values())
    return min(vertex for vertex, rotated in rotations.items() if rotated == best)


def _trace_trails(graph: MultiGraph, start: str, on_cycle: dict[str, int]) -> list[list[str]]:
    """Edge lists of every path from start through interior vertices to a cycle."""
    found: list[list[str]] = []
    stack: list[tuple[str, list[str]]] = [
        (graph.edge(e).target, [e])
        for e in reversed(graph.out_edges(start))
        if graph.edge(e).target not in on_cycle
        or on_cycle[graph.edge(e).target] != on_cycle[start]
    ]
    while stack:
        vertex, path = stack.pop()
        if vertex in on_cycle:
            found.append(path)
            continue
        stack.extend(
            (graph.edge(e).target, [*path, e]) for e in reversed(graph.out_edges(vertex))
        )
    return found


def pointed_structure(graph: MultiGraph) -> PointedGK3:
    """
    Split a GK3 graph into indexed source cycles, sink cycles and trails.

    Source cycles are the maximal cycles and sink cycles the minimal ones. The
    index-0 vertex of a source cycle is the common source of its trails when
    there is one. Otherwise it is the vertex from which the per-vertex trail
    counts, read along the cycle, are lexicographically largest, with names
    breaking only rotational ties. Sink cycles start at their smallest vertex.

    Raises:
        NotGK3Error: If the graph is not of dimension three.
        MixedCycleError: If a cycle is neither maximal nor minimal.

    """
    if not is_gk3(graph):
        msg = "Graph is not a connected essential graph of GK dimension 3"
        raise NotGK3Error(msg)

    poset = cycle_poset(graph)
    maximal, minimal = set(poset.maximal()), set(poset.minimal())
    for k, cycle in enumerate(poset.cycles):
        if (k in maximal) == (k in minimal):
            msg = f"Cycle {list(cycle.vertices)} is neither a source nor a sink cycle"
            raise MixedCycleError(msg)

    def by_smallest(k: int) -> str:
        return min(poset.cycles[k].vertices)

    source_raw = [poset.cycles[k] for k in sorted(maximal, key=by_smallest)]
    sink_raw = [poset.cycles[k] for k in sorted(minimal, key=by_smallest)]

    on_cycle: dict[str, int] = {}
    for position, cycle in enumerate(source_raw + sink_raw):
        for vertex in cycle.vertices:
            on_cycle[vertex] = position

    paths: list[list[str]] = []
    for cycle in source_raw:
        for vertex in cycle.vertices:
            paths.extend(_trace_trails(graph, vertex, on_cycle))

    heads = Counter(graph.edge(p[0]).source for p in paths)
    source_cycles = [_indexed(cycle, _source_start(cycle, heads)) for cycle in source_raw]
    sink_cycles = [_indexed(cycle, min(cycle.vertices)) for cycle in sink_raw]

    sink_position = {v: j for j, c in enumerate(sink_cycles) for v in c.vertices}
    source_position = {v: i for i, c in enumerate(source_cycles) for v in c.vertices}
    rows = []
    for path in paths:
        head, tail = graph.edge(path[0]).source, graph.edge(path[-1]).target
        i, j = source_position[head], sink_position[tail]
        rows.append(
            (i, source_cycles[i].index_of(head), j, sink_cycles[j].index_of(tail), tuple(path))
        )
    rows.sort()
    trails = tuple(Trail(k, *row) for k, row in enumerate(rows))
    return PointedGK3(graph, tuple(source_cycles), tuple(sink_cycles), trails)


def _distance_tables(pointed: PointedGK3) -> tuple[dict[str, int], dict[str, int]]:
    graph = pointed.graph
    interior = set(pointed.interior_vertices())

    @cache
    def down(vertex: str) -> int:
        return max(
            1 + (down(t) if t in interior else 0)
            for t in (graph.edge(e).target for e in graph.out_edges(vertex))
        )

    @cache
    def up(vertex: str) -> int:
        return max(
            1 + (up(s) if s in interior else 0)
            for s in (graph.edge(e).source for e in graph.in_edges(vertex))
        )

    return {v: down(v) for v in interior}, {v: up(v) for v in interior}


def trail_distances(graph: MultiGraph, vertex: str) -> tuple[int, int]:
    """
    (d, l): longest trail suffix from vertex and longest trail prefix to it.

    Raises:
        NotInteriorError: If the vertex lies on a cycle.

    """
    pointed = pointed_structure(graph)
    down, up = _distance_tables(pointed)
    if vertex not in down:
        msg = f"Vertex {vertex} is not an interior vertex"
        raise NotInteriorError(msg)
    return down[vertex], up[vertex]


def is_normal_form(graph: MultiGraph) -> bool:
    """GK3, every trail a single edge, and one trail source per source cycle."""
    try:
        pointed = pointed_structure(graph)
    except (NotGK3Error, MixedCycleError):
        return False
    return is_pointed_normal(pointed)


def is_pointed_normal(pointed: PointedGK3) -> bool:
    """Normal-form test on an already pointed graph."""
    if any(t.length != 1 for t in pointed.trails):
        return False
    sources: dict[int, set[int]] = {}
    for trail in pointed.trails:
        sources.setdefault(trail.source_cycle, set()).add(trail.source_index)
    return all(len(s) == 1 for s in sources.values())


def pull_source_back(
    graph: MultiGraph, trail_edges: Sequence[str]
) -> tuple[MultiGraph, Move, tuple[str, ...]]:
    """
    Move a trail's source one step back along its source cycle.

    Out-splits the trail source v into (every other edge out of v) and (the
    first trail edge); the copy of the cycle edge into v that feeds the second
    class becomes the new first trail edge.
    """
    first = trail_edges[0]
    vertex = graph.edge(first).source
    rest = tuple(e for e in graph.out_edges(vertex) if e != first)
    (incoming,) = graph.in_edges(vertex)
    graph, move = out_split(graph, PartitionSpec(vertex, (rest, (first,))))
    return graph, move, (move.renaming[incoming][1], *trail_edges)


def pull_range_back(
    graph: MultiGraph, trail_edges: Sequence[str]
) -> tuple[MultiGraph, Move, tuple[str, ...]]:
    """
    Drop the last edge of a trail, moving its range one step back on the sink cycle.

    In-amalgamates the last interior vertex with the predecessor of the range on
    the sink cycle, matching the last trail edge with the cycle edge.
    """
    last = graph.edge(trail_edges[-1])
    target = last.target
    cycle_edge = graph.out_edges(target)[0]
    while graph.edge(cycle_edge).target != target:
        cycle_edge = graph.out_edges(graph.edge(cycle_edge).target)[0]
    predecessor = graph.edge(cycle_edge).source
    graph, move = in_amalgamate(
        graph, [predecessor, last.source], matching=[(cycle_edge, last.edge_id)]
    )
    return graph, move, tuple(trail_edges[:-1])


def _split_all(
    graph: MultiGraph, moves: list[Move], *, outgoing: bool
) -> MultiGraph:
    """Split interior vertices with several out- (or in-) edges into single-edge vertices."""
    while True:
        pointed = pointed_structure(graph)
        down, up = _distance_tables(pointed)
        fiber = graph.out_edges if outgoing else graph.in_edges
        distance = down if outgoing else up
        candidates = [v for v in pointed.interior_vertices() if len(fiber(v)) > 1]
        if not candidates:
            return graph
        vertex = min(candidates, key=lambda v: (distance[v], v))
        spec = PartitionSpec(vertex, tuple((e,) for e in fiber(vertex)))
        graph, move = (out_split if outgoing else in_split)(graph, spec)
        moves.append(move)


def to_normal_form(graph: MultiGraph) -> tuple[MultiGraph, MoveTrace]:
    """
    Reduce a GK3 graph to normal form with a replayable trace.

    Raises:
        NotGK3Error: If the graph is not of dimension three.

    """
    moves: list[Move] = []
    graph = _split_all(graph, moves, outgoing=True)
    graph = _split_all(graph, moves, outgoing=False)

    pointed = pointed_structure(graph)
    pulls: list[tuple[tuple[str, ...], int]] = []
    for i, cycle in enumerate(pointed.source_cycles):
        trails = [t for t in pointed.trails if t.source_cycle == i]
        offsets = sorted({t.source_index for t in trails})
        # common source: least total distance the trails must travel back
        target = min(
            offsets,
            key=lambda a: (
                sum((t.source_index - a) % cycle.length for t in trails),
                cycle.vertices[a],
            ),
        )
        pulls.extend((t.edges, (t.source_index - target) % cycle.length) for t in trails)

    trails_after: list[tuple[str, ...]] = []
    for edges, steps in pulls:
        for _ in range(steps):
            graph, move, edges = pull_source_back(graph, edges)
            moves.append(move)
        trails_after.append(edges)

    for edges in trails_after:
        while len(edges) > 1:
            graph, move, edges = pull_range_back(graph, edges)
            moves.append(move)

    _LOGGER.debug("Normal form reached after %d moves", len(moves))
    return graph, MoveTrace(tuple(moves))


def bezout_steps(p: int, q: int) -> tuple[int, int, int]:
    """Positive (pt, qt) with pt*p - qt*q = gcd(p, q), and the gcd."""
    x, _, d = igcdex(p, q)
    x, d = int(x), int(d)
    step = q // d
    pt = x % step or step
    while pt * p - d <= 0:
        pt += step
    return pt, (pt * p - d) // q, d


def _shift_trail(
    graph: MultiGraph, edges: tuple[str, ...], p: int, q: int, moves: list[Move]
) -> tuple[MultiGraph, tuple[str, ...]]:
    pt, _, _ = bezout_steps(p, q)
    for _ in range(pt * p):
        graph, move, edges = pull_source_back(graph, edges)
        moves.append(move)
    for _ in range(pt * p):
        graph, move, edges = pull_range_back(graph, edges)
        moves.append(move)
    return graph, edges


def _require_private(graph: MultiGraph, edges: Sequence[str]) -> None:
    for edge_id in edges[1:]:
        vertex = graph.edge(edge_id).source
        if len(graph.in_edges(vertex)) != 1 or len(graph.out_edges(vertex)) != 1:
            msg = f"Trail vertex {vertex} is shared with other trails"
            raise SharedTrailError(msg)


def shift_trail_range(graph: MultiGraph, trail_index: int) -> tuple[MultiGraph, MoveTrace]:
    """
    Move one trail's range back by gcd(p, q) along its sink cycle.

    The trail is first lengthened by pt*p edges at its source cycle, which
    leaves its source where it was, then shortened by as many edges at its
    sink cycle: pt*p = qt*q + gcd(p, q), so the range ends gcd(p, q) steps
    back and the length is restored.

    Raises:
        NotGK3Error: If the graph is not of dimension three.
        UnknownTrailError: If there is no trail with that index.
        SharedTrailError: If an interior vertex of the trail has other edges.

    """
    pointed = pointed_structure(graph)
    if not 0 <= trail_index < len(pointed.trails):
        msg = f"No trail {trail_index}; the graph has {len(pointed.trails)}"
        raise UnknownTrailError(msg)
    trail = pointed.trails[trail_index]
    _require_private(graph, trail.edges)

    p = pointed.source_cycles[trail.source_cycle].length
    q = pointed.sink_cycles[trail.sink_cycle].length
    moves: list[Move] = []
    graph, _ = _shift_trail(graph, trail.edges, p, q, moves)
    _LOGGER.debug("Shifted trail %d (p=%d, q=%d) with %d moves", trail_index, p, q, len(moves))
    return graph, MoveTrace(tuple(moves))


def align_trails(
    pointed: PointedGK3,
    source_steps: Sequence[int],
    sink_offsets: Sequence[int],
) -> tuple[MultiGraph, MoveTrace]:
    """
    Rotate common sources and reduce trail ranges into offset windows.

    Every trail of source cycle i has its source moved back source_steps[i]
    times together with its range. Afterwards each trail's range is shifted
    back by multiples of gcd(p_i, q_j) into the window of gcd(p_i, q_j)
    vertices starting at index -sink_offsets[j] of its sink cycle. Indices
    are those of pointed; the input must be in normal form.
    """
    graph = pointed.graph
    moves: list[Move] = []
    placed: list[tuple[Trail, tuple[str, ...], int]] = []

    for trail in pointed.trails:
        edges = trail.edges
        for _ in range(source_steps[trail.source_cycle]):
            graph, move, edges = pull_source_back(graph, edges)
            moves.append(move)
            graph, move, edges = pull_range_back(graph, edges)
            moves.append(move)
        q = pointed.sink_cycles[trail.sink_cycle].length
        placed.append((trail, edges, (trail.range_index - source_steps[trail.source_cycle]) % q))

    for trail, edges, position in placed:
        p = pointed.source_cycles[trail.source_cycle].length
        q = pointed.sink_cycles[trail.sink_cycle].length
        d = gcd(p, q)
        offset = sink_offsets[trail.sink_cycle]
        window = ((position % d + offset) % d - offset) % q
        for _ in range(((position - window) % q) // d):
            graph, edges = _shift_trail(graph, edges, p, q, moves)

    return graph, MoveTrace(tuple(moves))


def trail_class(pointed: PointedGK3, trail: Trail) -> TrailClass:
    """Residue b - (a + |trail|) modulo gcd(p, q)."""
    p = pointed.source_cycles[trail.source_cycle].length
    q = pointed.sink_cycles[trail.sink_cycle].length
    modulus = gcd(p, q)
    residue = (trail.range_index - (trail.source_index + trail.length)) % modulus
    return TrailClass(trail.source_cycle, trail.sink_cycle, residue, modulus)
