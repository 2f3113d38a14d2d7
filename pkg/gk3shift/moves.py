"""Williams graph moves: in/out-splittings and their amalgamations."""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from collections.abc import Iterator, Mapping, Sequence
from typing import Any

import voluptuous as vol
from sympy.utilities.iterables import multiset_partitions

from .const import NAME_SEPARATOR
from .exceptions import (
    DuplicateIdentifierError,
    EmptyClassError,
    Gk3ShiftError,
    InvalidAmalgamationError,
    MoveReplayError,
    NoIncomingEdgesError,
    NotAPartitionError,
    ParseError,
    UnknownVertexError,
)
from .graph import MultiGraph, transpose
from .models import Edge, Move, MoveKind, MoveTrace, PartitionSpec

_LOGGER = logging.getLogger(__name__)

_IDS = [vol.Coerce(str)]

MOVE_SCHEMA = vol.Schema(
    {
        vol.Required("kind"): vol.Coerce(MoveKind),
        vol.Required("pivot"): vol.Coerce(str),
        vol.Required("classes"): [_IDS],
        vol.Optional("group", default=[]): _IDS,
        vol.Optional("matching", default=[]): [_IDS],
        vol.Optional("renaming", default={}): {vol.Coerce(str): _IDS},
    }
)

TRACE_SCHEMA = vol.Schema([MOVE_SCHEMA])


def _split(
    graph: MultiGraph,
    pivot: str,
    classes: Sequence[Sequence[str]],
    vertex_names: Sequence[str] | None = None,
    edge_names: Mapping[str, Sequence[str]] | None = None,
) -> tuple[MultiGraph, dict[str, tuple[str, ...]]]:
    """In-split incidence; returns the graph and the renaming it applied."""
    if pivot not in graph.vertex_set:
        msg = f"Unknown pivot {pivot}"
        raise UnknownVertexError(msg)
    fiber = graph.in_edges(pivot)
    if not fiber:
        msg = f"Vertex {pivot} has no incoming edges"
        raise NoIncomingEdgesError(msg)
    if any(not c for c in classes):
        msg = f"Empty class in partition at {pivot}"
        raise EmptyClassError(msg)
    flat = [e for c in classes for e in c]
    if len(flat) != len(set(flat)) or set(flat) != set(fiber):
        msg = f"Classes {[list(c) for c in classes]} do not partition {fiber}"
        raise NotAPartitionError(msg)

    count = len(classes)
    names = tuple(vertex_names or (f"{pivot}{NAME_SEPARATOR}{k + 1}" for k in range(count)))
    class_of = {e: k for k, c in enumerate(classes) for e in c}
    renaming: dict[str, tuple[str, ...]] = {pivot: names}

    vertices: list[str] = []
    for vertex in graph.vertices:
        vertices.extend(names if vertex == pivot else (vertex,))

    edges: list[Edge] = []
    for edge in graph.edges:
        target = names[class_of[edge.edge_id]] if edge.target == pivot else edge.target
        if edge.source != pivot:
            edges.append(Edge(edge.edge_id, edge.source, target))
            continue
        copies = tuple(
            edge_names[edge.edge_id]
            if edge_names
            else (f"{edge.edge_id}{NAME_SEPARATOR}{k + 1}" for k in range(count))
        )
        renaming[edge.edge_id] = copies
        edges.extend(Edge(copy, names[k], target) for k, copy in enumerate(copies))

    return MultiGraph(tuple(vertices), tuple(edges)), renaming


def _merged_name(members: Sequence[str], taken: set[str] | frozenset[str]) -> str:
    """P when members are exactly P#1..P#k and P is free, else the first member."""
    base, separator, _ = members[0].rpartition(NAME_SEPARATOR)
    pattern = tuple(f"{base}{NAME_SEPARATOR}{k + 1}" for k in range(len(members)))
    if separator and base and tuple(members) == pattern and base not in taken:
        return base
    return members[0]


def _auto_matching(graph: MultiGraph, group: Sequence[str]) -> list[tuple[str, ...]]:
    """Pair up out-edges of the group members by (range, id) order."""
    per_member = [
        sorted(graph.out_edges(v), key=lambda e: (graph.edge(e).target, e)) for v in group
    ]
    targets = [[graph.edge(e).target for e in edges] for edges in per_member]
    if any(t != targets[0] for t in targets):
        msg = f"Vertices {list(group)} have different out-edge ranges"
        raise InvalidAmalgamationError(msg)
    return list(zip(*per_member, strict=True))


def _amalgamate(
    graph: MultiGraph,
    group: Sequence[str],
    matching: Sequence[Sequence[str]] | None,
) -> tuple[MultiGraph, str, tuple[tuple[str, ...], ...], tuple[tuple[str, ...], ...], dict]:
    """In-amalgamation; returns graph, merged vertex, induced classes, matching, renaming."""
    group = tuple(group)
    if not group or len(set(group)) != len(group):
        msg = f"Invalid group {list(group)}"
        raise InvalidAmalgamationError(msg)
    for vertex in group:
        if vertex not in graph.vertex_set:
            msg = f"Unknown vertex {vertex} in group"
            raise UnknownVertexError(msg)

    if matching is None:
        matching = _auto_matching(graph, group)
    tuples = [tuple(t) for t in matching]
    owned = Counter(e for v in group for e in graph.out_edges(v))
    used = Counter(e for t in tuples for e in t)
    if used != owned or any(len(t) != len(group) for t in tuples):
        msg = f"Matching {tuples} does not cover the out-edges of {list(group)}"
        raise InvalidAmalgamationError(msg)
    for row in tuples:
        if any(graph.edge(e).source != v for e, v in zip(row, group, strict=True)):
            msg = f"Matching row {row} is not ordered like the group {list(group)}"
            raise InvalidAmalgamationError(msg)
        if len({graph.edge(e).target for e in row}) != 1:
            msg = f"Matched edges {row} do not share a range"
            raise InvalidAmalgamationError(msg)

    members = set(group)
    merged = _merged_name(group, graph.vertex_set - members)
    matched = {e for row in tuples for e in row}
    free_edges = set(graph.edge_map) - matched
    row_of = {e: k for k, row in enumerate(tuples) for e in row}
    row_name = [_merged_name(row, free_edges) for row in tuples]

    vertices: list[str] = []
    for vertex in graph.vertices:
        if vertex not in members:
            vertices.append(vertex)
        elif merged not in vertices:
            vertices.append(merged)

    edges: list[Edge] = []
    emitted: set[int] = set()
    for edge in graph.edges:
        target = merged if edge.target in members else edge.target
        if edge.source not in members:
            edges.append(Edge(edge.edge_id, edge.source, target))
            continue
        row = row_of[edge.edge_id]
        if row not in emitted:
            emitted.add(row)
            edges.append(Edge(row_name[row], merged, target))

    try:
        amalgamated = MultiGraph(tuple(vertices), tuple(edges))
    except DuplicateIdentifierError as err:
        msg = f"Merged identifiers collide: {err}"
        raise InvalidAmalgamationError(msg) from err

    position = {v: k for k, v in enumerate(group)}
    classes: list[list[str]] = [[] for _ in group]
    original_target = {e.edge_id: e.target for e in graph.edges}
    for edge in amalgamated.edges:
        if edge.target != merged:
            continue
        if edge.source == merged:
            origin = original_target[tuples[row_name.index(edge.edge_id)][0]]
        else:
            origin = original_target[edge.edge_id]
        classes[position[origin]].append(edge.edge_id)
    induced = tuple(tuple(c) for c in classes)

    try:
        resplit, _ = _split(
            amalgamated,
            merged,
            induced,
            vertex_names=group,
            edge_names={row_name[k]: row for k, row in enumerate(tuples)},
        )
    except Gk3ShiftError as err:
        msg = f"Group {list(group)} does not split back: {err}"
        raise InvalidAmalgamationError(msg) from err
    if set(resplit.edges) != set(graph.edges) or set(resplit.vertices) != graph.vertex_set:
        msg = f"Merging {list(group)} and splitting again does not restore the graph"
        raise InvalidAmalgamationError(msg)

    renaming: dict[str, tuple[str, ...]] = {v: (merged,) for v in group}
    for k, row in enumerate(tuples):
        for edge_id in row:
            renaming[edge_id] = (row_name[k],)
    return amalgamated, merged, induced, tuple(tuples), renaming


def in_split(graph: MultiGraph, spec: PartitionSpec) -> tuple[MultiGraph, Move]:
    """
    Split spec.pivot by a partition of its incoming edges.

    Incoming edges of class k move to pivot#k; every outgoing edge e of the
    pivot is copied to e#1..e#m with e#k leaving pivot#k.

    Raises:
        NoIncomingEdgesError: If the pivot has no incoming edges.
        EmptyClassError: If a class is empty.
        NotAPartitionError: If the classes do not partition the incoming edges.

    """
    classes = tuple(tuple(c) for c in spec.classes)
    result, renaming = _split(graph, spec.pivot, classes)
    _LOGGER.debug("In-split %s into %d classes", spec.pivot, len(classes))
    return result, Move(MoveKind.IN_SPLIT, spec.pivot, classes, renaming=renaming)


def out_split(graph: MultiGraph, spec: PartitionSpec) -> tuple[MultiGraph, Move]:
    """Split spec.pivot by a partition of its outgoing edges (in-split of the transpose)."""
    result, move = in_split(transpose(graph), spec)
    return transpose(result), Move(
        MoveKind.OUT_SPLIT, move.pivot, move.classes, renaming=move.renaming
    )


def in_amalgamate(
    graph: MultiGraph,
    group: Sequence[str],
    matching: Sequence[Sequence[str]] | None = None,
) -> tuple[MultiGraph, Move]:
    """
    Merge a group of vertices whose outgoing edges pair up with equal ranges.

    matching lists edge tuples, one edge per group member in group order, that
    collapse into a single edge; it defaults to pairing by (range, id).

    Raises:
        InvalidAmalgamationError: If the merged graph does not split back to graph.

    """
    result, merged, induced, tuples, renaming = _amalgamate(graph, group, matching)
    _LOGGER.debug("In-amalgamated %s into %s", list(group), merged)
    return result, Move(
        MoveKind.IN_AMALGAMATE,
        merged,
        induced,
        group=tuple(group),
        matching=tuples,
        renaming=renaming,
    )


def out_amalgamate(
    graph: MultiGraph,
    group: Sequence[str],
    matching: Sequence[Sequence[str]] | None = None,
) -> tuple[MultiGraph, Move]:
    """Merge a group whose incoming edges pair up with equal sources."""
    result, move = in_amalgamate(transpose(graph), group, matching)
    return transpose(result), Move(
        MoveKind.OUT_AMALGAMATE,
        move.pivot,
        move.classes,
        group=move.group,
        matching=move.matching,
        renaming=move.renaming,
    )


def perform(
    graph: MultiGraph,
    kind: MoveKind,
    *,
    pivot: str | None = None,
    classes: Sequence[Sequence[str]] = (),
    group: Sequence[str] = (),
    matching: Sequence[Sequence[str]] | None = None,
) -> tuple[MultiGraph, Move]:
    """Dispatch a move request by kind."""
    if kind is MoveKind.IN_SPLIT:
        return in_split(graph, PartitionSpec(str(pivot), tuple(map(tuple, classes))))
    if kind is MoveKind.OUT_SPLIT:
        return out_split(graph, PartitionSpec(str(pivot), tuple(map(tuple, classes))))
    if kind is MoveKind.IN_AMALGAMATE:
        return in_amalgamate(graph, group, matching)
    return out_amalgamate(graph, group, matching)


def apply_move(graph: MultiGraph, move: Move, index: int = 0) -> MultiGraph:
    """
    Replay one recorded move and check it renames exactly as recorded.

    Raises:
        MoveReplayError: If the move fails or produces a different renaming.

    """
    try:
        if move.kind.is_split:
            result, replayed = perform(graph, move.kind, pivot=move.pivot, classes=move.classes)
        else:
            result, replayed = perform(
                graph, move.kind, group=move.group, matching=move.matching or None
            )
    except Gk3ShiftError as err:
        raise MoveReplayError(index, str(err)) from err

    if replayed.renaming != move.renaming or replayed.pivot != move.pivot:
        msg = f"{move.kind} at {move.pivot} renames differently than recorded"
        raise MoveReplayError(index, msg)
    return result


def apply_trace(graph: MultiGraph, trace: MoveTrace) -> MultiGraph:
    """
    Fold the moves of a trace over graph.

    Raises:
        MoveReplayError: For the first move that does not replay, with its index.

    """
    for index, move in enumerate(trace):
        graph = apply_move(graph, move, index)
    return graph


def inverse_move(before: MultiGraph, move: Move) -> dict[str, Any]:
    """Arguments for perform() that undo move, in terms of the moved graph's names."""
    if move.kind is MoveKind.IN_SPLIT:
        fiber = before.out_edges(move.pivot)
        return {
            "kind": MoveKind.IN_AMALGAMATE,
            "group": move.renaming[move.pivot],
            "matching": [move.renaming[e] for e in fiber],
        }
    if move.kind is MoveKind.OUT_SPLIT:
        fiber = before.in_edges(move.pivot)
        return {
            "kind": MoveKind.OUT_AMALGAMATE,
            "group": move.renaming[move.pivot],
            "matching": [move.renaming[e] for e in fiber],
        }
    kind = MoveKind.IN_SPLIT if move.kind is MoveKind.IN_AMALGAMATE else MoveKind.OUT_SPLIT
    return {"kind": kind, "pivot": move.pivot, "classes": move.classes}


def _partitions(fiber: Sequence[str], max_classes: int) -> Iterator[tuple[tuple[str, ...], ...]]:
    ordered = sorted(fiber)
    for count in range(1, min(max_classes, len(ordered)) + 1):
        for partition in multiset_partitions(ordered, count):
            yield tuple(tuple(c) for c in partition)


def successors(graph: MultiGraph, max_classes: int = 2) -> Iterator[tuple[MultiGraph, Move]]:
    """
    Every graph one move away, with the move.

    Splits use all partitions of a fiber into at most max_classes classes;
    amalgamations use groups of 2..max_classes vertices.
    """
    for vertex in graph.vertices:
        for kind, fiber in (
            (MoveKind.IN_SPLIT, graph.in_edges(vertex)),
            (MoveKind.OUT_SPLIT, graph.out_edges(vertex)),
        ):
            if not fiber:
                continue
            for classes in _partitions(fiber, max_classes):
                try:
                    yield perform(graph, kind, pivot=vertex, classes=classes)
                except DuplicateIdentifierError:
                    _LOGGER.debug("Skipping split at %s: new names collide", vertex)

    for size in range(2, max_classes + 1):
        for group in itertools.combinations(graph.vertices, size):
            for kind in (MoveKind.IN_AMALGAMATE, MoveKind.OUT_AMALGAMATE):
                try:
                    yield perform(graph, kind, group=group)
                except InvalidAmalgamationError:
                    continue


def legal_moves(graph: MultiGraph, max_classes: int = 2) -> Iterator[Move]:
    """Moves applicable to graph within max_classes, in canonical order."""
    for _, move in successors(graph, max_classes):
        yield move


def move_from_dict(data: Any) -> Move:
    """Validate and build a move from its JSON form."""
    try:
        validated = MOVE_SCHEMA(data)
    except vol.Invalid as err:
        msg = f"Invalid move: {err}"
        raise ParseError(msg) from err
    return Move(
        validated["kind"],
        validated["pivot"],
        tuple(tuple(c) for c in validated["classes"]),
        group=tuple(validated["group"]),
        matching=tuple(tuple(m) for m in validated["matching"]),
        renaming={old: tuple(new) for old, new in validated["renaming"].items()},
    )


def trace_from_list(data: Any) -> MoveTrace:
    """Validate and build a trace from its JSON form."""
    if not isinstance(data, list):
        msg = "A move trace must be a JSON list"
        raise ParseError(msg)
    return MoveTrace(tuple(move_from_dict(item) for item in data))
