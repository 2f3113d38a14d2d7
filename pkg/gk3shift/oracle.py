"""Brute-force oracles: bounded move search and matrix equivalence verifiers."""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import math
import pickle
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .config import OracleLimits
from .const import CACHE_VERSION
from .exceptions import DimensionMismatchError, Gk3ShiftError, LimitExceededError
from .graph import (
    MultiGraph,
    adjacency_matrix,
    find_isomorphism,
    graph_from_dict,
    graph_to_dict,
)
from .models import Move, MoveTrace
from .moves import apply_trace, inverse_move, perform, successors, trace_from_list

_LOGGER = logging.getLogger(__name__)

CanonKey = bytes

_FORWARD = "forward"
_BACKWARD = "backward"


def canon_key(graph: MultiGraph, limits: OracleLimits | None = None) -> CanonKey:
    """
    Byte encoding shared exactly by isomorphic graphs.

    Vertices are grouped by a degree invariant; the key is the least adjacency
    encoding over all orderings that keep the groups in invariant order.

    Raises:
        LimitExceededError: Above the vertex or permutation limit.

    """
    limits = limits or OracleLimits()
    size = len(graph.vertices)
    if size > limits.canon_vertex_limit:
        msg = f"{size} vertices exceed the canonical key limit {limits.canon_vertex_limit}"
        raise LimitExceededError(msg)

    matrix = adjacency_matrix(graph)
    invariants = [
        (
            int(matrix[k].sum()),
            int(matrix[:, k].sum()),
            int(matrix[k, k]),
            tuple(sorted(matrix[k].tolist())),
            tuple(sorted(matrix[:, k].tolist())),
        )
        for k in range(size)
    ]
    groups: dict[tuple, list[int]] = {}
    for k, invariant in enumerate(invariants):
        groups.setdefault(invariant, []).append(k)
    ordered = sorted(groups.items())

    count = math.prod(math.factorial(len(members)) for _, members in ordered)
    if count > limits.canon_permutation_limit:
        msg = f"{count} vertex orderings exceed the limit {limits.canon_permutation_limit}"
        raise LimitExceededError(msg)

    best: bytes | None = None
    for choice in itertools.product(
        *(itertools.permutations(members) for _, members in ordered)
    ):
        order = [k for part in choice for k in part]
        encoded = matrix[np.ix_(order, order)].tobytes()
        if best is None or encoded < best:
            best = encoded
    header = repr([(key, len(members)) for key, members in ordered]).encode()
    return header + b"|" + (best or b"")


@dataclass
class _Visit:
    graph: MultiGraph
    parent: bytes | None
    move: Move | None


def _expand(
    frontier: list[bytes], seen: dict[bytes, _Visit], limits: OracleLimits
) -> list[bytes]:
    layer: list[bytes] = []
    for key in frontier:
        visit = seen[key]
        for graph, move in successors(visit.graph, limits.max_classes):
            if len(graph.vertices) > limits.max_vertices:
                continue
            child = canon_key(graph, limits)
            if child in seen:
                continue
            seen[child] = _Visit(graph, key, move)
            layer.append(child)
    return layer


def _path(seen: dict[bytes, _Visit], key: bytes) -> list[_Visit]:
    visits = []
    while key is not None:
        visit = seen[key]
        visits.append(visit)
        key = visit.parent  # type: ignore[assignment]
    return visits[::-1]


def _translate(request: dict[str, Any], vertices: dict[str, str], edges: dict[str, str]) -> dict:
    translated = dict(request)
    if "pivot" in request:
        translated["pivot"] = vertices[request["pivot"]]
        translated["classes"] = [[edges[e] for e in c] for c in request["classes"]]
    if "group" in request:
        translated["group"] = [vertices[v] for v in request["group"]]
        if request.get("matching"):
            translated["matching"] = [[edges[e] for e in row] for row in request["matching"]]
    return translated


def _request(move: Move) -> dict[str, Any]:
    if move.kind.is_split:
        return {"kind": move.kind, "pivot": move.pivot, "classes": move.classes}
    return {"kind": move.kind, "group": move.group, "matching": move.matching or None}


def _transport(stored: MultiGraph, trace: MoveTrace, graph: MultiGraph) -> MoveTrace:
    """Redo a trace recorded on stored as moves on the isomorphic graph."""
    if stored == graph:
        return trace
    moves = []
    for move in trace:
        mapping = find_isomorphism(stored, graph)
        if mapping is None:
            msg = "Cached search result belongs to another graph"
            raise Gk3ShiftError(msg)
        graph, redone = perform(graph, **_translate(_request(move), *mapping))
        stored, _ = perform(stored, **_request(move))
        moves.append(redone)
    return MoveTrace(tuple(moves))


def _join(
    forward: dict[bytes, _Visit], backward: dict[bytes, _Visit], meeting: bytes
) -> MoveTrace:
    """Forward moves to the meeting graph, then undo the backward moves one by one."""
    moves = [v.move for v in _path(forward, meeting)[1:]]
    current = forward[meeting].graph
    for visit in reversed(_path(backward, meeting)[1:]):
        before = backward[visit.parent].graph  # type: ignore[index]
        mapping = find_isomorphism(visit.graph, current)
        if mapping is None:
            msg = "Meeting graphs are not isomorphic"
            raise Gk3ShiftError(msg)
        request = _translate(inverse_move(before, visit.move), *mapping)  # type: ignore[arg-type]
        current, move = perform(current, **request)
        moves.append(move)
    return MoveTrace(tuple(moves))  # type: ignore[arg-type]


def _cache_key(first: MultiGraph, second: MultiGraph, limits: OracleLimits) -> str:
    """Same for isomorphic inputs under the same bounds."""
    bounds = [limits.max_depth, limits.max_vertices, limits.max_classes]
    digest = hashlib.sha256()
    for key in (canon_key(first, limits), canon_key(second, limits)):
        digest.update(key)
        digest.update(b"\n")
    digest.update(json.dumps(bounds).encode())
    return digest.hexdigest()


def _read_cache(path: Path) -> dict[str, Any]:
    try:
        with path.open("rb") as handle:
            data = pickle.load(handle)  # noqa: S301
    except FileNotFoundError:
        return {}
    except (OSError, pickle.UnpicklingError, EOFError) as err:
        _LOGGER.warning("Ignoring unreadable search cache %s: %s", path, err)
        return {}
    if not isinstance(data, dict) or data.get("version") != CACHE_VERSION:
        _LOGGER.warning("Ignoring search cache %s with another format version", path)
        return {}
    return data.get("entries", {})


def _write_cache(path: Path, entries: dict[str, Any]) -> None:
    try:
        with path.open("wb") as handle:
            pickle.dump({"version": CACHE_VERSION, "entries": entries}, handle)
    except OSError as err:
        _LOGGER.warning("Cannot write search cache %s: %s", path, err)


def sse_search(
    first: MultiGraph,
    second: MultiGraph,
    limits: OracleLimits | None = None,
    cache_path: str | Path | None = None,
) -> MoveTrace | None:
    """
    Bidirectional breadth-first search for moves turning first into second.

    Each side explores half of max_depth; frontiers are deduplicated by
    canonical key. Returns a trace ending in a graph isomorphic to second,
    or None. None proves nothing.

    Raises:
        LimitExceededError: If either graph is above the size limits.

    """
    limits = limits or OracleLimits()
    for graph in (first, second):
        if len(graph.vertices) > limits.max_vertices:
            msg = f"{len(graph.vertices)} vertices exceed max_vertices {limits.max_vertices}"
            raise LimitExceededError(msg)

    cache = _read_cache(Path(cache_path)) if cache_path else {}
    key = _cache_key(first, second, limits)
    if key in cache:
        _LOGGER.debug("Search cache hit %s", key[:12])
        stored = cache[key]
        if stored is None:
            return None
        return _transport(
            graph_from_dict(stored["first"]), trace_from_list(stored["trace"]), first
        )

    trace = _search(first, second, limits)
    if cache_path:
        cache[key] = (
            None if trace is None else {"first": graph_to_dict(first), "trace": trace.as_list()}
        )
        _write_cache(Path(cache_path), cache)
    return trace


def _search(first: MultiGraph, second: MultiGraph, limits: OracleLimits) -> MoveTrace | None:
    start, goal = canon_key(first, limits), canon_key(second, limits)
    if start == goal:
        return MoveTrace()

    seen = {
        _FORWARD: {start: _Visit(first, None, None)},
        _BACKWARD: {goal: _Visit(second, None, None)},
    }
    budgets = {_FORWARD: (limits.max_depth + 1) // 2, _BACKWARD: limits.max_depth // 2}
    frontiers = {_FORWARD: [start], _BACKWARD: [goal]}
    for layer in range(budgets[_FORWARD]):
        for side, other in ((_FORWARD, _BACKWARD), (_BACKWARD, _FORWARD)):
            if layer >= budgets[side]:
                continue
            frontiers[side] = _expand(frontiers[side], seen[side], limits)
            _LOGGER.debug("%s layer %d: %d new graphs", side, layer + 1, len(frontiers[side]))
            meeting = next((key for key in frontiers[side] if key in seen[other]), None)
            if meeting is not None:
                return _join(seen[_FORWARD], seen[_BACKWARD], meeting)
    return None


def _as_matrix(data: Any) -> np.ndarray:
    matrix = np.asarray(data, dtype=np.int64)
    if matrix.ndim != 2:
        msg = f"Expected a matrix, got shape {matrix.shape}"
        raise DimensionMismatchError(msg)
    return matrix


def _check_shapes(a: np.ndarray, b: np.ndarray, r: np.ndarray, s: np.ndarray) -> None:
    if a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1]:
        msg = f"A {a.shape} and B {b.shape} must be square"
        raise DimensionMismatchError(msg)
    if r.shape != (a.shape[0], b.shape[0]) or s.shape != (b.shape[0], a.shape[0]):
        msg = f"R {r.shape} and S {s.shape} do not compose with A {a.shape} and B {b.shape}"
        raise DimensionMismatchError(msg)


def verify_elementary(a: Any, b: Any, r: Any, s: Any) -> bool:
    """
    A = RS and B = SR.

    Raises:
        DimensionMismatchError: If the shapes do not compose.

    """
    a, b, r, s = (_as_matrix(x) for x in (a, b, r, s))
    _check_shapes(a, b, r, s)
    return bool(np.array_equal(a, r @ s) and np.array_equal(b, s @ r))


def verify_se_witness(a: Any, b: Any, r: Any, s: Any, lag: int) -> bool:
    """
    A^lag = RS, B^lag = SR, AR = RB and SA = BS.

    Raises:
        DimensionMismatchError: If the shapes do not compose.

    """
    if lag < 1:
        msg = f"Lag must be at least 1, got {lag}"
        raise ValueError(msg)
    a, b, r, s = (_as_matrix(x) for x in (a, b, r, s))
    _check_shapes(a, b, r, s)
    return bool(
        np.array_equal(np.linalg.matrix_power(a, lag), r @ s)
        and np.array_equal(np.linalg.matrix_power(b, lag), s @ r)
        and np.array_equal(a @ r, r @ b)
        and np.array_equal(s @ a, b @ s)
    )


def _candidates(shape: tuple[int, int], entry_max: int) -> list[np.ndarray]:
    return [
        np.array(values, dtype=np.int64).reshape(shape)
        for values in itertools.product(range(entry_max + 1), repeat=shape[0] * shape[1])
    ]


def se_witness_search(
    a: Any, b: Any, limits: OracleLimits | None = None
) -> tuple[np.ndarray, np.ndarray, int] | None:
    """
    Exhaustive search for a shift equivalence (R, S, lag) with small entries.

    Raises:
        LimitExceededError: If the candidate space exceeds the limit.

    """
    limits = limits or OracleLimits()
    a, b = _as_matrix(a), _as_matrix(b)
    if a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1]:
        msg = f"A {a.shape} and B {b.shape} must be square"
        raise DimensionMismatchError(msg)
    n, k = a.shape[0], b.shape[0]
    space = (limits.witness_entry_max + 1) ** (n * k)
    if space > limits.witness_candidate_limit:
        msg = f"{space} candidate matrices exceed the limit {limits.witness_candidate_limit}"
        raise LimitExceededError(msg)

    rs = [r for r in _candidates((n, k), limits.witness_entry_max) if np.array_equal(a @ r, r @ b)]
    ss = [s for s in _candidates((k, n), limits.witness_entry_max) if np.array_equal(s @ a, b @ s)]
    _LOGGER.debug("%d intertwining R and %d intertwining S", len(rs), len(ss))
    for lag in range(1, limits.witness_lag_max + 1):
        a_power = np.linalg.matrix_power(a, lag)
        b_power = np.linalg.matrix_power(b, lag)
        for r, s in itertools.product(rs, ss):
            if np.array_equal(r @ s, a_power) and np.array_equal(s @ r, b_power):
                return r, s, lag
    return None


def verify_trace(first: MultiGraph, second: MultiGraph, trace: MoveTrace) -> bool:
    """The trace replays from first to a graph isomorphic to second."""
    try:
        result = apply_trace(first, trace)
    except Gk3ShiftError:
        return False
    return find_isomorphism(result, second) is not None

