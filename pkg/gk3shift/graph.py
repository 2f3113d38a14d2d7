"""Finite directed multigraphs, structural predicates and cycle machinery."""

from __future__ import annotations

import itertools
import json
import logging
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import TYPE_CHECKING, Any

import networkx as nx
import numpy as np
import voluptuous as vol

from .exceptions import (
    DuplicateIdentifierError,
    NotDisjointCyclesError,
    ParseError,
    UnknownVertexError,
)
from .models import Cycle, CyclePoset, Edge

if TYPE_CHECKING:
    from .models import PointedGK3

_LOGGER = logging.getLogger(__name__)

_IDENT = vol.All(vol.Coerce(str), vol.Length(min=1))

GRAPH_SCHEMA = vol.Schema(
    {
        vol.Required("vertices"): [_IDENT],
        vol.Required("edges"): [
            vol.Any(
                vol.ExactSequence([_IDENT, _IDENT, _IDENT]),
                vol.ExactSequence([_IDENT, _IDENT]),
            )
        ],
    },
    extra=vol.ALLOW_EXTRA,
)

SOURCE_CYCLE_COLOR = "royalblue"
SINK_CYCLE_COLOR = "firebrick"
INTERIOR_COLOR = "gray40"
TRAIL_COLOR = "darkgreen"


@dataclass(frozen=True)
class MultiGraph:
    """
    Finite directed multigraph.

    Vertex order is the declared order and fixes adjacency-matrix rows. Parallel
    edges are distinguished by their identifiers.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        """Validate identifiers and endpoints."""
        if len(set(self.vertices)) != len(self.vertices):
            msg = f"Duplicate vertex identifiers in {list(self.vertices)}"
            raise DuplicateIdentifierError(msg)
        ids = [e.edge_id for e in self.edges]
        if len(set(ids)) != len(ids):
            msg = "Duplicate edge identifiers"
            raise DuplicateIdentifierError(msg)
        known = set(self.vertices)
        for edge in self.edges:
            for endpoint in (edge.source, edge.target):
                if endpoint not in known:
                    msg = f"Edge {edge.edge_id} uses undeclared vertex {endpoint}"
                    raise UnknownVertexError(msg)

    @cached_property
    def vertex_set(self) -> frozenset[str]:
        """Vertex identifiers as a set."""
        return frozenset(self.vertices)

    @cached_property
    def edge_map(self) -> dict[str, Edge]:
        """Edge identifier -> edge."""
        return {e.edge_id: e for e in self.edges}

    @cached_property
    def _fibers(self) -> tuple[dict[str, list[str]], dict[str, list[str]]]:
        outgoing: dict[str, list[str]] = {v: [] for v in self.vertices}
        incoming: dict[str, list[str]] = {v: [] for v in self.vertices}
        for edge in self.edges:
            outgoing[edge.source].append(edge.edge_id)
            incoming[edge.target].append(edge.edge_id)
        return outgoing, incoming

    def out_edges(self, vertex: str) -> list[str]:
        """Identifiers of edges with source vertex, in edge order."""
        self._require(vertex)
        return list(self._fibers[0][vertex])

    def in_edges(self, vertex: str) -> list[str]:
        """Identifiers of edges with range vertex, in edge order."""
        self._require(vertex)
        return list(self._fibers[1][vertex])

    def edge(self, edge_id: str) -> Edge:
        """Look up an edge by identifier."""
        try:
            return self.edge_map[edge_id]
        except KeyError as err:
            msg = f"Unknown edge {edge_id}"
            raise UnknownVertexError(msg) from err

    def _require(self, vertex: str) -> None:
        if vertex not in self.vertex_set:
            msg = f"Unknown vertex {vertex}"
            raise UnknownVertexError(msg)

    @cached_property
    def nx(self) -> nx.MultiDiGraph:
        """The graph as a networkx MultiDiGraph keyed by edge identifier."""
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.vertices)
        for edge in self.edges:
            graph.add_edge(edge.source, edge.target, key=edge.edge_id)
        return graph

    @cached_property
    def simple(self) -> nx.DiGraph:
        """Underlying simple digraph (parallel edges collapsed, loops kept)."""
        return nx.DiGraph(self.nx)


def new_graph(
    vertices: Iterable[str], edges: Iterable[tuple[str, str] | tuple[str, str, str]]
) -> MultiGraph:
    """
    Build a graph from vertex identifiers and edges.

    Edges are (source, range) pairs, named e0, e1, ... in order, or explicit
    (edge_id, source, range) triples.

    Raises:
        UnknownVertexError: If an edge endpoint is not declared.

    """
    built: list[Edge] = []
    for position, item in enumerate(edges):
        if len(item) == 3:
            edge_id, source, target = item
        else:
            source, target = item
            edge_id = f"e{position}"
        built.append(Edge(str(edge_id), str(source), str(target)))
    return MultiGraph(tuple(str(v) for v in vertices), tuple(built))


def from_matrix(matrix: Sequence[Sequence[int]] | np.ndarray) -> MultiGraph:
    """Build the graph with A(i, j) parallel edges v_i -> v_j."""
    array = np.asarray(matrix, dtype=np.int64)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        msg = f"Adjacency matrix must be square, got shape {array.shape}"
        raise ParseError(msg)
    if (array < 0).any():
        msg = "Adjacency matrix entries must be nonnegative"
        raise ParseError(msg)

    vertices = [f"v{k}" for k in range(array.shape[0])]
    pairs = [
        (vertices[i], vertices[j])
        for i, j in itertools.product(range(array.shape[0]), repeat=2)
        for _ in range(int(array[i, j]))
    ]
    return new_graph(vertices, pairs)


def transpose(graph: MultiGraph) -> MultiGraph:
    """Reverse every edge, keeping identifiers."""
    return MultiGraph(
        graph.vertices,
        tuple(Edge(e.edge_id, e.target, e.source) for e in graph.edges),
    )


def adjacency_matrix(graph: MultiGraph) -> np.ndarray:
    """Entry (v, w) counts edges v -> w, rows in declared vertex order."""
    position = {v: k for k, v in enumerate(graph.vertices)}
    matrix = np.zeros((len(graph.vertices), len(graph.vertices)), dtype=np.int64)
    for edge in graph.edges:
        matrix[position[edge.source], position[edge.target]] += 1
    return matrix


def is_essential(graph: MultiGraph) -> bool:
    """Every vertex has an incoming and an outgoing edge; False for the empty graph."""
    if not graph.vertices:
        return False
    return all(graph.out_edges(v) and graph.in_edges(v) for v in graph.vertices)


def is_connected(graph: MultiGraph) -> bool:
    """Underlying undirected graph is connected; False for the empty graph."""
    if not graph.vertices:
        return False
    return nx.is_weakly_connected(graph.nx)


def _rotate_to_smallest(cycle: list[str]) -> list[str]:
    start = cycle.index(min(cycle))
    return cycle[start:] + cycle[:start]


def enumerate_cycles(graph: MultiGraph) -> list[Cycle]:
    """All cycles, each once, starting at its smallest vertex identifier."""
    parallel: dict[tuple[str, str], list[str]] = defaultdict(list)
    for edge in graph.edges:
        parallel[edge.source, edge.target].append(edge.edge_id)

    cycles: list[Cycle] = []
    for node_cycle in nx.simple_cycles(graph.simple):
        ordered = _rotate_to_smallest(list(node_cycle))
        steps = [
            sorted(parallel[ordered[k], ordered[(k + 1) % len(ordered)]])
            for k in range(len(ordered))
        ]
        cycles.extend(
            Cycle(tuple(ordered), tuple(choice)) for choice in itertools.product(*steps)
        )
    cycles.sort(key=lambda c: (c.vertices, c.edges))
    return cycles


def _cyclic_components(graph: MultiGraph) -> list[set[str]]:
    components = []
    for component in nx.strongly_connected_components(graph.nx):
        if len(component) > 1:
            components.append(component)
        else:
            (vertex,) = component
            if graph.nx.has_edge(vertex, vertex):
                components.append(component)
    return components


def has_disjoint_cycles(graph: MultiGraph) -> bool:
    """No vertex lies on two distinct cycles."""
    for component in _cyclic_components(graph):
        inside = sum(
            1 for e in graph.edges if e.source in component and e.target in component
        )
        if inside != len(component):
            return False
    return True


def cycle_poset(graph: MultiGraph) -> CyclePoset:
    """
    Cycles with c <= c' when a vertex of c is reachable from c'.

    Raises:
        NotDisjointCyclesError: If two cycles share a vertex.

    """
    if not has_disjoint_cycles(graph):
        msg = "Cycle poset needs a graph with disjoint cycles"
        raise NotDisjointCyclesError(msg)

    cycles = tuple(enumerate_cycles(graph))
    reach = [
        set().union(*(nx.descendants(graph.nx, v) | {v} for v in c.vertices))
        for c in cycles
    ]
    relation = frozenset(
        (lower, upper)
        for upper, lower in itertools.product(range(len(cycles)), repeat=2)
        if any(v in reach[upper] for v in cycles[lower].vertices)
    )
    for a, b in relation:
        if a != b and (b, a) in relation:
            msg = f"Cycles {cycles[a].vertices} and {cycles[b].vertices} reach each other"
            raise NotDisjointCyclesError(msg)
    return CyclePoset(cycles, relation)


def hereditary_saturated_closure(graph: MultiGraph, seed: Iterable[str]) -> frozenset[str]:
    """
    Smallest hereditary and saturated vertex set containing seed.

    Hereditary: closed under following edges forward. Saturated: a vertex with
    at least one outgoing edge, all of whose ranges lie in the set, belongs to it.
    """
    closure = set(seed)
    for vertex in closure:
        graph._require(vertex)

    changed = True
    while changed:
        changed = False
        for vertex in list(closure):
            for successor in graph.simple.successors(vertex):
                if successor not in closure:
                    closure.add(successor)
                    changed = True
        for vertex in graph.vertices:
            if vertex in closure:
                continue
            ranges = [graph.edge(e).target for e in graph.out_edges(vertex)]
            if ranges and all(r in closure for r in ranges):
                closure.add(vertex)
                changed = True
    return frozenset(closure)


def find_isomorphism(
    first: MultiGraph, second: MultiGraph
) -> tuple[dict[str, str], dict[str, str]] | None:
    """Return (vertex map, edge map) of an isomorphism first -> second, or None."""
    if len(first.vertices) != len(second.vertices) or len(first.edges) != len(second.edges):
        return None
    matcher = nx.isomorphism.MultiDiGraphMatcher(first.nx, second.nx)
    if not matcher.is_isomorphic():
        return None
    vertex_map = dict(matcher.mapping)

    bundles: dict[tuple[str, str], list[str]] = defaultdict(list)
    for edge in second.edges:
        bundles[edge.source, edge.target].append(edge.edge_id)
    taken: dict[tuple[str, str], int] = defaultdict(int)
    edge_map: dict[str, str] = {}
    for edge in sorted(first.edges, key=lambda e: e.edge_id):
        pair = (vertex_map[edge.source], vertex_map[edge.target])
        edge_map[edge.edge_id] = sorted(bundles[pair])[taken[pair]]
        taken[pair] += 1
    return vertex_map, edge_map


def is_isomorphic(first: MultiGraph, second: MultiGraph) -> bool:
    """True if the graphs are isomorphic as multigraphs."""
    return find_isomorphism(first, second) is not None


def graph_to_dict(graph: MultiGraph) -> dict[str, Any]:
    """JSON-ready form: {"vertices": [...], "edges": [[id, source, range], ...]}."""
    return {
        "vertices": list(graph.vertices),
        "edges": [[e.edge_id, e.source, e.target] for e in graph.edges],
    }


def graph_from_dict(data: Any) -> MultiGraph:
    """
    Validate and build a graph from its JSON form.

    Raises:
        ParseError: If the data does not match the graph format or is inconsistent.

    """
    try:
        validated = GRAPH_SCHEMA(data)
    except vol.Invalid as err:
        msg = f"Invalid graph: {err}"
        raise ParseError(msg) from err
    try:
        return new_graph(validated["vertices"], [tuple(e) for e in validated["edges"]])
    except (UnknownVertexError, DuplicateIdentifierError) as err:
        msg = f"Invalid graph: {err}"
        raise ParseError(msg) from err


def matrix_from_text(text: str) -> np.ndarray:
    """Parse "n" followed by n rows of n nonnegative integers."""
    rows = [line.split() for line in text.splitlines() if line.strip()]
    try:
        size = int(rows[0][0])
        entries = [[int(x) for x in row] for row in rows[1:]]
    except (IndexError, ValueError) as err:
        msg = f"Invalid matrix text: {err}"
        raise ParseError(msg) from err
    if len(entries) != size or any(len(row) != size for row in entries):
        msg = f"Expected {size} rows of {size} entries"
        raise ParseError(msg)
    return np.array(entries, dtype=np.int64).reshape(size, size)


def matrix_to_text(matrix: np.ndarray) -> str:
    """Inverse of matrix_from_text."""
    lines = [str(matrix.shape[0])]
    lines.extend(" ".join(str(int(x)) for x in row) for row in matrix)
    return "\n".join(lines) + "\n"


def load_graph(path: str | Path, fmt: str = "json") -> MultiGraph:
    """
    Read a graph file in the json or matrix format.

    Raises:
        ParseError: If the file cannot be read or parsed.

    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        msg = f"Cannot read {path}: {err}"
        raise ParseError(msg) from err

    if fmt == "matrix":
        return from_matrix(matrix_from_text(text))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        msg = f"Invalid JSON in {path}: {err}"
        raise ParseError(msg) from err
    if isinstance(data, dict) and "matrix" in data:
        return from_matrix(data["matrix"])
    return graph_from_dict(data)


def dump_graph(graph: MultiGraph, fmt: str = "json") -> str:
    """Serialize a graph as JSON or matrix text."""
    if fmt == "matrix":
        return matrix_to_text(adjacency_matrix(graph))
    return json.dumps(graph_to_dict(graph), indent=2) + "\n"


def to_dot(graph: MultiGraph, pointed: PointedGK3 | None = None) -> str:
    """DOT rendering; GK3 structure is colored when pointed is given."""
    rendered = nx.MultiDiGraph()
    for vertex in graph.vertices:
        rendered.add_node(vertex, label=vertex)
    for edge in graph.edges:
        rendered.add_edge(edge.source, edge.target, key=edge.edge_id, label=edge.edge_id)

    if pointed is not None:
        for cycles, color in (
            (pointed.source_cycles, SOURCE_CYCLE_COLOR),
            (pointed.sink_cycles, SINK_CYCLE_COLOR),
        ):
            for cycle in cycles:
                for vertex in cycle.vertices:
                    rendered.nodes[vertex]["color"] = color
                for edge_id in cycle.edges:
                    edge = graph.edge(edge_id)
                    rendered.edges[edge.source, edge.target, edge_id]["color"] = color
        for vertex in pointed.interior_vertices():
            rendered.nodes[vertex]["color"] = INTERIOR_COLOR
        for trail in pointed.trails:
            for edge_id in trail.edges:
                edge = graph.edge(edge_id)
                rendered.edges[edge.source, edge.target, edge_id]["color"] = TRAIL_COLOR

    return nx.nx_pydot.to_pydot(rendered).to_string()
