"""Talented monoid arithmetic, flows and canonical forms on GK3 normal-form graphs."""

from __future__ import annotations

import logging
import re
from collections import Counter

import numpy as np

from .exceptions import (
    KeyAbsentError,
    LevelTooLowError,
    NotEssentialError,
    NotNormalFormError,
    ParseError,
    SinkVertexError,
    UnknownVertexError,
)
from .gk3 import is_pointed_normal
from .graph import MultiGraph, adjacency_matrix, is_essential
from .models import (
    CanonicalElement,
    ComparisonVerdict,
    ElementComparison,
    LevelVector,
    MonoidElement,
    PointedGK3,
)

_LOGGER = logging.getLogger(__name__)

_TERM = re.compile(r"^(?:(\d+)\s*\*\s*)?([^\s()*+]+)\(\s*(-?\d+)\s*\)$")

Key = tuple[str, int]


def generator(graph: MultiGraph, vertex: str, shift: int = 0) -> MonoidElement:
    """The generator vertex(shift)."""
    if vertex not in graph.vertex_set:
        msg = f"Unknown vertex {vertex}"
        raise UnknownVertexError(msg)
    return MonoidElement({(vertex, shift): 1})


def add(first: MonoidElement, second: MonoidElement) -> MonoidElement:
    """Sum of two elements."""
    total = Counter(first.as_dict())
    total.update(second.as_dict())
    return MonoidElement(total)


def shift(element: MonoidElement, amount: int) -> MonoidElement:
    """Act by amount: every shift in the support moves up by amount."""
    return MonoidElement({(v, i + amount): c for (v, i), c in element.items()})


def _flow(graph: MultiGraph, element: MonoidElement, key: Key, step: int) -> MonoidElement:
    vertex, level = key
    if element.coefficient(key) == 0:
        msg = f"{vertex}({level}) is not in the support"
        raise KeyAbsentError(msg)
    if vertex not in graph.vertex_set:
        msg = f"Unknown vertex {vertex}"
        raise UnknownVertexError(msg)
    outgoing = graph.out_edges(vertex)
    if not outgoing:
        msg = f"Vertex {vertex} has no outgoing edges"
        raise SinkVertexError(msg)

    counts = Counter(element.as_dict())
    counts[key] -= 1
    for edge_id in outgoing:
        counts[graph.edge(edge_id).target, level + step] += 1
    return MonoidElement(counts)


def flow_once(graph: MultiGraph, element: MonoidElement, key: Key) -> MonoidElement:
    """
    Let one unit at key = (v, i) flow: v(i) becomes the sum of r(e)(i + 1) over edges out of v.

    Raises:
        KeyAbsentError: If key is not in the support.
        SinkVertexError: If v has no outgoing edges.

    """
    return _flow(graph, element, key, 1)


def graph_monoid_flow(graph: MultiGraph, element: MonoidElement, vertex: str) -> MonoidElement:
    """The ungraded relation: one unit of vertex becomes the sum of r(e) at shift 0."""
    return _flow(graph, element, (vertex, 0), 0)


def flow_to_level(graph: MultiGraph, element: MonoidElement, level: int) -> LevelVector:
    """
    Flow every unit of element until the whole support sits at shift level.

    Raises:
        NotEssentialError: If the graph has a source or a sink.
        LevelTooLowError: If level is below the highest shift of element.

    """
    if not is_essential(graph):
        msg = "Flowing to a level needs an essential graph"
        raise NotEssentialError(msg)
    top = element.max_shift
    if top is not None and level < top:
        msg = f"Level {level} is below the highest shift {top}"
        raise LevelTooLowError(msg)

    position = {v: k for k, v in enumerate(graph.vertices)}
    matrix = adjacency_matrix(graph).astype(object)
    empty = np.zeros(len(graph.vertices), dtype=object)
    slices: dict[int, np.ndarray] = {}
    for (vertex, at), coefficient in element.items():
        if vertex not in position:
            msg = f"Unknown vertex {vertex}"
            raise UnknownVertexError(msg)
        slices.setdefault(at, empty.copy())[position[vertex]] += coefficient

    counts = empty
    bottom = element.min_shift if element.min_shift is not None else level
    for at in range(bottom, level):
        counts = (counts + slices.get(at, empty)).dot(matrix)
    counts = counts + slices.get(level, empty)
    return LevelVector(level, graph.vertices, tuple(int(c) for c in counts))


def equal_elements(
    graph: MultiGraph, first: MonoidElement, second: MonoidElement, max_level: int
) -> ElementComparison:
    """
    Flow both elements to common levels and compare.

    EQUAL is definitive. NOT_EQUAL_UP_TO only says no level up to max_level
    showed equality; it is exact for GK3 normal-form graphs, whose adjacency
    matrices are invertible.

    Raises:
        NotEssentialError: If the graph has a source or a sink.

    """
    if not is_essential(graph):
        msg = "Comparing elements needs an essential graph"
        raise NotEssentialError(msg)
    tops = [s for s in (first.max_shift, second.max_shift) if s is not None]
    start = max(tops, default=0)
    for level in range(start, max(start, max_level) + 1):
        if flow_to_level(graph, first, level) == flow_to_level(graph, second, level):
            return ElementComparison(ComparisonVerdict.EQUAL, level)
    return ElementComparison(ComparisonVerdict.NOT_EQUAL_UP_TO, max(start, max_level))


class _CanonicalBuilder:
    """Source parts per source cycle, sink parts per sink cycle, of one element."""

    def __init__(self, pointed: PointedGK3) -> None:
        self.pointed = pointed
        self.p = [c.length for c in pointed.source_cycles]
        self.q = [c.length for c in pointed.sink_cycles]
        self.sources: list[Counter[int]] = [Counter() for _ in self.p]
        self.sinks: list[list[int]] = [[0] * q for q in self.q]
        # (sink cycle, range index) of every trail, per source cycle
        self.trail_ranges: list[list[tuple[int, int]]] = [[] for _ in self.p]
        for trail in pointed.trails:
            self.trail_ranges[trail.source_cycle].append((trail.sink_cycle, trail.range_index))

        self.place: dict[str, tuple[bool, int, int]] = {}
        for i, cycle in enumerate(pointed.source_cycles):
            for k, vertex in enumerate(cycle.vertices):
                self.place[vertex] = (True, i, k)
        for j, cycle in enumerate(pointed.sink_cycles):
            for k, vertex in enumerate(cycle.vertices):
                self.place[vertex] = (False, j, k)

    def load(self, element: MonoidElement) -> None:
        for (vertex, at), coefficient in element.items():
            if vertex not in self.place:
                msg = f"Vertex {vertex} is not on a cycle of the graph"
                raise UnknownVertexError(msg)
            is_source, index, k = self.place[vertex]
            if is_source:
                p = self.p[index]
                self.sources[index][at + (p - k) % p] += coefficient
            else:
                q = self.q[index]
                self.sinks[index][(at + q - k) % q] += coefficient

    def outflow(self, i: int, at: int) -> list[tuple[int, int]]:
        """Sink slots reached by v_i(at) flowing once around its trails."""
        return [(j, (at + 1 - b) % self.q[j]) for j, b in self.trail_ranges[i]]

    def build(self) -> CanonicalElement:
        occupied = [i for i, part in enumerate(self.sources) if +part]
        if occupied:
            self._settle(occupied)
        anchors: list[int | None] = []
        rows: list[tuple[int, ...]] = []
        for i, part in enumerate(self.sources):
            support = [at for at, c in part.items() if c]
            if not support:
                anchors.append(None)
                rows.append((0,) * self.p[i])
                continue
            anchor = max(support)
            anchors.append(anchor)
            rows.append(tuple(part.get(anchor - k, 0) for k in range(self.p[i])))
        return CanonicalElement(
            tuple(anchors), tuple(rows), tuple(tuple(row) for row in self.sinks)
        )

    def _settle(self, occupied: list[int]) -> None:
        """Place every source part in the window [level, level + p_i - 1] with level minimal."""
        level = max(
            at - self.p[i] + 1 for i in occupied for at, c in self.sources[i].items() if c
        )
        for i in occupied:
            part = self.sources[i]
            while low := [at for at, c in part.items() if c and at < level]:
                at = min(low)
                amount = part.pop(at)
                for j, k in self.outflow(i, at):
                    self.sinks[j][k] += amount
                part[at + self.p[i]] += amount

        # lower the level while the top of every window can flow back down
        while True:
            tops = {i: self.sources[i].get(level + self.p[i] - 1, 0) for i in occupied}
            needed: Counter[tuple[int, int]] = Counter()
            for i, amount in tops.items():
                for slot in self.outflow(i, level - 1):
                    needed[slot] += amount
            if any(self.sinks[j][k] < amount for (j, k), amount in needed.items()):
                return
            for (j, k), amount in needed.items():
                self.sinks[j][k] -= amount
            for i, amount in tops.items():
                if amount:
                    del self.sources[i][level + self.p[i] - 1]
                    self.sources[i][level - 1] += amount
            level -= 1


def canonical_form(pointed: PointedGK3, element: MonoidElement) -> CanonicalElement:
    """
    Unique representative of element in the talented monoid of a normal-form graph.

    Source-cycle generators are rewritten as v_i(t) for the common trail source
    v_i and sink-cycle generators as w_j(k), 0 <= k < q_j, for the index-0
    vertex w_j. Source parts are then placed in the windows
    [n, n + p_i - 1] for the least n any representation allows; each anchor is
    the top occupied shift of its window.

    Raises:
        NotNormalFormError: If pointed is not in normal form.
        UnknownVertexError: If element uses a vertex that is not on a cycle.

    """
    if not is_pointed_normal(pointed):
        msg = "Canonical forms need a normal-form graph"
        raise NotNormalFormError(msg)
    builder = _CanonicalBuilder(pointed)
    builder.load(element)
    return builder.build()


def to_element(pointed: PointedGK3, canonical: CanonicalElement) -> MonoidElement:
    """Expand a canonical form back into generators."""
    counts: Counter[Key] = Counter()
    for i, anchor in enumerate(canonical.anchors):
        if anchor is None:
            continue
        vertex = pointed.source_cycles[i].vertices[0]
        for k, coefficient in enumerate(canonical.source_coefficients[i]):
            counts[vertex, anchor - k] += coefficient
    for j, row in enumerate(canonical.sink_coefficients):
        vertex = pointed.sink_cycles[j].vertices[0]
        for k, coefficient in enumerate(row):
            counts[vertex, k] += coefficient
    return MonoidElement(counts)


def is_atom(pointed: PointedGK3, element: MonoidElement) -> bool:
    """An atom is a single sink-cycle generator unit."""
    canonical = canonical_form(pointed, element)
    return canonical.source_part_is_zero and canonical.sink_units() == 1


def parse_element(graph: MultiGraph, text: str) -> MonoidElement:
    """
    Parse literals such as "u(0)+2*w(1)"; "0" or an empty string is the zero element.

    Raises:
        ParseError: If a term is malformed.
        UnknownVertexError: If a term names a vertex outside graph.

    """
    stripped = text.strip()
    if stripped in ("", "0"):
        return MonoidElement()
    counts: Counter[Key] = Counter()
    for raw in stripped.split("+"):
        match = _TERM.match(raw.strip())
        if match is None:
            msg = f"Cannot parse term {raw.strip()!r}"
            raise ParseError(msg)
        coefficient, vertex, at = match.groups()
        if vertex not in graph.vertex_set:
            msg = f"Unknown vertex {vertex}"
            raise UnknownVertexError(msg)
        counts[vertex, int(at)] += int(coefficient or 1)
    return MonoidElement(counts)


def render_element(element: MonoidElement) -> str:
    """Inverse of parse_element, terms in sorted order."""
    if element.is_zero:
        return "0"
    terms = []
    for (vertex, at), coefficient in element.items():
        prefix = f"{coefficient}*" if coefficient > 1 else ""
        terms.append(f"{prefix}{vertex}({at})")
    return " + ".join(terms)


def render_canonical(pointed: PointedGK3, canonical: CanonicalElement) -> str:
    """Text form of a canonical element."""
    return render_element(to_element(pointed, canonical))
