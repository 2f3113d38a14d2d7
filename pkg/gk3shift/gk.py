"""Gelfand-Kirillov dimension of graphs with disjoint cycles."""

from __future__ import annotations

import logging
import math

import networkx as nx

from .exceptions import NotDisjointCyclesError
from .graph import MultiGraph, has_disjoint_cycles, is_connected, is_essential
from .models import ChainLengths

_LOGGER = logging.getLogger(__name__)

INFINITE = math.inf


def chain_lengths(graph: MultiGraph) -> ChainLengths:
    """
    Longest chain of cycles, and longest chain whose last cycle has an exit.

    Raises:
        NotDisjointCyclesError: If some vertex lies on two cycles.

    """
    if not has_disjoint_cycles(graph):
        msg = "Chain lengths need a graph with disjoint cycles"
        raise NotDisjointCyclesError(msg)

    condensed = nx.condensation(graph.nx)
    cyclic: dict[int, bool] = {}
    for node, members in condensed.nodes(data="members"):
        vertex = next(iter(members))
        cyclic[node] = len(members) > 1 or graph.nx.has_edge(vertex, vertex)

    # top[node]: most cycles on a path ending at node
    top: dict[int, int] = {}
    for node in nx.topological_sort(condensed):
        above = max((top[pred] for pred in condensed.predecessors(node)), default=0)
        top[node] = above + int(cyclic[node])

    d1 = max(top.values(), default=0)
    d2 = max(
        (top[node] for node in condensed if cyclic[node] and condensed.out_degree(node)),
        default=0,
    )
    return ChainLengths(d1, d2)


def gk_dimension(graph: MultiGraph) -> int | float:
    """max(2*d1 - 1, 2*d2), INFINITE without disjoint cycles, 0 for acyclic graphs."""
    if not has_disjoint_cycles(graph):
        return INFINITE
    chains = chain_lengths(graph)
    if chains.d1 == 0:
        return 0
    return max(2 * chains.d1 - 1, 2 * chains.d2)


def is_gk3(graph: MultiGraph) -> bool:
    """Connected, essential and of dimension three."""
    return is_connected(graph) and is_essential(graph) and gk_dimension(graph) == 3


def is_single_cycle(graph: MultiGraph) -> bool:
    """The graph is one cycle through all of its vertices."""
    return (
        len(graph.edges) == len(graph.vertices) > 0
        and is_connected(graph)
        and is_essential(graph)
        and gk_dimension(graph) == 1
    )


def render_dimension(dimension: int | float) -> str:
    """Text form used in reports."""
    return "∞" if dimension == INFINITE else str(int(dimension))
