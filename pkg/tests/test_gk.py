"""Tests for chain lengths and the GK dimension."""

from __future__ import annotations

import pytest

from gk3shift.exceptions import NotDisjointCyclesError
from gk3shift.gk import (
    INFINITE,
    chain_lengths,
    gk_dimension,
    is_gk3,
    is_single_cycle,
    render_dimension,
)
from gk3shift.graph import new_graph
from gk3shift.models import ChainLengths

from .conftest import loop1, m1
from .helpers import random_gk3, random_normal_form

TRIANGLE = new_graph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")])
FIGURE_EIGHT = new_graph(["u", "v"], [("u", "u"), ("u", "v"), ("v", "u")])


def test_chain_lengths(chain3):
    assert chain_lengths(TRIANGLE) == ChainLengths(1, 0)
    assert chain_lengths(m1()) == ChainLengths(2, 1)
    assert chain_lengths(chain3) == ChainLengths(3, 2)
    assert chain_lengths(new_graph(["a", "b"], [("a", "b")])) == ChainLengths(0, 0)


def test_chain_lengths_needs_disjoint_cycles():
    with pytest.raises(NotDisjointCyclesError):
        chain_lengths(FIGURE_EIGHT)


def test_gk_dimension(chain3, e2_graph, crossed_e):
    assert gk_dimension(loop1()) == 1
    assert gk_dimension(TRIANGLE) == 1
    assert gk_dimension(m1()) == 3
    assert gk_dimension(e2_graph) == 3
    assert gk_dimension(crossed_e) == 3
    assert gk_dimension(chain3) == 5
    assert gk_dimension(FIGURE_EIGHT) == INFINITE
    assert gk_dimension(new_graph(["u"], [("u", "u"), ("u", "u")])) == INFINITE
    assert gk_dimension(new_graph(["a", "b"], [("a", "b")])) == 0


def test_exit_to_sink_without_cycle_raises_dimension():
    # a cycle whose exit ends in a sink vertex: d1 = 1, d2 = 1
    graph = new_graph(["u", "s"], [("u", "u"), ("u", "s")])
    assert gk_dimension(graph) == 2


def test_random_gk3_fixtures_have_dimension_three(rng):
    for _ in range(30):
        assert gk_dimension(random_gk3(rng)) == 3
        assert gk_dimension(random_normal_form(rng)) == 3


def test_is_gk3():
    assert is_gk3(m1())
    assert not is_gk3(loop1())
    double = new_graph(
        ["u", "w", "u2", "w2"],
        [("u", "u"), ("u", "w"), ("w", "w"), ("u2", "u2"), ("u2", "w2"), ("w2", "w2")],
    )
    assert gk_dimension(double) == 3
    assert not is_gk3(double)
    assert not is_gk3(new_graph(["u", "s"], [("u", "u"), ("u", "s")]))


def test_is_single_cycle():
    assert is_single_cycle(loop1())
    assert is_single_cycle(TRIANGLE)
    assert not is_single_cycle(m1())
    assert not is_single_cycle(FIGURE_EIGHT)


def test_render_dimension():
    assert render_dimension(3) == "3"
    assert render_dimension(INFINITE) == "∞"
