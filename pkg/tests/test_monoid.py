"""Tests for talented monoid arithmetic, flows and canonical forms."""

from __future__ import annotations

import pytest

from gk3shift.exceptions import (
    KeyAbsentError,
    LevelTooLowError,
    NotEssentialError,
    NotNormalFormError,
    ParseError,
    SinkVertexError,
    UnknownVertexError,
)
from gk3shift.gk3 import pointed_structure
from gk3shift.graph import new_graph
from gk3shift.models import CanonicalElement, ComparisonVerdict, MonoidElement
from gk3shift.monoid import (
    add,
    canonical_form,
    equal_elements,
    flow_once,
    flow_to_level,
    generator,
    graph_monoid_flow,
    is_atom,
    parse_element,
    render_canonical,
    render_element,
    shift,
    to_element,
)

from .conftest import loop1, m1
from .helpers import random_element, random_normal_form


def element(**terms: int) -> MonoidElement:
    """element(u_0=1, w_1=2) -> u(0) + 2*w(1)."""
    counts = {}
    for name, coefficient in terms.items():
        vertex, _, at = name.rpartition("_")
        counts[vertex, int(at)] = coefficient
    return MonoidElement(counts)


def test_generator_add_and_shift():
    graph = m1()
    x = add(generator(graph, "u"), generator(graph, "w", 1))
    assert x == element(u_0=1, w_1=1)
    assert shift(x, 2) == element(u_2=1, w_3=1)
    assert add(x, x) == element(u_0=2, w_1=2)
    with pytest.raises(UnknownVertexError):
        generator(graph, "z")


def test_negative_coefficients_are_rejected():
    with pytest.raises(ValueError, match="Negative"):
        MonoidElement({("u", 0): -1})


def test_flow_once():
    assert flow_once(loop1(), element(u_0=1), ("u", 0)) == element(u_1=1)
    assert flow_once(m1(), element(u_0=1), ("u", 0)) == element(u_1=1, w_1=1)
    assert flow_once(m1(), element(u_0=2), ("u", 0)) == element(u_0=1, u_1=1, w_1=1)


def test_flow_errors():
    with pytest.raises(KeyAbsentError):
        flow_once(m1(), element(u_0=1), ("u", 1))
    sink = new_graph(["a", "b"], [("a", "b")])
    with pytest.raises(SinkVertexError):
        flow_once(sink, element(b_0=1), ("b", 0))


def test_graph_monoid_flow():
    assert graph_monoid_flow(m1(), element(u_0=1), "u") == element(u_0=1, w_0=1)


def test_flow_to_level():
    assert flow_to_level(loop1(), element(u_0=1), 5).as_dict() == {"u": 1}
    vector = flow_to_level(m1(), element(u_0=1), 2)
    assert vector.as_dict() == {"u": 1, "w": 2}
    assert flow_to_level(m1(), element(u_0=1, w_2=3), 2).as_dict() == {"u": 1, "w": 5}
    assert flow_to_level(m1(), MonoidElement(), 0).as_dict() == {"u": 0, "w": 0}


def test_flow_to_level_errors():
    with pytest.raises(LevelTooLowError):
        flow_to_level(m1(), element(u_3=1), 2)
    with pytest.raises(NotEssentialError):
        flow_to_level(new_graph(["a", "b"], [("a", "b"), ("b", "b")]), element(b_0=1), 1)


def test_equal_elements():
    assert equal_elements(loop1(), element(u_0=1), element(u_1=1), 8).equal
    not_equal = equal_elements(m1(), element(u_0=1), element(u_1=1), 8)
    assert not_equal.verdict is ComparisonVerdict.NOT_EQUAL_UP_TO
    assert not_equal.level == 8
    same = equal_elements(m1(), element(u_0=1), element(u_1=1, w_1=1), 8)
    assert same.verdict is ComparisonVerdict.EQUAL
    assert same.level == 1


def test_canonical_forms_on_m1():
    pointed = pointed_structure(m1())
    top = canonical_form(pointed, element(u_1=1))
    assert top.anchors == (1,)
    assert top.source_coefficients == ((1,),)
    assert top.sink_coefficients == ((0,),)

    lowered = canonical_form(pointed, element(u_1=1, w_1=1))
    assert lowered == canonical_form(pointed, element(u_0=1))
    assert lowered.anchors == (0,)
    assert render_canonical(pointed, lowered) == "u(0)"

    sinks = canonical_form(pointed, element(w_0=1, w_4=2))
    assert sinks.anchors == (None,)
    assert sinks.sink_coefficients == ((3,),)


def test_canonical_form_reduces_sink_shifts(f2_graph):
    pointed = pointed_structure(f2_graph)
    canonical = canonical_form(pointed, element(w1_2=1))
    assert canonical.sink_coefficients == ((0, 1),)
    assert canonical == canonical_form(pointed, element(w0_1=1))


def test_canonical_form_needs_normal_form(long_trail):
    with pytest.raises(NotNormalFormError):
        canonical_form(pointed_structure(long_trail), element(u_0=1))


def test_is_atom(f2_graph):
    pointed = pointed_structure(m1())
    assert is_atom(pointed, element(w_0=1))
    assert is_atom(pointed, element(w_7=1))
    assert not is_atom(pointed, element(w_0=2))
    assert not is_atom(pointed, element(u_0=1))
    assert not is_atom(pointed, MonoidElement())
    assert is_atom(pointed_structure(f2_graph), element(w1_3=1))


def test_canonical_forms_agree_with_flows(rng):
    for _ in range(500):
        graph = random_normal_form(rng)
        pointed = pointed_structure(graph)
        x = random_element(rng, graph)
        y = random_element(rng, graph) if rng.random() < 0.5 else shift(x, rng.randint(-1, 2))
        canonical_x = canonical_form(pointed, x)
        canonical_y = canonical_form(pointed, y)

        assert canonical_form(pointed, to_element(pointed, canonical_x)) == canonical_x
        assert equal_elements(graph, x, to_element(pointed, canonical_x), 0).equal

        top = max(x.max_shift, y.max_shift)
        assert (canonical_x == canonical_y) == equal_elements(graph, x, y, top).equal

        single = len(x.items()) == 1 and x.items()[0][1] == 1
        on_sink = any(x.items()[0][0][0] in c.vertices for c in pointed.sink_cycles)
        assert is_atom(pointed, x) == (single and on_sink)


def shifted(canonical, amount):
    """Canonical form moved up by amount: anchors rise, sink rows rotate."""
    return CanonicalElement(
        tuple(None if anchor is None else anchor + amount for anchor in canonical.anchors),
        canonical.source_coefficients,
        tuple(
            tuple(row[(k - amount) % len(row)] for k in range(len(row)))
            for row in canonical.sink_coefficients
        ),
    )


def test_canonical_form_commutes_with_shift(rng):
    assert canonical_form(pointed_structure(m1()), element(u_3=1, w_5=1)) == shifted(
        canonical_form(pointed_structure(m1()), element(u_0=1, w_2=1)), 3
    )
    for _ in range(200):
        graph = random_normal_form(rng)
        pointed = pointed_structure(graph)
        x = random_element(rng, graph)
        amount = rng.randint(-4, 4)
        assert canonical_form(pointed, shift(x, amount)) == shifted(
            canonical_form(pointed, x), amount
        )


def test_sink_generators_are_periodic(rng):
    for _ in range(50):
        graph = random_normal_form(rng)
        pointed = pointed_structure(graph)
        for cycle in pointed.sink_cycles:
            for vertex in cycle.vertices:
                at = rng.randint(-3, 3)
                once = canonical_form(pointed, generator(graph, vertex, at))
                again = canonical_form(pointed, generator(graph, vertex, at + cycle.length))
                assert once == again
                if cycle.length > 1:
                    assert once != canonical_form(pointed, generator(graph, vertex, at + 1))


def test_parse_and_render():
    graph = m1()
    x = parse_element(graph, "u(0)+2*w(1)")
    assert x == element(u_0=1, w_1=2)
    assert render_element(x) == "u(0) + 2*w(1)"
    assert parse_element(graph, render_element(x)) == x
    assert parse_element(graph, " 0 ") == MonoidElement()
    assert render_element(MonoidElement()) == "0"
    assert parse_element(graph, "w(-2)") == MonoidElement({("w", -2): 1})


def test_render_canonical_format(f2_graph):
    pointed = pointed_structure(m1())
    for text, expected in [
        ("u(0)", "u(0)"),
        ("u(1)+w(1)", "u(0)"),
        ("u(1)", "u(1)"),
        ("w(3)+w(5)", "2*w(0)"),
        ("0", "0"),
    ]:
        canonical = canonical_form(pointed, parse_element(m1(), text))
        assert render_canonical(pointed, canonical) == expected

    pointed = pointed_structure(f2_graph)
    sinks = canonical_form(pointed, parse_element(f2_graph, "w0(0)+2*w1(0)"))
    assert render_canonical(pointed, sinks) == "w0(0) + 2*w0(1)"
    mixed = canonical_form(pointed, parse_element(f2_graph, "v0(0)+v1(0)+w0(0)"))
    assert mixed.anchors == (1,)
    assert render_canonical(pointed, mixed) == "v0(0) + v0(1) + w0(0)"


@pytest.mark.parametrize("text", ["u", "u(x)", "3*", "u(0)++w(0)"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_element(m1(), text)


def test_parse_unknown_vertex():
    with pytest.raises(UnknownVertexError):
        parse_element(m1(), "z(0)")
