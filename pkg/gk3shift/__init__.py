"""Shifts of finite type as graphs: moves, GK3 decisions and talented monoids."""

from __future__ import annotations

from .gk import gk_dimension, is_gk3
from .gk3 import is_normal_form, pointed_structure, to_normal_form
from .graph import MultiGraph, from_matrix, load_graph, new_graph
from .invariants import decide_se, decide_sse, verify_certificate
from .models import Decision, Move, MoveTrace, Verdict

__all__ = [
    "Decision",
    "Move",
    "MoveTrace",
    "MultiGraph",
    "Verdict",
    "decide_se",
    "decide_sse",
    "from_matrix",
    "gk_dimension",
    "is_gk3",
    "is_normal_form",
    "load_graph",
    "new_graph",
    "pointed_structure",
    "to_normal_form",
    "verify_certificate",
]
