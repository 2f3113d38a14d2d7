"""Command-line front end for gk3shift."""

from __future__ import annotations

import argparse
import json
import logging
from collections.abc import Callable, Sequence
from dataclasses import replace
from functools import cache
from pathlib import Path
from typing import Any

import colorlog

from .config import Config, load_config
from .const import (
    DOMAIN,
    EXIT_INPUT_ERROR,
    EXIT_NO,
    EXIT_UNSUPPORTED,
    EXIT_YES,
    INPUT_FORMATS,
)
from .exceptions import ConfigError, Gk3ShiftError, LimitExceededError, ParseError
from .gk import gk_dimension, is_gk3, render_dimension
from .gk3 import pointed_structure, to_normal_form, trail_class
from .graph import (
    MultiGraph,
    adjacency_matrix,
    dump_graph,
    enumerate_cycles,
    has_disjoint_cycles,
    is_connected,
    is_essential,
    load_graph,
    to_dot,
)
from .invariants import (
    certificate_from_dict,
    decide_se,
    decide_sse,
    invariant_table,
    verify_certificate,
)
from .models import PointedGK3, Verdict
from .monoid import (
    canonical_form,
    equal_elements,
    flow_to_level,
    is_atom,
    parse_element,
    render_canonical,
)
from .oracle import se_witness_search, sse_search, verify_trace

_LOGGER = logging.getLogger(__name__)

_FORMAT = "%(log_color)s%(levelname)-8s%(reset)s %(name)s: %(message)s"

_VERDICT_EXIT = {
    Verdict.YES: EXIT_YES,
    Verdict.NO: EXIT_NO,
    Verdict.UNSUPPORTED: EXIT_UNSUPPORTED,
}

Handler = Callable[[argparse.Namespace, Config], int]


@cache
def version() -> str:
    """Version from manifest.json."""
    manifest = Path(__file__).with_name("manifest.json")
    return json.loads(manifest.read_text(encoding="utf-8"))["version"]


def setup_logging(config: Config, *, verbose: bool = False) -> None:
    """Attach one colored console handler to the root logger and apply levels."""
    root = logging.getLogger()
    if not any(getattr(h, DOMAIN, False) for h in root.handlers):
        handler = colorlog.StreamHandler()
        handler.setFormatter(colorlog.ColoredFormatter(_FORMAT))
        setattr(handler, DOMAIN, True)
        root.addHandler(handler)
    root.setLevel(config.log_level.upper())
    for name, level in config.log_levels.items():
        logging.getLogger(name).setLevel(level.upper())
    if verbose:
        logging.getLogger(DOMAIN).setLevel(logging.DEBUG)


def _write(path: str | None, text: str) -> None:
    """Write text to path, or to stdout without a path."""
    if path is None:
        print(text, end="" if text.endswith("\n") else "\n")  # noqa: T201
        return
    Path(path).write_text(text, encoding="utf-8")
    _LOGGER.debug("Wrote %s", path)


def _json(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _load(args: argparse.Namespace, config: Config, path: str) -> MultiGraph:
    return load_graph(path, args.format or config.input_format)


def _pointed_or_none(graph: MultiGraph) -> PointedGK3 | None:
    return pointed_structure(graph) if is_gk3(graph) else None


def cmd_info(args: argparse.Namespace, config: Config) -> int:
    """Counts, flags, cycles and the GK dimension of one graph."""
    graph = _load(args, config, args.graph)
    lines = [
        f"vertices={len(graph.vertices)}",
        f"edges={len(graph.edges)}",
        f"essential={str(is_essential(graph)).lower()}",
        f"connected={str(is_connected(graph)).lower()}",
        f"disjoint_cycles={str(has_disjoint_cycles(graph)).lower()}",
    ]
    pointed = _pointed_or_none(graph)
    summary = f"gkdim={render_dimension(gk_dimension(graph))}"
    if pointed is not None:
        summary = f"{summary}, m={pointed.m}, n={pointed.n}"
    lines.append(summary)
    if has_disjoint_cycles(graph):
        lines.extend(f"cycle: {' -> '.join(c.vertices)}" for c in enumerate_cycles(graph))
    _write(None, "\n".join(lines))
    if args.dot:
        _write(args.dot, to_dot(graph, pointed))
    return EXIT_YES


def cmd_invariants(args: argparse.Namespace, config: Config) -> int:
    """Pointed structure, trail classes and the invariant table of the normal form."""
    graph = _load(args, config, args.graph)
    pointed = pointed_structure(graph)
    normal, _ = to_normal_form(graph)
    report = pointed.as_dict()
    report["trail_classes"] = [
        {"residue": c.residue, "modulus": c.modulus}
        for c in (trail_class(pointed, t) for t in pointed.trails)
    ]
    report["invariant_table"] = invariant_table(pointed_structure(normal)).as_dict()
    _write(args.output, _json(report))
    return EXIT_YES


def cmd_normal_form(args: argparse.Namespace, config: Config) -> int:
    """Write the normal form and, optionally, the moves that produce it."""
    graph = _load(args, config, args.graph)
    normal, trace = to_normal_form(graph)
    _LOGGER.info("Normal form reached in %d moves", len(trace.moves))
    _write(args.output, dump_graph(normal, args.format or config.input_format))
    if args.emit_moves:
        _write(args.emit_moves, _json(trace.as_list()))
    if args.dot:
        _write(args.dot, to_dot(normal, pointed_structure(normal)))
    return EXIT_YES


def cmd_decide(args: argparse.Namespace, config: Config) -> int:
    """Decide SSE or SE of two graphs."""
    first = _load(args, config, args.first)
    second = _load(args, config, args.second)
    decide = decide_sse if args.kind == "sse" else decide_se
    decision = decide(first, second)

    lines = [f"verdict: {decision.verdict}"]
    if decision.note:
        lines.append(f"note: {decision.note}")
    lines.extend(str(refutation) for refutation in decision.refutations)
    _write(None, "\n".join(lines))
    if args.certificate and decision.certificate is not None:
        _write(args.certificate, _json(decision.certificate.as_dict()))
    return _VERDICT_EXIT[decision.verdict]


def cmd_verify(args: argparse.Namespace, config: Config) -> int:
    """Check a certificate written by decide."""
    first = _load(args, config, args.first)
    second = _load(args, config, args.second)
    try:
        data = json.loads(Path(args.certificate).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        msg = f"Invalid JSON in {args.certificate}: {err}"
        raise ParseError(msg) from err
    result = verify_certificate(first, second, certificate_from_dict(data))
    _write(None, "valid" if result else f"invalid: {result.reason}")
    return EXIT_YES if result else EXIT_NO


def cmd_monoid(args: argparse.Namespace, config: Config) -> int:
    """Talented monoid calculator: canon, atom, equal and flow."""
    graph = _load(args, config, args.graph)
    element = parse_element(graph, args.expr)

    if args.action == "equal":
        if args.other is None:
            msg = "equal needs a second element"
            raise ParseError(msg)
        other = parse_element(graph, args.other)
        level = args.level if args.level is not None else config.max_level
        comparison = equal_elements(graph, element, other, level)
        _write(None, f"{comparison.verdict} (level {comparison.level})")
        return EXIT_YES if comparison.equal else EXIT_NO

    if args.action == "flow":
        top = element.max_shift or 0
        vector = flow_to_level(graph, element, args.level if args.level is not None else top)
        _write(None, _json({"level": vector.level, "counts": vector.as_dict()}))
        return EXIT_YES

    pointed = pointed_structure(graph)
    if args.action == "atom":
        _write(None, str(is_atom(pointed, element)).lower())
        return EXIT_YES
    canonical = canonical_form(pointed, element)
    _write(None, render_canonical(pointed, canonical))
    return EXIT_YES


def cmd_oracle(args: argparse.Namespace, config: Config) -> int:
    """Brute-force cross-checks: bounded move search or SE witness enumeration."""
    first = _load(args, config, args.first)
    second = _load(args, config, args.second)
    limits = config.oracle
    if args.depth is not None:
        limits = replace(limits, max_depth=args.depth)
    if args.max_vertices is not None:
        limits = replace(limits, max_vertices=args.max_vertices)

    if args.kind == "se":
        witness = se_witness_search(adjacency_matrix(first), adjacency_matrix(second), limits)
        if witness is None:
            _write(None, "no witness within bounds")
            return EXIT_NO
        r, s, lag = witness
        _write(None, _json({"lag": lag, "R": r.tolist(), "S": s.tolist()}))
        return EXIT_YES

    trace = sse_search(first, second, limits, args.cache)
    if trace is None:
        _write(None, "no trace within bounds")
        return EXIT_NO
    if not verify_trace(first, second, trace):
        msg = "Search returned a trace that does not replay"
        raise Gk3ShiftError(msg)
    _write(args.output, _json(trace.as_list()))
    return EXIT_YES


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation."""
    parser = argparse.ArgumentParser(
        prog=DOMAIN,
        description="Shifts of finite type as graphs: moves, GK3 decisions, talented monoids.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {version()}")
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument("--format", choices=INPUT_FORMATS, help="graph file format")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    info = commands.add_parser("info", help="counts, cycles and GK dimension")
    info.add_argument("graph")
    info.add_argument("--dot", help="write a DOT rendering")
    info.set_defaults(handler=cmd_info)

    invariants = commands.add_parser("invariants", help="GK3 structure and invariant table")
    invariants.add_argument("graph")
    invariants.add_argument("--output", help="write the report here instead of stdout")
    invariants.set_defaults(handler=cmd_invariants)

    normal = commands.add_parser("normal-form", help="transform a GK3 graph to normal form")
    normal.add_argument("graph")
    normal.add_argument("--output", help="write the graph here instead of stdout")
    normal.add_argument("--emit-moves", help="write the move trace as JSON")
    normal.add_argument("--dot", help="write a DOT rendering of the normal form")
    normal.set_defaults(handler=cmd_normal_form)

    decide = commands.add_parser("decide", help="decide SSE or SE of two GK3 graphs")
    decide.add_argument("kind", choices=["sse", "se"])
    decide.add_argument("first")
    decide.add_argument("second")
    decide.add_argument("--certificate", help="write the certificate of a YES verdict")
    decide.set_defaults(handler=cmd_decide)

    verify = commands.add_parser("verify", help="check a certificate")
    verify.add_argument("first")
    verify.add_argument("second")
    verify.add_argument("certificate")
    verify.set_defaults(handler=cmd_verify)

    monoid = commands.add_parser("monoid", help="talented monoid calculator")
    monoid.add_argument("action", choices=["canon", "atom", "equal", "flow"])
    monoid.add_argument("graph")
    monoid.add_argument("expr", help='element such as "u(0)+2*w(1)"')
    monoid.add_argument("other", nargs="?", help="second element for equal")
    monoid.add_argument("--level", type=int, help="target level (flow) or search bound (equal)")
    monoid.set_defaults(handler=cmd_monoid)

    oracle = commands.add_parser("oracle", help="brute-force search")
    oracle.add_argument("kind", choices=["sse", "se"])
    oracle.add_argument("first")
    oracle.add_argument("second")
    oracle.add_argument("--depth", type=int, help="total move budget")
    oracle.add_argument("--max-vertices", type=int, help="largest intermediate graph")
    oracle.add_argument("--cache", help="search cache file")
    oracle.add_argument("--output", help="write the trace here instead of stdout")
    oracle.set_defaults(handler=cmd_oracle)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as err:
        setup_logging(Config())
        _LOGGER.error("%s", err)  # noqa: TRY400
        return EXIT_INPUT_ERROR
    setup_logging(config, verbose=args.verbose)

    handler: Handler = args.handler
    try:
        return handler(args, config)
    except (ParseError, LimitExceededError) as err:
        _LOGGER.error("%s", err)  # noqa: TRY400
        return EXIT_INPUT_ERROR
    except OSError as err:
        _LOGGER.error("I/O error: %s", err)  # noqa: TRY400
        return EXIT_INPUT_ERROR
    except Gk3ShiftError as err:
        _LOGGER.error("Unsupported input: %s", err)  # noqa: TRY400
        return EXIT_UNSUPPORTED
