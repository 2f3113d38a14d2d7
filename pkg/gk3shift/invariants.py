"""
Invariant tables and the SSE/SE decision for GK3 graphs.

Two normal-form GK3 graphs are strong shift equivalent exactly when their
cycles can be matched by length so that, for offsets a_i and b_j, the trail
counts satisfy N^E_ij(c) = N^F_{sigma(i) tau(j)}(c + a_i + b_j). For these
graphs shift equivalence and strong shift equivalence coincide, so decide_se
returns the same verdict as decide_sse.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from collections.abc import Collection, Iterator, Sequence
from dataclasses import replace
from math import gcd, lcm
from typing import Any

import voluptuous as vol

from .exceptions import (
    AlignmentError,
    Gk3ShiftError,
    LengthMismatchError,
    NotNormalFormError,
    ParseError,
)
from .gk import is_gk3, is_single_cycle
from .gk3 import align_trails, is_pointed_normal, pointed_structure, to_normal_form
from .graph import MultiGraph, enumerate_cycles
from .models import (
    CertificateKind,
    Congruence,
    Decision,
    InvariantTable,
    MoveTrace,
    PointedGK3,
    Refutation,
    SseCertificate,
    VerificationResult,
    Verdict,
)
from .moves import apply_trace, trace_from_list

_LOGGER = logging.getLogger(__name__)

ShiftSets = tuple[tuple[frozenset[int], ...], ...]

_INDEXES = [vol.All(int, vol.Range(min=0))]

CERTIFICATE_SCHEMA = vol.Schema(
    {
        vol.Required("kind"): vol.Coerce(CertificateKind),
        vol.Required("trace_e"): list,
        vol.Required("trace_f"): list,
        vol.Required("align_e"): list,
        vol.Required("align_f"): list,
        vol.Required("source_matching"): _INDEXES,
        vol.Required("sink_matching"): _INDEXES,
        vol.Required("source_offsets"): [int],
        vol.Required("sink_offsets"): [int],
        vol.Required("bijection"): {vol.Coerce(str): vol.Coerce(str)},
    }
)


def _pointed_normal(graph: MultiGraph) -> PointedGK3:
    try:
        pointed = pointed_structure(graph)
    except Gk3ShiftError as err:
        msg = f"Not a normal-form GK3 graph: {err}"
        raise NotNormalFormError(msg) from err
    if not is_pointed_normal(pointed):
        msg = "GK3 graph is not in normal form"
        raise NotNormalFormError(msg)
    return pointed


def invariant_table(pointed: PointedGK3) -> InvariantTable:
    """
    Count trails per cycle pair by range index modulo gcd(p_i, q_j).

    Raises:
        NotNormalFormError: If pointed is not in normal form.

    """
    if not is_pointed_normal(pointed):
        msg = "Invariant tables need a normal-form graph"
        raise NotNormalFormError(msg)

    p = tuple(c.length for c in pointed.source_cycles)
    q = tuple(c.length for c in pointed.sink_cycles)
    counts = [[[0] * gcd(pi, qj) for qj in q] for pi in p]
    for trail in pointed.trails:
        row = counts[trail.source_cycle][trail.sink_cycle]
        row[trail.range_index % len(row)] += 1
    return InvariantTable(
        p, q, tuple(tuple(tuple(row) for row in per_i) for per_i in counts)
    )


def shift_sets(
    table_e: InvariantTable,
    table_f: InvariantTable,
    sigma: Sequence[int],
    tau: Sequence[int],
) -> ShiftSets:
    """
    S_ij = shifts s with N^E_ij(c) = N^F_{sigma(i) tau(j)}(c + s) for every c.

    Raises:
        LengthMismatchError: If the matchings pair cycles of different lengths.

    """
    if len(sigma) != table_e.m or len(tau) != table_e.n:
        msg = "Matchings do not cover the cycles"
        raise LengthMismatchError(msg)
    for i, k in enumerate(sigma):
        if table_e.source_lengths[i] != table_f.source_lengths[k]:
            msg = (
                f"Source cycle {i} of length {table_e.source_lengths[i]} "
                f"matched to length {table_f.source_lengths[k]}"
            )
            raise LengthMismatchError(msg)
    for j, k in enumerate(tau):
        if table_e.sink_lengths[j] != table_f.sink_lengths[k]:
            msg = (
                f"Sink cycle {j} of length {table_e.sink_lengths[j]} "
                f"matched to length {table_f.sink_lengths[k]}"
            )
            raise LengthMismatchError(msg)

    result = []
    for i in range(table_e.m):
        row = []
        for j in range(table_e.n):
            mine = table_e.counts[i][j]
            theirs = table_f.counts[sigma[i]][tau[j]]
            d = len(mine)
            row.append(
                frozenset(
                    s for s in range(d) if all(mine[c] == theirs[(c + s) % d] for c in range(d))
                )
            )
        result.append(tuple(row))
    return tuple(result)


def solve_offsets(
    sets: Sequence[Sequence[Collection[int]]], moduli: Sequence[Sequence[int]]
) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """
    Find a and b with (a_i + b_j) mod d_ij in S_ij for all pairs, or None.

    a_1 is fixed to 0; a_i ranges over lcm_j d_ij and b_j over lcm_i d_ij. The
    first solution in lexicographic order is returned.
    """
    m = len(moduli)
    n = len(moduli[0]) if m else 0
    a_ranges = [lcm(*moduli[i]) for i in range(m)]
    b_ranges = [lcm(*(moduli[i][j] for i in range(m))) for j in range(n)]

    def best_b(prefix: Sequence[int], j: int) -> int | None:
        return next(
            (
                b
                for b in range(b_ranges[j])
                if all((a + b) % moduli[i][j] in sets[i][j] for i, a in enumerate(prefix))
            ),
            None,
        )

    def search(prefix: list[int]) -> tuple[int, ...] | None:
        if any(best_b(prefix, j) is None for j in range(n)):
            return None
        if len(prefix) == m:
            return tuple(prefix)
        choices = range(a_ranges[len(prefix)]) if prefix else range(1)
        for a in choices:
            found = search([*prefix, a])
            if found is not None:
                return found
        return None

    a_values = search([])
    if a_values is None:
        return None
    return a_values, tuple(best_b(a_values, j) for j in range(n))  # type: ignore[misc]


def _signatures(table: InvariantTable) -> tuple[list[tuple], list[tuple]]:
    """Per-cycle pruning keys: (length, sorted (partner length, trail total))."""
    sources = [
        (
            table.source_lengths[i],
            sorted((table.sink_lengths[j], table.total(i, j)) for j in range(table.n)),
        )
        for i in range(table.m)
    ]
    sinks = [
        (
            table.sink_lengths[j],
            sorted((table.source_lengths[i], table.total(i, j)) for i in range(table.m)),
        )
        for j in range(table.n)
    ]
    return sources, sinks


def _matchings(mine: Sequence[Any], theirs: Sequence[Any]) -> Iterator[tuple[int, ...]]:
    for perm in itertools.permutations(range(len(theirs))):
        if all(mine[k] == theirs[perm[k]] for k in range(len(mine))):
            yield perm


def _render_residues(residues: Collection[int]) -> str:
    return " or ".join(str(r) for r in sorted(residues))


def _contradiction(sets: ShiftSets, moduli: Sequence[Sequence[int]]) -> str | None:
    """Two rows that force different values on a difference b_j' - b_j."""
    m, n = len(moduli), len(moduli[0])
    for i, i2 in itertools.combinations(range(m), 2):
        for j, j2 in itertools.combinations(range(n), 2):
            g = gcd(moduli[i][j], moduli[i][j2], moduli[i2][j], moduli[i2][j2])
            if g == 1:
                continue
            first = {(y - x) % g for x in sets[i][j] for y in sets[i][j2]}
            second = {(y - x) % g for x in sets[i2][j] for y in sets[i2][j2]}
            if first and second and first.isdisjoint(second):
                return (
                    f"b{j2 + 1} - b{j + 1} ≡ {_render_residues(first)} (mod {g}) "
                    f"from row {i + 1} and ≡ {_render_residues(second)} (mod {g}) "
                    f"from row {i2 + 1}"
                )
    return None


def gk3_isomorphic(first: MultiGraph, second: MultiGraph) -> dict[str, str] | None:
    """
    Vertex bijection between two normal-form graphs preserving edges, or None.

    Source cycles are matched with their common sources aligned; each sink
    cycle is matched and rotated independently.

    Raises:
        NotNormalFormError: If either graph is not in normal form.

    """
    pe, pf = _pointed_normal(first), _pointed_normal(second)
    if len(first.vertices) != len(second.vertices) or len(first.edges) != len(second.edges):
        return None

    source_lengths = ([c.length for c in pe.source_cycles], [c.length for c in pf.source_cycles])
    sink_lengths = ([c.length for c in pe.sink_cycles], [c.length for c in pf.sink_cycles])
    if (pe.m, pe.n) != (pf.m, pf.n):
        return None

    incoming_f = [
        Counter((t.source_cycle, t.range_index) for t in pf.trails if t.sink_cycle == j)
        for j in range(pf.n)
    ]
    for sigma in _matchings(*source_lengths):
        for tau in _matchings(*sink_lengths):
            rotations = []
            for j, cycle in enumerate(pe.sink_cycles):
                wanted = incoming_f[tau[j]]
                rotation = next(
                    (
                        r
                        for r in range(cycle.length)
                        if Counter(
                            (sigma[t.source_cycle], (t.range_index + r) % cycle.length)
                            for t in pe.trails
                            if t.sink_cycle == j
                        )
                        == wanted
                    ),
                    None,
                )
                if rotation is None:
                    break
                rotations.append(rotation)
            else:
                bijection: dict[str, str] = {}
                for i, cycle in enumerate(pe.source_cycles):
                    image = pf.source_cycles[sigma[i]].vertices
                    bijection.update(zip(cycle.vertices, image, strict=True))
                for j, cycle in enumerate(pe.sink_cycles):
                    image = pf.sink_cycles[tau[j]].vertices
                    for k, vertex in enumerate(cycle.vertices):
                        bijection[vertex] = image[(k + rotations[j]) % cycle.length]
                return bijection
    return None


def _is_isomorphism(first: MultiGraph, second: MultiGraph, bijection: dict[str, str]) -> bool:
    if set(bijection) != first.vertex_set or set(bijection.values()) != second.vertex_set:
        return False
    if len(set(bijection.values())) != len(bijection):
        return False
    mapped = Counter((bijection[e.source], bijection[e.target]) for e in first.edges)
    return mapped == Counter((e.source, e.target) for e in second.edges)


def _refute(
    sigma: tuple[int, ...],
    tau: tuple[int, ...],
    sets: ShiftSets,
    moduli: Sequence[Sequence[int]],
) -> Refutation:
    empty = tuple(
        (i, j) for i, row in enumerate(sets) for j, allowed in enumerate(row) if not allowed
    )
    if empty:
        return Refutation(sigma, tau, empty_pairs=empty)
    congruences = tuple(
        Congruence(i, j, tuple(sorted(allowed)), moduli[i][j])
        for i, row in enumerate(sets)
        for j, allowed in enumerate(row)
    )
    return Refutation(
        sigma, tau, congruences=congruences, contradiction=_contradiction(sets, moduli)
    )


def decide_approx(first: MultiGraph, second: MultiGraph) -> Decision:
    """
    Decide the offset relation between two normal-form GK3 graphs.

    Every length-preserving matching of cycles is tried in canonical order;
    a YES always carries a certificate with the alignment traces and the
    bijection, a NO one refutation per matching tried.

    Raises:
        NotNormalFormError: If either graph is not in normal form.
        AlignmentError: If solved offsets do not yield isomorphic aligned graphs.

    """
    pe, pf = _pointed_normal(first), _pointed_normal(second)
    table_e, table_f = invariant_table(pe), invariant_table(pf)
    if (table_e.m, table_e.n) != (table_f.m, table_f.n):
        note = (
            f"cycle counts differ: {table_e.m} source/{table_e.n} sink against "
            f"{table_f.m} source/{table_f.n} sink"
        )
        return Decision(Verdict.NO, note=note)

    sources_e, sinks_e = _signatures(table_e)
    sources_f, sinks_f = _signatures(table_f)
    moduli = [[table_e.modulus(i, j) for j in range(table_e.n)] for i in range(table_e.m)]

    refutations: list[Refutation] = []
    for sigma in _matchings(sources_e, sources_f):
        for tau in _matchings(sinks_e, sinks_f):
            sets = shift_sets(table_e, table_f, sigma, tau)
            solution = solve_offsets(sets, moduli)
            if solution is None:
                refutations.append(_refute(sigma, tau, sets, moduli))
                continue
            certificate = _certificate(pe, pf, sigma, tau, *solution)
            if certificate is None:
                msg = f"Offsets {solution} solve the relation but the aligned graphs differ"
                raise AlignmentError(msg)
            return Decision(Verdict.YES, certificate=certificate)

    if not refutations:
        return Decision(Verdict.NO, note="no length-preserving matching of the cycles")
    return Decision(Verdict.NO, note=str(refutations[0]), refutations=tuple(refutations))


def _certificate(
    pe: PointedGK3,
    pf: PointedGK3,
    sigma: tuple[int, ...],
    tau: tuple[int, ...],
    a: tuple[int, ...],
    b: tuple[int, ...],
) -> SseCertificate | None:
    steps = [(-a_i) % cycle.length for a_i, cycle in zip(a, pe.source_cycles, strict=True)]
    aligned_e, align_e = align_trails(pe, steps, b)
    aligned_f, align_f = align_trails(pf, [0] * pf.m, [0] * pf.n)
    bijection = gk3_isomorphic(aligned_e, aligned_f)
    if bijection is None:
        return None
    return SseCertificate(
        kind=CertificateKind.GK3,
        trace_e=MoveTrace(),
        trace_f=MoveTrace(),
        align_e=align_e,
        align_f=align_f,
        source_matching=sigma,
        sink_matching=tau,
        source_offsets=a,
        sink_offsets=b,
        bijection=bijection,
    )


def _cycle_decision(first: MultiGraph, second: MultiGraph) -> Decision:
    (cycle_e,) = enumerate_cycles(first)
    (cycle_f,) = enumerate_cycles(second)
    if cycle_e.length != cycle_f.length:
        note = f"single cycles of lengths {cycle_e.length} and {cycle_f.length}"
        return Decision(Verdict.NO, note=note)
    certificate = SseCertificate(
        kind=CertificateKind.CYCLE,
        trace_e=MoveTrace(),
        trace_f=MoveTrace(),
        align_e=MoveTrace(),
        align_f=MoveTrace(),
        source_matching=(0,),
        sink_matching=(),
        source_offsets=(0,),
        sink_offsets=(),
        bijection=dict(zip(cycle_e.vertices, cycle_f.vertices, strict=True)),
    )
    return Decision(Verdict.YES, certificate=certificate, note="single cycles of equal length")


def decide_sse(first: MultiGraph, second: MultiGraph) -> Decision:
    """
    Decide strong shift equivalence of two GK3 graphs (or two single cycles).

    Both graphs are reduced to normal form and compared with decide_approx;
    the certificate carries the reduction traces. Any other input gives
    UNSUPPORTED.
    """
    if is_single_cycle(first) and is_single_cycle(second):
        return _cycle_decision(first, second)
    if not (is_gk3(first) and is_gk3(second)):
        return Decision(Verdict.UNSUPPORTED, note="both graphs must have GK dimension 3")

    normal_e, trace_e = to_normal_form(first)
    normal_f, trace_f = to_normal_form(second)
    decision = decide_approx(normal_e, normal_f)
    _LOGGER.info("SSE verdict %s", decision.verdict)
    if decision.certificate is None:
        return decision
    return replace(
        decision, certificate=replace(decision.certificate, trace_e=trace_e, trace_f=trace_f)
    )


def decide_se(first: MultiGraph, second: MultiGraph) -> Decision:
    """Decide shift equivalence; for GK3 graphs this is the SSE verdict."""
    decision = decide_sse(first, second)
    if decision.verdict is Verdict.UNSUPPORTED:
        return decision
    note = "shift equivalence coincides with strong shift equivalence for these graphs"
    if decision.note:
        note = f"{note}; {decision.note}"
    return replace(decision, note=note)


def verify_certificate(
    first: MultiGraph, second: MultiGraph, certificate: SseCertificate
) -> VerificationResult:
    """
    Check a certificate independently of the decision that produced it.

    Reason codes: replay_e, replay_f, not_normal_form, matching, offsets,
    replay_align, bijection, single_cycle; "ok" when valid.
    """
    if certificate.kind is CertificateKind.CYCLE:
        valid = (
            is_single_cycle(first)
            and is_single_cycle(second)
            and _is_isomorphism(first, second, certificate.bijection)
        )
        return VerificationResult(valid, "ok" if valid else "single_cycle")

    try:
        normal_e = apply_trace(first, certificate.trace_e)
    except Gk3ShiftError:
        return VerificationResult(False, "replay_e")
    try:
        normal_f = apply_trace(second, certificate.trace_f)
    except Gk3ShiftError:
        return VerificationResult(False, "replay_f")

    try:
        pe, pf = _pointed_normal(normal_e), _pointed_normal(normal_f)
    except NotNormalFormError:
        return VerificationResult(False, "not_normal_form")
    table_e, table_f = invariant_table(pe), invariant_table(pf)

    sigma, tau = certificate.source_matching, certificate.sink_matching
    if sorted(sigma) != list(range(table_f.m)) or sorted(tau) != list(range(table_f.n)):
        return VerificationResult(False, "matching")
    if len(sigma) != table_e.m or len(tau) != table_e.n:
        return VerificationResult(False, "matching")
    try:
        sets = shift_sets(table_e, table_f, sigma, tau)
    except LengthMismatchError:
        return VerificationResult(False, "matching")

    a, b = certificate.source_offsets, certificate.sink_offsets
    if len(a) != table_e.m or len(b) != table_e.n:
        return VerificationResult(False, "offsets")
    for i, j in itertools.product(range(table_e.m), range(table_e.n)):
        if (a[i] + b[j]) % table_e.modulus(i, j) not in sets[i][j]:
            return VerificationResult(False, "offsets")

    try:
        aligned_e = apply_trace(normal_e, certificate.align_e)
        aligned_f = apply_trace(normal_f, certificate.align_f)
    except Gk3ShiftError:
        return VerificationResult(False, "replay_align")

    if not _is_isomorphism(aligned_e, aligned_f, certificate.bijection):
        return VerificationResult(False, "bijection")
    return VerificationResult(True, "ok")


def certificate_from_dict(data: Any) -> SseCertificate:
    """
    Validate and build a certificate from its JSON form.

    Raises:
        ParseError: If the data does not match the certificate format.

    """
    try:
        validated = CERTIFICATE_SCHEMA(data)
    except vol.Invalid as err:
        msg = f"Invalid certificate: {err}"
        raise ParseError(msg) from err
    return SseCertificate(
        kind=validated["kind"],
        trace_e=trace_from_list(validated["trace_e"]),
        trace_f=trace_from_list(validated["trace_f"]),
        align_e=trace_from_list(validated["align_e"]),
        align_f=trace_from_list(validated["align_f"]),
        source_matching=tuple(validated["source_matching"]),
        sink_matching=tuple(validated["sink_matching"]),
        source_offsets=tuple(validated["source_offsets"]),
        sink_offsets=tuple(validated["sink_offsets"]),
        bijection=dict(validated["bijection"]),
    )
