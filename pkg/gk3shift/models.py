"""Data models for gk3shift."""

from __future__ import annotations

from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from enum import StrEnum
from math import gcd
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .graph import MultiGraph


@dataclass(frozen=True)
class Edge:
    """A directed edge with a stable identifier."""

    edge_id: str
    source: str
    target: str  # range r(e)


@dataclass(frozen=True)
class Cycle:
    """A closed path through pairwise distinct vertices."""

    vertices: tuple[str, ...]
    edges: tuple[str, ...]  # edges[k] runs from vertices[k] to vertices[k + 1]

    @property
    def length(self) -> int:
        """Number of edges on the cycle."""
        return len(self.edges)


@dataclass(frozen=True)
class CyclePoset:
    """Cycles ordered by reachability: (a, b) in relation means cycles[a] <= cycles[b]."""

    cycles: tuple[Cycle, ...]
    relation: frozenset[tuple[int, int]]

    def leq(self, lower: int, upper: int) -> bool:
        """Return True if cycles[lower] <= cycles[upper]."""
        return (lower, upper) in self.relation

    def maximal(self) -> list[int]:
        """Indices of cycles nothing else lies above."""
        return [
            k
            for k in range(len(self.cycles))
            if not any(self.leq(k, other) for other in range(len(self.cycles)) if other != k)
        ]

    def minimal(self) -> list[int]:
        """Indices of cycles nothing else lies below."""
        return [
            k
            for k in range(len(self.cycles))
            if not any(self.leq(other, k) for other in range(len(self.cycles)) if other != k)
        ]


@dataclass(frozen=True)
class ChainLengths:
    """Longest chain of cycles (d1) and longest chain ending in a cycle with an exit (d2)."""

    d1: int
    d2: int


@dataclass(frozen=True)
class PartitionSpec:
    """Pivot vertex and an ordered partition of one of its edge fibers."""

    pivot: str
    classes: tuple[tuple[str, ...], ...]


class MoveKind(StrEnum):
    """The four Williams moves."""

    IN_SPLIT = "in_split"
    OUT_SPLIT = "out_split"
    IN_AMALGAMATE = "in_amalgamate"
    OUT_AMALGAMATE = "out_amalgamate"

    @property
    def is_split(self) -> bool:
        """True for the two splitting moves."""
        return self in (MoveKind.IN_SPLIT, MoveKind.OUT_SPLIT)

    @property
    def is_out(self) -> bool:
        """True for the moves that act on outgoing fibers."""
        return self in (MoveKind.OUT_SPLIT, MoveKind.OUT_AMALGAMATE)


@dataclass(frozen=True)
class Move:
    """
    One applied graph move.

    For splits, pivot is the split vertex and classes the partition of its fiber.
    For amalgamations, group lists the merged vertices, matching the edge tuples
    that collapse into single edges, pivot the merged vertex and classes the
    partition of its fiber that splits it back.
    """

    kind: MoveKind
    pivot: str
    classes: tuple[tuple[str, ...], ...]
    group: tuple[str, ...] = ()
    matching: tuple[tuple[str, ...], ...] = ()
    renaming: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def as_dict(self) -> dict:
        """Return a JSON-ready dictionary."""
        return {
            "kind": str(self.kind),
            "pivot": self.pivot,
            "classes": [list(c) for c in self.classes],
            "group": list(self.group),
            "matching": [list(m) for m in self.matching],
            "renaming": {old: list(new) for old, new in sorted(self.renaming.items())},
        }


@dataclass(frozen=True)
class MoveTrace:
    """Ordered, replayable sequence of moves."""

    moves: tuple[Move, ...] = ()

    def __len__(self) -> int:
        """Return the number of moves."""
        return len(self.moves)

    def __iter__(self) -> Iterator[Move]:
        """Iterate over the moves in order."""
        return iter(self.moves)

    def __add__(self, other: MoveTrace) -> MoveTrace:
        """Concatenate two traces."""
        return MoveTrace(self.moves + other.moves)

    def as_list(self) -> list[dict]:
        """Return a JSON-ready list."""
        return [move.as_dict() for move in self.moves]


@dataclass(frozen=True)
class IndexedCycle:
    """A cycle whose vertices are listed from the index-0 vertex along the edges."""

    vertices: tuple[str, ...]
    edges: tuple[str, ...]

    @property
    def length(self) -> int:
        """Number of vertices (and edges) on the cycle."""
        return len(self.vertices)

    def index_of(self, vertex: str) -> int:
        """Return the index of a vertex on this cycle."""
        return self.vertices.index(vertex)


@dataclass(frozen=True)
class Trail:
    """A path from a source cycle to a sink cycle through interior vertices."""

    index: int
    source_cycle: int
    source_index: int
    sink_cycle: int
    range_index: int
    edges: tuple[str, ...]

    @property
    def length(self) -> int:
        """Number of edges on the trail."""
        return len(self.edges)


@dataclass(frozen=True)
class PointedGK3:
    """A GK3 graph split into indexed source cycles, sink cycles and trails."""

    graph: MultiGraph
    source_cycles: tuple[IndexedCycle, ...]
    sink_cycles: tuple[IndexedCycle, ...]
    trails: tuple[Trail, ...]

    @property
    def m(self) -> int:
        """Number of source cycles."""
        return len(self.source_cycles)

    @property
    def n(self) -> int:
        """Number of sink cycles."""
        return len(self.sink_cycles)

    def trails_between(self, i: int, j: int) -> list[Trail]:
        """Trails from source cycle i to sink cycle j."""
        return [t for t in self.trails if t.source_cycle == i and t.sink_cycle == j]

    def interior_vertices(self) -> list[str]:
        """Vertices on no cycle, in graph order."""
        on_cycle = {v for c in self.source_cycles + self.sink_cycles for v in c.vertices}
        return [v for v in self.graph.vertices if v not in on_cycle]

    def as_dict(self) -> dict:
        """Return a JSON-ready dictionary."""
        return {
            "source_cycles": [list(c.vertices) for c in self.source_cycles],
            "sink_cycles": [list(c.vertices) for c in self.sink_cycles],
            "trails": [
                {
                    "source_cycle": t.source_cycle,
                    "source_index": t.source_index,
                    "sink_cycle": t.sink_cycle,
                    "range_index": t.range_index,
                    "length": t.length,
                    "edges": list(t.edges),
                }
                for t in self.trails
            ],
        }


@dataclass(frozen=True)
class TrailClass:
    """Residue b - (a + |trail|) of a trail modulo gcd(p, q)."""

    source_cycle: int
    sink_cycle: int
    residue: int
    modulus: int


@dataclass(frozen=True)
class InvariantTable:
    """Cycle lengths and per-pair trail counts by range residue."""

    source_lengths: tuple[int, ...]
    sink_lengths: tuple[int, ...]
    counts: tuple[tuple[tuple[int, ...], ...], ...]  # counts[i][j][c]

    @property
    def m(self) -> int:
        """Number of source cycles."""
        return len(self.source_lengths)

    @property
    def n(self) -> int:
        """Number of sink cycles."""
        return len(self.sink_lengths)

    def modulus(self, i: int, j: int) -> int:
        """Return d_ij = gcd(p_i, q_j)."""
        return gcd(self.source_lengths[i], self.sink_lengths[j])

    def total(self, i: int, j: int) -> int:
        """Number of trails from source cycle i to sink cycle j."""
        return sum(self.counts[i][j])

    def as_dict(self) -> dict:
        """Return a JSON-ready dictionary."""
        return {
            "p": list(self.source_lengths),
            "q": list(self.sink_lengths),
            "counts": [[list(row) for row in per_i] for per_i in self.counts],
        }


class Verdict(StrEnum):
    """Outcome of a decision procedure."""

    YES = "yes"
    NO = "no"
    UNSUPPORTED = "unsupported"


class CertificateKind(StrEnum):
    """What a certificate aligns."""

    GK3 = "gk3"
    CYCLE = "cycle"


@dataclass(frozen=True)
class SseCertificate:
    """Move traces, cycle matchings, offsets and an isomorphism of the aligned graphs."""

    kind: CertificateKind
    trace_e: MoveTrace
    trace_f: MoveTrace
    align_e: MoveTrace
    align_f: MoveTrace
    source_matching: tuple[int, ...]
    sink_matching: tuple[int, ...]
    source_offsets: tuple[int, ...]
    sink_offsets: tuple[int, ...]
    bijection: dict[str, str] = field(default_factory=dict)

    def as_dict(self) -> dict:
        """Return a JSON-ready dictionary."""
        return {
            "kind": str(self.kind),
            "trace_e": self.trace_e.as_list(),
            "trace_f": self.trace_f.as_list(),
            "align_e": self.align_e.as_list(),
            "align_f": self.align_f.as_list(),
            "source_matching": list(self.source_matching),
            "sink_matching": list(self.sink_matching),
            "source_offsets": list(self.source_offsets),
            "sink_offsets": list(self.sink_offsets),
            "bijection": dict(sorted(self.bijection.items())),
        }


@dataclass(frozen=True)
class Congruence:
    """Constraint (a_i + b_j) mod modulus in residues."""

    source_cycle: int
    sink_cycle: int
    residues: tuple[int, ...]
    modulus: int

    def __str__(self) -> str:
        """Render with 1-based cycle numbers."""
        allowed = " or ".join(str(r) for r in self.residues) or "nothing"
        return (
            f"a{self.source_cycle + 1} + b{self.sink_cycle + 1} ≡ {allowed} "
            f"(mod {self.modulus})"
        )


@dataclass(frozen=True)
class Refutation:
    """Why one pair of cycle matchings admits no offsets."""

    source_matching: tuple[int, ...]
    sink_matching: tuple[int, ...]
    empty_pairs: tuple[tuple[int, int], ...] = ()
    congruences: tuple[Congruence, ...] = ()
    contradiction: str | None = None

    def __str__(self) -> str:
        """Render as one line per finding."""
        lines = [f"matching sources {list(self.source_matching)} sinks {list(self.sink_matching)}:"]
        lines.extend(
            f"  no shift matches trail counts of pair ({i + 1}, {j + 1})"
            for i, j in self.empty_pairs
        )
        lines.extend(f"  {congruence}" for congruence in self.congruences)
        if self.contradiction:
            lines.append(f"  contradiction: {self.contradiction}")
        return "\n".join(lines)


@dataclass(frozen=True)
class Decision:
    """Verdict of an SSE or SE decision, with its evidence."""

    verdict: Verdict
    certificate: SseCertificate | None = None
    note: str | None = None
    refutations: tuple[Refutation, ...] = ()


@dataclass(frozen=True)
class VerificationResult:
    """Outcome of checking a certificate; truthy when valid."""

    valid: bool
    reason: str

    def __bool__(self) -> bool:
        """Return validity."""
        return self.valid


class MonoidElement:
    """Finitely supported map (vertex, shift) -> positive coefficient."""

    __slots__ = ("_terms",)

    def __init__(self, counts: Mapping[tuple[str, int], int] | None = None) -> None:
        """Build from a mapping; zero coefficients are dropped."""
        terms: list[tuple[tuple[str, int], int]] = []
        for key, coefficient in sorted((counts or {}).items()):
            if coefficient < 0:
                msg = f"Negative coefficient {coefficient} at {key}"
                raise ValueError(msg)
            if coefficient:
                terms.append((key, coefficient))
        self._terms = tuple(terms)

    def items(self) -> tuple[tuple[tuple[str, int], int], ...]:
        """Return sorted (key, coefficient) pairs."""
        return self._terms

    def as_dict(self) -> dict[tuple[str, int], int]:
        """Return a fresh mutable copy of the coefficients."""
        return dict(self._terms)

    def coefficient(self, key: tuple[str, int]) -> int:
        """Coefficient at key, 0 if absent."""
        return dict(self._terms).get(key, 0)

    @property
    def is_zero(self) -> bool:
        """True for the empty element."""
        return not self._terms

    @property
    def max_shift(self) -> int | None:
        """Highest shift in the support."""
        return max((shift for (_, shift), _ in self._terms), default=None)

    @property
    def min_shift(self) -> int | None:
        """Lowest shift in the support."""
        return min((shift for (_, shift), _ in self._terms), default=None)

    def __eq__(self, other: object) -> bool:
        """Compare supports and coefficients."""
        if not isinstance(other, MonoidElement):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        """Hash the sorted terms."""
        return hash(self._terms)

    def __repr__(self) -> str:
        """Debug representation."""
        return f"MonoidElement({dict(self._terms)!r})"


@dataclass(frozen=True)
class LevelVector:
    """Per-vertex counts of an element flowed entirely to one shift."""

    level: int
    vertices: tuple[str, ...]
    counts: tuple[int, ...]

    def as_dict(self) -> dict[str, int]:
        """Return vertex -> count, zero counts included."""
        return dict(zip(self.vertices, self.counts, strict=True))


class ComparisonVerdict(StrEnum):
    """Equality is definitive; inequality only holds up to the searched level."""

    EQUAL = "equal"
    NOT_EQUAL_UP_TO = "not_equal_up_to"


@dataclass(frozen=True)
class ElementComparison:
    """Result of equal_elements."""

    verdict: ComparisonVerdict
    level: int  # level where equality was found, or the highest level searched

    @property
    def equal(self) -> bool:
        """True when the elements were shown equal."""
        return self.verdict is ComparisonVerdict.EQUAL


@dataclass(frozen=True)
class CanonicalElement:
    """Unique representative: anchored source parts and reduced sink parts."""

    anchors: tuple[int | None, ...]  # None for source cycles without a source part
    source_coefficients: tuple[tuple[int, ...], ...]  # [i][k] multiplies v_i(c_i - k)
    sink_coefficients: tuple[tuple[int, ...], ...]  # [j][k] multiplies w_j(k)

    @property
    def source_part_is_zero(self) -> bool:
        """True when no source-cycle generator remains."""
        return all(not any(row) for row in self.source_coefficients)

    def sink_units(self) -> int:
        """Total number of sink generator units."""
        return sum(sum(row) for row in self.sink_coefficients)
