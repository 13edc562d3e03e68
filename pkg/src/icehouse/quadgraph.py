"""4-regular multigraphs carried by darts with explicit local roles.

Every vertex owns exactly four darts (edge ends), one per role
1=left, 2=down, 3=right, 4=up.  Edges pair two darts; self-loops and
parallel edges are first-class, so the smallest instances (one vertex
with two self-loops) are ordinary members of the class.  The role
assignment is part of the instance data: local vertex weights depend on
which dart plays which role, and nothing here tries to infer roles from
an embedding.

An orientation assigns each edge a direction.  Per dart, bit 1 means
"the edge leaves this vertex through this dart"; the two darts of an
edge always carry complementary bits.  An orientation is *valid* when
every vertex has exactly two outgoing darts (the ice rule).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

ROLES = (1, 2, 3, 4)
ROLE_NAMES = {1: "left", 2: "down", 3: "right", 4: "up"}

# local configuration code: x1*8 + x2*4 + x3*2 + x4, where x_r is the
# bit of the role-r dart


class PatternClass(Enum):
    """Local vertex configuration under an orientation."""

    A1 = "A1"  # bits 0011
    A2 = "A2"  # bits 1100
    B1 = "B1"  # bits 0110
    B2 = "B2"  # bits 1001
    C1 = "C1"  # bits 0101
    C2 = "C2"  # bits 1010
    INVALID = "INVALID"


PATTERN_BY_CODE = {
    0b0011: PatternClass.A1,
    0b1100: PatternClass.A2,
    0b0110: PatternClass.B1,
    0b1001: PatternClass.B2,
    0b0101: PatternClass.C1,
    0b1010: PatternClass.C2,
}

VALID_CODES = tuple(sorted(PATTERN_BY_CODE))


class InstanceError(ValueError):
    """Raised when an instance document or graph structure is malformed."""


@dataclass(frozen=True)
class Dart:
    id: int
    vertex: int
    role: int  # one of ROLES


EdgeEnd = tuple[int, int]  # (vertex, role)
Edge = tuple[EdgeEnd, EdgeEnd]


def dart_id(vertex: int, role: int) -> int:
    """Canonical dart numbering: 4*vertex + role - 1."""
    return 4 * vertex + role - 1


class QuadGraph:
    """Connected 4-regular multigraph with role-labelled darts.

    Immutable after construction; all derived indexing arrays are built
    once and shared by readers.  Edge ends are (vertex, role) pairs; the
    first end of each edge is its *tail* for edge-bit bookkeeping (an
    edge bit of 1 means the edge leaves the tail vertex).
    """

    def __init__(self, vertex_count: int, edges: Sequence[Edge]):
        if vertex_count < 1:
            raise InstanceError("vertex_count must be >= 1")
        edges = tuple((tuple(e0), tuple(e1)) for e0, e1 in edges)
        if len(edges) != 2 * vertex_count:
            raise InstanceError(
                f"expected {2 * vertex_count} edges for {vertex_count} vertices, got {len(edges)}"
            )
        seen: set[EdgeEnd] = set()
        for e0, e1 in edges:
            for v, r in (e0, e1):
                if not (0 <= v < vertex_count):
                    raise InstanceError(f"vertex {v} out of range")
                if r not in ROLES:
                    raise InstanceError(f"role {r} not in 1..4")
            if e0 == e1:
                raise InstanceError(f"edge pairs dart {e0} with itself")
            for end in (e0, e1):
                if end in seen:
                    raise InstanceError(f"dart {end} appears in more than one edge")
                seen.add(end)
        # every (vertex, role) pair must be covered: 8n dart slots / 2 per edge
        if len(seen) != 4 * vertex_count:
            missing = {
                (v, r) for v in range(vertex_count) for r in ROLES
            } - seen
            raise InstanceError(f"dangling darts (unused roles): {sorted(missing)[:4]}")

        self.vertex_count = vertex_count
        self.edges = edges
        self.num_edges = len(edges)
        self.num_darts = 4 * vertex_count
        self.darts = tuple(
            Dart(dart_id(v, r), v, r) for v in range(vertex_count) for r in ROLES
        )

        # dart id -> (edge index, end index)
        edge_of = [(-1, -1)] * self.num_darts
        for ei, (e0, e1) in enumerate(edges):
            edge_of[dart_id(*e0)] = (ei, 0)
            edge_of[dart_id(*e1)] = (ei, 1)
        self.edge_of_dart = tuple(edge_of)

        if not self._connected():
            raise InstanceError("graph is not connected")

    # -- structure -----------------------------------------------------

    def _connected(self) -> bool:
        if self.vertex_count == 1:
            return True
        parent = list(range(self.vertex_count))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (u, _), (v, _) in self.edges:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        root = find(0)
        return all(find(v) == root for v in range(self.vertex_count))

    def vertex_edges(self, v: int) -> list[tuple[int, int]]:
        """Edges incident to v as (edge index, end index) in role order."""
        return [self.edge_of_dart[dart_id(v, r)] for r in ROLES]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, QuadGraph)
            and self.vertex_count == other.vertex_count
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.vertex_count, self.edges))

    def __repr__(self) -> str:
        return f"QuadGraph(vertices={self.vertex_count}, edges={self.num_edges})"

    # -- role transforms ------------------------------------------------

    def shift_roles(self) -> "QuadGraph":
        """Cyclically relabel every vertex's roles 1->2->3->4->1."""
        shift = {1: 2, 2: 3, 3: 4, 4: 1}
        return QuadGraph(
            self.vertex_count,
            [((u, shift[r]), (v, shift[s])) for (u, r), (v, s) in self.edges],
        )


@dataclass(frozen=True)
class Orientation:
    """One direction per edge, stored as a bit per dart.

    bit(d) = 1 means the edge leaves d's vertex through d; the two darts
    of an edge always carry complementary bits.
    """

    dart_bits: tuple[int, ...]

    @classmethod
    def from_edge_bits(cls, graph: QuadGraph, edge_bits: Sequence[int]) -> "Orientation":
        bits = [0] * graph.num_darts
        for ei, b in enumerate(edge_bits):
            e0, e1 = graph.edges[ei]
            bits[dart_id(*e0)] = int(b)
            bits[dart_id(*e1)] = 1 - int(b)
        return cls(tuple(bits))

    def edge_bits(self, graph: QuadGraph) -> tuple[int, ...]:
        return tuple(self.dart_bits[dart_id(*e0)] for e0, _ in graph.edges)

    def reversed(self) -> "Orientation":
        return Orientation(tuple(1 - b for b in self.dart_bits))

    def vertex_code(self, v: int) -> int:
        """Bits of v's darts packed as x1*8 + x2*4 + x3*2 + x4."""
        base = 4 * v
        b = self.dart_bits
        return (b[base] << 3) | (b[base + 1] << 2) | (b[base + 2] << 1) | b[base + 3]


def check_edge_consistency(graph: QuadGraph, o: Orientation) -> bool:
    """Each edge has exactly one outgoing end."""
    if len(o.dart_bits) != graph.num_darts:
        return False
    for e0, e1 in graph.edges:
        if o.dart_bits[dart_id(*e0)] + o.dart_bits[dart_id(*e1)] != 1:
            return False
    return True


def is_valid_orientation(graph: QuadGraph, o: Orientation) -> bool:
    """Edge consistency plus the ice rule (out-degree 2 everywhere)."""
    if not check_edge_consistency(graph, o):
        return False
    return all(
        vertex_pattern(graph, o, v) is not PatternClass.INVALID
        for v in range(graph.vertex_count)
    )


def vertex_pattern(graph: QuadGraph, o: Orientation, v: int) -> PatternClass:
    """Classify v's local configuration by its role-ordered dart bits."""
    return PATTERN_BY_CODE.get(o.vertex_code(v), PatternClass.INVALID)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def torus_grid(n: int, m: int) -> QuadGraph:
    """n x m square lattice with periodic wraparound.

    Vertex (i, j) is index i*m + j.  Its right dart meets the left dart
    of (i, j+1 mod m); its up dart meets the down dart of (i-1 mod n, j),
    so rows grow downward and columns wrap both ways.
    """
    if n < 1 or m < 1:
        raise InstanceError("torus dimensions must be >= 1")
    edges: list[Edge] = []
    for i in range(n):
        for j in range(m):
            v = i * m + j
            right = i * m + (j + 1) % m
            below = ((i + 1) % n) * m + j
            edges.append(((v, 3), (right, 1)))
            edges.append(((v, 2), (below, 4)))
    return QuadGraph(n * m, edges)


def random_quad_graph(n: int, seed: int, max_tries: int = 1000) -> QuadGraph:
    """Uniformly random dart pairing, resampled until connected.

    Deterministic for a given seed.  Uniform over connected graphs is
    not claimed; this is a test-instance generator.
    """
    if n < 1:
        raise InstanceError("need at least one vertex")
    rng = np.random.default_rng(seed)
    all_ends = [(v, r) for v in range(n) for r in ROLES]
    for _ in range(max_tries):
        perm = rng.permutation(len(all_ends))
        edges = [
            (all_ends[perm[2 * k]], all_ends[perm[2 * k + 1]])
            for k in range(2 * n)
        ]
        try:
            return QuadGraph(n, edges)
        except InstanceError:
            continue
    raise InstanceError(f"no connected pairing found in {max_tries} tries")


# ---------------------------------------------------------------------------
# instance documents
# ---------------------------------------------------------------------------


def serialize(graph: QuadGraph) -> str:
    """Instance document: {"vertices": n, "edges": [[[v,role],[v,role]], ...]}."""
    doc = {
        "vertices": graph.vertex_count,
        "edges": [[[v, r] for v, r in edge] for edge in graph.edges],
    }
    return json.dumps(doc, separators=(",", ":"), sort_keys=True)


def load_graph(document: str) -> QuadGraph:
    """Parse and validate an instance document; see serialize for the format."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
        raise InstanceError("document must be an object with 'vertices' and 'edges'")
    n = doc["vertices"]
    if not isinstance(n, int):
        raise InstanceError("'vertices' must be an integer")
    raw = doc["edges"]
    if not isinstance(raw, list):
        raise InstanceError("'edges' must be a list")
    edges: list[Edge] = []
    for item in raw:
        try:
            (v0, r0), (v1, r1) = item
            edges.append(((int(v0), int(r0)), (int(v1), int(r1))))
        except (TypeError, ValueError) as exc:
            raise InstanceError(f"bad edge entry {item!r}") from exc
    return QuadGraph(n, edges)


def eulerian_orientation(graph: QuadGraph) -> Orientation:
    """A valid orientation from a closed-walk decomposition.

    All degrees are even, so the edge set splits into closed walks;
    orienting each edge along its walk gives in = out = 2 everywhere.
    """
    used = [False] * graph.num_edges
    edge_bits = [0] * graph.num_edges
    incident = [graph.vertex_edges(v) for v in range(graph.vertex_count)]
    ptr = [0] * graph.vertex_count

    def take_unused(v: int) -> tuple[int, int] | None:
        while ptr[v] < 4:
            ei, end = incident[v][ptr[v]]
            if not used[ei]:
                return ei, end
            ptr[v] += 1
        return None

    for v0 in range(graph.vertex_count):
        while take_unused(v0) is not None:
            v = v0
            while True:
                nxt = take_unused(v)
                if nxt is None:
                    break  # closed walks always get stuck back at v0
                ei, end = nxt
                used[ei] = True
                edge_bits[ei] = 1 if end == 0 else 0
                v = graph.edges[ei][1 - end][0]
    return Orientation.from_edge_bits(graph, edge_bits)
