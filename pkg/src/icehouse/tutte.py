"""Plane graphs, medial construction, and deletion-contraction invariants.

A plane graph is given combinatorially: a rotation system (the cyclic
order of darts around each vertex) plus the dart pairing.  Its medial
graph has one 4-valent vertex per edge and one edge per corner (a pair
of darts consecutive in some rotation), which lands exactly in the
4-regular multigraph class used by the rest of the package.

Role convention at a medial vertex for original edge (d at u, d' at v):

    role 1 = corner (prev_u(d), d)      role 2 = corner (d, next_u(d))
    role 3 = corner (prev_v(d'), d')    role 4 = corner (d', next_v(d'))

so the two corners flanking d take roles {1, 2} and the two flanking d'
take roles {3, 4}.  The convention was fixed by requiring the ratio of
the medial total weight at (1, 1, 2) to the deletion-contraction value
at (3, 3) to come out constant across the golden suite; a reflected
choice makes the ratio drift with graph shape.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import SizeCapError
from .quadgraph import QuadGraph

TUTTE_EDGE_CAP = 14


class PlaneGraphError(ValueError):
    """Malformed rotation system or dart pairing."""


class PlaneGraph:
    """Connected multigraph with a combinatorial embedding."""

    def __init__(self, rotations: Sequence[Sequence[int]], edges: Sequence[Sequence[int]]):
        rotations = tuple(tuple(c) for c in rotations)
        edges = tuple(tuple(e) for e in edges)
        darts = [d for cyc in rotations for d in cyc]
        if len(darts) != len(set(darts)):
            raise PlaneGraphError("a dart appears twice in the rotation system")
        if len(darts) != 2 * len(edges):
            raise PlaneGraphError("dart count must be twice the edge count")
        dart_set = set(darts)
        seen: set[int] = set()
        for e in edges:
            if len(e) != 2 or e[0] == e[1]:
                raise PlaneGraphError(f"bad dart pair {e!r}")
            for d in e:
                if d not in dart_set:
                    raise PlaneGraphError(f"edge references unknown dart {d}")
                if d in seen:
                    raise PlaneGraphError(f"dart {d} used by two edges")
                seen.add(d)
        if seen != dart_set:
            raise PlaneGraphError("some darts belong to no edge")

        self.rotations = rotations
        self.edges = edges
        self.num_vertices = len(rotations)
        self.num_edges = len(edges)
        self.vertex_of_dart = {d: v for v, cyc in enumerate(rotations) for d in cyc}
        self.edge_of_dart = {}
        for ei, (d0, d1) in enumerate(edges):
            self.edge_of_dart[d0] = ei
            self.edge_of_dart[d1] = ei
        self.next_dart = {}
        self.prev_dart = {}
        for cyc in rotations:
            k = len(cyc)
            for i, d in enumerate(cyc):
                self.next_dart[d] = cyc[(i + 1) % k]
                self.prev_dart[d] = cyc[(i - 1) % k]
        if not self._connected():
            raise PlaneGraphError("graph is not connected")

    def _connected(self) -> bool:
        if self.num_vertices == 1:
            return True
        adj: dict[int, set[int]] = {v: set() for v in range(self.num_vertices)}
        for d0, d1 in self.edges:
            u, v = self.vertex_of_dart[d0], self.vertex_of_dart[d1]
            adj[u].add(v)
            adj[v].add(u)
        seen = {0}
        stack = [0]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == self.num_vertices

    def edge_list(self) -> list[tuple[int, int]]:
        """Edges as vertex pairs (loops appear as (v, v))."""
        return [
            (self.vertex_of_dart[d0], self.vertex_of_dart[d1]) for d0, d1 in self.edges
        ]

    def face_count(self) -> int:
        """Orbits of next(mate(d)); V - E + F = 2 on genus-0 embeddings."""
        mate = {}
        for d0, d1 in self.edges:
            mate[d0] = d1
            mate[d1] = d0
        unseen = set(self.vertex_of_dart)
        faces = 0
        while unseen:
            d = start = next(iter(unseen))
            while True:
                unseen.discard(d)
                d = self.next_dart[mate[d]]
                if d == start:
                    break
            faces += 1
        return faces


# ---------------------------------------------------------------------------
# deletion-contraction
# ---------------------------------------------------------------------------


def _component_connected(edges: list[tuple[int, int]], u: int, v: int) -> bool:
    """Are u and v connected by the given edges?"""
    if u == v:
        return True
    adj: dict[int, list[int]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    seen = {u}
    stack = [u]
    while stack:
        for nb in adj.get(stack.pop(), ()):
            if nb == v:
                return True
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return False


def tutte_eval(graph, x, y):
    """Deletion-contraction invariant of a connected multigraph.

    Accepts a PlaneGraph or a sequence of (u, v) vertex pairs.  Loops
    multiply by y, bridges by x, and any other edge e contributes
    T(G - e) + T(G / e); the edgeless graph counts 1.  At integer
    (x, y) the arithmetic is exact (Python integers all the way).
    The edge-processing order never changes the value.
    """
    edges = graph.edge_list() if isinstance(graph, PlaneGraph) else [tuple(e) for e in graph]
    if len(edges) > TUTTE_EDGE_CAP:
        raise SizeCapError(f"{len(edges)} edges exceeds the recursion cap {TUTTE_EDGE_CAP}")

    def rec(es: list[tuple[int, int]]):
        if not es:
            return 1
        (u, v), rest = es[0], es[1:]
        if u == v:
            return y * rec(rest)
        if not _component_connected(rest, u, v):  # bridge: contract it
            return x * rec([_relabel(e, v, u) for e in rest])
        return rec(rest) + rec([_relabel(e, v, u) for e in rest])

    return rec(edges)


def _relabel(e: tuple[int, int], old: int, new: int) -> tuple[int, int]:
    a, b = e
    return (new if a == old else a, new if b == old else b)


def spanning_tree_count(edges: Sequence[tuple[int, int]]) -> int:
    """Kirchhoff count: determinant of a reduced Laplacian, computed in
    exact rational arithmetic.  Loops are ignored; multi-edges count."""
    verts = sorted({v for e in edges for v in e})
    index = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    if n <= 1:
        return 1
    L = [[Fraction(0)] * n for _ in range(n)]
    for u, v in edges:
        if u == v:
            continue
        iu, iv = index[u], index[v]
        L[iu][iu] += 1
        L[iv][iv] += 1
        L[iu][iv] -= 1
        L[iv][iu] -= 1
    # fraction-free enough: Gaussian elimination over Q on the minor
    m = [row[: n - 1] for row in L[: n - 1]]
    det = Fraction(1)
    for col in range(n - 1):
        piv = next((r for r in range(col, n - 1) if m[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n - 1):
            factor = m[r][col] * inv
            if factor:
                for c in range(col, n - 1):
                    m[r][c] -= factor * m[col][c]
    assert det.denominator == 1
    return int(det)


# ---------------------------------------------------------------------------
# medial construction
# ---------------------------------------------------------------------------


def medial_graph(pg: PlaneGraph) -> QuadGraph:
    """4-regular medial of a plane graph.

    One vertex per original edge; one edge per corner, joining the two
    original edges that meet at that corner.  Dart roles follow the
    module-level convention.
    """
    # a corner (d, next(d)) gives dart role 2 or 4 on d's edge (2 when d
    # is the tail dart) and role 1 or 3 on next(d)'s edge (1 when next(d)
    # is the tail dart)
    def second_corner_role(d: int) -> int:
        ei = pg.edge_of_dart[d]
        return 2 if pg.edges[ei][0] == d else 4

    def first_corner_role(d: int) -> int:
        ei = pg.edge_of_dart[d]
        return 1 if pg.edges[ei][0] == d else 3

    edges = []
    for cyc in pg.rotations:
        k = len(cyc)
        for i in range(k):
            d, d2 = cyc[i], cyc[(i + 1) % k]
            edges.append(
                (
                    (pg.edge_of_dart[d], second_corner_role(d)),
                    (pg.edge_of_dart[d2], first_corner_role(d2)),
                )
            )
    return QuadGraph(pg.num_edges, edges)


# ---------------------------------------------------------------------------
# cross-check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CrosscheckRow:
    name: str
    z_medial: float  # total weight of the medial graph at (1, 1, 2)
    tutte_33: float  # deletion-contraction value at (3, 3)

    @property
    def ratio(self) -> float:
        return self.z_medial / self.tutte_33


def tutte_crosscheck(pg: PlaneGraph, name: str = "") -> CrosscheckRow:
    """Both sides of the medial correspondence on one plane graph.

    Weight point (1, 1, 2) against evaluation point (3, 3); both sides
    are integers computed exactly (the weights are powers of two), so
    rows are reproducible bit for bit.
    """
    from .exact import Weights, enumerate_Z

    z = enumerate_Z(medial_graph(pg), Weights(1.0, 1.0, 2.0))
    t = tutte_eval(pg, 3, 3)
    return CrosscheckRow(name=name, z_medial=z, tutte_33=float(t))


def golden_suite() -> list[tuple[str, PlaneGraph]]:
    """Small plane graphs used to pin the medial correspondence."""
    return [
        ("single_loop", PlaneGraph([[0, 1]], [(0, 1)])),
        ("single_bridge", PlaneGraph([[0], [1]], [(0, 1)])),
        ("path2", PlaneGraph([[0], [1, 2], [3]], [(0, 1), (2, 3)])),
        ("two_parallel", PlaneGraph([[0, 2], [1, 3]], [(0, 1), (2, 3)])),
        ("triangle", PlaneGraph([[0, 5], [1, 2], [3, 4]], [(0, 1), (2, 3), (4, 5)])),
        ("square", PlaneGraph([[0, 7], [1, 2], [3, 4], [5, 6]], [(0, 1), (2, 3), (4, 5), (6, 7)])),
        (
            "k4",
            # outer triangle 0,1,2 with 3 inside, all rotations counterclockwise
            PlaneGraph(
                [[0, 6, 5], [2, 8, 1], [4, 10, 3], [11, 7, 9]],
                [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11)],
            ),
        ),
    ]


def load_plane_graph(document: str) -> PlaneGraph:
    """Parse {"rotations": [[darts...], ...], "edges": [[d, d'], ...]}."""
    import json

    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise PlaneGraphError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "rotations" not in doc or "edges" not in doc:
        raise PlaneGraphError("document must be an object with 'rotations' and 'edges'")
    return PlaneGraph(doc["rotations"], doc["edges"])


def serialize_plane_graph(pg: PlaneGraph) -> str:
    import json

    return json.dumps(
        {
            "rotations": [list(c) for c in pg.rotations],
            "edges": [list(e) for e in pg.edges],
        },
        separators=(",", ":"),
        sort_keys=True,
    )
