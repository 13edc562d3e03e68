"""Exact oracles: weight regions, local signatures, pruned enumeration,
transfer matrices on tori, and exact equilibrium distributions.

Everything here is a pure function of immutable inputs, capped at desk
scale (the enumeration searches 2^edges with ice-rule pruning, so caps
keep the dynamic range of plain double products tame).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadgraph import Orientation, QuadGraph

ENUM_EDGE_CAP = 32
TRANSFER_ROW_CAP = 12

F_EQ_RTOL = 1e-12  # |c - (a+b)| <= F_EQ_RTOL * max(1, a+b)


class SizeCapError(ValueError):
    """Instance exceeds the hard cap of an exact oracle."""


@dataclass(frozen=True)
class Weights:
    """Nonnegative local weights (a, b, c); not all zero."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            x = getattr(self, name)
            if not math.isfinite(x) or x < 0:
                raise ValueError(f"weight {name}={x} must be finite and >= 0")
        if self.a == self.b == self.c == 0:
            raise ValueError("weights must not all be zero")

    def scaled(self, lam: float) -> "Weights":
        return Weights(lam * self.a, lam * self.b, lam * self.c)

    def swapped_ab(self) -> "Weights":
        return Weights(self.b, self.a, self.c)


@dataclass(frozen=True)
class Region:
    """Membership flags for the four weight regions.

    The regions overlap (they are not a partition), so all four flags
    are reported.
    """

    in_F_le2: bool
    in_F_le: bool
    in_F_eq: bool
    in_F_gt: bool


def classify_region(w: Weights) -> Region:
    """Evaluate the defining inequalities literally.

    F_le2:  a^2 <= b^2 + c^2, b^2 <= a^2 + c^2, c^2 <= a^2 + b^2
    F_le:   a <= b + c,       b <= a + c,       c <= a + b
    F_eq:   c = a + b   (relative tolerance, weights are floats)
    F_gt:   one strict reverse inequality, and a, b, c all positive
    """
    a, b, c = w.a, w.b, w.c
    le2 = a * a <= b * b + c * c and b * b <= a * a + c * c and c * c <= a * a + b * b
    le = a <= b + c and b <= a + c and c <= a + b
    eq = abs(c - (a + b)) <= F_EQ_RTOL * max(1.0, a + b)
    gt = (a > b + c or b > a + c or c > a + b) and a > 0 and b > 0 and c > 0
    return Region(in_F_le2=le2, in_F_le=le, in_F_eq=eq, in_F_gt=gt)


# ---------------------------------------------------------------------------
# signatures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    """Arity-4 constraint function on role-ordered inputs.

    table[i] is the value on (x1,x2,x3,x4) with i = x1*8+x2*4+x3*2+x4.
    """

    table: tuple[float, ...]

    def __post_init__(self):
        if len(self.table) != 16:
            raise ValueError("arity-4 signature needs 16 entries")

    def value(self, x1: int, x2: int, x3: int, x4: int) -> float:
        return self.table[(x1 << 3) | (x2 << 2) | (x3 << 1) | x4]

    def matrix(self) -> np.ndarray:
        """4x4 view with row index x1x2 and column index x4x3.

        The column order reversal (x4 before x3) lets these matrices
        compose by plain matrix product when chained side by side.
        """
        m = np.empty((4, 4))
        for x1 in (0, 1):
            for x2 in (0, 1):
                for x3 in (0, 1):
                    for x4 in (0, 1):
                        m[(x1 << 1) | x2, (x4 << 1) | x3] = self.value(x1, x2, x3, x4)
        return m


def pattern_weight_table(w: Weights) -> np.ndarray:
    """16-entry table: local weight per vertex code, zero off the six
    ice-rule codes (a on 0011/1100, b on 0110/1001, c on 0101/1010)."""
    t = np.zeros(16)
    t[0b0011] = t[0b1100] = w.a
    t[0b0110] = t[0b1001] = w.b
    t[0b0101] = t[0b1010] = w.c
    return t


def signature_from_weights(w: Weights) -> Signature:
    return Signature(tuple(pattern_weight_table(w)))


# ---------------------------------------------------------------------------
# pruned enumeration
# ---------------------------------------------------------------------------


def _enumeration_order(graph: QuadGraph, pins: dict[int, int] | None = None) -> list[int]:
    """Static edge order: greedily prefer edges at already-touched
    vertices so the in/out-degree pruning bites as early as possible."""
    remaining = set(range(graph.num_edges))
    touched = [0] * graph.vertex_count
    order: list[int] = []
    # pinned edges first: they only narrow the search
    if pins:
        for ei in sorted(pins):
            order.append(ei)
            remaining.discard(ei)
            touched[graph.edges[ei][0][0]] += 1
            touched[graph.edges[ei][1][0]] += 1
    while remaining:
        best = min(
            remaining,
            key=lambda ei: (
                -(touched[graph.edges[ei][0][0]] + touched[graph.edges[ei][1][0]]),
                ei,
            ),
        )
        order.append(best)
        remaining.discard(best)
        touched[graph.edges[best][0][0]] += 1
        touched[graph.edges[best][1][0]] += 1
    return order


def iter_valid_orientations(graph: QuadGraph, pins: dict[int, int] | None = None):
    """Yield edge-bit tuples of every ice-rule-valid orientation.

    Depth-first assignment with pruning as soon as any vertex exceeds
    two outgoing or two incoming darts.  Pins fix edge bits up front.
    """
    if graph.num_edges > ENUM_EDGE_CAP:
        raise SizeCapError(
            f"{graph.num_edges} edges exceeds the enumeration cap of {ENUM_EDGE_CAP}"
        )
    order = _enumeration_order(graph, pins)
    nv = graph.vertex_count
    out = [0] * nv
    inc = [0] * nv
    bits = [0] * graph.num_edges
    tails = [graph.edges[ei][0][0] for ei in range(graph.num_edges)]
    heads = [graph.edges[ei][1][0] for ei in range(graph.num_edges)]

    def place(ei: int, b: int) -> bool:
        """Apply bit b to edge ei; return False if a vertex overflows."""
        t, h = tails[ei], heads[ei]
        if b == 1:
            out[t] += 1
            inc[h] += 1
        else:
            inc[t] += 1
            out[h] += 1
        bits[ei] = b
        return out[t] <= 2 and inc[t] <= 2 and out[h] <= 2 and inc[h] <= 2

    def unplace(ei: int, b: int) -> None:
        t, h = tails[ei], heads[ei]
        if b == 1:
            out[t] -= 1
            inc[h] -= 1
        else:
            inc[t] -= 1
            out[h] -= 1

    n = graph.num_edges

    def rec(k: int):
        if k == n:
            yield tuple(bits)
            return
        ei = order[k]
        choices = (pins[ei],) if pins and ei in pins else (0, 1)
        for b in choices:
            ok = place(ei, b)
            if ok:
                yield from rec(k + 1)
            unplace(ei, b)

    yield from rec(0)


def orientation_weight(graph: QuadGraph, w: Weights, edge_bits) -> float:
    """Product of local pattern weights (assumes the ice rule holds)."""
    tbl = pattern_weight_table(w)
    codes = [0] * graph.vertex_count
    for ei, b in enumerate(edge_bits):
        (tv, tr), (hv, hr) = graph.edges[ei]
        if b:
            codes[tv] |= 1 << (4 - tr)
        else:
            codes[hv] |= 1 << (4 - hr)
    prod = 1.0
    for code in codes:
        prod *= tbl[code]
    return prod


def enumerate_Z(graph: QuadGraph, w: Weights, pins: dict[int, int] | None = None) -> float:
    """Sum of orientation weights over all valid orientations.

    The depth-first search order does not affect the result; pruning
    only skips branches whose continuation weight is already zero.
    """
    tbl = pattern_weight_table(w)
    total = 0.0
    for bits in iter_valid_orientations(graph, pins):
        codes = [0] * graph.vertex_count
        for ei, b in enumerate(bits):
            (tv, tr), (hv, hr) = graph.edges[ei]
            if b:
                codes[tv] |= 1 << (4 - tr)
            else:
                codes[hv] |= 1 << (4 - hr)
        prod = 1.0
        for code in codes:
            prod *= tbl[code]
        total += prod
    return total


def first_valid_orientation(
    graph: QuadGraph, w: Weights, pins: dict[int, int] | None = None
) -> Orientation | None:
    """Some positive-weight valid orientation consistent with pins, if any."""
    tbl = pattern_weight_table(w)
    for bits in iter_valid_orientations(graph, pins):
        codes = [0] * graph.vertex_count
        for ei, b in enumerate(bits):
            (tv, tr), (hv, hr) = graph.edges[ei]
            if b:
                codes[tv] |= 1 << (4 - tr)
            else:
                codes[hv] |= 1 << (4 - hr)
        if all(tbl[code] > 0 for code in codes):
            return Orientation.from_edge_bits(graph, bits)
    return None


def gibbs_distribution(
    graph: QuadGraph, w: Weights, pins: dict[int, int] | None = None
) -> dict[Orientation, float]:
    """Normalized orientation weights; the ground truth for samplers."""
    weights: dict[Orientation, float] = {}
    z = 0.0
    for bits in iter_valid_orientations(graph, pins):
        wt = orientation_weight(graph, w, bits)
        if wt > 0:
            weights[Orientation.from_edge_bits(graph, bits)] = wt
            z += wt
    if z <= 0:
        raise ValueError("no valid orientation has positive weight")
    return {o: wt / z for o, wt in weights.items()}


def exact_marginal(
    graph: QuadGraph,
    w: Weights,
    pins: dict[int, int],
    edge: int,
    direction: int,
) -> float:
    """Pr[edge bit = direction] under the pinned equilibrium distribution."""
    num = enumerate_Z(graph, w, {**pins, edge: direction})
    den = enumerate_Z(graph, w, pins)
    if den <= 0:
        raise ValueError("conditioning event has zero weight")
    return num / den


# ---------------------------------------------------------------------------
# transfer matrix on the torus
# ---------------------------------------------------------------------------


def transfer_matrix(n: int, w: Weights) -> np.ndarray:
    """Column-to-column transfer operator for an n-row torus.

    The state is the n horizontal edge bits crossing a column boundary
    (bit i = 1 when row i's edge points rightward, i.e. leaves the left
    vertex through its right dart).  Entry [s, s'] sums the n vertical
    edge bits of one column, each vertex weighted by its local pattern:
    vertex i sees (x1,x2,x3,x4) = (1-h_i, v_i, h'_i, 1-v_{i-1}) with v_i
    the downward bit of the edge below row i.  The carry v wraps
    cyclically, hence the trace over the 2x2 carry index.
    """
    if n > TRANSFER_ROW_CAP:
        raise SizeCapError(f"n={n} exceeds transfer-matrix cap {TRANSFER_ROW_CAP}")
    f = pattern_weight_table(w).reshape(2, 2, 2, 2)  # [x1, x2, x3, x4]
    # R[v_prev, v, h, h'] = f[1-h, v, h', 1-v_prev]
    R = np.empty((2, 2, 2, 2))
    for vp in (0, 1):
        for v in (0, 1):
            for h in (0, 1):
                for hp in (0, 1):
                    R[vp, v, h, hp] = f[1 - h, v, hp, 1 - vp]
    # chain the n row tensors; each step appends one row's bit pair to
    # the state indices (earlier rows end up in higher bit positions)
    M = R  # [v_start, v, s, s'] with one row absorbed
    dim = 2
    for _ in range(n - 1):
        M = np.einsum("avst,vbhk->abshtk", M, R).reshape(2, 2, 2 * dim, 2 * dim)
        dim *= 2
    return np.einsum("aast->st", M)


def transfer_matrix_Z(n: int, m: int, w: Weights) -> float:
    """Torus value as trace of the m-th power of the column transfer."""
    T = transfer_matrix(n, w)
    return float(np.trace(np.linalg.matrix_power(T, m)))
