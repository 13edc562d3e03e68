"""Single-flip Metropolis dynamics on dart assignments with defects.

The walk lives on all 2^edges edge-bit vectors: each edge stores one
bit, read at its tail dart and complemented at its head dart, so edge
consistency is structural and only the ice rule can be violated.  A
vertex whose out-degree differs from 2 is a *defect* and contributes a
fugacity factor lam instead of its pattern weight.  Restricted to
defect-free states the stationary law is exactly the normalized
orientation-weight distribution, whatever lam is; lam only shapes how
often the walk visits the defect-free set.

Proposals flip one uniformly random unpinned edge; acceptance is the
usual min(1, weight ratio), with moves out of weight-zero states into
positive-weight states always accepted.  Starting states are built with
positive weight, and a weight-zero state is never entered (its
acceptance ratio is zero), so that rule only matters for the full
transition matrix, which enumerates every state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .exact import SizeCapError, Weights, first_valid_orientation, pattern_weight_table
from .quadgraph import Orientation, QuadGraph

KERNEL_EDGE_CAP = 16   # exact transition matrices: 2^16 states
ENGINE_EDGE_CAP = 20   # tabulated-weight batch engine: 2^20 weight entries

# verify codes/defects against edge bits after every reference step
# (diagnostic builds only; quadratic drag on the hot loop)
VERIFY_STATE = False

_POPCOUNT2 = tuple(bin(c).count("1") == 2 for c in range(16))


class SamplerTimeout(RuntimeError):
    """Step budget exhausted before enough defect-free states were seen."""


class InfeasiblePinsError(ValueError):
    """No positive-weight valid orientation is consistent with the pins."""


@dataclass(frozen=True)
class ChainParams:
    """Chain configuration: defect fugacity, hold probability, seed.

    lam=None resolves to max(a, b, c) at use.  The fugacity affects only
    how efficiently the walk crosses between valid orientations, never
    the restricted stationary law.
    """

    lam: float | None = None
    laziness: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.lam is not None and not self.lam > 0:
            raise ValueError("lam must be positive")
        if not 0 <= self.laziness < 1:
            raise ValueError("laziness must be in [0, 1)")

    def fugacity(self, w: Weights) -> float:
        return self.lam if self.lam is not None else max(w.a, w.b, w.c)


def defect_weight_table(w: Weights, lam: float) -> np.ndarray:
    """16-entry local weight per vertex code: pattern weight on the six
    two-out codes, the defect fugacity elsewhere."""
    t = pattern_weight_table(w)
    for code in range(16):
        if not _POPCOUNT2[code]:
            t[code] = lam
    return t


class WormState:
    """Mutable walk state: edge bits, per-vertex codes, defect set."""

    __slots__ = ("edge_bits", "codes", "defects")

    def __init__(self, edge_bits: list[int], codes: list[int], defects: set[int]):
        self.edge_bits = edge_bits
        self.codes = codes
        self.defects = defects

    @classmethod
    def from_edge_bits(cls, graph: QuadGraph, edge_bits: Sequence[int]) -> "WormState":
        codes = [0] * graph.vertex_count
        for ei, b in enumerate(edge_bits):
            (tv, tr), (hv, hr) = graph.edges[ei]
            if b:
                codes[tv] |= 1 << (4 - tr)
            else:
                codes[hv] |= 1 << (4 - hr)
        defects = {v for v, c in enumerate(codes) if not _POPCOUNT2[c]}
        return cls(list(edge_bits), codes, defects)

    @classmethod
    def from_orientation(cls, graph: QuadGraph, o: Orientation) -> "WormState":
        return cls.from_edge_bits(graph, o.edge_bits(graph))

    def is_defect_free(self) -> bool:
        return not self.defects

    def to_orientation(self, graph: QuadGraph) -> Orientation:
        return Orientation.from_edge_bits(graph, self.edge_bits)

    def copy(self) -> "WormState":
        return WormState(list(self.edge_bits), list(self.codes), set(self.defects))

    def check_consistent(self, graph: QuadGraph) -> bool:
        """Debug invariant: codes and defects agree with edge_bits."""
        ref = WormState.from_edge_bits(graph, self.edge_bits)
        return ref.codes == self.codes and ref.defects == self.defects


def state_weight(graph: QuadGraph, w: Weights, s: WormState, p: ChainParams) -> float:
    """Product over vertices: pattern weight if out-degree 2, else lam."""
    tbl = defect_weight_table(w, p.fugacity(w))
    prod = 1.0
    for code in s.codes:
        prod *= tbl[code]
    return prod


# ---------------------------------------------------------------------------
# reference single-chain kernel
# ---------------------------------------------------------------------------


class _StepContext:
    """Precomputed tables for repeated stepping of one chain."""

    def __init__(self, graph: QuadGraph, w: Weights, pins: dict[int, int] | None, p: ChainParams):
        self.graph = graph
        self.p = p
        self.tbl = defect_weight_table(w, p.fugacity(w))
        pins = pins or {}
        self.unpinned = [ei for ei in range(graph.num_edges) if ei not in pins]
        # per edge: (tail vertex, tail code bit, head vertex, head code bit)
        self.meta = []
        for (tv, tr), (hv, hr) in graph.edges:
            self.meta.append((tv, 1 << (4 - tr), hv, 1 << (4 - hr)))

    def step(self, s: WormState, rng: np.random.Generator) -> WormState:
        if not self.unpinned:
            raise ValueError("no unpinned edges to flip")
        if VERIFY_STATE:
            assert s.check_consistent(self.graph)
        if self.p.laziness > 0 and rng.random() < self.p.laziness:
            return s
        ei = self.unpinned[rng.integers(len(self.unpinned))]
        tv, tbit, hv, hbit = self.meta[ei]
        tbl = self.tbl
        codes = s.codes
        if tv == hv:  # self-loop: one vertex, both slots toggle
            old = tbl[codes[tv]]
            new_code = codes[tv] ^ (tbit | hbit)
            new = tbl[new_code]
            if rng.random() * old < new:
                codes[tv] = new_code
                s.edge_bits[ei] ^= 1
                if _POPCOUNT2[new_code]:
                    s.defects.discard(tv)
                else:
                    s.defects.add(tv)
            return s
        ct, ch = codes[tv], codes[hv]
        nt, nh = ct ^ tbit, ch ^ hbit
        old = tbl[ct] * tbl[ch]
        new = tbl[nt] * tbl[nh]
        if rng.random() * old < new:
            codes[tv], codes[hv] = nt, nh
            s.edge_bits[ei] ^= 1
            for v, c in ((tv, nt), (hv, nh)):
                if _POPCOUNT2[c]:
                    s.defects.discard(v)
                else:
                    s.defects.add(v)
        return s


def step(
    graph: QuadGraph,
    w: Weights,
    s: WormState,
    pins: dict[int, int] | None,
    p: ChainParams,
    rng: np.random.Generator,
) -> WormState:
    """One Metropolis move (possibly lazy); mutates and returns s."""
    return _StepContext(graph, w, pins, p).step(s, rng)


def initial_state(
    graph: QuadGraph, w: Weights, pins: dict[int, int] | None = None
) -> WormState:
    """Positive-weight valid orientation respecting pins."""
    o = first_valid_orientation(graph, w, pins)
    if o is None:
        raise InfeasiblePinsError("pins admit no positive-weight valid orientation")
    return WormState.from_orientation(graph, o)


def sample(
    graph: QuadGraph,
    w: Weights,
    pins: dict[int, int] | None,
    p: ChainParams,
    burn_in: int,
    thin: int,
    count: int,
    rng: np.random.Generator | None = None,
    max_steps: int | None = None,
    diagnostics: IO[str] | None = None,
) -> list[Orientation]:
    """Run the chain, recording every `thin` steps after `burn_in` and
    keeping defect-free states until `count` orientations are collected.

    Deterministic given the seed.  Raises SamplerTimeout if the budget
    runs out first (a sign of mistuned fugacity or hostile pins).
    """
    if thin < 1 or count < 1 or burn_in < 0:
        raise ValueError("need thin >= 1, count >= 1, burn_in >= 0")
    if rng is None:
        rng = np.random.default_rng(p.seed)
    pins = pins or {}
    s = initial_state(graph, w, pins)
    if diagnostics is not None:
        diagnostics.write("step,defects,log_weight\n")
    out: list[Orientation] = []
    if len(pins) == graph.num_edges:
        # nothing can move; the pinned orientation repeats
        out = [s.to_orientation(graph)] * count
        if diagnostics is not None:
            wt = state_weight(graph, w, s, p)
            for k in range(count):
                diagnostics.write(f"{k * thin},0,{_log_or_ninf(wt)}\n")
        return out
    ctx = _StepContext(graph, w, pins, p)
    if max_steps is None:
        max_steps = burn_in + max(10_000, 200 * thin * count)
    steps_done = 0
    for _ in range(burn_in):
        ctx.step(s, rng)
    steps_done = burn_in
    tbl = ctx.tbl
    while len(out) < count:
        if steps_done + thin > max_steps:
            raise SamplerTimeout(
                f"collected {len(out)}/{count} defect-free states in {steps_done} steps"
            )
        for _ in range(thin):
            ctx.step(s, rng)
        steps_done += thin
        if diagnostics is not None:
            prod = 1.0
            for code in s.codes:
                prod *= tbl[code]
            diagnostics.write(f"{steps_done},{len(s.defects)},{_log_or_ninf(prod)}\n")
        if not s.defects:
            out.append(s.to_orientation(graph))
    return out


def _log_or_ninf(x: float) -> float:
    return math.log(x) if x > 0 else float("-inf")


def marginal_estimate(
    graph: QuadGraph,
    w: Weights,
    pins: dict[int, int] | None,
    edge: int,
    direction: int,
    n_samples: int,
    p: ChainParams,
    rng: np.random.Generator | None = None,
    burn_in: int | None = None,
    thin: int | None = None,
) -> float:
    """Fraction of defect-free samples with `edge` in `direction`."""
    ne = graph.num_edges
    if burn_in is None:
        burn_in = 100 * ne * ne
    if thin is None:
        thin = 10 * ne
    orientations = sample(graph, w, pins, p, burn_in, thin, n_samples, rng)
    hits = sum(1 for o in orientations if o.edge_bits(graph)[edge] == direction)
    return hits / n_samples


# ---------------------------------------------------------------------------
# exact kernel analysis
# ---------------------------------------------------------------------------


def _composed_masks(graph: QuadGraph, pins: dict[int, int]) -> tuple[list[int], int]:
    unpinned = [ei for ei in range(graph.num_edges) if ei not in pins]
    pinned_bits = 0
    for ei, b in pins.items():
        if b:
            pinned_bits |= 1 << ei
    return unpinned, pinned_bits


def _state_weights_table(
    graph: QuadGraph, w: Weights, pins: dict[int, int], lam: float
) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Weights and ice-validity of every state over the unpinned edges.

    State index packs unpinned edge bits with unpinned[k] at bit k.
    Returns (weights, valid, unpinned).
    """
    unpinned, pinned_bits = _composed_masks(graph, pins)
    u = len(unpinned)
    n_states = 1 << u
    full = np.full(n_states, pinned_bits, dtype=np.int64)
    idx = np.arange(n_states, dtype=np.int64)
    for k, ei in enumerate(unpinned):
        full |= ((idx >> k) & 1) << ei

    tbl = defect_weight_table(w, lam)
    weights = np.ones(n_states)
    valid = np.ones(n_states, dtype=bool)
    pop2 = np.array(_POPCOUNT2)
    for v in range(graph.vertex_count):
        code = np.zeros(n_states, dtype=np.int64)
        for r in (1, 2, 3, 4):
            ei, end = graph.edge_of_dart[4 * v + r - 1]
            bit = (full >> ei) & 1
            if end == 1:
                bit = bit ^ 1
            code |= bit << (4 - r)
        weights *= tbl[code]
        valid &= pop2[code]
    return weights, valid, unpinned


def exact_transition_matrix(
    graph: QuadGraph,
    w: Weights,
    pins: dict[int, int] | None,
    p: ChainParams,
) -> sp.csr_matrix:
    """Row-stochastic one-step kernel over all 2^unpinned states."""
    pins = pins or {}
    unpinned, _ = _composed_masks(graph, pins)
    u = len(unpinned)
    if u > KERNEL_EDGE_CAP:
        raise SizeCapError(f"{u} unpinned edges exceeds the kernel cap {KERNEL_EDGE_CAP}")
    if u == 0:
        return sp.identity(1, format="csr")
    weights, _, _ = _state_weights_table(graph, w, pins, p.fugacity(w))
    n = 1 << u
    idx = np.arange(n, dtype=np.int64)
    move = (1.0 - p.laziness) / u
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    diag = np.full(n, 1.0)
    for k in range(u):
        target = idx ^ (1 << k)
        wt = weights[target]
        ws = weights
        with np.errstate(divide="ignore", invalid="ignore"):
            accept = np.where(ws > 0, np.minimum(1.0, wt / np.where(ws > 0, ws, 1.0)), (wt > 0))
        prob = move * accept
        rows.append(idx)
        cols.append(target)
        vals.append(prob)
        diag -= prob
    rows.append(idx)
    cols.append(idx)
    vals.append(diag)
    P = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    return P.tocsr()


def stationary_distribution(P: sp.csr_matrix) -> np.ndarray:
    """Unique stationary vector of an irreducible kernel.

    Solves (P^T - I) pi = 0 with the normalization row appended in place
    of the last equation; exact up to linear-solver roundoff.
    """
    n = P.shape[0]
    if n == 1:
        return np.ones(1)
    A = (P.T - sp.identity(n, format="csr")).tolil()
    A[n - 1, :] = 1.0
    b = np.zeros(n)
    b[n - 1] = 1.0
    pi = spla.spsolve(A.tocsc(), b)
    pi = np.asarray(pi).ravel()
    # roundoff guard: tiny negatives are zeroed, then renormalize
    pi[pi < 0] = 0.0
    return pi / pi.sum()


def restricted_stationary(
    graph: QuadGraph,
    w: Weights,
    pins: dict[int, int] | None,
    p: ChainParams,
) -> dict[Orientation, float]:
    """Stationary law of the kernel, restricted to defect-free states
    and renormalized; the object that must match the exact equilibrium."""
    pins = pins or {}
    P = exact_transition_matrix(graph, w, pins, p)
    pi = stationary_distribution(P)
    weights, valid, unpinned = _state_weights_table(graph, w, pins, p.fugacity(w))
    _, pinned_bits = _composed_masks(graph, pins)
    mass = pi[valid & (weights > 0)].sum()
    out: dict[Orientation, float] = {}
    for s in np.flatnonzero(valid & (weights > 0)):
        full = pinned_bits
        for k, ei in enumerate(unpinned):
            full |= ((int(s) >> k) & 1) << ei
        bits = [(full >> ei) & 1 for ei in range(graph.num_edges)]
        out[Orientation.from_edge_bits(graph, bits)] = float(pi[s] / mass)
    return out


# ---------------------------------------------------------------------------
# batched chains over tabulated weights
# ---------------------------------------------------------------------------


class TableChainEngine:
    """Many synchronous chains over a precomputed state-weight table.

    Viable up to ENGINE_EDGE_CAP edges; one table entry per state of the
    whole edge set.  Each chain follows the same kernel as step(): pick
    an unpinned edge uniformly, flip, accept by weight ratio, with the
    hold probability folded into the acceptance threshold.
    """

    def __init__(
        self,
        graph: QuadGraph,
        w: Weights,
        p: ChainParams,
        pins: dict[int, int] | None,
        n_chains: int,
        rng: np.random.Generator,
        init_bits: Sequence[int] | None = None,
    ):
        ne = graph.num_edges
        if ne > ENGINE_EDGE_CAP:
            raise SizeCapError(f"{ne} edges exceeds the engine cap {ENGINE_EDGE_CAP}")
        self.graph = graph
        self.params = p
        self.rng = rng
        self.n_chains = n_chains
        self.num_edges = ne
        weights, valid, _ = _state_weights_table(graph, w, {}, p.fugacity(w))
        self.weights = weights
        self.recordable = valid & (weights > 0)
        self.pins = dict(pins or {})
        if init_bits is None:
            o = first_valid_orientation(graph, w, self.pins)
            if o is None:
                raise InfeasiblePinsError("pins admit no positive-weight valid orientation")
            init_bits = o.edge_bits(graph)
        start = 0
        for ei, b in enumerate(init_bits):
            start |= int(b) << ei
        self.states = np.full(n_chains, start, dtype=np.int64)
        self._rebuild_proposals()

    def _rebuild_proposals(self) -> None:
        ne = self.num_edges
        self.unpinned = np.array(
            [ei for ei in range(ne) if ei not in self.pins], dtype=np.int64
        )
        u = len(self.unpinned)
        if u == 0:
            self._accept_table = None
            return
        n_states = 1 << ne
        idx = np.arange(n_states, dtype=np.int64)
        table = np.empty((n_states, u))
        ws = self.weights
        scale = 1.0 - self.params.laziness
        with np.errstate(divide="ignore", invalid="ignore"):
            for k, ei in enumerate(self.unpinned):
                wt = ws[idx ^ (1 << int(ei))]
                table[:, k] = scale * np.where(
                    ws > 0, np.minimum(1.0, wt / np.where(ws > 0, ws, 1.0)), (wt > 0)
                )
        self._accept_table = table.ravel()
        self._bit_lut = (1 << self.unpinned).astype(np.int64)

    def run(self, steps: int, chunk: int = 256) -> None:
        """Advance every chain `steps` steps."""
        u = len(self.unpinned)
        if u == 0 or steps <= 0:
            return
        A = self._accept_table
        K = self.n_chains
        rng = self.rng
        for off in range(0, steps, chunk):
            c = min(chunk, steps - off)
            eidx = rng.integers(0, u, size=(c, K))
            us = rng.random((c, K))
            states = self.states
            for t in range(c):
                k = eidx[t]
                acc = us[t] < A[states * u + k]
                states = np.where(acc, states ^ self._bit_lut[k], states)
            self.states = states

    def record(self, edge: int) -> tuple[int, int]:
        """One sweep: (# recordable chains with edge bit 1, # recordable)."""
        ok = self.recordable[self.states]
        n_ok = int(ok.sum())
        if n_ok == 0:
            return 0, 0
        bits = (self.states >> edge) & 1
        return int(bits[ok].sum()), n_ok

    def collect_marginal(
        self, edge: int, n_needed: int, thin: int, max_sweeps: int
    ) -> tuple[int, int]:
        """Pooled counts (bit-1, total) from defect-free records, taken
        every `thin` steps until `n_needed` records accumulate."""
        ones = total = 0
        sweeps = 0
        while total < n_needed:
            if sweeps >= max_sweeps:
                raise SamplerTimeout(
                    f"{total}/{n_needed} records after {sweeps} sweeps of {thin} steps"
                )
            self.run(thin)
            c1, c = self.record(edge)
            ones += c1
            total += c
            sweeps += 1
        return ones, total

    def set_pin(self, edge: int, bit: int, reburn: int | None = None) -> None:
        """Pin an edge; chains disagreeing with the pin are replaced by
        clones of agreeing ones, then everyone re-equilibrates briefly."""
        match = ((self.states >> edge) & 1) == bit
        idx = np.flatnonzero(match)
        if idx.size == 0:
            raise InfeasiblePinsError(f"no chain currently agrees with pin {edge}={bit}")
        if idx.size < self.n_chains:
            self.states = self.states[idx[np.arange(self.n_chains) % idx.size]]
        self.pins[edge] = bit
        self._rebuild_proposals()
        if reburn is None:
            reburn = 10 * self.num_edges
        self.run(reburn)

    def orientations(self) -> np.ndarray:
        """Current states as an (n_chains, num_edges) bit matrix."""
        ne = self.num_edges
        return ((self.states[:, None] >> np.arange(ne)[None, :]) & 1).astype(np.int8)
