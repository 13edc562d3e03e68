"""Edge-vertex incidence grids and their direct evaluation.

A signature grid is a set of binary variables (grid edges) and nodes,
each node carrying a constraint function over an ordered slice of the
variables.  The grid value is the sum over all 0/1 assignments of the
product of node values.  A 4-regular instance maps onto such a grid by
giving every graph edge a binary disequality node (its two variables
are the two edge ends; exactly one end takes value 1, which is the
direction) and every graph vertex an arity-4 node whose variable slots
follow the dart roles.

The evaluator here is deliberately independent of the orientation
enumerator in exact.py: it knows nothing about ice rules, only about
node support sets, so the two routes cross-check each other.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact import SizeCapError, Weights, signature_from_weights
from .quadgraph import QuadGraph, dart_id

GRID_EDGE_CAP = 32

DISEQUALITY = (0.0, 1.0, 1.0, 0.0)  # arity 2: 1 on 01 and 10


@dataclass(frozen=True)
class GridNode:
    """Constraint of arity k over ordered grid edges.

    table has 2^k entries; index packs the slot values with the first
    slot as the most significant bit.
    """

    table: tuple[float, ...]
    edge_ids: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != 1 << len(self.edge_ids):
            raise ValueError("table size does not match arity")


@dataclass(frozen=True)
class SignatureGrid:
    num_edges: int
    nodes: tuple[GridNode, ...]


def incidence_grid(graph: QuadGraph, w: Weights) -> SignatureGrid:
    """Bipartite incidence view of a 4-regular instance.

    Grid edge ids coincide with dart ids: the incidence edge between
    graph edge e and vertex v through dart d is identified by d.  Each
    graph edge contributes one disequality node over its two darts (in
    tail, head order); each vertex contributes one arity-4 node over
    its darts in role order.  Assigning a dart's incidence edge the
    value 1 means the edge leaves that vertex through that dart.
    """
    sig = signature_from_weights(w)
    nodes: list[GridNode] = []
    for e0, e1 in graph.edges:
        nodes.append(GridNode(DISEQUALITY, (dart_id(*e0), dart_id(*e1))))
    for v in range(graph.vertex_count):
        nodes.append(GridNode(sig.table, tuple(dart_id(v, r) for r in (1, 2, 3, 4))))
    return SignatureGrid(num_edges=graph.num_darts, nodes=tuple(nodes))


def holant_eval(grid: SignatureGrid) -> float:
    """Sum over all binary edge assignments of the product of node values.

    Runs a depth-first sweep over grid edges; a branch is abandoned as
    soon as some node's partial assignment cannot extend to any nonzero
    table entry, which only skips terms that are exactly zero.
    """
    if grid.num_edges > GRID_EDGE_CAP:
        raise SizeCapError(
            f"{grid.num_edges} grid edges exceeds the evaluation cap of {GRID_EDGE_CAP}"
        )

    # per node: support patterns as (mask of fixed slots -> required bits)
    # encoded against edge positions; plus per-edge list of (node, slot)
    node_arity = [len(nd.edge_ids) for nd in grid.nodes]
    support: list[list[int]] = []
    for nd in grid.nodes:
        support.append([idx for idx, val in enumerate(nd.table) if val != 0.0])

    touching: list[list[tuple[int, int]]] = [[] for _ in range(grid.num_edges)]
    for ni, nd in enumerate(grid.nodes):
        for slot, eid in enumerate(nd.edge_ids):
            touching[eid].append((ni, slot))

    # order edges so nodes get completed quickly: repeatedly pick the
    # edge with the most already-started incident nodes
    order: list[int] = []
    started = [0] * len(grid.nodes)
    remaining = set(range(grid.num_edges))
    while remaining:
        best = min(
            remaining,
            key=lambda e: (-sum(started[ni] for ni, _ in touching[e]), e),
        )
        order.append(best)
        remaining.discard(best)
        for ni, _ in touching[best]:
            started[ni] += 1

    n_nodes = len(grid.nodes)
    assigned_mask = [0] * n_nodes  # bitmask of fixed slots (slot 0 = MSB of index)
    partial_code = [0] * n_nodes
    slot_bit = [
        [1 << (node_arity[ni] - 1 - s) for s in range(node_arity[ni])]
        for ni in range(n_nodes)
    ]
    full_mask = [(1 << node_arity[ni]) - 1 for ni in range(n_nodes)]
    tables = [grid.nodes[ni].table for ni in range(n_nodes)]

    total = 0.0
    n_edges = grid.num_edges

    def feasible(ni: int) -> bool:
        mask, code = assigned_mask[ni], partial_code[ni]
        for pat in support[ni]:
            if pat & mask == code:
                return True
        return False

    def rec(k: int, prod: float):
        nonlocal total
        if k == n_edges:
            total += prod
            return
        eid = order[k]
        for bit in (0, 1):
            ok = True
            factor = 1.0
            for ni, slot in touching[eid]:
                assigned_mask[ni] |= slot_bit[ni][slot]
                if bit:
                    partial_code[ni] |= slot_bit[ni][slot]
                if ok:
                    if assigned_mask[ni] == full_mask[ni]:
                        val = tables[ni][partial_code[ni]]
                        if val == 0.0:
                            ok = False
                        else:
                            factor *= val
                    elif not feasible(ni):
                        ok = False
            if ok:
                rec(k + 1, prod * factor)
            for ni, slot in touching[eid]:
                assigned_mask[ni] &= ~slot_bit[ni][slot]
                if bit:
                    partial_code[ni] &= ~slot_bit[ni][slot]

    rec(0, 1.0)
    return total
