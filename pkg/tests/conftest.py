"""Shared instance builders for the test suite."""

from icehouse import QuadGraph


def one_vertex():
    """Smallest instance: one vertex, self-loops pairing roles (1,3) and (2,4)."""
    return QuadGraph(1, [((0, 1), (0, 3)), ((0, 2), (0, 4))])


def parallel4():
    """Two vertices joined by four parallel edges, role r to role r."""
    return QuadGraph(2, [((0, r), (1, r)) for r in (1, 2, 3, 4)])
