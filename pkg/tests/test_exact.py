import itertools
import math

import numpy as np
import pytest

from conftest import one_vertex, parallel4
from icehouse import (
    Orientation,
    QuadGraph,
    SizeCapError,
    Weights,
    classify_region,
    enumerate_Z,
    exact_marginal,
    gibbs_distribution,
    signature_from_weights,
    torus_grid,
    transfer_matrix_Z,
)
from icehouse.exact import orientation_weight, pattern_weight_table


# -- weights and regions ------------------------------------------------------


def test_weights_validation():
    with pytest.raises(ValueError):
        Weights(-1, 1, 1)
    with pytest.raises(ValueError):
        Weights(0, 0, 0)
    with pytest.raises(ValueError):
        Weights(float("nan"), 1, 1)
    Weights(0, 1, 1)  # single zeros are fine


def test_region_basic_points():
    r = classify_region(Weights(1, 1, 1))
    assert (r.in_F_le2, r.in_F_le, r.in_F_eq, r.in_F_gt) == (True, True, False, False)
    r = classify_region(Weights(1, 1, 2))
    assert (r.in_F_le2, r.in_F_le, r.in_F_eq, r.in_F_gt) == (False, True, True, False)
    r = classify_region(Weights(3, 1, 1))
    assert (r.in_F_le2, r.in_F_le, r.in_F_eq, r.in_F_gt) == (False, False, False, True)


def test_region_strictness_needs_positive_weights():
    # a "large" entry with a zero partner never lands in the strict region
    r = classify_region(Weights(3, 0, 1))
    assert not r.in_F_gt
    assert not r.in_F_le


def test_region_random_properties():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        a, b, c = rng.uniform(0, 3, size=3)
        if a == b == c == 0:
            continue
        w = Weights(a, b, c)
        r = classify_region(w)
        # literal inequalities
        assert r.in_F_le2 == (a * a <= b * b + c * c and b * b <= a * a + c * c and c * c <= a * a + b * b)
        assert r.in_F_le == (a <= b + c and b <= a + c and c <= a + b)
        assert r.in_F_gt == ((a > b + c or b > a + c or c > a + b) and min(a, b, c) > 0)
        if r.in_F_le2:
            assert r.in_F_le
        assert not (r.in_F_gt and r.in_F_le)
        # swapping the first two entries changes nothing; the equality
        # region singles out the third entry
        rs = classify_region(w.swapped_ab())
        assert (rs.in_F_le2, rs.in_F_le, rs.in_F_gt) == (r.in_F_le2, r.in_F_le, r.in_F_gt)
        assert rs.in_F_eq == r.in_F_eq


def test_region_eq_tolerance():
    assert classify_region(Weights(1, 1, 2 + 1e-14)).in_F_eq
    assert not classify_region(Weights(1, 1, 2 + 1e-9)).in_F_eq


# -- signatures ---------------------------------------------------------------


def test_signature_matrix_layout():
    # row index x1x2, column index x4x3 (note the reversal)
    a, b, c = 2.0, 3.0, 5.0
    m = signature_from_weights(Weights(a, b, c)).matrix()
    expected = np.array(
        [
            [0, 0, 0, a],
            [0, b, c, 0],
            [0, c, b, 0],
            [a, 0, 0, 0],
        ]
    )
    assert np.array_equal(m, expected)


def test_signature_entries():
    sig = signature_from_weights(Weights(2, 3, 5))
    assert sig.value(0, 0, 1, 1) == 2 and sig.value(1, 1, 0, 0) == 2
    assert sig.value(0, 1, 1, 0) == 3 and sig.value(1, 0, 0, 1) == 3
    assert sig.value(0, 1, 0, 1) == 5 and sig.value(1, 0, 1, 0) == 5


def test_signature_support_and_symmetry():
    rng = np.random.default_rng(3)
    for _ in range(100):
        w = Weights(*rng.uniform(0.1, 4, size=3))
        sig = signature_from_weights(w)
        nonzero = {i for i, v in enumerate(sig.table) if v != 0}
        assert nonzero == {0b0011, 0b1100, 0b0110, 0b1001, 0b0101, 0b1010}
        for x in itertools.product((0, 1), repeat=4):
            xbar = tuple(1 - v for v in x)
            assert sig.value(*x) == sig.value(*xbar)


def test_unit_signature_six_ones():
    t = signature_from_weights(Weights(1, 1, 1)).table
    assert sorted(t) == [0.0] * 10 + [1.0] * 6


# -- enumeration --------------------------------------------------------------


def brute_force_Z(g: QuadGraph, w: Weights) -> float:
    """Independent oracle: try all 2^edges bit vectors, filter by the
    ice rule read off dart bits, multiply pattern weights by hand."""
    tbl = pattern_weight_table(w)
    total = 0.0
    for bits in itertools.product((0, 1), repeat=g.num_edges):
        o = Orientation.from_edge_bits(g, bits)
        codes = [o.vertex_code(v) for v in range(g.vertex_count)]
        if all(bin(code).count("1") == 2 for code in codes):
            total += math.prod(tbl[code] for code in codes)
    return total


def test_one_vertex_value():
    # both self-loops always have one outgoing and one incoming dart, so
    # all four joint choices are valid
    assert enumerate_Z(one_vertex(), Weights(1, 1, 1)) == 4.0
    assert brute_force_Z(one_vertex(), Weights(1, 1, 1)) == 4.0


def test_parallel4_value():
    # exactly C(4,2) = 6 of the 16 assignments give out-degree 2 at u
    assert enumerate_Z(parallel4(), Weights(1, 1, 1)) == 6.0
    assert brute_force_Z(parallel4(), Weights(1, 1, 1)) == 6.0


def test_enumeration_matches_brute_force_random():
    rng = np.random.default_rng(5)
    from icehouse import random_quad_graph

    for seed in range(4):
        g = random_quad_graph(3, seed)
        w = Weights(*rng.uniform(0.1, 2.5, size=3))
        assert enumerate_Z(g, w) == pytest.approx(brute_force_Z(g, w), rel=1e-12)


def test_homogeneity_exact_for_binary_scales():
    g = torus_grid(2, 2)
    w = Weights(1.25, 0.75, 2.5)
    z = enumerate_Z(g, w)
    for lam in (0.5, 2.0):
        assert enumerate_Z(g, w.scaled(lam)) == lam ** g.vertex_count * z


def test_homogeneity_random_scale():
    g = torus_grid(1, 3)
    w = Weights(1, 2, 0.5)
    z = enumerate_Z(g, w)
    for lam in (3.0, 0.7):
        assert enumerate_Z(g, w.scaled(lam)) == pytest.approx(lam ** g.vertex_count * z, rel=1e-12)


def test_role_rotation_swaps_ab():
    # relabelling roles 1->2->3->4->1 at every vertex turns each
    # left-right local pattern into a down-up one and vice versa
    from icehouse import random_quad_graph

    w = Weights(1.5, 0.5, 2.0)
    for g in (torus_grid(2, 2), random_quad_graph(4, 9)):
        assert enumerate_Z(g.shift_roles(), w) == pytest.approx(
            enumerate_Z(g, w.swapped_ab()), rel=1e-12
        )


def test_reversal_leaves_sum_unchanged():
    from icehouse.exact import iter_valid_orientations

    g = torus_grid(2, 2)
    w = Weights(0.5, 1.5, 1.0)
    z = enumerate_Z(g, w)
    total = 0.0
    for bits in iter_valid_orientations(g):
        flipped = tuple(1 - b for b in bits)
        total += orientation_weight(g, w, flipped)
    assert total == pytest.approx(z, rel=1e-12)


def test_enumeration_size_cap():
    with pytest.raises(SizeCapError):
        enumerate_Z(torus_grid(5, 4), Weights(1, 1, 1))  # 40 edges


def test_pins_restrict_enumeration():
    g = parallel4()
    w = Weights(1, 1, 1)
    z0 = enumerate_Z(g, w, pins={0: 0})
    z1 = enumerate_Z(g, w, pins={0: 1})
    assert z0 + z1 == pytest.approx(enumerate_Z(g, w))


# -- transfer matrix ----------------------------------------------------------


def test_transfer_matches_enumeration():
    rng = np.random.default_rng(11)
    for n, m in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 2), (1, 5)]:
        for _ in range(3):
            w = Weights(*rng.uniform(0.1, 2, size=3))
            ze = enumerate_Z(torus_grid(n, m), w)
            zt = transfer_matrix_Z(n, m, w)
            assert zt == pytest.approx(ze, rel=1e-9)


def test_transfer_unit_value():
    assert transfer_matrix_Z(1, 1, Weights(1, 1, 1)) == pytest.approx(4.0)


def test_transfer_homogeneity():
    z = transfer_matrix_Z(2, 3, Weights(1, 1, 1))
    assert transfer_matrix_Z(2, 3, Weights(2, 2, 2)) == pytest.approx(2 ** 6 * z, rel=1e-12)


def test_transfer_row_cap():
    with pytest.raises(SizeCapError):
        transfer_matrix_Z(13, 1, Weights(1, 1, 1))


# -- equilibrium distribution -------------------------------------------------


def test_gibbs_uniform_when_weights_equal():
    dist = gibbs_distribution(parallel4(), Weights(1, 1, 1))
    assert len(dist) == 6
    for p in dist.values():
        assert p == pytest.approx(1 / 6)


def test_gibbs_normalized_and_reversal_symmetric():
    g = torus_grid(2, 2)
    w = Weights(1, 2, 3)
    dist = gibbs_distribution(g, w)
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)
    for o, p in dist.items():
        assert dist[o.reversed()] == pytest.approx(p, rel=1e-12)


def test_gibbs_rejects_empty_support():
    # the one-vertex graph only realizes patterns with weight a or b
    with pytest.raises(ValueError):
        gibbs_distribution(one_vertex(), Weights(0, 0, 1))


def test_exact_marginal_consistency():
    g = parallel4()
    w = Weights(1, 2, 2)
    p0 = exact_marginal(g, w, {}, 0, 0)
    p1 = exact_marginal(g, w, {}, 0, 1)
    assert p0 + p1 == pytest.approx(1.0)
    # conditioning: P[e1=0] = sum_b P[e0=b] P[e1=0 | e0=b]
    direct = exact_marginal(g, w, {}, 1, 0)
    chained = sum(
        exact_marginal(g, w, {}, 0, b) * exact_marginal(g, w, {0: b}, 1, 0) for b in (0, 1)
    )
    assert direct == pytest.approx(chained, rel=1e-12)
