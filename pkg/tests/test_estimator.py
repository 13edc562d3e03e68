import math

import numpy as np
import pytest

from conftest import one_vertex, parallel4
from icehouse import (
    Weights,
    enumerate_Z,
    estimate_Z,
    exact_marginal_oracle,
    random_quad_graph,
    sample_plan,
    torus_grid,
)
from icehouse.worm import ChainParams


def test_plan_single_stage_reference_point():
    plan = sample_plan(0.1, 0.75, 1)
    assert plan.per_stage_samples == math.ceil(48 / 0.1**2)


def test_plan_quarter_epsilon_scaling():
    n1 = sample_plan(0.2, 0.75, 4).per_stage_samples
    n2 = sample_plan(0.1, 0.75, 4).per_stage_samples
    assert n2 == 4 * n1


def test_plan_linear_in_edges():
    n1 = sample_plan(0.1, 0.75, 4).per_stage_samples
    n2 = sample_plan(0.1, 0.75, 8).per_stage_samples
    assert n2 == 2 * n1


def test_plan_schedule_defaults():
    plan = sample_plan(0.1, 0.75, 8)
    assert plan.burn_in == 100 * 64
    assert plan.thin == 80


def test_plan_confidence_tightens():
    assert (
        sample_plan(0.1, 0.9, 4).per_stage_samples
        > sample_plan(0.1, 0.75, 4).per_stage_samples
    )


def test_plan_validation():
    with pytest.raises(ValueError):
        sample_plan(0.0, 0.75, 4)
    with pytest.raises(ValueError):
        sample_plan(0.1, 0.5, 4)
    with pytest.raises(ValueError):
        sample_plan(0.1, 0.75, 0)


# -- telescoping with exact marginals ----------------------------------------


TELESCOPE_CASES = [
    (parallel4(), Weights(1, 1, 1)),
    (parallel4(), Weights(1, 2, 2)),
    (torus_grid(2, 2), Weights(1, 1, 1)),
    (torus_grid(1, 3), Weights(2, 1, 1.5)),
    (random_quad_graph(4, 13), Weights(1, 0.5, 1)),
]


@pytest.mark.parametrize("graph,w", TELESCOPE_CASES)
def test_telescoping_exactness(graph, w):
    est = estimate_Z(
        graph, w, 0.1, 0.75, ChainParams(seed=0), marginal_oracle=exact_marginal_oracle
    )
    assert est.value == pytest.approx(enumerate_Z(graph, w), rel=1e-9)


def test_majority_pinning_with_exact_marginals():
    g = torus_grid(2, 2)
    est = estimate_Z(
        g, Weights(1, 2, 1), 0.1, 0.75, ChainParams(seed=0), marginal_oracle=exact_marginal_oracle
    )
    assert len(est.per_edge_log) == g.num_edges
    for _, _, marginal in est.per_edge_log:
        assert marginal >= 0.5
        assert 1.0 / marginal <= 2.0 + 1e-12


def test_estimate_runs_outside_promised_region(caplog):
    import logging

    g = one_vertex()
    with caplog.at_level(logging.WARNING, logger="icehouse.estimator"):
        est = estimate_Z(
            g, Weights(3, 1, 1), 0.1, 0.75, ChainParams(seed=0), marginal_oracle=exact_marginal_oracle
        )
    assert est.value == pytest.approx(enumerate_Z(g, Weights(3, 1, 1)), rel=1e-9)
    assert any("outside the squared-triangle region" in r.message for r in caplog.records)


# -- sampled estimates ---------------------------------------------------------


def test_sampled_estimate_accuracy_smoke():
    g = parallel4()
    w = Weights(1, 1, 1)
    z = enumerate_Z(g, w)
    p = ChainParams(lam=0.25, laziness=0.1, seed=0)
    for seed in range(5):
        est = estimate_Z(g, w, 0.1, 0.75, p, np.random.default_rng(seed))
        assert abs(est.value - z) <= 0.1 * z
        assert est.samples_used >= sample_plan(0.1, 0.75, g.num_edges).per_stage_samples * g.num_edges
        assert est.value > 0


def test_sampled_estimate_deterministic():
    g = parallel4()
    w = Weights(1, 2, 2)
    p = ChainParams(lam=0.5, laziness=0.1, seed=0)
    a = estimate_Z(g, w, 0.2, 0.75, p, np.random.default_rng(3))
    b = estimate_Z(g, w, 0.2, 0.75, p, np.random.default_rng(3))
    assert a == b


def test_scale_equivariance_same_seed():
    # doubling the weights scales every acceptance ratio identically, so
    # the same seed walks the same trajectory and the estimate scales by
    # exactly 2^vertices
    g = parallel4()
    w = Weights(1, 2, 2)
    p = ChainParams(lam=0.5, laziness=0.1, seed=0)
    a = estimate_Z(g, w, 0.2, 0.75, p, np.random.default_rng(5))
    p2 = ChainParams(lam=1.0, laziness=0.1, seed=0)
    b = estimate_Z(g, w.scaled(2.0), 0.2, 0.75, p2, np.random.default_rng(5))
    assert b.value == 2 ** g.vertex_count * a.value
    assert [m for _, _, m in a.per_edge_log] == [m for _, _, m in b.per_edge_log]


def test_threaded_estimate_deterministic():
    g = parallel4()
    w = Weights(1, 1, 1)
    p = ChainParams(lam=0.25, laziness=0.1, seed=0)
    a = estimate_Z(g, w, 0.2, 0.75, p, np.random.default_rng(2), threads=2)
    b = estimate_Z(g, w, 0.2, 0.75, p, np.random.default_rng(2), threads=2)
    assert a == b
    z = enumerate_Z(g, w)
    assert abs(a.value - z) <= 0.2 * z


def test_single_chain_fallback_path(monkeypatch):
    import icehouse.estimator as est_mod

    monkeypatch.setattr(est_mod, "ENGINE_EDGE_CAP", 0)
    g = one_vertex()
    w = Weights(1, 1, 1)
    p = ChainParams(lam=0.5, laziness=0.1, seed=0)
    est = est_mod.estimate_Z(g, w, 0.9, 0.75, p, np.random.default_rng(0))
    z = enumerate_Z(g, w)
    # loose: tiny instance, coarse epsilon
    assert 0.25 * z <= est.value <= 4 * z
    assert len(est.per_edge_log) == g.num_edges
