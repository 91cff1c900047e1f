"""Margins, joint hinge loss, exact likelihoods, and the surrogate bound."""

import math

import numpy as np
import pytest

import margraph as mg
from margraph import Clique, GraphSpec, Instance, WeightVector
from margraph.errors import CapabilityError, DataError, GraphError
from margraph.model import (
    HINGE_LOG_OFFSET,
    compile_scorer,
    index_from_signs,
    log_prob_table,
    signs_from_index,
    surrogate_bound_check,
)

from _helpers import random_labels, random_model


@pytest.fixture
def two_node_model():
    """Two labels, one input; an input-coupled bias on node 0 and a pair."""
    graph = GraphSpec(2, 1, mg.DIRECTED, (0, 1), (Clique((0,), 0), Clique((0, 1))))
    weights = WeightVector(np.array([1.0, 1.0]), lam=1.0)
    return graph, weights, np.array([2.0])


def test_margins_on_worked_example(two_node_model):
    graph, weights, x = two_node_model
    z = mg.margins(graph, weights, x, np.array([1, 1], dtype=np.int8))
    assert z.tolist() == [2.0, 1.0]
    assert mg.node_margin(graph, weights, x, np.array([1, 1], dtype=np.int8), 0) == 2.0
    assert mg.node_margin(graph, weights, x, np.array([1, 1], dtype=np.int8), 1) == 1.0


def test_joint_loss_on_worked_example(two_node_model):
    graph, weights, x = two_node_model
    lb = mg.joint_loss(graph, weights, Instance(x, np.array([1, 1], dtype=np.int8)))
    assert lb.per_node.tolist() == [0.0, 0.0] and lb.total == 0.0
    lb = mg.joint_loss(graph, weights, Instance(x, np.array([-1, 1], dtype=np.int8)))
    assert lb.per_node.tolist() == [3.0, 2.0] and lb.total == 5.0


def test_zero_weights_give_zero_margins_and_loss_k():
    rng = np.random.default_rng(2)
    for _ in range(10):
        graph, _, x = random_model(rng, mg.DIRECTED, max_outputs=6)
        weights = WeightVector(np.zeros(graph.n_cliques), lam=1.0)
        y = random_labels(rng, 1, graph.n_outputs)[0]
        assert mg.margins(graph, weights, x, y).tolist() == [0.0] * graph.n_outputs
        assert mg.joint_loss(graph, weights, Instance(x, y)).total == graph.n_outputs


def test_node_margin_requires_assigned_parents(two_node_model):
    graph, weights, x = two_node_model
    partial = np.array([0, 1], dtype=np.int8)  # node 0 unassigned
    with pytest.raises(DataError):
        mg.node_margin(graph, weights, x, partial, 1)
    # node 1 unassigned is fine for node 0 (it owns no clique involving 1)
    assert mg.node_margin(graph, weights, x, np.array([1, 0], dtype=np.int8), 0) == 2.0


def test_node_margin_rejects_bad_index(two_node_model):
    graph, weights, x = two_node_model
    with pytest.raises(DataError):
        mg.node_margin(graph, weights, x, np.array([1, 1], dtype=np.int8), 2)


def test_weight_vector_validation():
    with pytest.raises(DataError):
        WeightVector(np.array([np.nan]), lam=1.0)
    with pytest.raises(DataError):
        WeightVector(np.array([1.0]), lam=0.0)
    with pytest.raises(DataError):
        WeightVector(np.array([1.0]), lam=1.0, eta0=-1.0)
    w = WeightVector(np.array([1.0, 2.0]), lam=0.5, eta0=0.25)
    with pytest.raises(ValueError):
        w.values[0] = 9.0  # read-only storage


def test_compile_scorer_validates_shapes(two_node_model):
    graph, weights, x = two_node_model
    with pytest.raises(DataError):
        compile_scorer(graph, WeightVector(np.array([1.0]), lam=1.0), x)
    with pytest.raises(DataError):
        compile_scorer(graph, weights, np.array([1.0, 2.0]))
    with pytest.raises(DataError):
        compile_scorer(graph, weights, np.array([np.inf]))


def test_flipping_a_label_negates_its_own_margin():
    rng = np.random.default_rng(3)
    for _ in range(30):
        graph, weights, x = random_model(rng, mg.DIRECTED, max_outputs=7)
        y = random_labels(rng, 1, graph.n_outputs)[0]
        z = mg.margins(graph, weights, x, y)
        i = int(rng.integers(graph.n_outputs))
        y2 = y.copy()
        y2[i] = -y2[i]
        z2 = mg.margins(graph, weights, x, y2)
        assert z2[i] == -z[i]


def test_vectorized_scorer_matches_scalar_loop():
    rng = np.random.default_rng(4)
    for _ in range(20):
        graph, weights, x = random_model(rng, mg.DIRECTED, max_outputs=8)
        scorer = compile_scorer(graph, weights, x)
        Y = random_labels(rng, 16, graph.n_outputs)
        totals = scorer.total_loss_column(Y)
        for l in range(16):
            lb = mg.joint_loss(graph, weights, Instance(x, Y[l]))
            assert totals[l] == lb.total


def test_sbn_log_likelihood_values(two_node_model):
    graph, weights, x = two_node_model
    got = mg.sbn_log_likelihood(graph, weights, Instance(x, np.array([1, 1], dtype=np.int8)))
    expect = math.log(1 / (1 + math.exp(-2))) + math.log(1 / (1 + math.exp(-1)))
    assert got == pytest.approx(expect, abs=1e-12)
    g3 = mg.build_independent_graph(3, 0, mg.DIRECTED)
    w0 = WeightVector(np.zeros(3), lam=1.0)
    got = mg.sbn_log_likelihood(g3, w0, Instance(np.zeros(0), np.array([1, -1, 1], dtype=np.int8)))
    assert got == pytest.approx(3 * math.log(0.5), abs=1e-12)


def test_sbn_log_likelihood_rejects_undirected():
    g = mg.build_independent_graph(2, 0, mg.UNDIRECTED)
    w = WeightVector(np.zeros(g.n_cliques), lam=1.0)
    with pytest.raises(GraphError):
        mg.sbn_log_likelihood(g, w, Instance(np.zeros(0), np.array([1, 1], dtype=np.int8)))


def test_bm_log_likelihood_values():
    g = GraphSpec(2, 0, mg.UNDIRECTED, (0, 1), (Clique((0, 1)),))
    w0 = WeightVector(np.array([0.0]), lam=1.0)
    y = np.array([1, -1], dtype=np.int8)
    assert mg.bm_log_likelihood(g, w0, Instance(np.zeros(0), y)) == math.log(0.25)
    # single coupling of strength 1: each agreeing assignment has
    # probability e / (2e + 2/e)
    w1 = WeightVector(np.array([1.0]), lam=1.0)
    agree = mg.bm_log_likelihood(g, w1, Instance(np.zeros(0), np.array([1, 1], dtype=np.int8)))
    assert agree == pytest.approx(1.0 - math.log(2 * math.e + 2 * math.exp(-1)), abs=1e-12)


def test_bm_log_likelihood_rejects_directed_and_large_k():
    g = mg.build_independent_graph(2, 0, mg.DIRECTED)
    w = WeightVector(np.zeros(g.n_cliques), lam=1.0)
    with pytest.raises(GraphError):
        mg.bm_log_likelihood(g, w, Instance(np.zeros(0), np.array([1, 1], dtype=np.int8)))
    big = mg.build_independent_graph(26, 0, mg.UNDIRECTED)
    wb = WeightVector(np.zeros(big.n_cliques), lam=1.0)
    yb = np.ones(26, dtype=np.int8)
    with pytest.raises(CapabilityError):
        mg.bm_log_likelihood(big, wb, Instance(np.zeros(0), yb))


def test_log_prob_table_matches_instance_likelihoods():
    rng = np.random.default_rng(5)
    for kind, ll in ((mg.DIRECTED, mg.sbn_log_likelihood), (mg.UNDIRECTED, mg.bm_log_likelihood)):
        for _ in range(5):
            graph, weights, x = random_model(rng, kind, max_outputs=5)
            table = log_prob_table(graph, weights, x)
            assert table.shape == (1 << graph.n_outputs,)
            for idx in range(table.shape[0]):
                y = signs_from_index(graph.n_outputs, idx)
                assert table[idx] == pytest.approx(ll(graph, weights, Instance(x, y)), abs=1e-9)


def test_log_prob_table_rejects_large_k():
    big = mg.build_independent_graph(21, 0, mg.UNDIRECTED)
    wb = WeightVector(np.zeros(big.n_cliques), lam=1.0)
    with pytest.raises(CapabilityError):
        log_prob_table(big, wb, np.zeros(0))


def test_likelihoods_normalize_over_all_assignments():
    rng = np.random.default_rng(6)
    for kind in (mg.DIRECTED, mg.UNDIRECTED):
        for _ in range(10):
            graph, weights, x = random_model(rng, kind, max_outputs=8)
            table = log_prob_table(graph, weights, x)
            total = np.exp(table).sum()
            assert abs(total - 1.0) <= 1e-9


def test_index_sign_conversions_roundtrip():
    for K in (1, 3, 6):
        for idx in range(1 << K):
            y = signs_from_index(K, idx)
            assert set(np.unique(y)) <= {-1, 1}
            assert index_from_signs(y) == idx
    # index 0 is the all-positive assignment (ties prefer +1)
    assert signs_from_index(3, 0).tolist() == [1, 1, 1]


def test_surrogate_bound_check_values():
    assert surrogate_bound_check(0.0) == (math.log(2.0), 1.0 + HINGE_LOG_OFFSET)
    log_loss, hinge_b = surrogate_bound_check(1.0)
    assert log_loss == pytest.approx(math.log(1 + math.exp(-1)), abs=1e-15)
    assert hinge_b == HINGE_LOG_OFFSET
    log_loss, hinge_b = surrogate_bound_check(-3.0)
    assert log_loss == pytest.approx(math.log(1 + math.exp(3)), abs=1e-12)
    assert hinge_b == 4.0 + HINGE_LOG_OFFSET


def test_surrogate_offset_matches_its_formula():
    assert HINGE_LOG_OFFSET == math.log(math.e + math.exp(-1.0))
    # slack log_loss vs hinge+offset is smallest at z = 1, where it equals
    # log(e + 1/e) - log(1 + 1/e) > 0
    log_loss, hinge_b = surrogate_bound_check(1.0)
    min_slack = HINGE_LOG_OFFSET - math.log(1 + math.exp(-1.0))
    assert hinge_b - log_loss == pytest.approx(min_slack, abs=1e-12)


def test_surrogate_bound_accepts_arrays():
    z = np.linspace(-5, 5, 101)
    log_loss, hinge_b = surrogate_bound_check(z)
    assert log_loss.shape == z.shape
    assert (hinge_b - log_loss >= -1e-12).all()
