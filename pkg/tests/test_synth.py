"""Planted-model samplers: determinism and agreement with exact likelihoods."""

import math

import numpy as np
import pytest

import margraph as mg
from margraph import Clique, GraphSpec, SynthConfig, WeightVector
from margraph.errors import CapabilityError, DataError, GraphError
from margraph.model import index_from_signs, log_prob_table
from margraph.synth import planted_model, sample_bm, sample_sbn
from margraph.training import mean_joint_loss


def single_edge_graph():
    return GraphSpec(2, 0, mg.UNDIRECTED, (0, 1), (Clique((0, 1)),))


def empirical_frequencies(dataset):
    idx = np.array([index_from_signs(y) for y in dataset.Y])
    return np.bincount(idx, minlength=1 << dataset.n_outputs) / dataset.n_instances


def test_same_seed_reproduces_the_dataset_bit_for_bit():
    graph, weights = planted_model(4, 2, kind=mg.DIRECTED, topology="chain", seed=13)
    a = sample_sbn(SynthConfig(graph, weights, 50, seed=20))
    b = sample_sbn(SynthConfig(graph, weights, 50, seed=20))
    assert np.array_equal(a.X, b.X) and np.array_equal(a.Y, b.Y)
    gu, wu = planted_model(3, 0, kind=mg.UNDIRECTED, topology="full", seed=8)
    c = sample_bm(SynthConfig(gu, wu, 50, seed=21, input_model="none"))
    d = sample_bm(SynthConfig(gu, wu, 50, seed=21, input_model="none"))
    assert np.array_equal(c.X, d.X) and np.array_equal(c.Y, d.Y)


def test_zero_weight_network_labels_are_unbiased_coins():
    graph = mg.build_independent_graph(2, 0, mg.DIRECTED)
    weights = WeightVector(np.zeros(graph.n_cliques), lam=1.0)
    data = sample_sbn(SynthConfig(graph, weights, 10000, seed=1, input_model="none"))
    marginals = (data.Y == 1).mean(axis=0)
    assert np.abs(marginals - 0.5).max() <= 3 * math.sqrt(0.25 / 10000)


def test_single_node_bias_matches_sigmoid_probability():
    graph = GraphSpec(1, 0, mg.DIRECTED, (0,), (Clique((0,)),))
    weights = WeightVector(np.array([3.0]), lam=1.0)
    data = sample_sbn(SynthConfig(graph, weights, 10000, seed=2, input_model="none"))
    p = 1.0 / (1.0 + math.exp(-3.0))
    assert abs((data.Y == 1).mean() - p) <= 3 * math.sqrt(p * (1 - p) / 10000)


def test_directed_sample_frequencies_match_exact_likelihood():
    rng = np.random.default_rng(8)
    graph = mg.build_chain_graph(3, 0, mg.DIRECTED)
    weights = WeightVector(rng.normal(0.0, 1.0, graph.n_cliques), lam=1.0)
    data = sample_sbn(SynthConfig(graph, weights, 40000, seed=5, input_model="none"))
    freq = empirical_frequencies(data)
    probs = np.exp(log_prob_table(graph, weights, np.zeros(0)))
    tolerance = 4 * np.sqrt(probs * (1 - probs) / 40000) + 1e-4
    assert (np.abs(freq - probs) <= tolerance).all()


def test_undirected_sample_frequencies_match_exact_likelihood():
    rng = np.random.default_rng(8)
    rng.normal(0.0, 1.0, 6)  # keep the draw aligned with the directed test
    graph = mg.build_full_graph(3, 0, mg.UNDIRECTED)
    weights = WeightVector(rng.normal(0.0, 1.0, graph.n_cliques), lam=1.0)
    data = sample_bm(SynthConfig(graph, weights, 40000, seed=7, input_model="none"))
    freq = empirical_frequencies(data)
    probs = np.exp(log_prob_table(graph, weights, np.zeros(0)))
    tolerance = 4 * np.sqrt(probs * (1 - probs) / 40000) + 1e-4
    assert (np.abs(freq - probs) <= tolerance).all()


def test_single_coupling_agreement_rate_matches_closed_form():
    weights = WeightVector(np.array([1.0]), lam=1.0)
    data = sample_bm(SynthConfig(single_edge_graph(), weights, 10000, seed=6,
                                 input_model="none"))
    agreement = (data.Y[:, 0] == data.Y[:, 1]).mean()
    p = math.e / (math.e + math.exp(-1.0))
    assert abs(agreement - p) <= 3 * math.sqrt(p * (1 - p) / 10000)


def test_zero_coupling_is_uniform_over_assignments():
    weights = WeightVector(np.array([0.0]), lam=1.0)
    data = sample_bm(SynthConfig(single_edge_graph(), weights, 20000, seed=9,
                                 input_model="none"))
    freq = empirical_frequencies(data)
    assert np.abs(freq - 0.25).max() <= 4 * math.sqrt(0.25 * 0.75 / 20000)


def test_training_on_samples_beats_untrained_weights():
    graph, weights = planted_model(4, 2, kind=mg.DIRECTED, topology="chain",
                                   seed=13, bias_scale=2.0, edge_scale=1.0,
                                   input_scale=0.5)
    train = sample_sbn(SynthConfig(graph, weights, 400, seed=14))
    test = sample_sbn(SynthConfig(graph, weights, 400, seed=15))
    fitted = mg.train_lmsbn(train, graph, mg.TrainConfig(lam=0.01)).weights
    loss_fit = mean_joint_loss(test, graph, fitted)
    loss_zero = mean_joint_loss(test, graph, WeightVector(np.zeros(graph.n_cliques), lam=1.0))
    rng = np.random.default_rng(16)
    loss_rand = mean_joint_loss(test, graph,
                                WeightVector(rng.normal(0.0, 1.0, graph.n_cliques), lam=1.0))
    assert loss_fit < loss_zero
    assert loss_fit < loss_rand


def test_planted_model_scales_go_to_the_right_clique_kinds():
    graph, weights = planted_model(3, 2, kind=mg.UNDIRECTED, topology="full",
                                   seed=0, bias_scale=100.0, input_scale=1e-6,
                                   edge_scale=0.0)
    for clique, w in zip(graph.cliques, weights.values):
        if len(clique.outputs) >= 2:
            assert w == 0.0
        elif clique.input_feature is not None:
            assert abs(w) < 1e-4
        else:
            assert abs(w) > 1.0


def test_synth_validation_errors():
    graph = single_edge_graph()
    weights = WeightVector(np.array([1.0]), lam=1.0)
    with pytest.raises(DataError):
        SynthConfig(graph, weights, 0)
    with pytest.raises(DataError):
        SynthConfig(graph, weights, 5, input_model="bogus")
    with_inputs = mg.build_independent_graph(2, 3, mg.UNDIRECTED)
    w2 = WeightVector(np.zeros(with_inputs.n_cliques), lam=1.0)
    with pytest.raises(DataError):
        SynthConfig(with_inputs, w2, 5, input_model="none")
    directed_chain = mg.build_chain_graph(2, 0, mg.DIRECTED)
    with pytest.raises(GraphError):
        sample_bm(SynthConfig(directed_chain,
                              WeightVector(np.zeros(directed_chain.n_cliques), lam=1.0), 5))
    with pytest.raises(GraphError):
        sample_sbn(SynthConfig(graph, weights, 5))
    big = mg.build_independent_graph(21, 0, mg.UNDIRECTED)
    with pytest.raises(CapabilityError):
        sample_bm(SynthConfig(big, WeightVector(np.zeros(big.n_cliques), lam=1.0), 5))
    with pytest.raises(DataError):
        planted_model(3, 0, kind=mg.DIRECTED, topology="ring")
