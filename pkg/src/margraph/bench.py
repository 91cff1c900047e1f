"""Benchmark sweeps for the branch-and-bound search.

Two experiments:

* cutoff sweep: for each initial upper bound S, how often does the search
  certify the exhaustive optimum within the combinatorial budget
  K * sum_{i<S} C(K, i), and how does that compare with the guarantee
  fraction >= 1 - mean_loss / S.
* size sweep: mean branches taken as the label count grows, on a model
  trained for the data versus an arbitrary random model, against the 2^K
  wall of exhaustive search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import DataError
from .graphs import DIRECTED, GraphSpec
from .inference import STATUS_OPTIMAL, BBConfig, bb_infer, exhaustive_infer
from .model import WeightVector
from .synth import SynthConfig, planted_model, sample_sbn
from .training import (
    TrainConfig,
    _margin_matrix,
    clique_feature_matrix,
    mean_joint_loss,
    train_lmsbn,
)

__all__ = [
    "BenchRecord",
    "KSweepRecord",
    "branch_budget",
    "run_s_sweep",
    "run_k_sweep",
    "s_sweep_csv",
    "k_sweep_csv",
    "S_SWEEP_HEADER",
    "K_SWEEP_HEADER",
]

S_SWEEP_HEADER = "S,fraction_optimal,bound,mean_states,max_states,mean_loss"
K_SWEEP_HEADER = "K,trained_mean_states,random_mean_states,exhaustive_states"


@dataclass(frozen=True)
class BenchRecord:
    """One row of the cutoff sweep."""

    cutoff: float
    fraction_optimal: float
    bound: float
    mean_states: float
    max_states: int
    mean_loss: float


@dataclass(frozen=True)
class KSweepRecord:
    """One row of the size sweep."""

    n_outputs: int
    trained_mean_states: float
    random_mean_states: float
    exhaustive_states: int


def branch_budget(n_outputs: int, cutoff: float) -> int:
    """Branch evaluations that suffice to certify any optimum with loss < cutoff.

    Every path to such an optimum takes fewer than cutoff opposite-label
    branches (each costs at least 1), so the search stays within the paths
    having at most ceil(cutoff)-1 of them: sum_{i<cutoff} C(K, i) paths of K
    nodes each.
    """
    if cutoff < 1:
        raise DataError(f"cutoff must be at least 1, got {cutoff}")
    top = min(math.ceil(cutoff) - 1, n_outputs)
    paths = sum(math.comb(n_outputs, i) for i in range(top + 1))
    return n_outputs * paths


def run_s_sweep(
    graph: GraphSpec,
    weights: WeightVector,
    dataset: Dataset,
    cutoffs,
    max_states: int | None = None,
) -> list[BenchRecord]:
    """Fraction of instances certified optimal within budget, per cutoff.

    The budget per instance is branch_budget(K, S), tightened further by
    max_states when given.  mean_loss is the model's mean joint hinge loss
    at the observed labels, the quantity the guarantee is stated in.
    """
    oracle = [exhaustive_infer(graph, weights, x).objective for x in dataset.X]
    mean_loss = mean_joint_loss(dataset, graph, weights)
    records = []
    for cutoff in cutoffs:
        budget = branch_budget(graph.n_outputs, cutoff)
        if max_states is not None:
            budget = min(budget, max_states)
        hits = 0
        states = []
        for l in range(dataset.n_instances):
            res = bb_infer(graph, weights, dataset.X[l], BBConfig(cutoff=cutoff, max_states=budget))
            states.append(res.states_visited)
            if res.status == STATUS_OPTIMAL and res.objective == oracle[l]:
                hits += 1
        bound = min(1.0, max(0.0, 1.0 - mean_loss / cutoff))
        records.append(
            BenchRecord(
                cutoff=float(cutoff),
                fraction_optimal=hits / dataset.n_instances,
                bound=bound,
                mean_states=float(np.mean(states)),
                max_states=int(np.max(states)),
                mean_loss=mean_loss,
            )
        )
    return records


def run_k_sweep(
    k_list,
    *,
    n_inputs: int = 3,
    n_train: int = 200,
    n_test: int = 30,
    lam: float = 0.01,
    seed: int = 0,
    cutoff: float = 1e9,
    max_states: int | None = 200_000,
    bias_scale: float = 3.0,
    input_scale: float = 0.5,
    edge_scale: float = 1.0,
) -> list[KSweepRecord]:
    """Mean branches taken vs label count, trained model vs random model.

    Data comes from a planted directed chain; the trained model is fit on a
    fresh sample from it.  The untrained comparison model draws clique
    weights from N(0,1) and rescales them so its mean absolute node score
    on the test data is 1: scores at the decision scale but unrelated to
    the data, the regime where pruning has nothing to work with.
    """
    records = []
    for K in k_list:
        graph, planted = planted_model(
            K,
            n_inputs,
            kind=DIRECTED,
            topology="chain",
            seed=(seed, K, 0),
            bias_scale=bias_scale,
            input_scale=input_scale,
            edge_scale=edge_scale,
        )
        train = sample_sbn(SynthConfig(graph, planted, n_train, seed=(seed, K, 1)))
        test = sample_sbn(SynthConfig(graph, planted, n_test, seed=(seed, K, 2)))
        fitted = train_lmsbn(train, graph, TrainConfig(lam=lam, shuffle_seed=seed)).weights
        rng = np.random.default_rng((seed, K, 3))
        raw = rng.normal(0.0, 1.0, graph.n_cliques)
        mean_abs = float(np.abs(_margin_matrix(clique_feature_matrix(graph, test), graph, raw)).mean())
        random_w = WeightVector(values=raw / mean_abs, lam=lam)
        config = BBConfig(cutoff=cutoff, max_states=max_states)
        trained_states = [
            bb_infer(graph, fitted, x, config).states_visited for x in test.X
        ]
        random_states = [
            bb_infer(graph, random_w, x, config).states_visited for x in test.X
        ]
        records.append(
            KSweepRecord(
                n_outputs=K,
                trained_mean_states=float(np.mean(trained_states)),
                random_mean_states=float(np.mean(random_states)),
                exhaustive_states=1 << K,
            )
        )
    return records


def s_sweep_csv(records) -> str:
    lines = [S_SWEEP_HEADER]
    for r in records:
        lines.append(
            f"{r.cutoff!r},{r.fraction_optimal!r},{r.bound!r},"
            f"{r.mean_states!r},{r.max_states},{r.mean_loss!r}"
        )
    return "\n".join(lines) + "\n"


def k_sweep_csv(records) -> str:
    lines = [K_SWEEP_HEADER]
    for r in records:
        lines.append(
            f"{r.n_outputs},{r.trained_mean_states!r},{r.random_mean_states!r},{r.exhaustive_states}"
        )
    return "\n".join(lines) + "\n"
