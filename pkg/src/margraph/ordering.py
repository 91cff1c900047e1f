"""Label-order strategies for directed graphs.

Either keep the natural index order, or sort labels by the training-set
F-score of an independent per-label classifier so that easier labels come
first (and are conditioned on by the harder ones).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import DataError
from .graphs import DIRECTED, build_independent_graph
from .metrics import per_label_f_scores
from .training import TrainConfig, clique_feature_matrix, train_lmsbn

__all__ = ["OrderStrategy", "index_order", "fscore_order", "make_order_strategy"]


@dataclass(frozen=True)
class OrderStrategy:
    """A chosen node order, with per-label probe F-scores when relevant."""

    kind: str
    order: tuple[int, ...]
    per_label_fscores: tuple[float, ...] | None = None


def index_order(n_outputs: int) -> tuple[int, ...]:
    """Identity permutation."""
    if n_outputs < 1:
        raise DataError(f"need at least one output, got {n_outputs}")
    return tuple(range(n_outputs))


def probe_label_fscores(dataset: Dataset, config: TrainConfig | None = None) -> np.ndarray:
    """Training-set F-score of an independent linear classifier per label."""
    graph = build_independent_graph(dataset.n_outputs, dataset.n_inputs, DIRECTED)
    result = train_lmsbn(dataset, graph, config or TrainConfig())
    F = clique_feature_matrix(graph, dataset)
    preds = np.empty_like(dataset.Y)
    for i in range(graph.n_outputs):
        cols = list(graph.contributing[i])
        margin = F[:, cols] @ result.weights.values[cols]
        # margin = y * score, so the predicted sign is y where the margin is
        # positive and -y where it is negative; score 0 predicts +1.
        score = margin * dataset.Y[:, i]
        preds[:, i] = np.where(score >= 0.0, 1, -1)
    return per_label_f_scores(dataset.Y, preds)


def fscore_order(dataset: Dataset, config: TrainConfig | None = None) -> tuple[int, ...]:
    """Labels sorted by descending probe F-score; ties by ascending index."""
    scores = probe_label_fscores(dataset, config)
    return tuple(sorted(range(dataset.n_outputs), key=lambda i: (-scores[i], i)))


def make_order_strategy(
    kind: str, dataset: Dataset, config: TrainConfig | None = None
) -> OrderStrategy:
    if kind == "index":
        return OrderStrategy(kind="index", order=index_order(dataset.n_outputs))
    if kind == "fscore":
        scores = probe_label_fscores(dataset, config)
        order = tuple(sorted(range(dataset.n_outputs), key=lambda i: (-scores[i], i)))
        return OrderStrategy(kind="fscore", order=order, per_label_fscores=tuple(float(s) for s in scores))
    raise DataError(f"unknown order strategy {kind!r}")
