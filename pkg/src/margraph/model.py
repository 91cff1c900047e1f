"""Scores, margins, hinge objective, and exact likelihoods.

Every node i has a linear score s_i: the sum, over cliques feeding that node,
of weight * input value * parity of the OTHER member labels.  The margin of
node i is z_i = y_i * s_i, and the joint hinge loss of an assignment is
sum_i max(0, 1 - z_i).

Scalar and vectorized evaluation paths below accumulate in the same term
order so a branch-and-bound search and a brute-force enumeration produce
bit-identical objectives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Instance
from .errors import CapabilityError, DataError, GraphError
from .graphs import DIRECTED, UNDIRECTED, GraphSpec

__all__ = [
    "WeightVector",
    "LossBreakdown",
    "NodeScorer",
    "compile_scorer",
    "node_margin",
    "margins",
    "joint_loss",
    "sbn_log_likelihood",
    "bm_log_likelihood",
    "log_prob_table",
    "assignment_signs",
    "signs_of_indices",
    "signs_from_index",
    "index_from_signs",
    "surrogate_bound_check",
    "HINGE_LOG_OFFSET",
    "TABLE_MAX_OUTPUTS",
    "ENUM_MAX_OUTPUTS",
]

# Exact enumeration limits: streaming enumeration caps at 2^25 states,
# materialized probability tables at 2^20 entries.
ENUM_MAX_OUTPUTS = 25
TABLE_MAX_OUTPUTS = 20
_CHUNK = 1 << 16

# Offset that turns the hinge loss into an upper bound on logistic loss:
# log(1 + e^-z) <= max(0, 1 - z) + log(e + 1/e) for every real z.
HINGE_LOG_OFFSET = math.log(math.e + math.exp(-1.0))


@dataclass(frozen=True)
class WeightVector:
    """One weight per clique plus the regularization constants used to fit it."""

    values: np.ndarray
    lam: float
    eta0: float = 0.0

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise DataError(f"weights must be a vector, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise DataError("weights contain non-finite values")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        if not (self.lam > 0):
            raise DataError(f"regularization strength must be positive, got {self.lam}")
        if self.eta0 < 0:
            raise DataError(f"regularizer boost must be non-negative, got {self.eta0}")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class LossBreakdown:
    """Per-node hinge losses and their total for one assignment."""

    per_node: np.ndarray
    total: float


@dataclass(frozen=True)
class NodeScorer:
    """Per-node score tables for one fixed input vector.

    For node i, s_i = const[i] + sum over terms[i] of w_eff * parity(others),
    where const folds in all cliques whose parity part is empty once the
    node itself is removed (biases and input couplings).  Term order follows
    clique order, which keeps scalar and vectorized sums bit-identical.
    """

    const: np.ndarray
    terms: tuple[tuple[tuple[float, tuple[int, ...]], ...], ...]
    order: tuple[int, ...]

    @property
    def n_outputs(self) -> int:
        return len(self.const)

    def node_score(self, i: int, y: np.ndarray) -> float:
        """s_i given the labels of the other members of node i's cliques."""
        s = float(self.const[i])
        for w_eff, others in self.terms[i]:
            parity = 1
            for k in others:
                if y[k] < 0:
                    parity = -parity
            s += w_eff if parity > 0 else -w_eff
        return s

    def score_column(self, i: int, Y: np.ndarray) -> np.ndarray:
        """s_i for every row of the (n, K) sign matrix Y."""
        col = np.full(Y.shape[0], self.const[i], dtype=np.float64)
        for w_eff, others in self.terms[i]:
            if len(others) == 1:
                parity = Y[:, others[0]]
            else:
                parity = np.prod(Y[:, others], axis=1, dtype=np.int8)
            col += w_eff * parity
        return col

    def margin_block(self, Y: np.ndarray) -> np.ndarray:
        """(n, K) matrix of margins z_i = y_i * s_i for each row of Y."""
        Z = np.empty((Y.shape[0], self.n_outputs), dtype=np.float64)
        for i in range(self.n_outputs):
            Z[:, i] = Y[:, i] * self.score_column(i, Y)
        return Z

    def total_loss_column(self, Y: np.ndarray) -> np.ndarray:
        """Joint hinge loss per row, accumulated node by node in graph order."""
        total = np.zeros(Y.shape[0], dtype=np.float64)
        for i in self.order:
            z = Y[:, i] * self.score_column(i, Y)
            total += np.maximum(0.0, 1.0 - z)
        return total


def compile_scorer(graph: GraphSpec, weights: WeightVector, x: np.ndarray) -> NodeScorer:
    """Fold one input vector into per-node score tables."""
    if len(weights) != graph.n_cliques:
        raise DataError(f"{len(weights)} weights for {graph.n_cliques} cliques")
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (graph.n_inputs,):
        raise DataError(f"input shape {x.shape} does not match dimension {graph.n_inputs}")
    if not np.all(np.isfinite(x)):
        raise DataError("input contains non-finite values")
    w = weights.values
    const = np.zeros(graph.n_outputs, dtype=np.float64)
    terms: list[list[tuple[float, tuple[int, ...]]]] = [[] for _ in range(graph.n_outputs)]
    for i in range(graph.n_outputs):
        for j in graph.contributing[i]:
            c = graph.cliques[j]
            w_eff = float(w[j]) if c.input_feature is None else float(w[j] * x[c.input_feature])
            others = tuple(k for k in c.outputs if k != i)
            if others:
                terms[i].append((w_eff, others))
            else:
                const[i] += w_eff
    return NodeScorer(const=const, terms=tuple(tuple(t) for t in terms), order=graph.order)


def _required_nodes(graph: GraphSpec, i: int) -> set[int]:
    needed = {i}
    for j in graph.contributing[i]:
        needed.update(graph.cliques[j].outputs)
    return needed


def node_margin(graph: GraphSpec, weights: WeightVector, x, y, i: int) -> float:
    """Margin z_i = y_i * s_i; y may be partial with 0 meaning unassigned."""
    if not (0 <= i < graph.n_outputs):
        raise DataError(f"node index {i} out of range for {graph.n_outputs} outputs")
    y = np.asarray(y)
    if y.shape != (graph.n_outputs,):
        raise DataError(f"label shape {y.shape} does not match {graph.n_outputs} outputs")
    if not np.all(np.isin(y, (-1, 0, 1))):
        raise DataError("labels must be +1, -1, or 0 for unassigned")
    missing = sorted(k for k in _required_nodes(graph, i) if y[k] == 0)
    if missing:
        raise DataError(f"margin of node {i} needs labels for nodes {missing}")
    scorer = compile_scorer(graph, weights, x)
    return float(y[i]) * scorer.node_score(i, y)


def margins(graph: GraphSpec, weights: WeightVector, x, y) -> np.ndarray:
    """All node margins for a full assignment."""
    y = np.asarray(y)
    if y.shape != (graph.n_outputs,):
        raise DataError(f"label shape {y.shape} does not match {graph.n_outputs} outputs")
    if not np.all(np.isin(y, (-1, 1))):
        raise DataError("margins need a full +1/-1 assignment")
    scorer = compile_scorer(graph, weights, x)
    return np.array(
        [float(y[i]) * scorer.node_score(i, y) for i in range(graph.n_outputs)],
        dtype=np.float64,
    )


def joint_loss(graph: GraphSpec, weights: WeightVector, instance: Instance) -> LossBreakdown:
    """Per-node hinge losses max(0, 1 - z_i) and their sum."""
    z = margins(graph, weights, instance.x, instance.y)
    per_node = np.maximum(0.0, 1.0 - z)
    total = 0.0
    for i in range(graph.n_outputs):
        total += per_node[i]
    per_node.flags.writeable = False
    return LossBreakdown(per_node=per_node, total=total)


def sbn_log_likelihood(graph: GraphSpec, weights: WeightVector, instance: Instance) -> float:
    """Log-likelihood under the sigmoid network: sum_i log sigmoid(z_i)."""
    if graph.kind != DIRECTED:
        raise GraphError("sigmoid-network likelihood needs a directed graph")
    z = margins(graph, weights, instance.x, instance.y)
    return float(-np.logaddexp(0.0, -z).sum())


def signs_of_indices(n_outputs: int, indices) -> np.ndarray:
    """Sign rows for arbitrary assignment indices.

    Index n assigns label k to +1 when bit (K-1-k) of n is 0, so ascending n
    walks assignments in lexicographic order with +1 sorting before -1.
    """
    idx = np.asarray(indices, dtype=np.int64)
    shifts = np.array([n_outputs - 1 - k for k in range(n_outputs)], dtype=np.int64)
    bits = (idx[:, None] >> shifts[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def assignment_signs(n_outputs: int, start: int, stop: int) -> np.ndarray:
    """Rows start..stop-1 of the canonical sign-matrix enumeration."""
    return signs_of_indices(n_outputs, np.arange(start, stop, dtype=np.int64))


def signs_from_index(n_outputs: int, idx: int) -> np.ndarray:
    return assignment_signs(n_outputs, idx, idx + 1)[0]


def index_from_signs(y: np.ndarray) -> int:
    idx = 0
    for v in np.asarray(y):
        idx = (idx << 1) | (1 if v < 0 else 0)
    return idx


def _check_enum_size(n_outputs: int, cap: int, what: str) -> None:
    if n_outputs > cap:
        raise CapabilityError(f"{what} supports at most {cap} outputs, got {n_outputs}")


def _logsumexp(chunks_max: float, chunks_sum: float) -> float:
    return chunks_max + math.log(chunks_sum)


def bm_log_likelihood(graph: GraphSpec, weights: WeightVector, instance: Instance) -> float:
    """Exact log-likelihood under the pairwise energy model.

    log p(y|x) = (1/2) sum_i z_i(y) - log sum_y' exp((1/2) sum_i z_i(y')),
    with the partition sum enumerated over all 2^K assignments.
    """
    if graph.kind != UNDIRECTED:
        raise GraphError("energy-model likelihood needs an undirected graph")
    _check_enum_size(graph.n_outputs, ENUM_MAX_OUTPUTS, "exact likelihood")
    scorer = compile_scorer(graph, weights, instance.x)
    half = 0.5 * float(margins(graph, weights, instance.x, instance.y).sum())
    K = graph.n_outputs
    best = -math.inf
    acc = 0.0
    for start in range(0, 1 << K, _CHUNK):
        Y = assignment_signs(K, start, min(start + _CHUNK, 1 << K))
        col = 0.5 * scorer.margin_block(Y).sum(axis=1)
        m = float(col.max())
        if m > best:
            acc *= math.exp(best - m) if best > -math.inf else 0.0
            best = m
        acc += float(np.exp(col - best).sum())
    return half - _logsumexp(best, acc)


def log_prob_table(graph: GraphSpec, weights: WeightVector, x) -> np.ndarray:
    """Log-probability of every assignment, indexed like assignment_signs.

    Directed graphs return the sum of per-node log-sigmoids, which is
    normalized by construction; undirected graphs are normalized explicitly
    via the enumerated partition sum.
    """
    _check_enum_size(graph.n_outputs, TABLE_MAX_OUTPUTS, "probability table")
    scorer = compile_scorer(graph, weights, x)
    K = graph.n_outputs
    table = np.empty(1 << K, dtype=np.float64)
    for start in range(0, 1 << K, _CHUNK):
        stop = min(start + _CHUNK, 1 << K)
        Z = scorer.margin_block(assignment_signs(K, start, stop))
        if graph.kind == DIRECTED:
            table[start:stop] = -np.logaddexp(0.0, -Z).sum(axis=1)
        else:
            table[start:stop] = 0.5 * Z.sum(axis=1)
    if graph.kind == UNDIRECTED:
        m = float(table.max())
        table -= m + math.log(float(np.exp(table - m).sum()))
    return table


def surrogate_bound_check(z):
    """Logistic loss and its hinge upper bound at margin z.

    Returns (log(1 + e^-z), max(0, 1 - z) + HINGE_LOG_OFFSET); the second
    component dominates the first for every real z.
    """
    z = np.asarray(z, dtype=np.float64)
    log_loss = np.logaddexp(0.0, -z)
    hinge_plus_offset = np.maximum(0.0, 1.0 - z) + HINGE_LOG_OFFSET
    if z.ndim == 0:
        return float(log_loss), float(hinge_plus_offset)
    return log_loss, hinge_plus_offset
