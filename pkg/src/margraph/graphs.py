"""Output graphs over binary labels, built from parity cliques.

A clique is a set of output variables, optionally tied to one input
coordinate.  Its feature value is the product of the member labels (their
parity) times the attached input value, or times 1 when no input is attached.
A graph fixes the label count, the input dimension, a total order over the
labels, and whether cliques contribute to every member's score (undirected)
or only to the member that comes last in the order (directed).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .errors import GraphError

__all__ = [
    "DIRECTED",
    "UNDIRECTED",
    "Clique",
    "GraphSpec",
    "build_independent_graph",
    "build_chain_graph",
    "build_full_graph",
]

DIRECTED = "directed"
UNDIRECTED = "undirected"


@dataclass(frozen=True)
class Clique:
    """A group of output variables with an optional input coupling.

    ``outputs`` is stored sorted and duplicate-free.  ``input_feature`` is
    the index of the input coordinate multiplied into the feature, or None
    for a pure label-parity feature.
    """

    outputs: tuple[int, ...]
    input_feature: int | None = None

    def __post_init__(self) -> None:
        outs = tuple(sorted(set(int(k) for k in self.outputs)))
        if not outs:
            raise GraphError("a clique needs at least one output variable")
        if any(k < 0 for k in outs):
            raise GraphError(f"negative output index in clique: {outs}")
        object.__setattr__(self, "outputs", outs)
        if self.input_feature is not None:
            d = int(self.input_feature)
            if d < 0:
                raise GraphError(f"negative input feature index: {d}")
            object.__setattr__(self, "input_feature", d)

    def feature(self, x: np.ndarray, y: np.ndarray) -> float:
        """Feature value: parity of the member labels times the input value."""
        parity = 1.0
        for k in self.outputs:
            parity *= float(y[k])
        if self.input_feature is not None:
            parity *= float(x[self.input_feature])
        return parity


@dataclass(frozen=True)
class GraphSpec:
    """A label graph: dimensions, node order, cliques, and coupling kind.

    ``order`` lists the label indices in evaluation order.  In a directed
    graph each clique contributes only to the score of its owner, the member
    that appears last in ``order``; in an undirected graph it contributes to
    every member's score.
    """

    n_outputs: int
    n_inputs: int
    kind: str
    order: tuple[int, ...]
    cliques: tuple[Clique, ...]

    def __post_init__(self) -> None:
        if self.n_outputs < 1:
            raise GraphError(f"need at least one output, got {self.n_outputs}")
        if self.n_inputs < 0:
            raise GraphError(f"negative input dimension: {self.n_inputs}")
        if self.kind not in (DIRECTED, UNDIRECTED):
            raise GraphError(f"kind must be {DIRECTED!r} or {UNDIRECTED!r}, got {self.kind!r}")
        order = tuple(int(i) for i in self.order)
        if sorted(order) != list(range(self.n_outputs)):
            raise GraphError(f"order must be a permutation of 0..{self.n_outputs - 1}, got {order}")
        object.__setattr__(self, "order", order)
        cliques = tuple(self.cliques)
        object.__setattr__(self, "cliques", cliques)
        seen: set[tuple] = set()
        for c in cliques:
            if not isinstance(c, Clique):
                raise GraphError(f"not a clique: {c!r}")
            if c.outputs[-1] >= self.n_outputs:
                raise GraphError(f"clique {c.outputs} exceeds output count {self.n_outputs}")
            if c.input_feature is not None and c.input_feature >= self.n_inputs:
                raise GraphError(
                    f"clique input feature {c.input_feature} exceeds input dimension {self.n_inputs}"
                )
            key = (c.outputs, c.input_feature)
            if key in seen:
                raise GraphError(f"duplicate clique: outputs={c.outputs} input={c.input_feature}")
            seen.add(key)

    @property
    def n_cliques(self) -> int:
        return len(self.cliques)

    @cached_property
    def position(self) -> tuple[int, ...]:
        """position[node] = index of the node within ``order``."""
        pos = [0] * self.n_outputs
        for p, node in enumerate(self.order):
            pos[node] = p
        return tuple(pos)

    @cached_property
    def owners(self) -> tuple[int, ...]:
        """owners[j] = the member of clique j that comes last in ``order``."""
        pos = self.position
        return tuple(max(c.outputs, key=lambda k: pos[k]) for c in self.cliques)

    @cached_property
    def contributing(self) -> tuple[tuple[int, ...], ...]:
        """contributing[i] = indices of cliques that feed node i's score."""
        feeds: list[list[int]] = [[] for _ in range(self.n_outputs)]
        if self.kind == DIRECTED:
            for j, owner in enumerate(self.owners):
                feeds[owner].append(j)
        else:
            for j, c in enumerate(self.cliques):
                for k in c.outputs:
                    feeds[k].append(j)
        return tuple(tuple(f) for f in feeds)

    @property
    def has_input_couplings(self) -> bool:
        return any(c.input_feature is not None for c in self.cliques)

    def regularizer_multipliers(self, eta0: float) -> np.ndarray:
        """Per-clique quadratic penalty multipliers.

        Multi-output cliques of an undirected graph are penalized by an
        extra ``eta0`` because they appear in several node scores; all other
        cliques get multiplier 1.
        """
        if eta0 < 0:
            raise GraphError(f"negative regularizer boost: {eta0}")
        mult = np.ones(self.n_cliques, dtype=np.float64)
        if self.kind == UNDIRECTED:
            for j, c in enumerate(self.cliques):
                if len(c.outputs) >= 2:
                    mult[j] = 1.0 + eta0
        return mult


def _default_order(n_outputs: int, order) -> tuple[int, ...]:
    if order is None:
        return tuple(range(n_outputs))
    return tuple(int(i) for i in order)


def _unary_cliques(n_outputs: int, n_inputs: int) -> list[Clique]:
    cliques = [Clique((i,)) for i in range(n_outputs)]
    for i in range(n_outputs):
        for d in range(n_inputs):
            cliques.append(Clique((i,), d))
    return cliques


def build_independent_graph(
    n_outputs: int, n_inputs: int, kind: str = DIRECTED, order=None
) -> GraphSpec:
    """Graph with only per-node bias and input cliques, no label coupling."""
    return GraphSpec(
        n_outputs=n_outputs,
        n_inputs=n_inputs,
        kind=kind,
        order=_default_order(n_outputs, order),
        cliques=tuple(_unary_cliques(n_outputs, n_inputs)),
    )


def build_chain_graph(n_outputs: int, n_inputs: int, kind: str, order=None) -> GraphSpec:
    """Unary cliques plus pair cliques linking consecutive nodes in the order."""
    order = _default_order(n_outputs, order)
    cliques = _unary_cliques(n_outputs, n_inputs)
    for p in range(n_outputs - 1):
        cliques.append(Clique((order[p], order[p + 1])))
    return GraphSpec(
        n_outputs=n_outputs,
        n_inputs=n_inputs,
        kind=kind,
        order=order,
        cliques=tuple(cliques),
    )


def build_full_graph(n_outputs: int, n_inputs: int, kind: str, order=None) -> GraphSpec:
    """Unary cliques plus one pair clique for every pair of nodes."""
    cliques = _unary_cliques(n_outputs, n_inputs)
    for i, j in combinations(range(n_outputs), 2):
        cliques.append(Clique((i, j)))
    return GraphSpec(
        n_outputs=n_outputs,
        n_inputs=n_inputs,
        kind=kind,
        order=_default_order(n_outputs, order),
        cliques=tuple(cliques),
    )
