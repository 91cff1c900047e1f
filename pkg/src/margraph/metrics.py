"""Multi-label evaluation measures.

All five scores treat labels as +1 (relevant) / -1 (irrelevant).  F-scores
use the convention that an empty ratio (no true positives possible and none
claimed) counts as a perfect 1.0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import as_sign_labels
from .errors import DataError

__all__ = ["MetricReport", "evaluate", "per_label_f_scores"]


@dataclass(frozen=True)
class MetricReport:
    """Exact match, Hamming loss, and sample/macro/micro F-scores."""

    exact_match: float
    hamming: float
    f_sample: float
    f_macro: float
    f_micro: float

    def format_line(self) -> str:
        return (
            f"E={self.exact_match!r},H={self.hamming!r},"
            f"Fsam={self.f_sample!r},Fmac={self.f_macro!r},Fmic={self.f_micro!r}"
        )


def _check_pair(truths, preds) -> tuple[np.ndarray, np.ndarray]:
    T = as_sign_labels(np.asarray(truths))
    P = as_sign_labels(np.asarray(preds))
    if T.ndim != 2 or P.ndim != 2:
        raise DataError(f"label matrices must be 2-d, got {T.shape} and {P.shape}")
    if T.shape != P.shape:
        raise DataError(f"shape mismatch: truths {T.shape} vs preds {P.shape}")
    return T, P


def _f_ratio(true_pos: np.ndarray, denom: np.ndarray) -> np.ndarray:
    """2*TP / (positives in truth + positives in prediction), with 0/0 = 1."""
    out = np.ones_like(denom, dtype=np.float64)
    nz = denom > 0
    out[nz] = 2.0 * true_pos[nz] / denom[nz]
    return out


def per_label_f_scores(truths, preds) -> np.ndarray:
    """F-score of each label column across the dataset."""
    T, P = _check_pair(truths, preds)
    tp = ((T == 1) & (P == 1)).sum(axis=0)
    denom = (T == 1).sum(axis=0) + (P == 1).sum(axis=0)
    return _f_ratio(tp, denom)


def evaluate(truths, preds) -> MetricReport:
    """All five measures over parallel truth/prediction label matrices."""
    T, P = _check_pair(truths, preds)
    agree = T == P
    exact = float(np.mean(np.all(agree, axis=1)))
    hamming = float(np.mean(~agree))
    tp_rows = ((T == 1) & (P == 1)).sum(axis=1)
    denom_rows = (T == 1).sum(axis=1) + (P == 1).sum(axis=1)
    f_sample = float(np.mean(_f_ratio(tp_rows, denom_rows)))
    f_macro = float(np.mean(per_label_f_scores(T, P)))
    tp_all = np.array([((T == 1) & (P == 1)).sum()])
    denom_all = np.array([(T == 1).sum() + (P == 1).sum()])
    f_micro = float(_f_ratio(tp_all, denom_all)[0])
    return MetricReport(
        exact_match=exact,
        hamming=hamming,
        f_sample=f_sample,
        f_macro=f_macro,
        f_micro=f_micro,
    )
