"""AUROC as an exact rank statistic.

Used both as the greedy selection objective and as the reported evaluation
measure. The value is the probability that a uniformly random anomalous
score exceeds a uniformly random normal score, with tied pairs counted as
half; computed from average ranks in O(n log n), no curve integration.
"""

from __future__ import annotations

import numpy as np


def _average_ranks(x: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the average of their positions."""
    n = x.shape[0]
    sorter = np.argsort(x, kind="mergesort")
    inv = np.empty(n, dtype=np.intp)
    inv[sorter] = np.arange(n)
    sx = x[sorter]
    starts = np.r_[True, sx[1:] != sx[:-1]]
    dense = np.cumsum(starts)[inv]
    bounds = np.r_[np.nonzero(starts)[0], n]
    return 0.5 * (bounds[dense] + bounds[dense - 1] + 1)


def auroc(scores: np.ndarray, anomalous: np.ndarray) -> float:
    """Mann-Whitney AUROC of ``scores`` against boolean labels.

    ``anomalous`` marks the positive class. Requires at least one sample of
    each class and finite scores.
    """
    scores = np.asarray(scores, dtype=np.float64)
    anomalous = np.asarray(anomalous, dtype=bool)
    if scores.shape != anomalous.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be 1-d arrays of equal length")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores contain non-finite values")
    n_pos = int(anomalous.sum())
    n_neg = scores.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("both classes must be present")
    ranks = _average_ranks(scores)
    u = ranks[anomalous].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))
