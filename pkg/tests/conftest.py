"""Shared fixtures: synthetic feature sets, white sets, and slow oracles."""

from __future__ import annotations

import numpy as np
import pytest

from eigengreedy.gaussian import WhiteSet
from eigengreedy.store import FeatureSet, SampleMeta


def make_train_set(matrix, category="synthetic", node="features.0"):
    matrix = np.asarray(matrix, dtype=np.float32)
    samples = [
        SampleMeta(f"train_{i:04d}.png", "train", "normal", "good")
        for i in range(matrix.shape[0])
    ]
    return FeatureSet(matrix=matrix, samples=samples, node_name=node,
                      category=category)


def make_test_set(matrix, anomaly_types, category="synthetic",
                  node="features.0"):
    """Test set whose i-th row has the i-th anomaly type ("good" = normal)."""
    matrix = np.asarray(matrix, dtype=np.float32)
    samples = []
    for i, t in enumerate(anomaly_types):
        label = "normal" if t == "good" else "anomalous"
        samples.append(SampleMeta(f"test_{i:04d}.png", "test", label, t))
    return FeatureSet(matrix=matrix, samples=samples, node_name=node,
                      category=category)


def make_test_set_from_counts(category, type_counts, d=2, seed=0):
    """Test set with a given number of rows per anomaly type."""
    types = []
    for t, count in type_counts.items():
        types.extend([t] * count)
    rng = np.random.default_rng(seed)
    matrix = rng.standard_normal((len(types), d)).astype(np.float32)
    return make_test_set(matrix, types, category=category)


def make_white_set(vectors, labels, anomaly_types=None):
    vectors = np.asarray(vectors, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    if anomaly_types is None:
        anomaly_types = ["defect" if a else "good" for a in labels]
    return WhiteSet(vectors=vectors, labels=labels,
                    anomaly_types=anomaly_types)


def random_white_set(rng, n_normal, n_anom, d, shift=1.0):
    """Labeled white set with a mild class shift on every axis."""
    vectors = rng.standard_normal((n_normal + n_anom, d))
    vectors[n_normal:] += shift
    labels = np.r_[np.zeros(n_normal, bool), np.ones(n_anom, bool)]
    return make_white_set(vectors, labels)


def random_spd(rng, d, spread=1.0):
    a = rng.standard_normal((d, d))
    return a @ a.T + (spread + d) * np.eye(d)


# --- independent oracles ---------------------------------------------------

def auroc_pairwise(scores, anomalous):
    """O(n^2) pairwise AUROC with half credit for ties."""
    scores = np.asarray(scores, dtype=float)
    anomalous = np.asarray(anomalous, dtype=bool)
    pos = scores[anomalous]
    neg = scores[~anomalous]
    total = 0.0
    for a in pos:
        for b in neg:
            if a > b:
                total += 1.0
            elif a == b:
                total += 0.5
    return total / (len(pos) * len(neg))


def ledoit_wolf_oracle(X, mean):
    """Straight transcription of the shrinkage formulas, loops and all."""
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    Xc = X - np.asarray(mean, dtype=np.float64)
    S = np.zeros((d, d))
    for x in Xc:
        S += np.outer(x, x)
    S /= n

    def ip(A, B):
        return np.trace(A @ B.T) / d

    m = ip(S, np.eye(d))
    diff = S - m * np.eye(d)
    dist2 = ip(diff, diff)
    b_bar2 = 0.0
    for x in Xc:
        e = np.outer(x, x) - S
        b_bar2 += ip(e, e)
    b_bar2 /= n**2
    b2 = min(b_bar2, dist2)
    delta = 0.0 if dist2 == 0.0 else b2 / dist2
    return (1.0 - delta) * S + delta * m * np.eye(d), delta


# Per-category test-set composition matching the benchmark dataset's
# published image counts ("good" rows are the normal test images).
DATASET_TEST_COUNTS = {
    "bottle": {"broken_small": 22, "contamination": 21, "broken_large": 20,
               "good": 20},
    "cable": {"missing_wire": 10, "cable_swap": 12, "bent_wire": 13,
              "cut_inner_insulation": 14, "poke_insulation": 10,
              "missing_cable": 12, "cut_outer_insulation": 10,
              "combined": 11, "good": 58},
    "capsule": {"poke": 21, "faulty_imprint": 22, "squeeze": 20, "crack": 23,
                "scratch": 23, "good": 23},
    "pill": {"color": 25, "scratch": 24, "contamination": 21, "combined": 17,
             "faulty_imprint": 19, "pill_type": 9, "crack": 26, "good": 26},
    "hazelnut": {"print": 17, "hole": 18, "cut": 17, "crack": 18, "good": 40},
    "transistor": {"cut_lead": 10, "misplaced": 10, "damaged_case": 10,
                   "bent_lead": 10, "good": 60},
    "zipper": {"combined": 16, "broken_teeth": 19, "split_teeth": 18,
               "squeezed_teeth": 16, "rough": 17, "fabric_interior": 16,
               "fabric_border": 17, "good": 32},
    "toothbrush": {"defective": 30, "good": 12},
}

# Expected greedy/eval anomalous counts with a budget of 15.
EXPECTED_EXP3_COUNTS = {
    "bottle": (15, 48),
    "cable": (16, 76),
    "capsule": (15, 94),
    "pill": (21, 120),
    "hazelnut": (16, 54),
    "transistor": (16, 24),
    "zipper": (21, 98),
    "toothbrush": (15, 15),
}


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
