"""Regularized multivariate Gaussian fitting, whitening, and anomaly scores.

The model is a mean vector plus a shrunk covariance matrix (Ledoit-Wolf
scaled-identity target). Its eigendecomposition, with eigenvalues sorted
ascending, yields a whitening map under which the Mahalanobis distance of a
sample becomes the plain Euclidean norm of its white vector, and a reduced
model is just a choice of white-vector entries.

Storage is float32; all arithmetic here is float64.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from eigengreedy.store import FeatureSet

MODEL_MAGIC = b"GMD1"
MODEL_VERSION = 1


@dataclass(frozen=True)
class GaussianModel:
    """Fitted mean, shrunk covariance, and its sorted eigendecomposition.

    ``whitening`` is the d x d matrix that maps a centered sample to its
    white vector; it squares to the inverse covariance.
    """

    mean: np.ndarray
    covariance: np.ndarray
    shrinkage: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    whitening: np.ndarray

    @property
    def d(self) -> int:
        return self.mean.shape[0]


@dataclass
class WhiteSet:
    """White vectors with per-row class labels and anomaly types.

    ``labels`` is a boolean array, True for anomalous rows.
    """

    vectors: np.ndarray
    labels: np.ndarray
    anomaly_types: list[str]

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=bool)
        if self.vectors.ndim != 2:
            raise ValueError("vectors must be 2-dimensional")
        if self.labels.shape[0] != self.vectors.shape[0]:
            raise ValueError("labels length != vector rows")
        if len(self.anomaly_types) != self.vectors.shape[0]:
            raise ValueError("anomaly_types length != vector rows")
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("white vectors contain non-finite entries")

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    def take(self, rows: Sequence[int]) -> "WhiteSet":
        rows = list(rows)
        return WhiteSet(
            vectors=self.vectors[rows],
            labels=self.labels[rows],
            anomaly_types=[self.anomaly_types[i] for i in rows],
        )

    def has_both_classes(self) -> bool:
        return bool(self.labels.any() and (~self.labels).any())


def fit_mean(train: FeatureSet) -> np.ndarray:
    """Maximum-likelihood mean of the (all-normal) training rows."""
    if any(s.label != "normal" for s in train.samples):
        raise ValueError("training set must contain only normal samples")
    return train.matrix.astype(np.float64).mean(axis=0)


def fit_covariance_ledoit_wolf(
    train: FeatureSet, mean: np.ndarray
) -> tuple[np.ndarray, float]:
    """Shrunk covariance (1 - delta) * S + delta * m * I and its intensity.

    S is the empirical covariance centered on ``mean`` and normalized by n,
    m = trace(S) / d. The shrinkage intensity delta is the 2004
    scaled-identity-target formula, with matrix norms normalized by d:
    delta = min(b_bar2, dist2) / dist2 where dist2 = ||S - m I||^2 and
    b_bar2 = (1/n^2) * sum_k ||x_k x_k^T - S||^2 over centered rows x_k.
    """
    X = train.matrix.astype(np.float64)
    n, d = X.shape
    if n < 2:
        raise ValueError("fewer than 2 samples")
    Xc = X - np.asarray(mean, dtype=np.float64)
    S = (Xc.T @ Xc) / n
    S = (S + S.T) / 2.0
    m = np.trace(S) / d
    if m <= 0.0:
        raise ValueError("degenerate data: zero empirical variance")

    dist2 = np.sum((S - m * np.eye(d)) ** 2) / d
    if dist2 == 0.0:
        delta = 0.0
    else:
        # sum_k ||x_k x_k^T - S||_F^2 = sum_k ||x_k||^4 - n ||S||_F^2
        sq_norms = np.einsum("ij,ij->i", Xc, Xc)
        b_bar2 = (np.sum(sq_norms**2) - n * np.sum(S**2)) / (d * n**2)
        delta = min(b_bar2, dist2) / dist2
    delta = float(min(max(delta, 0.0), 1.0))
    shrunk = (1.0 - delta) * S + delta * m * np.eye(d)
    return shrunk, delta


def eigendecompose(covariance: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigendecomposition with canonical eigenvector signs.

    Each eigenvector is flipped, if needed, so its first nonzero entry is
    non-negative, making traces reproducible across platforms.
    """
    covariance = np.asarray(covariance, dtype=np.float64)
    scale = np.max(np.abs(covariance))
    if scale == 0.0 or np.max(np.abs(covariance - covariance.T)) > 1e-10 * scale:
        raise ValueError("covariance is not symmetric")
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    if eigenvalues[0] <= 0.0:
        raise ValueError(
            f"non-positive eigenvalue {eigenvalues[0]:g}: "
            "covariance is not positive definite"
        )
    for j in range(eigenvectors.shape[1]):
        nz = np.nonzero(eigenvectors[:, j])[0]
        if nz.size and eigenvectors[nz[0], j] < 0:
            eigenvectors[:, j] *= -1.0
    return eigenvalues, eigenvectors


def _whitening_matrix(
    eigenvalues: np.ndarray, eigenvectors: np.ndarray
) -> np.ndarray:
    return eigenvectors.T / np.sqrt(eigenvalues)[:, np.newaxis]


def fit_gaussian(train: FeatureSet) -> GaussianModel:
    """Fit mean, shrunk covariance, eigendecomposition, and whitening map."""
    mean = fit_mean(train)
    covariance, shrinkage = fit_covariance_ledoit_wolf(train, mean)
    eigenvalues, eigenvectors = eigendecompose(covariance)
    return GaussianModel(
        mean=mean,
        covariance=covariance,
        shrinkage=shrinkage,
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        whitening=_whitening_matrix(eigenvalues, eigenvectors),
    )


def whiten(model: GaussianModel, fset: FeatureSet) -> WhiteSet:
    """Map each row to its white vector, carrying labels along."""
    if fset.d != model.d:
        raise ValueError(f"dimension mismatch: set d={fset.d}, model d={model.d}")
    centered = fset.matrix.astype(np.float64) - model.mean
    return WhiteSet(
        vectors=centered @ model.whitening.T,
        labels=np.array([s.label == "anomalous" for s in fset.samples]),
        anomaly_types=[s.anomaly_type for s in fset.samples],
    )


def mahalanobis(model: GaussianModel, x: np.ndarray) -> float:
    """Mahalanobis distance of ``x`` from the fitted mean.

    Computed through the whitening map, which is numerically stabler than
    solving against the covariance directly.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.d,):
        raise ValueError(f"expected shape ({model.d},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite input")
    return float(np.linalg.norm(model.whitening @ (x - model.mean)))


def subset_score(w: np.ndarray, subset: Sequence[int]) -> float:
    """Euclidean norm of the white-vector entries at the subset's indices."""
    w = np.asarray(w, dtype=np.float64)
    idx = validate_subset(subset, w.shape[-1])
    return float(np.linalg.norm(w[idx]))


def validate_subset(subset: Sequence[int], d: int) -> list[int]:
    idx = [int(i) for i in subset]
    if len(set(idx)) != len(idx):
        raise ValueError("duplicate component index")
    for i in idx:
        if not 0 <= i < d:
            raise ValueError(f"component index {i} out of range [0, {d})")
    return idx


def save_model(model: GaussianModel, path) -> None:
    """Serialize to the GMD1 binary container (all fields float64 LE)."""
    d = model.d
    parts = [
        MODEL_MAGIC,
        struct.pack("<II", MODEL_VERSION, d),
        np.ascontiguousarray(model.mean, dtype="<f8").tobytes(),
        np.ascontiguousarray(model.eigenvalues, dtype="<f8").tobytes(),
        np.ascontiguousarray(model.eigenvectors, dtype="<f8").tobytes(),
        np.ascontiguousarray(model.covariance, dtype="<f8").tobytes(),
        struct.pack("<d", model.shrinkage),
    ]
    Path(path).write_bytes(b"".join(parts))


def load_model(path) -> GaussianModel:
    raw = Path(path).read_bytes()
    if raw[:4] != MODEL_MAGIC:
        raise ValueError(f"bad model magic {raw[:4]!r}")
    version, d = struct.unpack_from("<II", raw, 4)
    if version != MODEL_VERSION:
        raise ValueError(f"unsupported model version {version}")
    expected = 12 + 8 * (d + d + d * d + d * d + 1)
    if len(raw) != expected:
        raise ValueError(
            f"model file length mismatch: {len(raw)} bytes, expected {expected}"
        )
    offset = 12
    def block(count):
        nonlocal offset
        arr = np.frombuffer(raw, dtype="<f8", count=count, offset=offset).copy()
        offset += 8 * count
        return arr

    mean = block(d)
    eigenvalues = block(d)
    eigenvectors = block(d * d).reshape(d, d)
    covariance = block(d * d).reshape(d, d)
    (shrinkage,) = struct.unpack_from("<d", raw, offset)
    return GaussianModel(
        mean=mean,
        covariance=covariance,
        shrinkage=shrinkage,
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        whitening=_whitening_matrix(eigenvalues, eigenvectors),
    )
