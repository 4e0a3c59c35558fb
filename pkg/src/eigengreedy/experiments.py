"""Greedy/eval test-set splits and end-to-end experiment orchestration.

Three split protocols share one shape: both sides always contain every
normal test row, and differ only in how the anomalous rows are divided.

* exp1: greedy and eval are both the full test set (intentional overfit).
* exp2: greedy gets one anomaly type, eval gets all the others.
* exp3: greedy gets a fixed anomalous budget sampled evenly across types;
  eval gets the rest. Repeated over seeds.
"""

from __future__ import annotations

import hashlib
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from eigengreedy.gaussian import WhiteSet, fit_gaussian, whiten
from eigengreedy.selection import CURVE_METHODS, Curve, curve
from eigengreedy.store import FeatureSet

DEFAULT_SEEDS = (0, 1, 2, 3, 4)


@dataclass(frozen=True)
class SplitSpec:
    """Row-index partition of a test set into greedy and eval sides."""

    greedy_rows: tuple[int, ...]
    eval_rows: tuple[int, ...]
    descriptor: str


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str  # exp1 | exp2 | exp3
    category: str
    node: str
    methods: tuple[str, ...]
    n_min: int | None = None
    seeds: tuple[int, ...] = field(default=DEFAULT_SEEDS)

    def __post_init__(self):
        if self.kind not in ("exp1", "exp2", "exp3"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        for m in self.methods:
            if m not in CURVE_METHODS:
                raise ValueError(f"unknown method {m!r}")
        if self.kind == "exp3":
            if self.n_min is None or self.n_min < 1:
                raise ValueError("exp3 requires n_min >= 1")
            if not self.seeds:
                raise ValueError("exp3 requires at least one seed")


def _class_rows(test: FeatureSet) -> tuple[list[int], list[int]]:
    normal = [i for i, s in enumerate(test.samples) if s.label == "normal"]
    anom = [i for i, s in enumerate(test.samples) if s.label == "anomalous"]
    if not normal or not anom:
        raise ValueError("test set must contain both classes")
    return normal, anom


def split_exp1(test: FeatureSet) -> SplitSpec:
    """Greedy side = eval side = the full test set."""
    _class_rows(test)
    rows = tuple(range(test.n))
    return SplitSpec(greedy_rows=rows, eval_rows=rows, descriptor="exp1")


def split_exp2(test: FeatureSet, anomaly_type: str) -> SplitSpec:
    """Greedy anomalies of one type; eval anomalies of every other type."""
    normal, anom = _class_rows(test)
    types = test.anomaly_types()
    if len(types) < 2:
        raise ValueError(
            f"category {test.category!r} only has one anomaly type; "
            "a per-type split needs at least two"
        )
    if anomaly_type not in types:
        raise ValueError(f"unknown anomaly type {anomaly_type!r}")
    greedy_anom = [
        i for i in anom if test.samples[i].anomaly_type == anomaly_type
    ]
    eval_anom = [
        i for i in anom if test.samples[i].anomaly_type != anomaly_type
    ]
    return SplitSpec(
        greedy_rows=tuple(sorted(normal + greedy_anom)),
        eval_rows=tuple(sorted(normal + eval_anom)),
        descriptor=f"exp2_{anomaly_type}",
    )


def _type_rng(seed: int, category: str, anomaly_type: str) -> np.random.Generator:
    # Hash-derived sub-stream so each type's draw is independent of the
    # presence of other types, and stable across processes and platforms.
    digest = hashlib.sha256(
        f"{seed}|{category}|{anomaly_type}".encode()
    ).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


def split_exp3(test: FeatureSet, n_min: int, seed: int) -> SplitSpec:
    """Fixed anomalous budget, sampled evenly across anomaly types.

    Each type contributes ceil(n_min / T) rows, drawn without replacement
    from a deterministic per-(seed, category, type) stream.
    """
    if n_min < 1:
        raise ValueError("n_min must be >= 1")
    normal, anom = _class_rows(test)
    if n_min > len(anom):
        raise ValueError(
            f"n_min={n_min} exceeds total anomalous count {len(anom)}"
        )
    types = test.anomaly_types()
    per_type = math.ceil(n_min / len(types))
    greedy_anom: list[int] = []
    for t in types:
        rows = [i for i in anom if test.samples[i].anomaly_type == t]
        if len(rows) < per_type:
            raise ValueError(
                f"anomaly type {t!r} has {len(rows)} images, "
                f"fewer than the {per_type} required per type"
            )
        rng = _type_rng(seed, test.category, t)
        picked = rng.choice(len(rows), size=per_type, replace=False)
        greedy_anom.extend(rows[i] for i in sorted(picked))
    eval_anom = [i for i in anom if i not in set(greedy_anom)]
    if not eval_anom:
        raise ValueError("no anomalous rows left for the eval side")
    return SplitSpec(
        greedy_rows=tuple(sorted(normal + greedy_anom)),
        eval_rows=tuple(sorted(normal + eval_anom)),
        descriptor=f"exp3_seed{seed}",
    )


def config_splits(test: FeatureSet, config: ExperimentConfig) -> list[SplitSpec]:
    if config.kind == "exp1":
        return [split_exp1(test)]
    if config.kind == "exp2":
        return [split_exp2(test, t) for t in test.anomaly_types()]
    return [split_exp3(test, config.n_min, s) for s in config.seeds]


def worker_count() -> int:
    """Worker cap from EIGENGREEDY_THREADS (0 or unset = auto)."""
    raw = os.environ.get("EIGENGREEDY_THREADS", "0")
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"EIGENGREEDY_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise ValueError("EIGENGREEDY_THREADS must be >= 0")
    return value if value > 0 else (os.cpu_count() or 1)


def run_experiment(
    train: FeatureSet, test: FeatureSet, config: ExperimentConfig
) -> list[tuple[SplitSpec, dict[str, Curve]]]:
    """Fit once, whiten once, then run every (split, method) curve.

    Results are ordered by split then method, independent of the worker
    pool, so serialized output is reproducible byte-for-byte.
    """
    if train.d != test.d:
        raise ValueError("train/test dimension mismatch")
    model = fit_gaussian(train)
    white = whiten(model, test)
    splits = config_splits(test, config)

    jobs = []
    for split in splits:
        greedy_ws = white.take(split.greedy_rows)
        eval_ws = white.take(split.eval_rows)
        for method in config.methods:
            jobs.append((split, method, greedy_ws, eval_ws))

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        curves = list(
            pool.map(lambda j: curve(j[2], j[3], j[1]), jobs)
        )

    results: list[tuple[SplitSpec, dict[str, Curve]]] = []
    for split in splits:
        per_method: dict[str, Curve] = {}
        for (s, method, _, _), c in zip(jobs, curves):
            if s is split:
                per_method[method] = c
        results.append((split, per_method))
    return results
