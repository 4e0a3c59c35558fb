"""Post-hoc analyses of k-vs-AUROC curves and greedy traces.

Covers the rise/plateau/drop segmentation of a curve, the smallest k at its
maximal AUROC, the step-vs-component ordering export, and the synthetic
replacement simulations that probe whether late-selected components carry
redundant or merely noisy signal.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from eigengreedy.gaussian import WhiteSet
from eigengreedy.metrics import auroc
from eigengreedy.selection import Curve, SelectionTrace

DEFAULT_REGIME_TOLERANCE = 0.005


@dataclass(frozen=True)
class RegimeSegmentation:
    """Boundaries of the rise / plateau / drop phases of a curve.

    The plateau is the maximal contiguous band of k values staying within
    ``tolerance`` of the maximum AUROC that contains the earliest maximum;
    ``rise_end`` is its first k, ``plateau_end`` its last, and everything
    after is the drop.
    """

    rise_end: int
    plateau_end: int
    max_auroc: float
    tolerance: float


@dataclass(frozen=True)
class SimulationResult:
    """Seed-aggregated AUROC of replacing trailing components with
    synthetic axes, per simulated size k."""

    k_prime: int
    signal: str  # noise | redundant
    k_values: np.ndarray
    auroc_min: np.ndarray
    auroc_mean: np.ndarray
    auroc_max: np.ndarray
    n_seeds: int


def segment_regimes(
    c: Curve, tolerance: float = DEFAULT_REGIME_TOLERANCE
) -> RegimeSegmentation:
    values = np.asarray(c.auroc_values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("empty curve")
    max_auroc = float(values.max())
    k_star = int(np.argmax(values))  # earliest maximum, 0-based
    in_band = values >= max_auroc - tolerance
    start = k_star
    while start > 0 and in_band[start - 1]:
        start -= 1
    end = k_star
    while end + 1 < values.size and in_band[end + 1]:
        end += 1
    return RegimeSegmentation(
        rise_end=start + 1,
        plateau_end=end + 1,
        max_auroc=max_auroc,
        tolerance=tolerance,
    )


def k_at_max_auroc(c: Curve) -> tuple[int, float]:
    """Smallest k attaining the maximal eval AUROC."""
    values = np.asarray(c.auroc_values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("empty curve")
    idx = int(np.argmax(values))
    return idx + 1, float(values[idx])


def canonical_replacement_starts(seg: RegimeSegmentation) -> tuple[int, int]:
    """The two conventional replacement starts: plateau first and last k."""
    return seg.rise_end, seg.plateau_end


def selection_order(trace: SelectionTrace) -> list[tuple[int, int]]:
    """(step index, component index) pairs of a greedy trace."""
    return [(s.step, s.component) for s in trace.steps]


def pca_reference_order(d: int) -> list[tuple[int, int]]:
    """Slope -1 reference line: largest-variance component first."""
    return [(step, d - step) for step in range(1, d + 1)]


def npca_reference_order(d: int) -> list[tuple[int, int]]:
    """Slope +1 reference line: smallest-variance component first."""
    return [(step, step - 1) for step in range(1, d + 1)]


def simulate_replacement(
    trace: SelectionTrace,
    test_white: WhiteSet,
    k_prime: int,
    signal: str,
    n_seeds: int,
    master_seed: int = 0,
) -> SimulationResult:
    """Replace components from position ``k_prime`` onward with synthetic axes.

    The first ``k_prime - 1`` components of the trace order are retained.
    For each simulated size k in ``k_prime..d``, ``k - k_prime + 1``
    synthetic axes fill the remaining positions: independent standard
    normals ("noise") or random linear combinations of the retained entries
    ("redundant", Gaussian projection with 1/sqrt(fan-in) coefficients).
    Each synthetic axis is rescaled so its empirical test-set standard
    deviation matches the original component at the same position. Scores
    are subset norms over retained + synthetic entries; AUROC is aggregated
    as min/mean/max across seeds.
    """
    if signal not in ("noise", "redundant"):
        raise ValueError(f"unknown signal {signal!r}")
    d = test_white.d
    if len(trace.steps) != d:
        raise ValueError("trace must cover all components")
    if not 1 <= k_prime <= d:
        raise ValueError(f"k_prime must be in [1, {d}], got {k_prime}")
    if signal == "redundant" and k_prime < 2:
        raise ValueError("redundant signal needs at least one retained axis")
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    if not test_white.has_both_classes():
        raise ValueError("test set must contain both classes")

    order = trace.components()
    retained = test_white.vectors[:, order[: k_prime - 1]]
    base_sumsq = (retained**2).sum(axis=1)
    labels = test_white.labels
    n = test_white.n
    n_syn = d - k_prime + 1
    target_stds = test_white.vectors[:, order[k_prime - 1 :]].std(axis=0)

    k_values = np.arange(k_prime, d + 1)
    per_seed = np.empty((n_seeds, n_syn))
    root = np.random.SeedSequence(master_seed)
    for seed_idx, child in enumerate(root.spawn(n_seeds)):
        rng = np.random.default_rng(child)
        if signal == "noise":
            synth = rng.standard_normal((n, n_syn))
        else:
            coeff = rng.standard_normal((k_prime - 1, n_syn)) / np.sqrt(
                k_prime - 1
            )
            synth = retained @ coeff
        stds = synth.std(axis=0)
        if np.any(stds == 0.0):
            raise ValueError("degenerate synthetic axis with zero spread")
        synth = synth * (target_stds / stds)
        cum = base_sumsq[:, np.newaxis] + np.cumsum(synth**2, axis=1)
        per_seed[seed_idx] = [
            auroc(cum[:, i], labels) for i in range(n_syn)
        ]

    return SimulationResult(
        k_prime=k_prime,
        signal=signal,
        k_values=k_values,
        auroc_min=per_seed.min(axis=0),
        auroc_mean=per_seed.mean(axis=0),
        auroc_max=per_seed.max(axis=0),
        n_seeds=n_seeds,
    )


def retained_only_auroc(
    trace: SelectionTrace, test_white: WhiteSet, k_prime: int
) -> float:
    """AUROC of the retained prefix alone (no synthetic axes)."""
    order = trace.components()[: k_prime - 1]
    if not order:
        raise ValueError("k_prime=1 retains no components")
    sumsq = (test_white.vectors[:, order] ** 2).sum(axis=1)
    return auroc(sumsq, test_white.labels)


SIMULATION_CSV_COLUMNS = (
    "signal",
    "k_prime",
    "seed_count",
    "k",
    "auroc_min",
    "auroc_mean",
    "auroc_max",
)


def write_simulation_csv(result: SimulationResult, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(SIMULATION_CSV_COLUMNS)
        for i, k in enumerate(result.k_values):
            writer.writerow(
                [
                    result.signal,
                    result.k_prime,
                    result.n_seeds,
                    int(k),
                    repr(float(result.auroc_min[i])),
                    repr(float(result.auroc_mean[i])),
                    repr(float(result.auroc_max[i])),
                ]
            )
