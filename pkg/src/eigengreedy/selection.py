"""Greedy eigencomponent search and truncation baselines.

The search operates entirely on white vectors: a component subset scores a
sample by the Euclidean norm of the selected white entries, so candidate
evaluation only needs running sums of squared entries. AUROC is invariant
under the square root, so candidates are ranked on squared scores directly.

All argmax ties break toward the smallest component index, making every
trace deterministic and platform-independent.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from eigengreedy.gaussian import WhiteSet, validate_subset
from eigengreedy.metrics import auroc

GREEDY_METHODS = ("bottom_up", "top_down")
BASELINE_METHODS = ("pca", "npca")
CURVE_METHODS = GREEDY_METHODS + BASELINE_METHODS


class SelectionStep(NamedTuple):
    step: int  # 1-based
    component: int
    greedy_auroc: float


@dataclass(frozen=True)
class SelectionTrace:
    """Ordered record of a greedy search.

    For ``bottom_up`` the steps list the insertion order; for ``top_down``
    the removal order.
    """

    mode: str
    steps: list[SelectionStep]
    d: int

    def components(self) -> list[int]:
        return [s.component for s in self.steps]


@dataclass
class Curve:
    """Per-k AUROC arrays for one selection method, k = 1..d.

    ``greedy_auroc_values`` is None for the unsupervised baselines.
    ``components`` holds, per k, the component added (bottom-up) or removed
    in the step that produced the k-sized subset (top-down; None at k = d);
    None throughout for the baselines.
    """

    method: str
    k_values: np.ndarray
    auroc_values: np.ndarray
    greedy_auroc_values: np.ndarray | None = None
    components: list[int | None] | None = None

    @property
    def d(self) -> int:
        return int(self.k_values[-1])


def _check_greedy_set(white: WhiteSet, k: int):
    if not 1 <= k <= white.d:
        raise ValueError(f"k must be in [1, {white.d}], got {k}")
    if not white.has_both_classes():
        raise ValueError("greedy set must contain both classes")


def _argmax_smallest_index(candidates: Sequence[int], aurocs: np.ndarray) -> int:
    """Position of the best candidate; exact ties go to the smallest index.

    Candidates are pre-sorted ascending, so the first strict maximum wins
    regardless of how (or in what order) the scores were computed.
    """
    best = 0
    for i in range(1, len(candidates)):
        if aurocs[i] > aurocs[best]:
            best = i
    return best


def greedy_bottom_up(greedy_set: WhiteSet, k: int) -> SelectionTrace:
    """Forward selection: grow from the empty set, adding the component
    whose inclusion maximizes greedy-set AUROC at each step."""
    _check_greedy_set(greedy_set, k)
    sq = greedy_set.vectors**2
    labels = greedy_set.labels
    sumsq = np.zeros(greedy_set.n)
    remaining = list(range(greedy_set.d))
    steps: list[SelectionStep] = []
    for step in range(1, k + 1):
        cand_aurocs = np.array(
            [auroc(sumsq + sq[:, j], labels) for j in remaining]
        )
        best = _argmax_smallest_index(remaining, cand_aurocs)
        chosen = remaining.pop(best)
        sumsq = sumsq + sq[:, chosen]
        steps.append(SelectionStep(step, chosen, float(cand_aurocs[best])))
    return SelectionTrace(mode="bottom_up", steps=steps, d=greedy_set.d)


def greedy_top_down(greedy_set: WhiteSet, k: int) -> SelectionTrace:
    """Backward elimination: start from all components, removing the one
    whose removal maximizes greedy-set AUROC, until k remain."""
    _check_greedy_set(greedy_set, k)
    sq = greedy_set.vectors**2
    labels = greedy_set.labels
    sumsq = sq.sum(axis=1)
    in_set = list(range(greedy_set.d))
    steps: list[SelectionStep] = []
    step = 0
    while len(in_set) > k:
        step += 1
        cand_aurocs = np.array(
            [auroc(sumsq - sq[:, j], labels) for j in in_set]
        )
        best = _argmax_smallest_index(in_set, cand_aurocs)
        removed = in_set.pop(best)
        sumsq = sumsq - sq[:, removed]
        steps.append(SelectionStep(step, removed, float(cand_aurocs[best])))
    return SelectionTrace(mode="top_down", steps=steps, d=greedy_set.d)


def npca_subset(d: int, k: int) -> list[int]:
    """First k components: the smallest-variance axes under ascending order."""
    if not 1 <= k <= d:
        raise ValueError(f"k must be in [1, {d}], got {k}")
    return list(range(k))


def pca_subset(d: int, k: int) -> list[int]:
    """Last k components: the largest-variance axes under ascending order."""
    if not 1 <= k <= d:
        raise ValueError(f"k must be in [1, {d}], got {k}")
    return list(range(d - k, d))


def range_subset(d: int, lo: int, hi: int) -> list[int]:
    """Contiguous slice [lo, hi) of the ascending component order."""
    if not (0 <= lo < hi <= d):
        raise ValueError(f"invalid slice [{lo}, {hi}) for d={d}")
    return list(range(lo, hi))


def evaluate_subset(white: WhiteSet, subset: Sequence[int]) -> float:
    """AUROC of the subset-norm score on a labeled white set."""
    if not white.has_both_classes():
        raise ValueError("evaluation set must contain both classes")
    idx = validate_subset(subset, white.d)
    return auroc((white.vectors[:, idx] ** 2).sum(axis=1), white.labels)


def _eval_aurocs_for_order(eval_set: WhiteSet, order: Sequence[int]) -> np.ndarray:
    """Eval AUROC of every prefix of a component order, via cumulative sums."""
    cum = np.cumsum(eval_set.vectors[:, list(order)] ** 2, axis=1)
    return np.array(
        [auroc(cum[:, i], eval_set.labels) for i in range(len(order))]
    )


def curve(greedy_set: WhiteSet, eval_set: WhiteSet, method: str) -> Curve:
    """k-vs-AUROC curve of one method over k = 1..d.

    Greedy methods run their full trace once on the greedy set and reuse
    its prefixes (bottom-up) or removal complements (top-down); the eval
    set is never consulted during the search.
    """
    if greedy_set.d != eval_set.d:
        raise ValueError("greedy and eval sets differ in dimension")
    if not eval_set.has_both_classes():
        raise ValueError("eval set must contain both classes")
    d = greedy_set.d
    k_values = np.arange(1, d + 1)

    if method == "bottom_up":
        trace = greedy_bottom_up(greedy_set, d)
        order = trace.components()
        return Curve(
            method=method,
            k_values=k_values,
            auroc_values=_eval_aurocs_for_order(eval_set, order),
            greedy_auroc_values=np.array([s.greedy_auroc for s in trace.steps]),
            components=list(order),
        )
    if method == "top_down":
        trace = greedy_top_down(greedy_set, 1)
        removed = trace.components()
        # Subset at size k = all components minus the first d - k removals.
        full_greedy = auroc(
            (greedy_set.vectors**2).sum(axis=1), greedy_set.labels
        )
        greedy_vals = np.empty(d)
        greedy_vals[d - 1] = full_greedy
        for s in trace.steps:
            greedy_vals[d - s.step - 1] = s.greedy_auroc
        eval_sumsq = (eval_set.vectors**2).sum(axis=1)
        eval_vals = np.empty(d)
        eval_vals[d - 1] = auroc(eval_sumsq, eval_set.labels)
        for s in trace.steps:
            eval_sumsq = eval_sumsq - eval_set.vectors[:, s.component] ** 2
            eval_vals[d - s.step - 1] = auroc(eval_sumsq, eval_set.labels)
        components: list[int | None] = [None] * d
        for s in trace.steps:
            components[d - s.step - 1] = s.component
        return Curve(
            method=method,
            k_values=k_values,
            auroc_values=eval_vals,
            greedy_auroc_values=greedy_vals,
            components=components,
        )
    if method == "npca":
        order = list(range(d))
    elif method == "pca":
        order = list(range(d - 1, -1, -1))
    else:
        raise ValueError(f"unknown curve method {method!r}")
    return Curve(
        method=method,
        k_values=k_values,
        auroc_values=_eval_aurocs_for_order(eval_set, order),
    )


# --- serialization ---------------------------------------------------------

def trace_to_json(trace: SelectionTrace) -> dict:
    return {
        "mode": trace.mode,
        "d": trace.d,
        "steps": [
            {"step": s.step, "component": s.component, "greedy_auroc": s.greedy_auroc}
            for s in trace.steps
        ],
    }


def trace_from_json(obj: dict) -> SelectionTrace:
    return SelectionTrace(
        mode=obj["mode"],
        d=obj["d"],
        steps=[
            SelectionStep(s["step"], s["component"], s["greedy_auroc"])
            for s in obj["steps"]
        ],
    )


def save_trace(trace: SelectionTrace, path) -> None:
    with open(path, "w") as f:
        json.dump(trace_to_json(trace), f, indent=1)
        f.write("\n")


def load_trace(path) -> SelectionTrace:
    with open(path) as f:
        return trace_from_json(json.load(f))


CURVE_CSV_COLUMNS = (
    "method",
    "k",
    "auroc_eval",
    "auroc_greedy",
    "component_added_or_removed",
)


def curve_csv_rows(c: Curve) -> list[dict]:
    rows = []
    for i, k in enumerate(c.k_values):
        greedy = "" if c.greedy_auroc_values is None else repr(
            float(c.greedy_auroc_values[i])
        )
        comp = ""
        if c.components is not None and c.components[i] is not None:
            comp = str(c.components[i])
        rows.append(
            {
                "method": c.method,
                "k": str(int(k)),
                "auroc_eval": repr(float(c.auroc_values[i])),
                "auroc_greedy": greedy,
                "component_added_or_removed": comp,
            }
        )
    return rows


def write_curves_csv(curves: Sequence[Curve], path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CURVE_CSV_COLUMNS)
        writer.writeheader()
        for c in curves:
            writer.writerows(curve_csv_rows(c))


def read_curves_csv(path) -> list[Curve]:
    """Rebuild curves from a CSV written by :func:`write_curves_csv`."""
    by_method: dict[str, list[dict]] = {}
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            by_method.setdefault(row["method"], []).append(row)
    curves = []
    for method, rows in by_method.items():
        rows.sort(key=lambda r: int(r["k"]))
        k_values = np.array([int(r["k"]) for r in rows])
        auroc_values = np.array([float(r["auroc_eval"]) for r in rows])
        has_greedy = any(r["auroc_greedy"] != "" for r in rows)
        greedy = (
            np.array([float(r["auroc_greedy"]) for r in rows])
            if has_greedy
            else None
        )
        components: list[int | None] | None = None
        if any(r["component_added_or_removed"] != "" for r in rows):
            components = [
                int(r["component_added_or_removed"])
                if r["component_added_or_removed"] != ""
                else None
                for r in rows
            ]
        curves.append(
            Curve(
                method=method,
                k_values=k_values,
                auroc_values=auroc_values,
                greedy_auroc_values=greedy,
                components=components,
            )
        )
    return curves


def curve_to_json(c: Curve) -> dict:
    obj: dict = {
        "method": c.method,
        "k_values": [int(k) for k in c.k_values],
        "auroc_values": [float(v) for v in c.auroc_values],
    }
    if c.greedy_auroc_values is not None:
        obj["greedy_auroc_values"] = [float(v) for v in c.greedy_auroc_values]
    if c.components is not None:
        obj["components"] = list(c.components)
    return obj
