import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigengreedy.metrics import auroc
from tests.conftest import auroc_pairwise


def test_perfect_separation():
    assert auroc([0, 1, 2, 3], [False, False, True, True]) == 1.0


def test_all_ties():
    assert auroc([5.0] * 6, [True, False, True, False, False, True]) == 0.5


def test_worked_example():
    # normals {0, 1}, anomalous {0.5, 2}: 3 of 4 pairs won
    assert auroc([0, 1, 0.5, 2], [False, False, True, True]) == 0.75


def test_label_swap_complement(rng):
    scores = rng.standard_normal(50)
    labels = rng.random(50) < 0.4
    if not labels.any() or labels.all():
        labels[0] = ~labels[0]
    assert auroc(scores, labels) == pytest.approx(
        1.0 - auroc(scores, ~labels), abs=1e-15
    )


def test_monotone_transform_invariance(rng):
    scores = rng.standard_normal(80)
    labels = np.r_[np.zeros(40, bool), np.ones(40, bool)]
    base = auroc(scores, labels)
    assert auroc(np.exp(scores), labels) == base
    assert auroc(3.0 * scores + 7.0, labels) == base


def test_single_class_rejected():
    with pytest.raises(ValueError, match="both classes"):
        auroc([1.0, 2.0], [True, True])


def test_non_finite_rejected():
    with pytest.raises(ValueError, match="non-finite"):
        auroc([1.0, np.nan], [True, False])


def test_matches_pairwise_oracle_random(rng):
    for _ in range(50):
        n = int(rng.integers(2, 200))
        # discretized scores force plenty of ties
        scores = np.round(rng.standard_normal(n), 1)
        labels = rng.random(n) < rng.uniform(0.1, 0.9)
        if not labels.any() or labels.all():
            labels[0] = ~labels[0]
        assert auroc(scores, labels) == pytest.approx(
            auroc_pairwise(scores, labels), abs=1e-15
        )


@settings(max_examples=100, deadline=None)
@given(
    data=st.lists(
        st.tuples(st.integers(-5, 5), st.booleans()), min_size=2, max_size=40
    )
)
def test_matches_pairwise_oracle_property(data):
    scores = np.array([s for s, _ in data], dtype=float)
    labels = np.array([a for _, a in data])
    if not labels.any() or labels.all():
        labels[0] = ~labels[0]
    assert auroc(scores, labels) == pytest.approx(
        auroc_pairwise(scores, labels), abs=1e-12
    )
