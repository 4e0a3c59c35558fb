"""Gaussian anomaly detection with greedy eigencomponent selection."""

from eigengreedy.store import (
    FeatureSet,
    SampleMeta,
    StoreFormatError,
    filter_samples,
    read_feature_set,
    write_feature_set,
)
from eigengreedy.gaussian import (
    GaussianModel,
    WhiteSet,
    fit_covariance_ledoit_wolf,
    fit_gaussian,
    fit_mean,
    load_model,
    mahalanobis,
    save_model,
    subset_score,
    whiten,
)
from eigengreedy.metrics import auroc
from eigengreedy.selection import (
    Curve,
    SelectionStep,
    SelectionTrace,
    curve,
    evaluate_subset,
    greedy_bottom_up,
    greedy_top_down,
    npca_subset,
    pca_subset,
    range_subset,
)
from eigengreedy.experiments import (
    ExperimentConfig,
    SplitSpec,
    run_experiment,
    split_exp1,
    split_exp2,
    split_exp3,
)
from eigengreedy.analysis import (
    RegimeSegmentation,
    SimulationResult,
    canonical_replacement_starts,
    k_at_max_auroc,
    npca_reference_order,
    pca_reference_order,
    segment_regimes,
    selection_order,
    simulate_replacement,
)

__version__ = "0.1.0"
