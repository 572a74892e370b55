from ._core import (
    Error,
    Model,
    auc,
    fit,
    generate_planted,
    generalization_gap,
    load_model,
    min_sample_size,
    model_from_json,
    proportion_ztest,
    roc_curve,
    sample_size_rhs,
    solve_exact,
    train_constrained,
    vc_bound,
    __version__,
)

__all__ = [
    "Error",
    "Model",
    "auc",
    "fit",
    "generate_planted",
    "generalization_gap",
    "load_model",
    "min_sample_size",
    "model_from_json",
    "proportion_ztest",
    "roc_curve",
    "sample_size_rhs",
    "solve_exact",
    "train_constrained",
    "vc_bound",
]
