"""Algorithm selection: per-solver classifiers over the projected space."""

from .model import (
    DEFAULT_GRID,
    PredictionReport,
    PriorClassifier,
    SelectorModel,
    evaluate_topk,
    predict,
    read_selector_model,
    train,
    write_selector_model,
)
from .svm import SvmClassifier, balanced_weights, rbf_kernel, train_svm

__all__ = [
    "DEFAULT_GRID",
    "PredictionReport",
    "PriorClassifier",
    "SelectorModel",
    "SvmClassifier",
    "balanced_weights",
    "evaluate_topk",
    "predict",
    "rbf_kernel",
    "read_selector_model",
    "train",
    "train_svm",
    "write_selector_model",
]
