"""Structured low-rank matrix recovery with a modal-regression loss for
cross-view classification."""
from .dataset import MultiViewDataset
from .evaluation import (EvalReport, knn1_classify, make_synthetic_crossview,
                         pairwise_eval, project)
from .solver import FitResult, ProjectionModel, SolverConfig, fit

__all__ = [
    "EvalReport", "FitResult", "MultiViewDataset", "ProjectionModel", "SolverConfig",
    "fit", "knn1_classify", "make_synthetic_crossview", "pairwise_eval", "project",
]
