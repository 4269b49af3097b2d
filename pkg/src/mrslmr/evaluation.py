"""Projection, 1-NN classification and the pairwise cross-view protocol."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .dataset import MultiViewDataset
from .errors import ShapeError, ValidationError
from .linalg import as_matrix
from .pca import pca_apply
from .solver import ProjectionModel, random_orthonormal


@dataclass(frozen=True)
class EvalReport:
    acc_matrix: np.ndarray  # [gallery view, probe view]
    macc: float
    counts: np.ndarray      # [gallery view, probe view] -> (n_gallery, n_probe)

    def to_dict(self):
        return {
            "acc_matrix": self.acc_matrix.tolist(),
            "macc": self.macc,
            "counts": self.counts.tolist(),
        }


def project(model: ProjectionModel, X) -> np.ndarray:
    X = as_matrix(X, "X")
    if X.shape[0] != model.d:
        raise ShapeError(f"model expects {model.d} rows, got {X.shape[0]}")
    if model.pca is not None:
        X = pca_apply(model.pca, X)
    return model.P.T @ X


def knn1_classify(gallery, gallery_labels, probe) -> np.ndarray:
    """Label of the Euclidean-nearest gallery column; ties go to the lowest index."""
    gallery = np.asarray(gallery, dtype=np.float64)
    probe = np.asarray(probe, dtype=np.float64)
    gallery_labels = np.asarray(gallery_labels)
    if gallery.ndim != 2 or gallery.shape[1] < 1:
        raise ValidationError("gallery must contain at least one sample")
    if gallery_labels.shape[0] != gallery.shape[1]:
        raise ValidationError("gallery labels do not match gallery size")
    if probe.shape[0] != gallery.shape[0]:
        raise ShapeError(f"probe dimension {probe.shape[0]} != gallery dimension {gallery.shape[0]}")
    if probe.shape[1] == 0:
        return gallery_labels[:0]
    D = cdist(probe.T, gallery.T, "sqeuclidean")
    return gallery_labels[np.argmin(D, axis=1)]


def accuracy(pred, truth) -> float:
    return float(np.mean(np.asarray(pred) == np.asarray(truth)))


def mean_accuracy(acc_matrix) -> float:
    return float(np.mean(acc_matrix))


def pairwise_accuracy(features, labels):
    """k x k accuracy matrix over per-view features; row = gallery, column = probe."""
    k = len(features)
    acc = np.zeros((k, k))
    counts = np.zeros((k, k, 2), dtype=np.int64)
    for v in range(k):
        for u in range(k):
            pred = knn1_classify(features[v], labels[v], features[u])
            acc[v, u] = accuracy(pred, labels[u])
            counts[v, u] = (features[v].shape[1], features[u].shape[1])
    return EvalReport(acc, mean_accuracy(acc), counts)


def pairwise_eval(model: ProjectionModel | None, test: MultiViewDataset) -> EvalReport:
    """Pairwise protocol on ``test``; ``model=None`` evaluates raw features."""
    for i, size in enumerate(test.sizes):
        if size == 0:
            raise ValidationError(f"view {test.view_ids[i]!r} has no samples")
    views = test.views if model is None else [project(model, V) for V in test.views]
    return pairwise_accuracy(views, [test.view_labels(v) for v in range(test.k)])


def _crossview_geometry(rng, classes, d, noise_std):
    """Class centroids at least ``10 * noise_std`` apart, rotation and shift."""
    centroids = rng.standard_normal((d, classes))
    gap = cdist(centroids.T, centroids.T)[np.triu_indices(classes, 1)].min()
    if gap < 10 * noise_std:
        centroids *= 10 * noise_std / gap
    R = random_orthonormal(d, d, rng.integers(2**63))
    bias = rng.standard_normal((d, 1))
    return centroids, R, bias


def make_synthetic_crossview(classes, per_class_per_view, d, noise_std, seed,
                             sample_seed=None) -> MultiViewDataset:
    """Two-view toy data: view 2 is a fixed random rotation plus shift of view 1.

    Class centroids, rotation and shift depend only on ``seed``. Sample noise
    comes from the same stream unless ``sample_seed`` is given, which lets a
    train and a test split share geometry.
    """
    if classes < 2 or per_class_per_view < 2 or d < classes:
        raise ValidationError("need classes >= 2, per_class_per_view >= 2 and d >= classes")
    if not noise_std >= 0:
        raise ValidationError("noise_std must be >= 0")
    rng = np.random.default_rng(seed)
    centroids, R, bias = _crossview_geometry(rng, classes, d, noise_std)
    srng = rng if sample_seed is None else np.random.default_rng([seed, sample_seed])
    means = np.repeat(centroids, per_class_per_view, axis=1)
    X1 = means + noise_std * srng.standard_normal(means.shape)
    X2 = R @ (means + noise_std * srng.standard_normal(means.shape)) + bias
    y = np.repeat(np.arange(1, classes + 1), per_class_per_view)
    return MultiViewDataset([X1, X2], np.concatenate([y, y]), ["view1", "view2"], classes)
