from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError
from .linalg import as_matrix


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray        # (d,)
    components: np.ndarray  # (d, q), orthonormal columns

    @property
    def q(self):
        return self.components.shape[1]

    @property
    def d(self):
        return self.components.shape[0]


def pca_fit(X, q) -> PcaModel:
    """Top-``q`` principal directions of the columns of ``X`` (d x m).

    Each component is sign-flipped so its largest-magnitude entry is positive.
    """
    X = as_matrix(X, "X")
    d, m = X.shape
    if not (isinstance(q, (int, np.integer)) and 1 <= q <= min(d, m)):
        raise ConfigError(f"PCA dimension must be in 1..{min(d, m)}, got {q}")
    mean = X.mean(axis=1)
    U, s, _ = np.linalg.svd(X - mean[:, None], full_matrices=False)
    comps = U[:, :q].copy()
    idx = np.argmax(np.abs(comps), axis=0)
    signs = np.sign(comps[idx, np.arange(q)])
    signs[signs == 0] = 1.0
    comps *= signs
    return PcaModel(mean=mean, components=comps)


def pca_apply(model: PcaModel, X) -> np.ndarray:
    X = as_matrix(X, "X")
    if X.shape[0] != model.d:
        raise ShapeError(f"PCA expects {model.d} rows, got {X.shape[0]}")
    return model.components.T @ (X - model.mean[:, None])


def pca_reconstruct(model: PcaModel, scores) -> np.ndarray:
    return model.components @ np.asarray(scores) + model.mean[:, None]
