from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, ValidationError
from .linalg import as_matrix


@dataclass
class MultiViewDataset:
    """Per-view feature matrices (d x m_v) and 1-based class labels.

    ``labels`` is aligned with the column concatenation of ``views`` in order.
    """

    views: list
    labels: np.ndarray
    view_ids: list = field(default_factory=list)
    n_classes: int | None = None

    def __post_init__(self):
        self.views = [as_matrix(V, f"view {i}") for i, V in enumerate(self.views)]
        if len(self.views) < 2:
            raise ValidationError(f"need at least 2 views, got {len(self.views)}")
        d = self.views[0].shape[0]
        for i, V in enumerate(self.views):
            if V.shape[0] != d:
                name = self.view_ids[i] if i < len(self.view_ids) else i
                raise ShapeError(
                    f"view {name!r} has {V.shape[0]} rows, expected {d}"
                )
        if not self.view_ids:
            self.view_ids = [f"view{i + 1}" for i in range(len(self.views))]
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or not np.issubdtype(labels.dtype, np.integer):
            if labels.ndim == 1 and np.all(labels == np.round(labels)):
                labels = labels.astype(np.int64)
            else:
                raise ValidationError("labels must be a 1-D integer sequence")
        self.labels = labels.astype(np.int64)
        if self.labels.size != self.m:
            raise ValidationError(
                f"{self.labels.size} labels for {self.m} samples"
            )
        if self.n_classes is None:
            self.n_classes = int(self.labels.max())
        if self.labels.min() < 1 or self.labels.max() > self.n_classes:
            raise ValidationError(f"labels must lie in 1..{self.n_classes}")

    @property
    def k(self):
        return len(self.views)

    @property
    def d(self):
        return self.views[0].shape[0]

    @property
    def sizes(self):
        return [V.shape[1] for V in self.views]

    @property
    def m(self):
        return sum(self.sizes)

    @property
    def C(self):
        return self.n_classes

    @property
    def X(self):
        return np.hstack(self.views)

    def view_labels(self, v):
        start = sum(self.sizes[:v])
        return self.labels[start:start + self.sizes[v]]

    def split_columns(self, X):
        """Split a matrix with m columns back into per-view blocks."""
        bounds = np.cumsum(self.sizes)[:-1]
        return np.split(X, bounds, axis=1)

    def with_views(self, views):
        return MultiViewDataset(list(views), self.labels.copy(),
                                list(self.view_ids), self.n_classes)
