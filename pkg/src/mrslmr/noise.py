"""Seeded corruption models for robustness experiments.

All functions take raw pixel matrices with one vectorised image per column and
return a corrupted copy; the input is never modified.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import MultiViewDataset
from .errors import ValidationError

KINDS = ("gaussian_dbw", "random_pixels", "occlusion", "outliers")
PIXEL_RANGE = (0.0, 255.0)
OCCLUSION_GRAY = 127.5


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    magnitude: float
    seed: int = 0
    pixel_range: tuple = PIXEL_RANGE
    image_side: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"noise kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind in ("random_pixels", "outliers"):
            _check_ratio(self.magnitude)
        if self.kind == "occlusion" and self.image_side is None:
            raise ValidationError("occlusion needs image_side")
        lo, hi = self.pixel_range
        if not lo <= hi:
            raise ValidationError("pixel_range must satisfy low <= high")

    def to_dict(self):
        return {"kind": self.kind, "magnitude": self.magnitude, "seed": self.seed,
                "pixel_range": list(self.pixel_range), "image_side": self.image_side}


def _check_ratio(ratio):
    if not 0.0 <= ratio <= 1.0:
        raise ValidationError(f"ratio must lie in [0, 1], got {ratio}")


def add_gaussian_dbw(images, power_dbw, seed):
    """Add white Gaussian noise with variance ``10**(power_dbw/10)`` (no clipping).

    ``power_dbw = -inf`` leaves the images untouched.
    """
    images = np.array(images, dtype=np.float64)
    if power_dbw == -np.inf:
        return images
    if not np.isfinite(power_dbw):
        raise ValidationError(f"power must be finite or -inf, got {power_dbw}")
    std = np.sqrt(10.0 ** (power_dbw / 10.0))
    rng = np.random.default_rng(seed)
    return images + std * rng.standard_normal(images.shape)


def corrupt_random_pixels(images, ratio, seed, pixel_range=PIXEL_RANGE):
    """Replace ``round(ratio*d)`` random pixels per image with uniform values."""
    _check_ratio(ratio)
    out = np.array(images, dtype=np.float64)
    d, m = out.shape
    count = int(round(ratio * d))
    if count == 0:
        return out
    rng = np.random.default_rng(seed)
    lo, hi = pixel_range
    for j in range(m):
        idx = rng.choice(d, size=count, replace=False)
        out[idx, j] = rng.uniform(lo, hi, size=count)
    return out


def add_occlusion(images, image_side, patch_side, seed, fill=OCCLUSION_GRAY):
    """Paste a constant ``patch_side`` square at a random spot of each image.

    Images are ``image_side x image_side`` in row-major order.
    """
    out = np.array(images, dtype=np.float64)
    s, w = int(image_side), int(patch_side)
    if out.shape[0] != s * s:
        raise ValidationError(f"images have {out.shape[0]} pixels, expected {s}x{s}")
    if w < 0 or w > s:
        raise ValidationError(f"patch side {w} must lie in 0..{s}")
    if w == 0:
        return out
    rng = np.random.default_rng(seed)
    for j in range(out.shape[1]):
        r0, c0 = rng.integers(0, s - w + 1, size=2)
        img = out[:, j].reshape(s, s)
        img[r0:r0 + w, c0:c0 + w] = fill
    return out


def replace_outliers(dataset: MultiViewDataset, ratio, seed, pixel_range=PIXEL_RANGE):
    """Replace ``round(ratio*m)`` whole samples, drawn across all views, with noise.

    Labels are kept, so the replaced samples are pure feature outliers.
    """
    _check_ratio(ratio)
    X = dataset.X.copy()
    d, m = X.shape
    count = int(round(ratio * m))
    if count:
        rng = np.random.default_rng(seed)
        cols = np.sort(rng.choice(m, size=count, replace=False))
        X[:, cols] = rng.uniform(*pixel_range, size=(d, count))
    return dataset.with_views(dataset.split_columns(X))


def apply_noise(dataset: MultiViewDataset, spec: NoiseSpec) -> MultiViewDataset:
    """Apply one corruption to every view; per-view seeds are derived from spec.seed."""
    if spec.kind == "outliers":
        return replace_outliers(dataset, spec.magnitude, spec.seed, spec.pixel_range)
    views = []
    for v, V in enumerate(dataset.views):
        seed = [spec.seed, v]
        if spec.kind == "gaussian_dbw":
            views.append(add_gaussian_dbw(V, spec.magnitude, seed))
        elif spec.kind == "random_pixels":
            views.append(corrupt_random_pixels(V, spec.magnitude, seed, spec.pixel_range))
        else:
            patch = spec.magnitude
            if patch != int(patch):
                raise ValidationError(f"occlusion patch side must be an integer, got {patch}")
            views.append(add_occlusion(V, spec.image_side, int(patch), seed))
    return dataset.with_views(views)
