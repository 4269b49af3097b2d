"""Proximal operators and guarded dense solves used by the ADMM solver."""
from __future__ import annotations

import numpy as np

from .errors import NumericError, ShapeError, ValidationError

COND_LIMIT = 1e12
RIDGE_SCALE = 1e-8


def as_matrix(M, name="matrix") -> np.ndarray:
    """Coerce to a finite 2-D float64 array with at least one row and column."""
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {A.shape}")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise ShapeError(f"{name} must be non-empty, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericError(f"{name} contains non-finite entries")
    return A


def _check_theta(theta):
    if not theta >= 0:
        raise ValidationError(f"threshold must be >= 0, got {theta}")


def shrink_spectrum(M, theta):
    """Singular value thresholding that also returns the shrunk spectrum."""
    M = as_matrix(M)
    _check_theta(theta)
    try:
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD failed: {exc}") from exc
    s = np.maximum(s - theta, 0.0)
    return (U * s) @ Vt, s


def svt(M, theta) -> np.ndarray:
    """Proximal operator of ``theta * ||.||_*``: soft-shrink the singular values."""
    return shrink_spectrum(M, theta)[0]


def soft_threshold(M, theta) -> np.ndarray:
    M = as_matrix(M)
    _check_theta(theta)
    return np.sign(M) * np.maximum(np.abs(M) - theta, 0.0)


def condition_estimate(A) -> float:
    if np.array_equal(A, A.T):
        ev = np.abs(np.linalg.eigvalsh(A))
    else:
        ev = np.linalg.svd(A, compute_uv=False)
    hi, lo = ev.max(), ev.min()
    if lo == 0.0:
        return np.inf
    return hi / lo


def solve_spd(A, B):
    """Solve ``A S = B``, falling back to a small ridge when A is near singular.

    Returns ``(S, ridge_fired)``. The ridge is ``1e-8 * trace(A) / n`` and is
    added only when the condition estimate exceeds 1e12.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    n = A.shape[0]
    if A.shape[1] != n:
        raise ShapeError(f"A must be square, got {A.shape}")
    if B.shape[0] != n:
        raise ShapeError(f"A is {A.shape} but B has {B.shape[0]} rows")

    fired = not condition_estimate(A) <= COND_LIMIT
    if fired:
        delta = RIDGE_SCALE * np.trace(A) / n
        if not delta > 0:
            # zero or indefinite trace: fall back to an absolute ridge
            delta = RIDGE_SCALE
        A = A + delta * np.eye(n)
    try:
        S = np.linalg.solve(A, B)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"linear solve failed: {exc}") from exc
    return S, fired


def inf_norm(M) -> float:
    M = np.asarray(M, dtype=np.float64)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(M)))
