"""Gaussian-kernel modal loss, its half-quadratic weights and bandwidth rule."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

SQRT_2PI = np.sqrt(2.0 * np.pi)
DEFAULT_SIGMA_MIN = 1e-6


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "gaussian"
    sigma: float = DEFAULT_SIGMA_MIN
    sigma_min: float = DEFAULT_SIGMA_MIN

    def __post_init__(self):
        if self.kind != "gaussian":
            raise ConfigError(f"unsupported kernel {self.kind!r}")
        if not self.sigma_min > 0:
            raise ConfigError("sigma_min must be positive")
        if not self.sigma >= self.sigma_min:
            raise ConfigError("sigma must be >= sigma_min")


def _check_sigma(sigma):
    if not sigma > 0:
        raise ConfigError(f"kernel bandwidth must be positive, got {sigma}")


def gaussian_kernel(u, sigma):
    """Normal density with standard deviation ``sigma`` evaluated at ``u``."""
    _check_sigma(sigma)
    u = np.asarray(u, dtype=np.float64)
    return np.exp(-(u * u) / (2.0 * sigma * sigma)) / (SQRT_2PI * sigma)


def hq_weight(u, sigma):
    """Half-quadratic auxiliary weight minimising ``0.5*v*u**2 + psi(v)``.

    For the Gaussian kernel ``-k'(u)/u = k(u)/sigma**2`` and the ``u = 0``
    branch ``-k''(0)`` takes the same value, so one expression covers both.
    """
    _check_sigma(sigma)
    return gaussian_kernel(u, sigma) / (sigma * sigma)


def modal_loss(E, sigma) -> float:
    return float(np.sum(1.0 - gaussian_kernel(E, sigma)))


def estimate_sigma(E, sigma_min=DEFAULT_SIGMA_MIN) -> float:
    E = np.asarray(E, dtype=np.float64)
    p, m = E.shape
    sigma = np.sqrt(np.sum(E * E) / (2.0 * p * m))
    return float(max(sigma_min, sigma))
