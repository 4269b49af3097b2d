"""ADMM solver for modal-regression structured low-rank matrix recovery.

Solves, for a single projection ``P`` shared by all views,

    min ||J||_* + lambda1 * loss(E) + lambda2 * ||E_L||_F^2
    s.t. P'X = P'XZ + E,  Z = J,  LZ = L + E_L,  Z >= 0

where ``loss`` is the Gaussian modal loss (``variant="modal"``) or the l1 norm
(``variant="l1"``). Each block update is exposed as a pure function of
``(state, problem)`` so it can be checked in isolation; :func:`fit` chains them.
"""
from __future__ import annotations

import dataclasses
import logging
import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import modal
from .dataset import MultiViewDataset
from .errors import ConfigError, DivergenceError, NumericError, ValidationError
from .linalg import inf_norm, shrink_spectrum, soft_threshold, solve_spd
from .pca import PcaModel, pca_apply, pca_fit

log = logging.getLogger(__name__)

VARIANTS = ("modal", "l1")


@dataclass(frozen=True)
class SolverConfig:
    lambda1: float = 1e-3
    lambda2: float = 1.0
    p: int = 10
    variant: str = "modal"
    mu0: float = 1e-3
    rho: float = 1.03
    mu_max: float = 1e6
    epsilon: float = 1e-6
    t_max: int = 1000
    inner_max: int = 5
    inner_tol: float = 1e-6
    sigma_min: float = modal.DEFAULT_SIGMA_MIN
    seed: int = 0
    # 0 disables PCA preprocessing
    pca_dim: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not self.lambda1 >= 0 or not self.lambda2 > 0:
            raise ConfigError("lambda1 must be >= 0 and lambda2 > 0")
        if int(self.p) != self.p or self.p < 1:
            raise ConfigError(f"subspace dimension must be a positive integer, got {self.p}")
        if not (self.mu0 > 0 and self.mu_max > 0 and self.epsilon > 0):
            raise ConfigError("mu0, mu_max and epsilon must be positive")
        if not self.rho > 1:
            raise ConfigError(f"rho must exceed 1, got {self.rho}")
        if self.t_max < 0 or self.inner_max < 1:
            raise ConfigError("t_max must be >= 0 and inner_max >= 1")
        if not (self.inner_tol > 0 and self.sigma_min > 0):
            raise ConfigError("inner_tol and sigma_min must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.pca_dim < 0:
            raise ConfigError("pca_dim must be >= 0")

    def to_dict(self):
        return dataclasses.asdict(self)


class IterationRecord(NamedTuple):
    t: int
    r1_inf: float
    r2_inf: float
    r3_inf: float
    objective: float
    wall_ms: float


class InnerStep(NamedTuple):
    """One W-then-E half-quadratic step, objective evaluated at fixed sigma."""
    sigma: float
    before: float
    after: float


@dataclass
class Problem:
    X: np.ndarray
    L: np.ndarray
    cfg: SolverConfig


@dataclass
class SolverState:
    P: np.ndarray
    Z: np.ndarray
    J: np.ndarray
    E: np.ndarray
    E_L: np.ndarray
    Y1: np.ndarray
    Y2: np.ndarray
    Y3: np.ndarray
    W: np.ndarray
    sigma: float
    mu: float
    t: int = 0
    history: list = field(default_factory=list)
    inner_traces: list = field(default_factory=list)
    ridge_events: int = 0


@dataclass(frozen=True)
class ProjectionModel:
    P: np.ndarray
    pca: PcaModel | None = None
    meta: dict = field(default_factory=dict)

    @property
    def d(self):
        """Input dimension before any PCA."""
        return self.pca.d if self.pca is not None else self.P.shape[0]

    @property
    def p(self):
        return self.P.shape[1]


class ModalStep(NamedTuple):
    E: np.ndarray
    W: np.ndarray
    sigma: float
    trace: list


class FitResult(NamedTuple):
    model: ProjectionModel
    state: SolverState


def build_label_indicator(labels, C) -> np.ndarray:
    """C x m one-hot matrix for 1-based class labels."""
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ValidationError("labels must be 1-D")
    if labels.size and (labels.min() < 1 or labels.max() > C):
        raise ValidationError(f"labels must lie in 1..{C}")
    L = np.zeros((C, labels.size))
    L[labels.astype(np.int64) - 1, np.arange(labels.size)] = 1.0
    return L


def random_orthonormal(d, p, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    Q, R = np.linalg.qr(rng.standard_normal((d, p)))
    # fix the QR sign ambiguity so the draw is a function of the seed alone
    return Q * np.where(np.diag(R) < 0, -1.0, 1.0)


def init_state(X, L, cfg: SolverConfig) -> SolverState:
    d, m = X.shape
    C = L.shape[0]
    p = cfg.p
    if p > d:
        raise ConfigError(f"subspace dimension {p} exceeds feature dimension {d}")
    if L.shape[1] != m:
        raise ValidationError(f"label indicator has {L.shape[1]} columns, data has {m}")
    # P = 0 is a fixed point of every block update, so start from a random basis.
    return SolverState(
        P=random_orthonormal(d, p, cfg.seed),
        Z=np.zeros((m, m)),
        J=np.zeros((m, m)),
        E=np.zeros((p, m)),
        E_L=np.zeros((C, m)),
        Y1=np.zeros((p, m)),
        Y2=np.zeros((m, m)),
        Y3=np.zeros((C, m)),
        W=np.zeros((p, m)),
        sigma=cfg.sigma_min,
        mu=cfg.mu0,
    )


def _svt_step(state, prob):
    return shrink_spectrum(state.Z + state.Y2 / state.mu, 1.0 / state.mu)


def update_J(state: SolverState, prob: Problem) -> np.ndarray:
    return _svt_step(state, prob)[0]


def _projected_residual(state, prob):
    """P'(X - XZ): the reconstruction error before subtracting E."""
    X = prob.X
    return state.P.T @ (X - X @ state.Z)


def e_subproblem_objective(E, R, Y1, mu, lambda1, sigma):
    """lambda1*L_M(E) + tr(Y1'(R - E)) + mu/2 ||R - E||_F^2 with R = P'(X - XZ)."""
    D = R - E
    return (lambda1 * modal.modal_loss(E, sigma) + float(np.sum(Y1 * D))
            + 0.5 * mu * float(np.sum(D * D)))


def update_E_modal(state: SolverState, prob: Problem) -> ModalStep:
    """Half-quadratic alternation: re-estimate sigma, set W = tau(E), solve for E."""
    cfg = prob.cfg
    if cfg.variant != "modal":
        raise ConfigError("update_E_modal requires variant='modal'")
    mu = state.mu
    R = _projected_residual(state, prob)
    numer = R + state.Y1 / mu
    E, W, sigma = state.E, state.W, state.sigma
    trace = []
    for _ in range(cfg.inner_max):
        sigma = modal.estimate_sigma(E, cfg.sigma_min)
        W = modal.hq_weight(E, sigma)
        denom = (cfg.lambda1 / mu) * W + 1.0
        if not denom.min() >= 1.0:
            raise NumericError("half-quadratic denominator dropped below 1")
        E_new = numer / denom
        trace.append(InnerStep(
            sigma,
            e_subproblem_objective(E, R, state.Y1, mu, cfg.lambda1, sigma),
            e_subproblem_objective(E_new, R, state.Y1, mu, cfg.lambda1, sigma),
        ))
        change = inf_norm(E_new - E)
        E = E_new
        if change <= cfg.inner_tol:
            break
    return ModalStep(E, W, sigma, trace)


def update_E_l1(state: SolverState, prob: Problem) -> np.ndarray:
    numer = _projected_residual(state, prob) + state.Y1 / state.mu
    return soft_threshold(numer, prob.cfg.lambda1 / state.mu)


def update_EL(state: SolverState, prob: Problem) -> np.ndarray:
    mu, L = state.mu, prob.L
    return (state.Y3 + mu * (L @ state.Z) - mu * L) / (2.0 * prob.cfg.lambda2 + mu)


def z_system(state: SolverState, prob: Problem):
    """Normal equations ``Z1 Z = Z2`` of the Z-subproblem (before projection)."""
    X, L, P, mu = prob.X, prob.L, state.P, state.mu
    XtP = X.T @ P
    m = X.shape[1]
    Z1 = XtP @ XtP.T + np.eye(m) + L.T @ L
    Z2 = (XtP @ (P.T @ X - state.E) + state.J + L.T @ (L + state.E_L)
          + (XtP @ state.Y1 - state.Y2 - L.T @ state.Y3) / mu)
    return Z1, Z2


def update_Z(state: SolverState, prob: Problem) -> np.ndarray:
    Z1, Z2 = z_system(state, prob)
    Z, fired = solve_spd(Z1, Z2)
    if fired:
        # Z1 contains +I, so this means the iterates are already broken
        raise NumericError("ridge fallback fired on the Z-update system")
    return np.maximum(Z, 0.0)


def p_system(state: SolverState, prob: Problem):
    B = prob.X - prob.X @ state.Z
    return B @ B.T, B @ (state.E.T - state.Y1.T / state.mu)


def _solve_P(state, prob):
    G, rhs = p_system(state, prob)
    return solve_spd(G, rhs)


def update_P(state: SolverState, prob: Problem) -> np.ndarray:
    return _solve_P(state, prob)[0]


def residuals(state: SolverState, prob: Problem):
    X, L, P = prob.X, prob.L, state.P
    PX = P.T @ X
    return (PX - PX @ state.Z - state.E,
            state.Z - state.J,
            L @ state.Z - L - state.E_L)


def update_multipliers(state: SolverState, prob: Problem):
    """Dual ascent on the three constraints, then ``mu <- min(rho*mu, mu_max)``."""
    mu = state.mu
    R1, R2, R3 = residuals(state, prob)
    return (state.Y1 + mu * R1, state.Y2 + mu * R2, state.Y3 + mu * R3,
            min(prob.cfg.rho * mu, prob.cfg.mu_max))


def augmented_lagrangian_value(state: SolverState, prob: Problem, nuclear=None) -> float:
    cfg = prob.cfg
    if nuclear is None:
        nuclear = float(np.sum(np.linalg.svd(state.J, compute_uv=False)))
    if cfg.variant == "modal":
        loss = modal.modal_loss(state.E, state.sigma)
    else:
        loss = float(np.sum(np.abs(state.E)))
    R1, R2, R3 = residuals(state, prob)
    value = nuclear + cfg.lambda1 * loss + cfg.lambda2 * float(np.sum(state.E_L ** 2))
    value += float(np.sum(state.Y1 * R1) + np.sum(state.Y2 * R2) + np.sum(state.Y3 * R3))
    value += 0.5 * state.mu * float(np.sum(R1 ** 2) + np.sum(R2 ** 2) + np.sum(R3 ** 2))
    return float(value)


def _check_finite(block, value, t):
    if not np.all(np.isfinite(value)):
        raise DivergenceError(block, t)


def run_admm(X, L, cfg: SolverConfig, timing=True, callback=None) -> SolverState:
    """Run the ADMM iterations on prepared data ``X`` (d x m) and indicator ``L``.

    ``callback(state)`` is invoked after every completed iteration.
    """
    prob = Problem(X, L, cfg)
    state = init_state(X, L, cfg)
    clock = time.perf_counter
    for t in range(1, cfg.t_max + 1):
        start = clock()
        state.J, shrunk = _svt_step(state, prob)
        nuclear = float(np.sum(shrunk))
        _check_finite("J", state.J, t)

        if cfg.variant == "modal":
            step = update_E_modal(state, prob)
            state.E, state.W, state.sigma = step.E, step.W, step.sigma
            state.inner_traces.append(step.trace)
        else:
            state.E = update_E_l1(state, prob)
        _check_finite("E", state.E, t)

        state.E_L = update_EL(state, prob)
        _check_finite("E_L", state.E_L, t)

        state.Z = update_Z(state, prob)
        _check_finite("Z", state.Z, t)

        state.P, fired = _solve_P(state, prob)
        if fired:
            state.ridge_events += 1
            log.debug("ridge fallback on P-update at iteration %d", t)
        _check_finite("P", state.P, t)

        R1, R2, R3 = residuals(state, prob)
        objective = augmented_lagrangian_value(state, prob, nuclear=nuclear)
        state.Y1, state.Y2, state.Y3, state.mu = update_multipliers(state, prob)
        for name in ("Y1", "Y2", "Y3"):
            _check_finite(name, getattr(state, name), t)

        state.t = t
        r = (inf_norm(R1), inf_norm(R2), inf_norm(R3))
        wall = (clock() - start) * 1e3 if timing else 0.0
        state.history.append(IterationRecord(t, *r, objective, wall))
        if callback is not None:
            callback(state)
        if max(r) < cfg.epsilon:
            break
    return state


def fit(dataset: MultiViewDataset, cfg: SolverConfig, timing=True, callback=None) -> FitResult:
    """Learn the shared projection; PCA is fitted first when ``cfg.pca_dim > 0``."""
    X = dataset.X
    pca = None
    if cfg.pca_dim:
        pca = pca_fit(X, cfg.pca_dim)
        X = pca_apply(pca, X)
    L = build_label_indicator(dataset.labels, dataset.C)
    state = run_admm(X, L, cfg, timing=timing, callback=callback)
    if state.history:
        last = state.history[-1]
        final = [last.r1_inf, last.r2_inf, last.r3_inf]
    else:
        final = [inf_norm(R) for R in residuals(state, Problem(X, L, cfg))]
    meta = {
        "config": cfg.to_dict(),
        "iterations": state.t,
        "final_residuals": final,
        "converged": bool(max(final) < cfg.epsilon),
    }
    return FitResult(ProjectionModel(P=state.P.copy(), pca=pca, meta=meta), state)
