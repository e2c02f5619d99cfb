"""Consensus graph learning by alternating S / view-weight updates.

The objective for ``V`` views with smoothed features ``H_v`` is::

    sum_v lam_v * (||H_v^T - H_v^T S||_F^2 + alpha * J_v(S)) + sum_v lam_v**gamma

where ``J_v`` is the kNN row-softmax contrastive term. ``S`` is updated by
Adam with the view weights fixed, then the weights are refreshed in closed
form.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import ConfigError, DivergenceError, NumericalError
from .graph import FilterParams, NeighborIndex, SmoothedViews, build_neighbors, smooth_views
from .model import MultiViewDataset

log = logging.getLogger(__name__)

VARIANTS = ("full", "shared_neighbors", "no_contrastive", "no_filter", "single_view")
_SINGLE_RE = re.compile(r"^single[_-]view[(:]?(\d+)\)?$")


def parse_variant(name: str):
    """Split a variant spelling into ``(kind, view)``.

    Accepts ``full``, ``shared-neighbors``, ``single_view(1)``,
    ``single-view:1`` and similar; ``view`` is None except for single-view.
    """
    key = name.strip().lower()
    m = _SINGLE_RE.match(key)
    if m:
        return "single_view", int(m.group(1))
    key = key.replace("-", "_")
    if key == "single_view":
        raise ConfigError("single_view variant needs a view index, e.g. single_view(0)")
    if key not in VARIANTS:
        raise ConfigError(f"unknown variant {name!r}; expected one of {VARIANTS}")
    return key, None


def variant_label(kind: str, view: Optional[int] = None) -> str:
    return f"single_view({view})" if kind == "single_view" else kind


@dataclass(frozen=True)
class SolverConfig:
    alpha: float
    gamma: float = -4.0
    learning_rate: float = 0.01
    max_epochs: int = 200
    tol: float = 1e-4
    inner_steps: int = 50
    seed: int = 0
    variant: str = "full"
    order: int = 2
    strength: float = 0.5
    k: int = 10

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be > 0, got {self.alpha}")
        if not self.gamma < 0:
            raise ConfigError(f"gamma must be < 0, got {self.gamma}")
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate must be > 0")
        if self.max_epochs < 1 or self.inner_steps < 1:
            raise ConfigError("max_epochs and inner_steps must be >= 1")
        if not self.tol > 0:
            raise ConfigError("tol must be > 0")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        parse_variant(self.variant)
        object.__setattr__(self, "variant", variant_label(*parse_variant(self.variant)))

    @property
    def filter_params(self) -> FilterParams:
        return FilterParams(self.order, self.strength)


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros_like(cls, x):
        return cls(np.zeros_like(x), np.zeros_like(x))


def adam_step(param: np.ndarray, grad: np.ndarray, state: AdamState, lr: float) -> np.ndarray:
    """One bias-corrected Adam update; ``state`` is advanced in place."""
    state.t += 1
    state.m = state.beta1 * state.m + (1 - state.beta1) * grad
    state.v = state.beta2 * state.v + (1 - state.beta2) * grad * grad
    m_hat = state.m / (1 - state.beta1 ** state.t)
    v_hat = state.v / (1 - state.beta2 ** state.t)
    return param - lr * m_hat / (np.sqrt(v_hat) + state.eps)


@dataclass
class ConsensusState:
    s_matrix: np.ndarray
    weights: np.ndarray
    per_view_loss: np.ndarray
    contrastive_loss: float
    objective_trace: List[float] = field(default_factory=list)
    weight_trace: List[np.ndarray] = field(default_factory=list)
    initial_objective: float = float("nan")
    adam_state: Optional[AdamState] = None
    converged: bool = False
    variant: str = "full"
    neighbors: Optional[NeighborIndex] = None

    @property
    def epochs(self) -> int:
        return len(self.objective_trace)


# -- loss pieces ------------------------------------------------------------

def _offdiag_logsumexp(s: np.ndarray) -> np.ndarray:
    t = np.array(s, dtype=np.float64, copy=True)
    np.fill_diagonal(t, -np.inf)
    top = t.max(axis=1)
    return top + np.log(np.exp(t - top[:, None]).sum(axis=1))


def _offdiag_softmax(s: np.ndarray) -> np.ndarray:
    t = np.array(s, dtype=np.float64, copy=True)
    np.fill_diagonal(t, -np.inf)
    t -= t.max(axis=1, keepdims=True)
    e = np.exp(t)
    return e / e.sum(axis=1, keepdims=True)


def contrastive_term(s: np.ndarray, mask: np.ndarray) -> float:
    """sum_i sum_{j in N_i} -log softmax_{p != i}(S_i.)_j for a 0/1 mask."""
    lse = _offdiag_logsumexp(s)
    per_row = mask.sum(axis=1) * lse - (mask * s).sum(axis=1)
    return float(per_row.sum())


def contrastive_grad(s: np.ndarray, mask: np.ndarray) -> np.ndarray:
    counts = mask.sum(axis=1)
    return counts[:, None] * _offdiag_softmax(s) - mask


def _recon_loss(h: np.ndarray, s: np.ndarray) -> float:
    r = h.T - h.T @ s
    return float(np.sum(r * r))


def _recon_grad(h: np.ndarray, s: np.ndarray) -> np.ndarray:
    return 2.0 * (h @ (h.T @ s) - h @ h.T)


def _masks_for(neighbors: NeighborIndex, kind: str, views: Sequence[int]) -> List[np.ndarray]:
    if kind == "shared_neighbors":
        shared = neighbors.shared_mask()
        return [shared for _ in views]
    return [neighbors.view_mask(v) for v in views]


class ConsensusProblem:
    """The S-dependent objective for one variant, with masks precomputed."""

    def __init__(self, reps, neighbors, alpha, gamma=-4.0, variant="full"):
        kind, view = parse_variant(variant)
        reps = list(reps.representations if isinstance(reps, SmoothedViews) else reps)
        if kind == "single_view":
            if not 0 <= view < len(reps):
                raise ConfigError(f"single_view index {view} out of range for {len(reps)} views")
            views = [view]
        else:
            views = list(range(len(reps)))
        self.kind = kind
        self.reps = [np.asarray(reps[v], dtype=np.float64) for v in views]
        self.alpha = float(alpha)
        self.gamma = float(gamma)
        self.weighted = kind != "single_view"
        self.contrastive = kind != "no_contrastive"
        self.masks = _masks_for(neighbors, kind, views) if self.contrastive else None

    @property
    def num_views(self) -> int:
        return len(self.reps)

    def contrastive_losses(self, s) -> np.ndarray:
        if not self.contrastive:
            return np.zeros(self.num_views)
        return np.array([contrastive_term(s, mk) for mk in self.masks])

    def per_view_loss(self, s) -> np.ndarray:
        recon = np.array([_recon_loss(h, s) for h in self.reps])
        if self.contrastive:
            return recon + self.alpha * self.contrastive_losses(s)
        return recon + self.alpha * float(np.sum(s * s))

    def objective(self, s, weights) -> float:
        weights = np.asarray(weights, dtype=np.float64)
        total = float(weights @ self.per_view_loss(s))
        if self.weighted:
            total += float(np.sum(weights ** self.gamma))
        return total

    def gradient(self, s, weights) -> np.ndarray:
        g = np.zeros_like(s, dtype=np.float64)
        for v, h in enumerate(self.reps):
            gv = _recon_grad(h, s)
            if self.contrastive:
                gv += self.alpha * contrastive_grad(s, self.masks[v])
            else:
                gv += 2.0 * self.alpha * s
            g += weights[v] * gv
        return g


# -- public operations --------------------------------------------------------

def init_closed_form(smoothed, weights, alpha: float) -> np.ndarray:
    """Minimizer of the weighted self-expression objective with Frobenius penalty.

    Solves ``(sum_v w_v (H_v H_v^T + alpha I)) S = sum_v w_v H_v H_v^T``.
    """
    reps = list(smoothed.representations if isinstance(smoothed, SmoothedViews) else smoothed)
    weights = np.asarray(weights, dtype=np.float64)
    if np.any(weights <= 0):
        raise ValueError("view weights must be positive")
    n = reps[0].shape[0]
    rhs = np.zeros((n, n))
    for w, h in zip(weights, reps):
        rhs += w * (h @ h.T)
    lhs = rhs + alpha * weights.sum() * np.eye(n)
    try:
        return scipy.linalg.solve(lhs, rhs, assume_a="pos")
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SPD solve failed: {exc}") from exc


def contrastive_loss(s, neighbors: NeighborIndex, variant: str = "full") -> np.ndarray:
    """Per-view contrastive losses; the shared variant returns the
    intersection loss repeated for every view."""
    kind, view = parse_variant(variant)
    views = [view] if kind == "single_view" else range(len(neighbors.per_view))
    return np.array([contrastive_term(s, mk) for mk in _masks_for(neighbors, kind, views)])


def gradient_S(s, smoothed, neighbors, weights, alpha, variant="full", gamma=-4.0):
    """Analytic gradient of the objective with respect to S."""
    problem = ConsensusProblem(smoothed, neighbors, alpha, gamma, variant)
    w = np.ones(1) if not problem.weighted else np.asarray(weights, dtype=np.float64)
    return problem.gradient(np.asarray(s, dtype=np.float64), w)


def update_lambda(per_view_loss, gamma: float = -4.0) -> np.ndarray:
    """Closed-form view weights ``(-M / gamma) ** (1 / (gamma - 1))``."""
    m = np.asarray(per_view_loss, dtype=np.float64)
    if np.any(m < 1e-12):
        log.warning("per-view loss below 1e-12 clamped before weight update: %s", m)
        m = np.maximum(m, 1e-12)
    return (-m / gamma) ** (1.0 / (gamma - 1.0))


def update_S(state: ConsensusState, problem: ConsensusProblem, config: SolverConfig) -> ConsensusState:
    """Run ``config.inner_steps`` Adam iterations on S with weights fixed."""
    if state.adam_state is None:
        state.adam_state = AdamState.zeros_like(state.s_matrix)
    w = state.weights if problem.weighted else np.ones(1)
    s = state.s_matrix
    for _ in range(config.inner_steps):
        s = adam_step(s, problem.gradient(s, w), state.adam_state, config.learning_rate)
    if not np.all(np.isfinite(s)):
        raise DivergenceError("S became non-finite during Adam updates")
    state.s_matrix = s
    return state


def prepare_views(dataset: MultiViewDataset, config: SolverConfig) -> SmoothedViews:
    """Filtered representations, or raw features for the no-filter variant."""
    if parse_variant(config.variant)[0] == "no_filter":
        return SmoothedViews([np.asarray(v.features, dtype=np.float64) for v in dataset.views])
    return smooth_views(dataset.views, config.filter_params)


def solve(dataset: MultiViewDataset, config: SolverConfig) -> ConsensusState:
    kind, view = parse_variant(config.variant)
    if kind == "single_view" and not 0 <= view < dataset.num_views:
        raise ConfigError(f"single_view index {view} out of range for {dataset.num_views} views")

    reps = prepare_views(dataset, config)
    neighbors = build_neighbors(reps, config.k)
    problem = ConsensusProblem(reps, neighbors, config.alpha, config.gamma, config.variant)

    weights = np.ones(problem.num_views)
    s = init_closed_form(problem.reps, weights, config.alpha)
    state = ConsensusState(
        s_matrix=s,
        weights=weights,
        per_view_loss=problem.per_view_loss(s),
        contrastive_loss=float(problem.contrastive_losses(s).sum()),
        variant=config.variant,
        neighbors=neighbors,
    )
    state.initial_objective = problem.objective(s, weights)
    prev = state.initial_objective
    log.info("%s: initial objective %.6g", config.variant, prev)

    for epoch in range(1, config.max_epochs + 1):
        if problem.contrastive:
            update_S(state, problem, config)
        else:
            state.s_matrix = init_closed_form(problem.reps, state.weights, config.alpha)
        state.per_view_loss = problem.per_view_loss(state.s_matrix)
        if problem.weighted:
            state.weights = update_lambda(state.per_view_loss, config.gamma)
        obj = problem.objective(state.s_matrix, state.weights)
        if not np.isfinite(obj):
            raise DivergenceError(f"objective became non-finite at epoch {epoch}")
        state.objective_trace.append(obj)
        state.weight_trace.append(state.weights.copy())
        log.debug("epoch %d objective %.10g weights %s", epoch, obj, state.weights)
        change = abs(obj - prev) / max(abs(prev), np.finfo(float).tiny)
        prev = obj
        if change < config.tol:
            state.converged = True
            break

    state.contrastive_loss = float(problem.contrastive_losses(state.s_matrix).sum())
    log.info("%s: %d epochs, final objective %.6g", config.variant, state.epochs, prev)
    return state
