"""Multi-rate fixed-share forecaster for tracking a shifting best action.

``J`` exponential-weights sub-forecasters with geometrically spaced learning
rates each keep a fixed-share weight vector over the actions; a meta layer
of exponential weights mixes them.  Weights are stored as logarithms and
every row is shifted by its maximum after each update, which leaves the
output distribution unchanged because the update is positively homogeneous.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted


@dataclass(frozen=True)
class ForecasterParams:
    n_steps: int
    n_actions: int
    n_experts: int
    meta_rate: float
    share: float
    rates: np.ndarray

    @classmethod
    def from_horizon(cls, n_steps: int, n_actions: int) -> "ForecasterParams":
        if int(n_steps) != n_steps or n_steps < 1:
            raise ValueError(f"n_steps must be a positive integer, got {n_steps!r}")
        if int(n_actions) != n_actions or n_actions < 1:
            raise ValueError(f"n_actions must be a positive integer, got {n_actions!r}")
        n_steps, n_actions = int(n_steps), int(n_actions)
        # ceil(log2 T) is 0 at T=1; at least one sub-forecaster must exist.
        n_experts = max(1, math.ceil(math.log2(n_steps)))
        meta_rate = math.sqrt(math.log(n_experts) / n_steps)
        rates = np.sqrt(math.log(n_actions * n_steps) / 2.0 ** np.arange(n_experts))
        return cls(n_steps, n_actions, n_experts, meta_rate, 1.0 / n_steps, rates)


@dataclass(frozen=True)
class ForecasterState:
    params: ForecasterParams
    log_z: np.ndarray
    log_w: np.ndarray
    t: int


def init(n_steps: int, n_actions: int) -> ForecasterState:
    params = ForecasterParams.from_horizon(n_steps, n_actions)
    return ForecasterState(
        params=params,
        log_z=np.zeros(params.n_experts),
        log_w=np.zeros((params.n_experts, params.n_actions)),
        t=1,
    )


def logsumexp(a: np.ndarray, axis=None, keepdims: bool = False) -> np.ndarray:
    # scipy.special.logsumexp costs ~100us per call on arrays this small;
    # array methods also skip numpy's Python-level reduction wrappers
    m = a.max(axis=axis, keepdims=True)
    out = m + np.log(np.exp(a - m).sum(axis=axis, keepdims=True))
    return out if keepdims else out.squeeze(axis=axis)


def _softmax(a: np.ndarray, axis=None) -> np.ndarray:
    e = np.exp(a - a.max(axis=axis, keepdims=True))
    return e / e.sum(axis=axis, keepdims=True)


def _expert_distributions(log_w: np.ndarray) -> np.ndarray:
    return _softmax(log_w, axis=1)


def distribution(state: ForecasterState) -> np.ndarray:
    """Mixture ``sum_j q_j p^(j)`` of the sub-forecaster distributions."""
    p = _softmax(state.log_z) @ _expert_distributions(state.log_w)
    return p / p.sum()


def observe(state: ForecasterState, rewards) -> ForecasterState:
    """Return the state after observing the full reward vector of one step."""
    params = state.params
    r = np.asarray(rewards, dtype=float)
    if r.shape != (params.n_actions,):
        raise ValueError(f"expected {params.n_actions} rewards, got shape {r.shape}")
    if not np.isfinite(r).all():
        raise ValueError("rewards must be finite")
    if state.t > params.n_steps:
        raise ValueError(f"forecaster horizon of {params.n_steps} steps exhausted")

    expert_p = _expert_distributions(state.log_w)
    log_v = state.log_w + params.rates[:, None] * r[None, :]
    log_total = logsumexp(log_v, axis=1, keepdims=True)
    beta = params.share
    if beta >= 1.0:
        log_w = np.broadcast_to(log_total - math.log(params.n_actions), log_v.shape).copy()
    else:
        log_w = np.logaddexp(log_total + math.log(beta / params.n_actions),
                             log_v + math.log1p(-beta))
    log_z = state.log_z + params.meta_rate * (expert_p @ r)

    log_w -= log_w.max(axis=1, keepdims=True)
    log_z -= log_z.max()
    return ForecasterState(params, log_z, log_w, state.t + 1)


def sample(p, rng: np.random.Generator) -> int:
    """Inverse-CDF draw with a single uniform variate.

    A variate landing exactly on a cumulative boundary goes to the next
    index, so zero-probability actions are never returned.
    """
    cdf = np.asarray(p, dtype=float).cumsum()
    u = rng.random() * cdf[-1]
    return min(int(cdf.searchsorted(u, side="right")), len(cdf) - 1)


def arithmetic_ops(params: ForecasterParams) -> int:
    """Nominal additions and multiplications of one :func:`observe` call."""
    n, j = params.n_actions, params.n_experts
    # per sub-forecaster: n exp-scalings, n-1 sums, 3n for the share mix,
    # 2n-1 for the inner product with r, 2 for the meta update
    return j * (n + (n - 1) + 3 * n + (2 * n - 1) + 2)


class FixedShareForecaster(BaseEstimator):
    """Estimator wrapper around the forecaster state.

    Parameters
    ----------
    n_steps : int
        Horizon ``T`` used to set the learning rates and share parameter.
    n_actions : int or None
        Number of actions.  Inferred from the first reward vector if None.
    random_state : int, Generator or None
        Source for :meth:`sample_action`.

    ``partial_fit`` consumes one reward vector; ``fit`` consumes a
    ``(steps, n_actions)`` reward matrix from a fresh state.
    """

    def __init__(self, n_steps: int = 1, n_actions: int | None = None, random_state=None):
        self.n_steps = n_steps
        self.n_actions = n_actions
        self.random_state = random_state

    def _initialize(self, n_actions: int) -> None:
        self.state_ = init(self.n_steps, n_actions)
        self.rng_ = np.random.default_rng(self.random_state)
        self.n_actions_ = n_actions

    def fit(self, rewards, y=None):
        R = np.atleast_2d(np.asarray(rewards, dtype=float))
        self._initialize(self.n_actions or R.shape[1])
        for row in R:
            self.state_ = observe(self.state_, row)
        return self

    def partial_fit(self, rewards, y=None):
        r = np.asarray(rewards, dtype=float).ravel()
        if not hasattr(self, "state_"):
            self._initialize(self.n_actions or r.shape[0])
        self.state_ = observe(self.state_, r)
        return self

    def predict_proba(self, X=None) -> np.ndarray:
        if not hasattr(self, "state_"):
            if self.n_actions is None:
                check_is_fitted(self, "state_")
            self._initialize(self.n_actions)
        return distribution(self.state_)

    def predict(self, X=None) -> int:
        """Most probable action (lowest index on ties)."""
        return int(np.argmax(self.predict_proba()))

    def sample_action(self) -> int:
        p = self.predict_proba()
        return sample(p, self.rng_)
