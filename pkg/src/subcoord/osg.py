"""Online sequential greedy coordination.

Every agent runs its own fixed-share forecaster.  Agents draw actions in a
fixed order without looking at the objective; once the step's objective is
revealed, agent ``i`` is rewarded with the marginal gain of each of its
actions given the actions drawn by agents ``0..i-1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from . import forecaster as fsf
from .core import EMPTY_PROFILE, ActionId, ActionProfile, ObjectiveOracle
from .metrics import StepRecord, Trace


class RunExhaustedError(RuntimeError):
    pass


class ProfileMismatchError(ValueError):
    pass


class EnvironmentDriver(Protocol):
    """Executes a profile and reveals the step's objective afterwards."""

    action_sizes: tuple[int, ...]

    def step(self, executed: ActionProfile) -> ObjectiveOracle: ...


@dataclass
class StepOutcome:
    chosen: ActionProfile
    distributions: list[np.ndarray]
    rewards_fed: list[np.ndarray]
    objective_value: float


@dataclass
class Counters:
    """Per-agent tallies.  ``gain_evals`` counts one objective call per
    candidate action.  Prefix values are reused from the previous agent's
    candidates, so only the empty-profile call lands in ``prefix_evals[0]``."""

    gain_evals: list[int]
    prefix_evals: list[int]
    arithmetic_ops: list[int]
    per_step_gain_evals: list[int] = field(default_factory=list)

    @classmethod
    def zeros(cls, n_agents: int) -> "Counters":
        return cls([0] * n_agents, [0] * n_agents, [0] * n_agents)

    def as_dict(self) -> dict:
        return {
            "gain_evals": list(self.gain_evals),
            "prefix_evals": list(self.prefix_evals),
            "arithmetic_ops": list(self.arithmetic_ops),
        }


def agent_rngs(seed, n_agents: int) -> list[np.random.Generator]:
    """Independent per-agent streams derived from one master seed.

    Agent ``i``'s stream depends only on ``(seed, i)``.
    """
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [
        np.random.default_rng(np.random.SeedSequence(root.entropy, spawn_key=root.spawn_key + (i,)))
        for i in range(n_agents)
    ]


class OnlineSequentialGreedy(BaseEstimator):
    """Coordinator holding one forecaster per agent.

    Parameters
    ----------
    action_sizes : sequence of int
        ``|V_i|`` for each agent, in coordination order.
    n_steps : int
        Horizon ``T``; each forecaster is tuned to it.
    reward_scale : float
        Marginal gains are divided by this before reaching the forecasters.
    random_state : int or None
        Master seed for the per-agent sampling streams.
    """

    needs_upcoming = False

    def __init__(self, action_sizes: Sequence[int] = (1,), n_steps: int = 1,
                 reward_scale: float = 1.0, random_state=None):
        self.action_sizes = action_sizes
        self.n_steps = n_steps
        self.reward_scale = reward_scale
        self.random_state = random_state

    def reset(self) -> "OnlineSequentialGreedy":
        sizes = tuple(int(s) for s in self.action_sizes)
        if not sizes or min(sizes) < 1:
            raise ValueError(f"every agent needs at least one action, got {sizes}")
        if not self.reward_scale > 0:
            raise ValueError(f"reward_scale must be positive, got {self.reward_scale!r}")
        self.sizes_ = sizes
        self.states_ = [fsf.init(max(self.n_steps, 1), n) for n in sizes]
        self.rngs_ = agent_rngs(self.random_state, len(sizes))
        self.counters_ = Counters.zeros(len(sizes))
        self.steps_done_ = 0
        self._pending = None
        return self

    def _ensure(self) -> None:
        if not hasattr(self, "states_"):
            self.reset()

    def distributions(self) -> list[np.ndarray]:
        self._ensure()
        return [fsf.distribution(s) for s in self.states_]

    def select_actions(self, upcoming: ObjectiveOracle | None = None) -> ActionProfile:
        """Draw one action per agent in order.  The objective is not consulted."""
        self._ensure()
        if self.steps_done_ >= self.n_steps:
            raise RunExhaustedError(f"all {self.n_steps} steps consumed")
        dists = self.distributions()
        chosen = ActionProfile.from_indices(
            [fsf.sample(p, rng) for p, rng in zip(dists, self.rngs_)]
        )
        self._pending = (chosen, dists)
        return chosen

    def feedback(self, f_t: ObjectiveOracle, executed: ActionProfile) -> StepOutcome:
        """Feed every agent its marginal-gain reward vector for this step."""
        self._ensure()
        if self._pending is None or self._pending[0] != executed:
            raise ProfileMismatchError(
                f"{executed!r} was not produced by the pending select_actions call"
            )
        chosen, dists = self._pending
        self._pending = None
        counters = self.counters_
        prefix = EMPTY_PROFILE
        prefix_value = f_t(prefix)
        counters.prefix_evals[0] += 1
        rewards_fed = []
        step_gain_evals = 0
        for agent, size in enumerate(self.sizes_):
            values = np.array([f_t(prefix.add(ActionId(agent, a))) for a in range(size)])
            counters.gain_evals[agent] += size
            step_gain_evals += size
            scaled = (values - prefix_value) / self.reward_scale
            self.states_[agent] = fsf.observe(self.states_[agent], scaled)
            counters.arithmetic_ops[agent] += fsf.arithmetic_ops(self.states_[agent].params)
            rewards_fed.append(scaled)
            action = chosen.action_of(agent)
            prefix = prefix.add(ActionId(agent, action))
            # the next agent's prefix value is this agent's chosen candidate
            prefix_value = values[action]
        value = prefix_value
        counters.per_step_gain_evals.append(step_gain_evals)
        self.steps_done_ += 1
        return StepOutcome(chosen, dists, rewards_fed, float(value))

    def run(self, env: EnvironmentDriver, n_steps: int | None = None,
            optimum=None) -> Trace:
        """Run ``n_steps`` rounds against ``env`` from a fresh state.

        ``optimum``, if given, maps an oracle to ``(profile, value)`` and is
        recorded alongside each step.
        """
        self.reset()
        n_steps = self.n_steps if n_steps is None else n_steps
        trace = Trace(action_sizes=self.sizes_, seed=self.random_state)
        for _ in range(n_steps):
            chosen = self.select_actions()
            f_t = env.step(chosen)
            outcome = self.feedback(f_t, chosen)
            record = StepRecord(chosen, outcome.objective_value)
            if optimum is not None:
                record.opt_profile, record.opt_value = optimum(f_t)
            trace.steps.append(record)
        trace.counters = self.counters_.as_dict()
        return trace


def run(coord: OnlineSequentialGreedy, env: EnvironmentDriver, n_steps: int | None = None,
        optimum=None) -> Trace:
    return coord.run(env, n_steps, optimum)
