"""Tracking regret, adversarial effect and the explicit regret bound."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import ActionProfile


@dataclass
class StepRecord:
    chosen: ActionProfile
    value: float
    opt_profile: ActionProfile | None = None
    opt_value: float | None = None


@dataclass
class Trace:
    steps: list[StepRecord] = field(default_factory=list)
    action_sizes: tuple[int, ...] = ()
    seed: object = None
    counters: dict = field(default_factory=dict)

    @property
    def n_agents(self) -> int:
        return len(self.action_sizes)

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    @property
    def has_optimum(self) -> bool:
        return bool(self.steps) and all(s.opt_value is not None for s in self.steps)


def tracking_regret_half(trace: Trace) -> float:
    """Half of the summed per-step optimum minus the summed achieved value.

    Negative when the chosen actions beat half the optimum.
    """
    if not trace.has_optimum and trace.steps:
        raise ValueError("trace carries no per-step optimum")
    opt = math.fsum(s.opt_value for s in trace.steps)
    got = math.fsum(s.value for s in trace.steps)
    return 0.5 * opt - got


def adversarial_effect(trace: Trace) -> int:
    """Count per-agent changes of the optimal action between consecutive steps."""
    if not trace.has_optimum and trace.steps:
        raise ValueError("trace carries no per-step optimal profiles")
    profiles = [s.opt_profile for s in trace.steps]
    changes = 0
    for before, after in zip(profiles, profiles[1:]):
        agents = set(before.agents) | set(after.agents)
        changes += sum(before.action_of(i) != after.action_of(i) for i in agents)
    return changes


def best_expert_switches(reward_matrix) -> int:
    """Number of times the per-step argmax action changes (lowest index on ties)."""
    R = np.asarray(reward_matrix, dtype=float)
    if R.ndim != 2:
        raise ValueError(f"expected a (steps, actions) matrix, got shape {R.shape}")
    if not np.all(np.isfinite(R)):
        raise ValueError("rewards must be finite")
    if R.shape[0] < 2:
        return 0
    best = np.argmax(R, axis=1)
    return int(np.count_nonzero(best[1:] != best[:-1]))


def regret_bound_rhs(n_agents: int, n_steps: int, delta: int, max_actions: int) -> float:
    """Explicit upper bound on the expected half-approximate tracking regret.

    ``4 sqrt(N T ((delta + N) ln(max|V| T) + N ln(1 + ln T)))``
    """
    for name, value in (("n_agents", n_agents), ("n_steps", n_steps),
                        ("max_actions", max_actions)):
        if value < 1:
            raise ValueError(f"{name} must be positive, got {value!r}")
    if delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta!r}")
    ell = math.log1p(math.log(n_steps))
    inner = (delta + n_agents) * math.log(max_actions * n_steps) + n_agents * ell
    return 4.0 * math.sqrt(n_agents * n_steps * inner)


def summarize_regret(traces: Sequence[Trace]) -> dict:
    """Seed-averaged regret next to the bound evaluated at the mean Δ(T)."""
    regrets = [tracking_regret_half(t) for t in traces]
    deltas = [adversarial_effect(t) for t in traces]
    first = traces[0]
    bounds = [regret_bound_rhs(t.n_agents, t.n_steps, d, max(t.action_sizes))
              for t, d in zip(traces, deltas)]
    mean_regret = float(np.mean(regrets))
    mean_bound = float(np.mean(bounds))
    return {
        "tracking_regret_half": mean_regret,
        "adversarial_effect": float(np.mean(deltas)),
        "regret_bound_rhs": mean_bound,
        "regret_over_bound": mean_regret / mean_bound if mean_bound > 0 else float("nan"),
        "n_traces": len(traces),
        "n_agents": first.n_agents,
        "n_steps": first.n_steps,
    }
