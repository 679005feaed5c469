"""Comparison policies: clairvoyant and lagged sequential greedy, the
per-step brute-force optimum, and uniform random play."""
from __future__ import annotations

import enum
import itertools
import math
from typing import Sequence

import numpy as np

from .core import (EMPTY_PROFILE, ActionId, ActionProfile, EnumerationTooLargeError,
                   ObjectiveOracle)

MAX_BRUTE_FORCE_PROFILES = 10**6


class PolicyKind(str, enum.Enum):
    OSG = "OSG"
    SG_CLAIRVOYANT = "SG_clairvoyant"
    SG_HAT = "SG_hat"
    BRUTE_FORCE_OPT = "BruteForceOpt"
    UNIFORM_RANDOM = "UniformRandom"

    @classmethod
    def parse(cls, name: str) -> "PolicyKind":
        for kind in cls:
            if name.lower() in (kind.value.lower(), kind.name.lower()):
                return kind
        raise ValueError(f"unknown policy {name!r}; choose from {[k.value for k in cls]}")


def sg_select(f: ObjectiveOracle, action_sizes: Sequence[int] | None = None) -> ActionProfile:
    """Sequential greedy: each agent in order takes its best marginal gain.

    Ranking candidates by ``f(prefix + a)`` is the same as ranking by the
    marginal gain.  Ties go to the lowest action index.
    """
    sizes = f.action_sizes if action_sizes is None else action_sizes
    profile = EMPTY_PROFILE
    for agent, size in enumerate(sizes):
        values = [f(profile.add(ActionId(agent, a))) for a in range(size)]
        best = int(np.argmax(values))
        profile = profile.add(ActionId(agent, best))
    return profile


def sg_hat_select(f_prev: ObjectiveOracle | None, action_sizes: Sequence[int]) -> ActionProfile:
    """Greedy on the previous step's objective; index 0 everywhere before any."""
    if f_prev is None:
        return ActionProfile.from_indices([0] * len(action_sizes))
    return sg_select(f_prev, action_sizes)


def brute_force_opt(f: ObjectiveOracle, action_sizes: Sequence[int] | None = None
                    ) -> tuple[ActionProfile, float]:
    """Exhaustive maximum over full profiles.

    Profiles are scanned in lexicographic order and only a strictly larger
    value replaces the incumbent, so ties resolve to the lexicographically
    smallest profile.
    """
    sizes = tuple(f.action_sizes if action_sizes is None else action_sizes)
    n = math.prod(sizes)
    if n > MAX_BRUTE_FORCE_PROFILES:
        raise EnumerationTooLargeError(
            f"{n} profiles exceeds the guard of {MAX_BRUTE_FORCE_PROFILES}")
    best_profile, best_value = None, -math.inf
    for combo in itertools.product(*(range(s) for s in sizes)):
        profile = ActionProfile.from_indices(combo)
        value = f(profile)
        if value > best_value:
            best_profile, best_value = profile, value
    return best_profile, best_value


class _Policy:
    needs_upcoming = False

    def __init__(self, action_sizes: Sequence[int]):
        self.action_sizes = tuple(int(s) for s in action_sizes)

    def select_actions(self, upcoming: ObjectiveOracle | None = None) -> ActionProfile:
        raise NotImplementedError

    def feedback(self, f_t: ObjectiveOracle, executed: ActionProfile) -> None:
        pass


class ClairvoyantGreedyPolicy(_Policy):
    """Greedy on the current step's objective, which it is handed in advance."""

    needs_upcoming = True

    def select_actions(self, upcoming=None):
        if upcoming is None:
            raise ValueError("clairvoyant greedy needs the upcoming objective")
        return sg_select(upcoming, self.action_sizes)


class LaggedGreedyPolicy(_Policy):
    def __init__(self, action_sizes):
        super().__init__(action_sizes)
        self.previous = None

    def select_actions(self, upcoming=None):
        return sg_hat_select(self.previous, self.action_sizes)

    def feedback(self, f_t, executed):
        self.previous = f_t


class BruteForcePolicy(_Policy):
    needs_upcoming = True

    def select_actions(self, upcoming=None):
        if upcoming is None:
            raise ValueError("brute-force policy needs the upcoming objective")
        return brute_force_opt(upcoming, self.action_sizes)[0]


class UniformRandomPolicy(_Policy):
    def __init__(self, action_sizes, random_state=None):
        super().__init__(action_sizes)
        self.rng = np.random.default_rng(random_state)

    def select_actions(self, upcoming=None):
        return ActionProfile.from_indices([int(self.rng.integers(s)) for s in self.action_sizes])
