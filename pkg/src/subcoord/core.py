"""Action profiles, set-function oracles and an exhaustive property checker.

The ground set is partitioned by agent: every agent owns a finite action set
and a profile binds at most one action per agent.  Objectives are set
functions over profiles.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

MAX_CHECK_PROFILES = 10**5


class ProfileConflictError(ValueError):
    """Raised when a profile would bind two actions to the same agent."""


class EnumerationTooLargeError(ValueError):
    """Raised when an exhaustive enumeration exceeds its guard."""


class ActionId(NamedTuple):
    agent: int
    index: int


class ActionProfile:
    """Immutable set of actions, at most one per agent, ordered by agent."""

    __slots__ = ("_entries", "_by_agent")

    def __init__(self, entries: Iterable[ActionId | tuple[int, int]] = ()):
        by_agent: dict[int, int] = {}
        for agent, index in entries:
            agent, index = int(agent), int(index)
            if agent < 0 or index < 0:
                raise ValueError(f"negative agent or action index: {(agent, index)}")
            if agent in by_agent:
                raise ProfileConflictError(f"agent {agent} bound twice")
            by_agent[agent] = index
        self._by_agent = dict(sorted(by_agent.items()))
        self._entries = tuple(ActionId(a, i) for a, i in self._by_agent.items())

    @classmethod
    def from_indices(cls, indices: Sequence[int]) -> "ActionProfile":
        """Full profile where agent ``i`` takes ``indices[i]``."""
        return cls(ActionId(i, a) for i, a in enumerate(indices))

    @property
    def entries(self) -> tuple[ActionId, ...]:
        return self._entries

    @property
    def agents(self) -> tuple[int, ...]:
        return tuple(self._by_agent)

    def action_of(self, agent: int) -> int | None:
        return self._by_agent.get(agent)

    def binds(self, agent: int) -> bool:
        return agent in self._by_agent

    def add(self, action: ActionId | tuple[int, int]) -> "ActionProfile":
        action = ActionId(*action)
        if action.agent in self._by_agent:
            raise ProfileConflictError(f"agent {action.agent} already bound in {self!r}")
        return ActionProfile(self._entries + (action,))

    def indices(self) -> tuple[int, ...]:
        """Action indices in agent order (meaningful for full profiles)."""
        return tuple(self._by_agent.values())

    def issubset(self, other: "ActionProfile") -> bool:
        return all(other._by_agent.get(a) == i for a, i in self._by_agent.items())

    def __iter__(self) -> Iterator[ActionId]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, action: object) -> bool:
        if not isinstance(action, tuple) or len(action) != 2:
            return False
        return self._by_agent.get(action[0]) == action[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ActionProfile):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(self._entries)

    def __repr__(self) -> str:
        inner = ", ".join(f"{a}:{i}" for a, i in self._entries)
        return f"ActionProfile({{{inner}}})"


EMPTY_PROFILE = ActionProfile()


class ObjectiveOracle:
    """Set function over action profiles.

    Subclasses implement :meth:`evaluate`.  ``action_sizes[i]`` is the size
    of agent ``i``'s action set.  Implementations must be deterministic and
    must not mutate shared state during evaluation.
    """

    action_sizes: tuple[int, ...] = ()

    def evaluate(self, profile: ActionProfile) -> float:
        raise NotImplementedError

    def __call__(self, profile: ActionProfile) -> float:
        return self.evaluate(profile)

    @property
    def n_agents(self) -> int:
        return len(self.action_sizes)


class FunctionOracle(ObjectiveOracle):
    """Wrap a plain callable ``profile -> float``."""

    def __init__(self, func: Callable[[ActionProfile], float], action_sizes: Sequence[int]):
        self.func = func
        self.action_sizes = tuple(int(s) for s in action_sizes)

    def evaluate(self, profile: ActionProfile) -> float:
        return float(self.func(profile))


class TableOracle(ObjectiveOracle):
    """Oracle backed by an explicit ``{profile: value}`` table.

    Missing profiles raise ``KeyError``; the empty profile defaults to 0.
    """

    def __init__(self, table: Mapping[ActionProfile, float], action_sizes: Sequence[int]):
        self.table = {EMPTY_PROFILE: 0.0, **{ActionProfile(k): float(v) for k, v in table.items()}}
        self.action_sizes = tuple(int(s) for s in action_sizes)

    def evaluate(self, profile: ActionProfile) -> float:
        return self.table[profile]


class CoverageOracle(ObjectiveOracle):
    """Weighted coverage: each action covers a subset of a weighted universe.

    ``cover[i][a]`` is a boolean mask over the universe for action ``a`` of
    agent ``i``.  The value of a profile is the weight of the union of the
    covered elements, which is normalized, monotone and submodular.
    """

    def __init__(self, cover: Sequence[np.ndarray], weights: np.ndarray):
        self.cover = [np.asarray(c, dtype=bool) for c in cover]
        self.weights = np.asarray(weights, dtype=float)
        self.action_sizes = tuple(c.shape[0] for c in self.cover)

    @classmethod
    def random(cls, action_sizes: Sequence[int], n_elements: int, rng: np.random.Generator,
               density: float = 0.3) -> "CoverageOracle":
        cover = [rng.random((size, n_elements)) < density for size in action_sizes]
        return cls(cover, rng.random(n_elements))

    def evaluate(self, profile: ActionProfile) -> float:
        covered = np.zeros(self.weights.shape[0], dtype=bool)
        for agent, index in profile:
            covered |= self.cover[agent][index]
        return float(self.weights[covered].sum())


class CountingOracle(ObjectiveOracle):
    """Transparent wrapper that counts evaluations."""

    def __init__(self, inner: ObjectiveOracle):
        self.inner = inner
        self.action_sizes = inner.action_sizes
        self.calls = 0

    def evaluate(self, profile: ActionProfile) -> float:
        self.calls += 1
        return self.inner.evaluate(profile)


def marginal_gain(f: ObjectiveOracle, action: ActionId | tuple[int, int],
                  base: ActionProfile) -> float:
    """Return ``f(base + {action}) - f(base)``.

    Raises :class:`ProfileConflictError` if ``base`` already binds the agent.
    """
    return f(base.add(action)) - f(base)


def all_profiles(action_sizes: Sequence[int], partial: bool = True) -> Iterator[ActionProfile]:
    """Enumerate profiles in lexicographic order of per-agent choices.

    With ``partial`` every agent may also be left unbound.
    """
    choices = [
        ([None] if partial else []) + list(range(size)) for size in action_sizes
    ]
    for combo in itertools.product(*choices):
        yield ActionProfile((i, a) for i, a in enumerate(combo) if a is not None)


def _sub_profiles(profile: ActionProfile) -> Iterator[ActionProfile]:
    entries = profile.entries
    for r in range(len(entries) + 1):
        for subset in itertools.combinations(entries, r):
            yield ActionProfile(subset)


@dataclass
class CheckReport:
    """Outcome of :func:`check_normalized_monotone_submodular`.

    Witnesses are ``None`` for passing conditions.  The monotone witness is
    ``(A, B, f(A), f(B))`` with ``A`` a sub-profile of ``B``; the submodular
    witness is ``(A, B, s, gain_A, gain_B)``.
    """

    normalized: bool
    monotone: bool
    submodular: bool
    empty_value: float = 0.0
    monotone_witness: tuple | None = None
    submodular_witness: tuple | None = None
    n_profiles: int = 0
    n_pairs: int = 0
    n_triples: int = 0
    tol: float = 1e-9
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.normalized and self.monotone and self.submodular

    def summary(self) -> str:
        lines = [
            f"normalized: {'pass' if self.normalized else 'FAIL'} (f(empty)={self.empty_value!r})",
            f"monotone:   {'pass' if self.monotone else 'FAIL'}"
            + (f" witness={self.monotone_witness}" if self.monotone_witness else ""),
            f"submodular: {'pass' if self.submodular else 'FAIL'}"
            + (f" witness={self.submodular_witness}" if self.submodular_witness else ""),
        ]
        return "\n".join(lines)


def check_normalized_monotone_submodular(
    f: ObjectiveOracle,
    agent_action_sizes: Sequence[int] | None = None,
    tol: float = 1e-9,
) -> CheckReport:
    """Exhaustively test the three defining conditions on every profile.

    Monotonicity is checked on every nested pair ``A ⊆ B``; submodularity on
    every ``A ⊆ B`` and every action ``s`` whose agent is unbound in ``B``
    (so ``B + {s}`` stays a valid profile).  Violations smaller than ``tol``
    are ignored.
    """
    sizes = tuple(f.action_sizes if agent_action_sizes is None else agent_action_sizes)
    n_full = math.prod(sizes)
    if n_full > MAX_CHECK_PROFILES:
        raise EnumerationTooLargeError(
            f"{n_full} full profiles exceeds the guard of {MAX_CHECK_PROFILES}"
        )

    profiles = list(all_profiles(sizes, partial=True))
    values = {p: f(p) for p in profiles}
    empty_value = values[EMPTY_PROFILE]
    report = CheckReport(
        normalized=abs(empty_value) <= tol,
        monotone=True,
        submodular=True,
        empty_value=empty_value,
        n_profiles=len(profiles),
        tol=tol,
    )

    for big in profiles:
        f_big = values[big]
        free = [ActionId(i, a) for i, size in enumerate(sizes) if not big.binds(i)
                for a in range(size)]
        gains_big = {s: values[big.add(s)] - f_big for s in free}
        for small in _sub_profiles(big):
            f_small = values[small]
            report.n_pairs += 1
            if report.monotone and f_small > f_big + tol:
                report.monotone = False
                report.monotone_witness = (small, big, f_small, f_big)
            if not report.submodular:
                continue
            for s in free:
                report.n_triples += 1
                gain_small = values[small.add(s)] - f_small
                if gain_small < gains_big[s] - tol:
                    report.submodular = False
                    report.submodular_witness = (small, big, s, gain_small, gains_big[s])
                    break
    return report
