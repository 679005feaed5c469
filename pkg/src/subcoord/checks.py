"""Self-check suites: submodularity of the tracking objective and the
agreement of the log-domain forecaster with its linear-domain reference."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import forecaster as fsf
from .core import ActionProfile, CheckReport, FunctionOracle, check_normalized_monotone_submodular
from .reference import LinearFixedShare
from .tracking_sim import TrackingObjective


def random_tracking_objective(rng: np.random.Generator, n_robots: int = 2,
                              n_targets: int = 2, extent: float = 5.0) -> TrackingObjective:
    robots = rng.uniform(-extent, extent, size=(n_robots, 2))
    targets = rng.uniform(-extent, extent, size=(n_targets, 2))
    dt = rng.choice([0.02, 0.05, 0.1, 0.5, 1.0])
    return TrackingObjective(robots, targets, dt)


def supermodular_oracle(n_agents: int = 2, n_actions: int = 8) -> FunctionOracle:
    """Negative control: the square of the number of bound agents."""
    return FunctionOracle(lambda p: float(len(p)) ** 2, (n_actions,) * n_agents)


@dataclass
class SubmodularityResult:
    n_instances: int
    failures: list[tuple[int, CheckReport]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def check_tracking_submodularity(n_instances: int = 200, seed: int = 0,
                                 tol: float = 1e-9) -> SubmodularityResult:
    rng = np.random.default_rng(seed)
    result = SubmodularityResult(n_instances)
    for k in range(n_instances):
        report = check_normalized_monotone_submodular(random_tracking_objective(rng), tol=tol)
        if not report.passed:
            result.failures.append((k, report))
    return result


@dataclass
class EquivalenceResult:
    max_error: float
    worst: tuple | None
    n_streams: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tol


def forecaster_equivalence(horizons=(2, 4, 8, 16), action_counts=(2, 3, 4),
                           n_streams: int = 100, seed: int = 0,
                           tol: float = 1e-9) -> EquivalenceResult:
    """Largest per-entry gap between the two forecasters over random reward
    streams in [0, 1], checked before the first and after every update."""
    rng = np.random.default_rng(seed)
    max_error, worst, count = 0.0, None, 0
    for T in horizons:
        for n in action_counts:
            for _ in range(n_streams):
                rewards = rng.random((T, n))
                state = fsf.init(T, n)
                ref = LinearFixedShare(T, n)
                for t in range(T + 1):
                    err = float(np.max(np.abs(fsf.distribution(state) - ref.distribution())))
                    if err > max_error:
                        max_error, worst = err, (T, n, t)
                    if t < T:
                        state = fsf.observe(state, rewards[t])
                        ref.update(rewards[t])
                count += 1
    return EquivalenceResult(max_error, worst, count, tol)
