"""Planar multi-robot target tracking.

Robots move with one of eight axis-aligned motion primitives per step.
Targets follow a straight line, a noisy rectangle, or evade robots that come
within a trigger radius.  After every step the environment exposes the
reciprocal-distance objective as a full-information oracle: it scores any
hypothetical robot actions against the targets' observed end positions.
"""
from __future__ import annotations

import copy
import dataclasses
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import ActionProfile, ObjectiveOracle

D_MIN = 0.1

DIRECTIONS = {
    "up": (0.0, 1.0),
    "down": (0.0, -1.0),
    "left": (-1.0, 0.0),
    "right": (1.0, 0.0),
}
SPEEDS = (1.0, 2.0)


@dataclass(frozen=True)
class RobotAction:
    direction: str
    speed: float

    @property
    def velocity(self) -> np.ndarray:
        return self.speed * np.asarray(DIRECTIONS[self.direction])


ROBOT_ACTIONS: tuple[RobotAction, ...] = tuple(
    RobotAction(d, s) for d in DIRECTIONS for s in SPEEDS
)
N_ROBOT_ACTIONS = len(ROBOT_ACTIONS)
ACTION_VELOCITIES = np.array([a.velocity for a in ROBOT_ACTIONS])


def action_index(direction: str, speed: float) -> int:
    return ROBOT_ACTIONS.index(RobotAction(direction, float(speed)))


# --------------------------------------------------------------------------
# target behaviours


@dataclass
class StraightLine:
    velocity: tuple[float, float] = (1.0, 0.0)


@dataclass
class NoisyRect:
    width: float = 10.0
    height: float = 6.0
    speed: float = 1.0
    noise_variance: float = 2.0
    clockwise: bool = False


@dataclass
class Adversarial:
    trigger_radius: float = 1.5
    dodge_speed: float = 2.0
    dodge_duration: float = 1.0
    return_duration: float = 0.05
    return_vertical: float = 40.0
    return_horizontal: float = 30.0
    nominal_speed: float = 1.0


NOMINAL, DODGING, RETURNING = "nominal", "dodging", "returning"


@dataclass
class Target:
    position: np.ndarray
    behavior: StraightLine | NoisyRect | Adversarial
    mode: str = NOMINAL
    mode_elapsed: float = 0.0
    dodge_sign: float = 0.0
    nominal_y: float | None = None
    edge: int = 0
    edge_progress: float = 0.0
    maneuvers: int = 0

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        if self.nominal_y is None:
            self.nominal_y = float(self.position[1])


@dataclass
class WorldState:
    robots: np.ndarray
    targets: list[Target]
    dt: float
    t: int = 0

    def __post_init__(self):
        self.robots = np.asarray(self.robots, dtype=float).reshape(-1, 2)
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")

    @property
    def target_positions(self) -> np.ndarray:
        return np.array([tg.position for tg in self.targets]).reshape(-1, 2)

    @property
    def maneuvers(self) -> int:
        return sum(tg.maneuvers for tg in self.targets)

    def copy(self) -> "WorldState":
        targets = [dataclasses.replace(tg, position=tg.position.copy()) for tg in self.targets]
        return WorldState(self.robots.copy(), targets, self.dt, self.t)


# --------------------------------------------------------------------------
# objective


class TrackingObjective(ObjectiveOracle):
    """Sum over targets of the best reciprocal distance among included robots.

    Each robot's hypothetical end position is its step-start position moved
    by the chosen action for ``dt``.  Distances are clamped below at
    ``d_min`` inside the objective only.
    """

    def __init__(self, robot_starts, target_ends, dt: float, d_min: float = D_MIN):
        starts = np.asarray(robot_starts, dtype=float).reshape(-1, 2)
        ends = np.asarray(target_ends, dtype=float).reshape(-1, 2)
        if len(starts) == 0 or len(ends) == 0:
            raise ValueError("need at least one robot and one target")
        self.robot_starts = starts
        self.target_ends = ends
        self.dt = float(dt)
        self.d_min = float(d_min)
        self.action_sizes = (N_ROBOT_ACTIONS,) * len(starts)
        moved = starts[:, None, :] + dt * ACTION_VELOCITIES[None, :, :]
        dist = np.linalg.norm(moved[:, :, None, :] - ends[None, None, :, :], axis=-1)
        # inv_dist[robot, action, target]
        self.inv_dist = 1.0 / np.maximum(dist, self.d_min)
        self._table = self.inv_dist.tolist()

    def evaluate(self, profile: ActionProfile) -> float:
        best = None
        for agent, index in profile:
            row = self._table[agent][index]
            best = row if best is None else [max(b, r) for b, r in zip(best, row)]
        return 0.0 if best is None else math.fsum(best)

    def max_singleton_gain(self) -> float:
        return len(self.target_ends) / self.d_min


def objective_oracle(robot_positions_at_step_start, target_positions_at_step_end, dt,
                     d_min: float = D_MIN) -> TrackingObjective:
    return TrackingObjective(robot_positions_at_step_start, target_positions_at_step_end,
                             dt, d_min)


# --------------------------------------------------------------------------
# kinematics


def min_distance_per_target(state: WorldState) -> np.ndarray:
    """Raw (unclamped) distance from each target to its nearest robot."""
    diff = state.target_positions[:, None, :] - state.robots[None, :, :]
    return np.linalg.norm(diff, axis=-1).min(axis=1)


def _rect_corners(origin: np.ndarray, b: NoisyRect) -> np.ndarray:
    w, h = b.width, b.height
    offsets = [(0, 0), (w, 0), (w, h), (0, h)]
    if b.clockwise:
        offsets = [(0, 0), (0, h), (w, h), (w, 0)]
    return origin + np.array(offsets, dtype=float)


def _advance_noisy_rect(tg: Target, dt: float, rng: np.random.Generator,
                        corners: np.ndarray) -> None:
    b: NoisyRect = tg.behavior
    remaining = b.speed * dt
    displacement = np.zeros(2)
    lateral_dir = None
    while remaining > 1e-15:
        a, c = corners[tg.edge], corners[(tg.edge + 1) % 4]
        length = float(np.linalg.norm(c - a))
        heading = (c - a) / length
        if lateral_dir is None:
            lateral_dir = np.array([-heading[1], heading[0]])
        step = min(remaining, length - tg.edge_progress)
        displacement += step * heading
        tg.edge_progress += step
        remaining -= step
        if tg.edge_progress >= length - 1e-12:
            tg.edge = (tg.edge + 1) % 4
            tg.edge_progress = 0.0
    lateral_speed = rng.normal(0.0, math.sqrt(b.noise_variance))
    tg.position = tg.position + displacement + lateral_speed * dt * lateral_dir


def _dodge_sign(tg: Target, robots: np.ndarray) -> float:
    b: Adversarial = tg.behavior
    reach = b.dodge_speed * b.dodge_duration
    best_sign, best_dist = 1.0, -math.inf
    for sign in (1.0, -1.0):
        end = tg.position + np.array([0.0, sign * reach])
        d = float(np.linalg.norm(robots - end, axis=1).min())
        if d > best_dist:
            best_sign, best_dist = sign, d
    return best_sign


def _advance_adversarial(tg: Target, dt: float, robots: np.ndarray) -> None:
    b: Adversarial = tg.behavior
    if tg.mode == NOMINAL:
        nearest = float(np.linalg.norm(robots - tg.position, axis=1).min())
        if nearest <= b.trigger_radius:
            tg.mode, tg.mode_elapsed = DODGING, 0.0
            tg.dodge_sign = _dodge_sign(tg, robots)
            tg.maneuvers += 1
    remaining = dt
    # committed segments can end mid-step; integrate piecewise
    while remaining > 1e-12:
        if tg.mode == NOMINAL:
            tg.position = tg.position + np.array([b.nominal_speed * remaining, 0.0])
            remaining = 0.0
        elif tg.mode == DODGING:
            tau = min(remaining, b.dodge_duration - tg.mode_elapsed)
            tg.position = tg.position + np.array([0.0, tg.dodge_sign * b.dodge_speed * tau])
            tg.mode_elapsed += tau
            remaining -= tau
            if tg.mode_elapsed >= b.dodge_duration - 1e-12:
                tg.mode, tg.mode_elapsed = RETURNING, 0.0
        else:
            tau = min(remaining, b.return_duration - tg.mode_elapsed)
            tg.position = tg.position + np.array(
                [b.return_horizontal * tau, -tg.dodge_sign * b.return_vertical * tau])
            tg.mode_elapsed += tau
            remaining -= tau
            if tg.mode_elapsed >= b.return_duration - 1e-12:
                tg.position = np.array([tg.position[0], tg.nominal_y])
                tg.mode, tg.mode_elapsed = NOMINAL, 0.0


def advance_targets(state: WorldState, rng: np.random.Generator | None = None,
                    rect_corners: Sequence[np.ndarray] | None = None) -> WorldState:
    """Return a copy of ``state`` with every target moved by one step.

    Evasive targets decide against the robots' current (step-start) positions.
    """
    new = state.copy()
    for k, tg in enumerate(new.targets):
        b = tg.behavior
        if isinstance(b, StraightLine):
            tg.position = tg.position + state.dt * np.asarray(b.velocity, dtype=float)
        elif isinstance(b, NoisyRect):
            if rng is None:
                raise ValueError("noisy rectangular targets need a random generator")
            corners = rect_corners[k] if rect_corners is not None else _rect_corners(tg.position, b)
            _advance_noisy_rect(tg, state.dt, rng, corners)
        elif isinstance(b, Adversarial):
            _advance_adversarial(tg, state.dt, state.robots)
        else:
            raise TypeError(f"unknown target behavior {b!r}")
    return new


def advance_robots(state: WorldState, executed: ActionProfile) -> np.ndarray:
    robots = state.robots.copy()
    for agent, index in executed:
        robots[agent] += state.dt * ACTION_VELOCITIES[index]
    return robots


# --------------------------------------------------------------------------
# environment driver


@dataclass
class StepLog:
    t: int
    time_s: float
    robots: np.ndarray
    targets: np.ndarray
    min_distance: np.ndarray
    maneuvers: int


@dataclass
class TrackingEnvironment:
    """Steps the world and hands back each step's retrospective objective.

    Per step: targets advance (reacting to step-start robot positions),
    robots execute their actions, and the objective is built from the
    step-start robot positions and the step-end target positions.
    """

    state: WorldState
    rng: np.random.Generator
    n_steps: int
    d_min: float = D_MIN
    log: list[StepLog] = field(default_factory=list)
    rect_corners: list = field(default_factory=list)

    def __post_init__(self):
        self.action_sizes = (N_ROBOT_ACTIONS,) * len(self.state.robots)
        if not self.rect_corners:
            self.rect_corners = [
                _rect_corners(tg.position, tg.behavior) if isinstance(tg.behavior, NoisyRect)
                else None for tg in self.state.targets
            ]

    @property
    def reward_bound(self) -> float:
        """A priori bound on any single robot's marginal gain."""
        return len(self.state.targets) / self.d_min

    @property
    def done(self) -> bool:
        return self.state.t >= self.n_steps

    def peek(self) -> TrackingObjective:
        """The objective the next step will reveal, computed on copies.

        Only clairvoyant baselines may call this.  The targets' motion does
        not depend on the robots' choice within the step, so it is known.
        """
        rng = copy.deepcopy(self.rng)
        nxt = advance_targets(self.state, rng, self.rect_corners)
        return TrackingObjective(self.state.robots, nxt.target_positions, self.state.dt,
                                 self.d_min)

    def step(self, executed: ActionProfile) -> TrackingObjective:
        if self.done:
            raise RuntimeError(f"environment finished after {self.n_steps} steps")
        if len(executed) != len(self.state.robots):
            raise ValueError(f"profile {executed!r} does not bind every robot")
        start = self.state.robots
        nxt = advance_targets(self.state, self.rng, self.rect_corners)
        nxt.robots = advance_robots(self.state, executed)
        nxt.t = self.state.t + 1
        self.state = nxt
        self.log.append(StepLog(
            t=nxt.t,
            time_s=nxt.t * nxt.dt,
            robots=nxt.robots.copy(),
            targets=nxt.target_positions,
            min_distance=min_distance_per_target(nxt),
            maneuvers=nxt.maneuvers,
        ))
        return TrackingObjective(start, nxt.target_positions, nxt.dt, self.d_min)


# --------------------------------------------------------------------------
# scenario configuration

SCENARIOS = ("straight_line", "noisy_rect", "adversarial")


@dataclass
class TargetSpec:
    position: tuple[float, float]
    velocity: tuple[float, float] = (1.0, 0.0)


@dataclass
class ScenarioConfig:
    """One experiment: world geometry, target behaviour, policy and seeds.

    The replanning frequency is ``steps / horizon_s`` and is never set
    independently.
    """

    horizon_s: float
    steps: int
    scenario: str
    robots: list[tuple[float, float]]
    targets: list[TargetSpec]
    policy: str = "OSG"
    master_seed: int = 0
    instances: int = 1
    reward_scale: float | str = "auto"
    output_path: str = "out/run"
    brute_force: bool = False
    tail_fraction: float = 0.4
    d_min: float = D_MIN
    adversarial: Adversarial = field(default_factory=Adversarial)
    noisy_rect: NoisyRect = field(default_factory=NoisyRect)

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 0:
            raise ValueError(f"steps must be a nonnegative integer, got {self.steps!r}")
        if not self.horizon_s > 0:
            raise ValueError(f"horizon_s must be positive, got {self.horizon_s!r}")
        if self.instances < 1:
            raise ValueError(f"instances must be at least 1, got {self.instances!r}")
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if not self.robots or not self.targets:
            raise ValueError("need at least one robot and one target")
        if not 0 < self.tail_fraction <= 1:
            raise ValueError(f"tail_fraction must lie in (0, 1], got {self.tail_fraction!r}")
        if not self.d_min > 0:
            raise ValueError(f"d_min must be positive, got {self.d_min!r}")
        if self.reward_scale != "auto" and not (
                isinstance(self.reward_scale, (int, float)) and self.reward_scale > 0):
            raise ValueError(f"reward_scale must be 'auto' or positive, got {self.reward_scale!r}")

    @property
    def dt(self) -> float:
        return self.horizon_s / self.steps if self.steps else self.horizon_s

    @property
    def replanning_hz(self) -> float:
        return self.steps / self.horizon_s

    def behavior(self, spec: TargetSpec):
        if self.scenario == "straight_line":
            return StraightLine(tuple(spec.velocity))
        if self.scenario == "noisy_rect":
            return dataclasses.replace(self.noisy_rect)
        return dataclasses.replace(self.adversarial)

    def resolved_reward_scale(self) -> float:
        if self.reward_scale == "auto":
            return len(self.targets) / self.d_min
        return float(self.reward_scale)


def environment_seed(seed: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(1,))


def make_environment(config: ScenarioConfig, seed: int | None = None) -> TrackingEnvironment:
    """Fresh world for one instance; ``seed`` defaults to the master seed."""
    seed = config.master_seed if seed is None else seed
    targets = [Target(np.array(s.position, dtype=float), config.behavior(s))
               for s in config.targets]
    state = WorldState(np.array(config.robots, dtype=float), targets, config.dt)
    return TrackingEnvironment(state, np.random.default_rng(environment_seed(seed)),
                               config.steps, config.d_min)
