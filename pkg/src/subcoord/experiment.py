"""Seeded multi-instance runs of a tracking scenario and their summaries."""
from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import metrics
from .baselines import (BruteForcePolicy, ClairvoyantGreedyPolicy, LaggedGreedyPolicy,
                        PolicyKind, UniformRandomPolicy, brute_force_opt)
from .metrics import StepRecord, Trace
from .osg import OnlineSequentialGreedy
from .tracking_sim import ScenarioConfig, StepLog, TrackingEnvironment, make_environment


def policy_seed(seed: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(0,))


def make_policy(config: ScenarioConfig, env: TrackingEnvironment, seed: int):
    kind = PolicyKind.parse(config.policy)
    sizes = env.action_sizes
    if kind is PolicyKind.OSG:
        return OnlineSequentialGreedy(sizes, max(config.steps, 1),
                                      config.resolved_reward_scale(),
                                      random_state=policy_seed(seed)).reset()
    if kind is PolicyKind.SG_CLAIRVOYANT:
        return ClairvoyantGreedyPolicy(sizes)
    if kind is PolicyKind.SG_HAT:
        return LaggedGreedyPolicy(sizes)
    if kind is PolicyKind.BRUTE_FORCE_OPT:
        return BruteForcePolicy(sizes)
    return UniformRandomPolicy(sizes, random_state=policy_seed(seed))


@dataclass
class InstanceResult:
    instance: int
    seed: int
    trace: Trace
    log: list[StepLog]
    dt: float

    @property
    def maneuvers(self) -> int:
        return self.log[-1].maneuvers if self.log else 0


def run_instance(config: ScenarioConfig, instance: int) -> InstanceResult:
    seed = config.master_seed + instance
    env = make_environment(config, seed)
    policy = make_policy(config, env, seed)
    trace = Trace(action_sizes=env.action_sizes, seed=seed)
    is_osg = isinstance(policy, OnlineSequentialGreedy)
    for _ in range(config.steps):
        upcoming = env.peek() if policy.needs_upcoming else None
        chosen = policy.select_actions(upcoming)
        f_t = env.step(chosen)
        if is_osg:
            value = policy.feedback(f_t, chosen).objective_value
        else:
            value = f_t(chosen)
            policy.feedback(f_t, chosen)
        record = StepRecord(chosen, value)
        if config.brute_force:
            record.opt_profile, record.opt_value = brute_force_opt(f_t)
        trace.steps.append(record)
    if is_osg:
        trace.counters = policy.counters_.as_dict()
    return InstanceResult(instance, seed, trace, env.log, config.dt)


def _run_one(args):
    return run_instance(*args)


def run_instances(config: ScenarioConfig, parallel: int = 1) -> list[InstanceResult]:
    """All instances in instance order, whatever the degree of parallelism."""
    jobs = [(config, k) for k in range(config.instances)]
    if parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(_run_one, jobs))
    return [_run_one(job) for job in jobs]


def tail_start(n_steps: int, tail_fraction: float) -> int:
    """Index of the first step in the tail window (last ``tail_fraction`` of steps)."""
    return n_steps - int(math.ceil(tail_fraction * n_steps - 1e-9))


def summarize(config: ScenarioConfig, results: list[InstanceResult]) -> dict:
    start = tail_start(config.steps, config.tail_fraction)
    per_target = []
    for res in results:
        md = np.array([log.min_distance for log in res.log[start:]])
        per_target.append(md.mean(axis=0) if len(md) else np.full(len(config.targets), np.nan))
    per_target = np.mean(per_target, axis=0)
    maneuvers = [res.maneuvers for res in results]

    summary = {
        "scenario": config.scenario,
        "policy": PolicyKind.parse(config.policy).value,
        "horizon_s": config.horizon_s,
        "steps": config.steps,
        "replanning_hz": config.replanning_hz,
        "instances": config.instances,
        "master_seed": config.master_seed,
        "reward_scale": config.resolved_reward_scale(),
        "tail_start_s": start * config.dt,
        "mean_tail_min_distance_per_target": per_target.tolist(),
        "mean_tail_min_distance": float(np.mean(per_target)),
        "maneuvers_mean": float(np.mean(maneuvers)),
        "maneuvers_total": int(sum(maneuvers)),
        "maneuvers_per_instance": maneuvers,
    }
    if config.brute_force and config.steps:
        summary.update(metrics.summarize_regret([res.trace for res in results]))
    counters = [res.trace.counters for res in results if res.trace.counters]
    if counters:
        summary["counters"] = {
            key: (np.sum([c[key] for c in counters], axis=0).tolist())
            for key in ("gain_evals", "prefix_evals", "arithmetic_ops")
        }
    return summary


def with_overrides(config: ScenarioConfig, **overrides) -> ScenarioConfig:
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return dataclasses.replace(config, **overrides) if overrides else config
