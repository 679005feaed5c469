"""Per-step CSV traces.

Columns, in order::

    instance, t, time_s,
    robot{i}_x, robot{i}_y, action_{i}            for every robot i
    target{j}_x, target{j}_y, target{j}_min_distance   for every target j
    f_value,
    opt_value, opt_action_{i}                      only with brute force on
    maneuver_count, max_actions

``t`` counts steps from 1 and ``time_s`` is the time at the end of the
step.  Floats carry 17 significant digits so a read back is exact.
``regret`` needs only ``instance``, ``t``, ``f_value``, ``opt_value``,
``opt_action_*`` and ``max_actions``.
"""
from __future__ import annotations

import csv
import os
import re
from collections import defaultdict
from typing import Iterable

from .core import ActionProfile
from .metrics import StepRecord, Trace


class MissingColumnError(ValueError):
    pass


def fmt(x) -> str:
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".17g")


def header(n_robots: int, n_targets: int, with_opt: bool) -> list[str]:
    cols = ["instance", "t", "time_s"]
    for i in range(n_robots):
        cols += [f"robot{i}_x", f"robot{i}_y", f"action_{i}"]
    for j in range(n_targets):
        cols += [f"target{j}_x", f"target{j}_y", f"target{j}_min_distance"]
    cols.append("f_value")
    if with_opt:
        cols.append("opt_value")
        cols += [f"opt_action_{i}" for i in range(n_robots)]
    cols += ["maneuver_count", "max_actions"]
    return cols


def run_rows(results, with_opt: bool) -> Iterable[list[str]]:
    for res in results:
        max_actions = max(res.trace.action_sizes)
        for log, rec in zip(res.log, res.trace.steps):
            row = [str(res.instance), str(log.t), fmt(log.time_s)]
            actions = rec.chosen.indices()
            for i, (x, y) in enumerate(log.robots):
                row += [fmt(x), fmt(y), str(actions[i])]
            for (x, y), d in zip(log.targets, log.min_distance):
                row += [fmt(x), fmt(y), fmt(d)]
            row.append(fmt(rec.value))
            if with_opt:
                row.append(fmt(rec.opt_value))
                row += [str(a) for a in rec.opt_profile.indices()]
            row += [str(log.maneuvers), str(max_actions)]
            yield row


def write_run_csv(path: str | os.PathLike, results, n_robots: int, n_targets: int,
                  with_opt: bool) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header(n_robots, n_targets, with_opt))
        writer.writerows(run_rows(results, with_opt))


def write_trace_csv(path: str | os.PathLike, traces: dict[int, Trace]) -> None:
    """Minimal trace file (no world columns) for traces from any oracle."""
    n_agents = max(t.n_agents for t in traces.values())
    cols = (["instance", "t", "f_value", "opt_value"]
            + [f"action_{i}" for i in range(n_agents)]
            + [f"opt_action_{i}" for i in range(n_agents)] + ["max_actions"])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(cols)
        for instance, trace in sorted(traces.items()):
            for t, rec in enumerate(trace.steps, start=1):
                writer.writerow([instance, t, fmt(rec.value), fmt(rec.opt_value)]
                                + list(rec.chosen.indices())
                                + list(rec.opt_profile.indices())
                                + [max(trace.action_sizes)])


def read_traces(path: str | os.PathLike) -> dict[int, Trace]:
    """Rebuild one :class:`Trace` per instance from a CSV with optimum columns."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        opt_cols = sorted((c for c in cols if re.fullmatch(r"opt_action_\d+", c)),
                          key=lambda c: int(c.rsplit("_", 1)[1]))
        act_cols = sorted((c for c in cols if re.fullmatch(r"action_\d+", c)),
                          key=lambda c: int(c.rsplit("_", 1)[1]))
        missing = [c for c in ("instance", "t", "f_value", "opt_value", "max_actions")
                   if c not in cols]
        if not opt_cols:
            missing.append("opt_action_*")
        if missing:
            raise MissingColumnError(f"{path}: missing column(s) {', '.join(missing)}")
        rows = defaultdict(list)
        max_actions = {}
        for row in reader:
            k = int(row["instance"])
            chosen = (ActionProfile.from_indices([int(row[c]) for c in act_cols])
                      if act_cols else ActionProfile())
            rows[k].append((int(row["t"]), StepRecord(
                chosen, float(row["f_value"]),
                ActionProfile.from_indices([int(row[c]) for c in opt_cols]),
                float(row["opt_value"]))))
            max_actions[k] = int(row["max_actions"])
    traces = {}
    for k, items in rows.items():
        items.sort(key=lambda item: item[0])
        traces[k] = Trace(steps=[rec for _, rec in items],
                          action_sizes=(max_actions[k],) * len(opt_cols), seed=k)
    return traces
