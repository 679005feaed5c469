"""YAML scenario files.

Keys carry their units (``horizon_s``, ``trigger_radius_units``).  Every
validation error names the file and line of the offending key.
"""
from __future__ import annotations

import os
from typing import Any

import yaml

from .baselines import PolicyKind
from .tracking_sim import Adversarial, NoisyRect, ScenarioConfig, TargetSpec

TOP_LEVEL_KEYS = {
    "horizon_s", "steps", "scenario", "robots", "targets", "policy", "master_seed",
    "instances", "reward_scale", "output_path", "brute_force", "tail_fraction",
    "d_min_units", "adversarial", "noisy_rect",
}
ADVERSARIAL_KEYS = {
    "trigger_radius_units": "trigger_radius",
    "dodge_speed_units_per_s": "dodge_speed",
    "dodge_duration_s": "dodge_duration",
    "return_duration_s": "return_duration",
    "return_vertical_units_per_s": "return_vertical",
    "return_horizontal_units_per_s": "return_horizontal",
    "nominal_speed_units_per_s": "nominal_speed",
}
NOISY_RECT_KEYS = {
    "width_units": "width",
    "height_units": "height",
    "speed_units_per_s": "speed",
    "noise_variance": "noise_variance",
    "clockwise": "clockwise",
}
TARGET_KEYS = {"position", "velocity_units_per_s"}


class ConfigError(ValueError):
    pass


def _line_index(node, path=(), out=None) -> dict[tuple, int]:
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            key_path = path + (key_node.value,)
            out[key_path] = key_node.start_mark.line + 1
            _line_index(value_node, key_path, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            out[path + (i,)] = item.start_mark.line + 1
            _line_index(item, path + (i,), out)
    return out


class _Reader:
    def __init__(self, source: str, lines: dict[tuple, int]):
        self.source = source
        self.lines = lines

    def fail(self, path: tuple, message: str):
        while path and path not in self.lines:
            path = path[:-1]
        line = self.lines.get(path)
        where = f"{self.source}:{line}" if line else self.source
        raise ConfigError(f"{where}: {message}")

    def number(self, value, path, *, integer=False, positive=False, nonnegative=False):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(path, f"{path[-1]} must be a number, got {value!r}")
        if integer and int(value) != value:
            self.fail(path, f"{path[-1]} must be an integer, got {value!r}")
        if positive and not value > 0:
            self.fail(path, f"{path[-1]} must be positive, got {value!r}")
        if nonnegative and value < 0:
            self.fail(path, f"{path[-1]} must be nonnegative, got {value!r}")
        return int(value) if integer else float(value)

    def point(self, value, path):
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            self.fail(path, f"expected an [x, y] pair, got {value!r}")
        return tuple(self.number(v, path + (i,)) for i, v in enumerate(value))

    def mapping(self, value, path, allowed):
        if not isinstance(value, dict):
            self.fail(path, f"{path[-1] if path else 'config'} must be a mapping")
        for key in value:
            if key not in allowed:
                self.fail(path + (key,), f"unknown key {key!r}")
        return value


def parse_config(text: str, source: str = "<config>") -> ScenarioConfig:
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}" if mark else source
        raise ConfigError(f"{where}: {getattr(exc, 'problem', exc)}") from None
    rd = _Reader(source, _line_index(root))
    if data is None:
        rd.fail((), "empty config")
    rd.mapping(data, (), TOP_LEVEL_KEYS)
    for key in ("horizon_s", "steps", "scenario", "robots", "targets"):
        if key not in data:
            rd.fail((), f"missing required key {key!r}")

    kw: dict[str, Any] = {}
    kw["horizon_s"] = rd.number(data["horizon_s"], ("horizon_s",), positive=True)
    kw["steps"] = rd.number(data["steps"], ("steps",), integer=True, positive=True)
    scenario = data["scenario"]
    if scenario not in ("straight_line", "noisy_rect", "adversarial"):
        rd.fail(("scenario",), f"unknown scenario {scenario!r}")
    kw["scenario"] = scenario

    if not isinstance(data["robots"], list) or not data["robots"]:
        rd.fail(("robots",), "robots must be a non-empty list of [x, y]")
    kw["robots"] = [rd.point(p, ("robots", i)) for i, p in enumerate(data["robots"])]

    if not isinstance(data["targets"], list) or not data["targets"]:
        rd.fail(("targets",), "targets must be a non-empty list")
    targets = []
    for i, item in enumerate(data["targets"]):
        path = ("targets", i)
        if isinstance(item, list):
            targets.append(TargetSpec(rd.point(item, path)))
            continue
        rd.mapping(item, path, TARGET_KEYS)
        if "position" not in item:
            rd.fail(path, "target needs a position")
        spec = TargetSpec(rd.point(item["position"], path + ("position",)))
        if "velocity_units_per_s" in item:
            spec.velocity = rd.point(item["velocity_units_per_s"], path + ("velocity_units_per_s",))
        targets.append(spec)
    kw["targets"] = targets

    if "policy" in data:
        try:
            kw["policy"] = PolicyKind.parse(str(data["policy"])).value
        except ValueError as exc:
            rd.fail(("policy",), str(exc))
    if "master_seed" in data:
        kw["master_seed"] = rd.number(data["master_seed"], ("master_seed",), integer=True,
                                      nonnegative=True)
    if "instances" in data:
        kw["instances"] = rd.number(data["instances"], ("instances",), integer=True,
                                    positive=True)
    if "reward_scale" in data:
        value = data["reward_scale"]
        kw["reward_scale"] = "auto" if value == "auto" else rd.number(
            value, ("reward_scale",), positive=True)
    if "output_path" in data:
        kw["output_path"] = str(data["output_path"])
    if "brute_force" in data:
        if not isinstance(data["brute_force"], bool):
            rd.fail(("brute_force",), "brute_force must be true or false")
        kw["brute_force"] = data["brute_force"]
    if "tail_fraction" in data:
        frac = rd.number(data["tail_fraction"], ("tail_fraction",), positive=True)
        if frac > 1:
            rd.fail(("tail_fraction",), "tail_fraction must be at most 1")
        kw["tail_fraction"] = frac
    if "d_min_units" in data:
        kw["d_min"] = rd.number(data["d_min_units"], ("d_min_units",), positive=True)

    for section, keys, cls in (("adversarial", ADVERSARIAL_KEYS, Adversarial),
                               ("noisy_rect", NOISY_RECT_KEYS, NoisyRect)):
        if section not in data:
            continue
        block = rd.mapping(data[section] or {}, (section,), keys)
        fields = {}
        for key, value in block.items():
            if key == "clockwise":
                fields["clockwise"] = bool(value)
            else:
                fields[keys[key]] = rd.number(value, (section, key), positive=True)
        kw[section] = cls(**fields)

    try:
        return ScenarioConfig(**kw)
    except ValueError as exc:
        rd.fail((), str(exc))


def load_config(path: str | os.PathLike) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), str(path))
