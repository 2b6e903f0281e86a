"""Run configuration: JSON loading, merging with defaults, validation."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .errors import ConfigError
from .nonlocality import DEFAULT_EPS
from .protocols import PROBE_ALPHA1_LIMIT, TRANSIT_KEYS, ExperimentConfig, Transit, transit_amplitudes
from .pulse_model import Amplitudes, CouplingParams
from .quantum_core import InteractionMode

SCHEMA_VERSION = "1"
GEOMETRY_KEYS = ("a_l", "R_def", "b", "omega0")


def load_schema(name: str) -> dict:
    return json.loads(resources.files("cavity_hardy").joinpath("schemas", f"{name}.schema.json").read_text())


def default_config_dict() -> dict:
    return json.loads(resources.files("cavity_hardy").joinpath("data", "default_config.json").read_text())


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict) and key != "transits":
            out[key] = _merge(out[key], value)
        elif key == "transits":
            out[key] = {**out.get(key, {}), **value}
        else:
            out[key] = value
    return out


@dataclass(frozen=True)
class RunConfig:
    """Validated, fully resolved configuration. ``raw`` is the merged JSON echo."""

    raw: dict
    mode: InteractionMode
    transits: dict[str, Transit]
    detection_branch: dict[str, str]
    direct_path: str
    cutoff: int | None
    eps: float

    def experiment_config(self, experiment_id: int, mode: InteractionMode | None = None) -> ExperimentConfig:
        return ExperimentConfig.for_experiment(
            experiment_id,
            mode=mode or self.mode,
            transits=self.transits,
            detection_branch=self.detection_branch,
            direct_path=self.direct_path,
            cutoff=self.cutoff,
        )

    def base_experiment_config(self) -> ExperimentConfig:
        return ExperimentConfig(
            mode=self.mode, transits=self.transits, detection_branch=self.detection_branch,
            direct_path=self.direct_path, cutoff=self.cutoff,
        )

    def with_mode(self, mode) -> "RunConfig":
        mode = InteractionMode.parse(mode)
        return from_dict({**self.raw, "mode": mode.value}, merge_defaults=False)

    def with_transit_value(self, key: str, param: str, value: float) -> "RunConfig":
        raw = copy.deepcopy(self.raw)
        raw["transits"][key][param] = value
        return from_dict(raw, merge_defaults=False)


def from_dict(data: dict[str, Any], merge_defaults: bool = True) -> RunConfig:
    """Validate ``data`` and resolve it; every violated precondition is reported at once."""
    problems = []
    for err in sorted(jsonschema.Draft202012Validator(load_schema("config")).iter_errors(data), key=lambda e: list(e.path)):
        where = "/".join(str(p) for p in err.path) or "<root>"
        problems.append(f"{where}: {err.message}")
    if problems:
        raise ConfigError(f"{len(problems)} configuration problem(s)", problems)

    raw = _merge(default_config_dict(), data) if merge_defaults else copy.deepcopy(data)
    geometry = raw["geometry"]
    transits: dict[str, Transit] = {}
    for key in TRANSIT_KEYS:
        entry = raw["transits"][key]
        if "alpha1" in entry:
            try:
                transits[key] = Amplitudes.from_alphas(entry["alpha1"], entry["alpha2"])
            except ConfigError as exc:
                problems.append(f"transits/{key}: {exc}")
            continue
        fields = {g: entry.get(g, geometry[g]) for g in GEOMETRY_KEYS}
        fields.update(v=entry["v"], k=entry.get("k", 1.0))
        try:
            transits[key] = CouplingParams(**fields)
        except ConfigError as exc:
            problems.extend(f"transits/{key}: {p}" for p in exc.problems)

    for key in ("probe_C1", "probe_C2"):
        if key in transits and raw.get("direct_path", "probe") == "probe":
            a1 = transit_amplitudes(transits[key]).alpha1
            if abs(a1) >= PROBE_ALPHA1_LIMIT:
                problems.append(f"transits/{key}: probe must give |alpha1| < {PROBE_ALPHA1_LIMIT}, got {a1:.4g}")

    eps = raw.get("eps", DEFAULT_EPS)
    if not 0 < eps <= 0.05:
        problems.append(f"eps: must lie in (0, 0.05], got {eps}")
    if problems:
        raise ConfigError(f"{len(problems)} configuration problem(s)", problems)

    return RunConfig(
        raw=raw,
        mode=InteractionMode.parse(raw["mode"]),
        transits=transits,
        detection_branch=dict(raw["detection_branch"]),
        direct_path=raw["direct_path"],
        cutoff=raw.get("cutoff"),
        eps=float(eps),
    )


def load_config(path: str | Path | None = None) -> RunConfig:
    """Read a JSON config file; ``None`` gives the built-in reference operating point."""
    if path is None:
        return from_dict({})
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return from_dict(data)


__all__ = ["RunConfig", "from_dict", "load_config", "load_schema", "default_config_dict", "SCHEMA_VERSION"]
