"""Flat key=value configuration for the pipeline commands.

Example file::

    # benchmark sweep
    thread_counts = 1,2,4
    trials = 5
    per_node_work_units = 200
    seed = 42

    # labeling
    p_min = 1.1
    boundaries = 1.1,1.3,inf
    energy_limits = 0.9,0.85

Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

from .labeling import COST_MODELS, PetBucketConfig
from .traversal import PowerModel, WorkConfig

__all__ = ["PipelineConfig", "parse_kv_file"]


def parse_kv_file(path: str | Path) -> dict[str, str]:
    """Read ``key = value`` lines; '#' starts a comment, blanks ignored."""
    out: dict[str, str] = {}
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_no}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _int_tuple(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(","))


def _float_tuple(text: str) -> tuple[float, ...]:
    return tuple(math.inf if part.strip() == "inf" else float(part)
                 for part in text.split(","))


@dataclass(frozen=True)
class PipelineConfig:
    """All tunables in one place. Defaults: a {1,2,4}-thread sweep with 5
    trials, a 10% significance threshold, two speedup buckets split at 1.3
    with energy floors 0.9 / 0.85, and 10 CV folds."""

    thread_counts: tuple[int, ...] = (1, 2, 4)
    trials: int = 5
    per_node_work_units: int = 200
    idle_power_w: float = 10.0
    core_power_w: float = 5.0
    seed: int = 0
    p_min: float = 1.1
    e_min: float = 1.1
    boundaries: tuple[float, ...] = (1.1, 1.3, math.inf)
    energy_limits: tuple[float, ...] = (0.9, 0.85)
    cost_model: str = "perf_energy"
    cv_folds: int = 10
    r_threshold: float = 0.1

    _PARSERS = {
        "thread_counts": _int_tuple,
        "trials": int,
        "per_node_work_units": int,
        "idle_power_w": float,
        "core_power_w": float,
        "seed": int,
        "p_min": float,
        "e_min": float,
        "boundaries": _float_tuple,
        "energy_limits": _float_tuple,
        "cost_model": str,
        "cv_folds": int,
        "r_threshold": float,
    }

    def __post_init__(self) -> None:
        if self.cost_model not in COST_MODELS:
            raise ValueError(f"cost_model must be one of {COST_MODELS}")

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        raw = parse_kv_file(path)
        unknown = set(raw) - set(cls._PARSERS)
        if unknown:
            raise ValueError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        kwargs = {key: cls._PARSERS[key](value) for key, value in raw.items()}
        return cls(**kwargs)

    def override(self, **kwargs) -> "PipelineConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def work_config(self) -> WorkConfig:
        return WorkConfig(thread_counts=self.thread_counts,
                          trials_per_config=self.trials,
                          per_node_work_units=self.per_node_work_units)

    def power_model(self) -> PowerModel:
        return PowerModel(idle_power_w=self.idle_power_w,
                          core_power_w=self.core_power_w)

    def bucket_config(self) -> PetBucketConfig:
        if self.boundaries[0] != self.p_min:
            raise ValueError(
                f"boundaries must start at p_min ({self.p_min}), "
                f"got {self.boundaries[0]}")
        return PetBucketConfig(boundaries=self.boundaries,
                               energy_limits=self.energy_limits)
