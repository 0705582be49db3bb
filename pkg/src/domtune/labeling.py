"""Thread-count labeling from measured speedup/energy ratios.

Three cost models assign each page the thread count it should be rendered
with. Labels are nominal categories, not ordinals.

* performance: the thread count with the highest speedup, if that speedup
  clears a noise threshold; otherwise serial.
* energy: same rule applied to energy ratios.
* performance-energy: speedups are filtered by the noise threshold and
  bucketed into speedup intervals, each with its own energy-ratio floor.
  Buckets are scanned from fastest to slowest, within a bucket from the
  highest speedup down; the first tuple whose energy ratio clears its
  bucket's floor wins. Nothing qualifying means serial.

Tie rules everywhere prefer the smaller thread count (equal benefit for
less energy). Bucket membership is half-open on the left: a tuple with
speedup p lands in bucket j when boundaries[j] < p <= boundaries[j+1];
speedups above the top boundary are clamped into the top bucket so the
config generalizes beyond the ratios it was derived from.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_left
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .measurements import GreenupSet, SpeedupSet

__all__ = [
    "PET", "PetBucketConfig", "DEFAULT_P_MIN", "DEFAULT_E_MIN", "DEFAULT_BUCKETS",
    "COST_MODELS", "performance_label", "energy_label", "performance_energy_label",
    "pets_from_ratios", "write_labels_csv", "read_labels_csv",
]

SERIAL_LABEL = 1

# Defaults used throughout: a 10% improvement is the noise floor, and the
# two stock buckets tolerate up to 10% / 15% extra energy respectively.
DEFAULT_P_MIN = 1.1
DEFAULT_E_MIN = 1.1
COST_MODELS = ("perf", "energy", "perf_energy")


@dataclass(frozen=True)
class PET:
    """Performance-energy tuple for one non-serial thread configuration."""

    threads: int
    speedup: float
    greenup: float


@dataclass(frozen=True)
class PetBucketConfig:
    """Speedup bucket boundaries plus one energy-ratio floor per bucket.

    ``boundaries`` has one more entry than ``energy_limits``; the first
    boundary is the significance threshold p_min and must exceed 1.
    """

    boundaries: tuple[float, ...]
    energy_limits: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.boundaries) < 2:
            raise ValueError("need at least two boundaries (one bucket)")
        if len(self.energy_limits) != len(self.boundaries) - 1:
            raise ValueError("need exactly one energy limit per bucket")
        if any(b2 <= b1 for b1, b2 in zip(self.boundaries, self.boundaries[1:])):
            raise ValueError("boundaries must be strictly ascending")
        if self.p_min <= 1.0:
            raise ValueError("the first boundary (p_min) must be > 1")

    @property
    def p_min(self) -> float:
        return self.boundaries[0]

    def bucket_of(self, speedup: float) -> int:
        """Bucket index for a speedup already known to exceed p_min."""
        idx = bisect_left(self.boundaries, speedup) - 1
        return min(idx, len(self.energy_limits) - 1)


DEFAULT_BUCKETS = PetBucketConfig(boundaries=(DEFAULT_P_MIN, 1.3, math.inf),
                                  energy_limits=(0.9, 0.85))


def _best_ratio_label(entries: dict[int, float], threshold: float) -> int:
    best_t = SERIAL_LABEL
    best_value = -math.inf
    for t in sorted(entries):
        if t == SERIAL_LABEL:
            continue
        if entries[t] > best_value:  # strict: ties keep the smaller t
            best_t, best_value = t, entries[t]
    if best_value > threshold:
        return best_t
    return SERIAL_LABEL


def performance_label(speedup_set: SpeedupSet, p_min: float = DEFAULT_P_MIN) -> int:
    """Thread count with the maximum speedup when that maximum beats
    ``p_min``, else serial. Ties resolve to the smallest thread count."""
    if not speedup_set.entries:
        raise ValueError("empty speedup set")
    return _best_ratio_label(dict(speedup_set.entries), p_min)


def energy_label(greenup_set: GreenupSet, e_min: float = DEFAULT_E_MIN) -> int:
    """Same selection rule as :func:`performance_label`, on energy ratios."""
    if not greenup_set.entries:
        raise ValueError("empty greenup set")
    return _best_ratio_label(dict(greenup_set.entries), e_min)


def performance_energy_label(pets: Sequence[PET],
                             config: PetBucketConfig = DEFAULT_BUCKETS) -> int:
    """Bucketed selection trading speedup against energy tolerance.

    The scan stops at the first tuple that clears its bucket's energy
    floor; lower buckets are never allowed to override a hit in a higher
    one. Serial tuples are ignored; serial is the fallback label.
    """
    candidates = [p for p in pets
                  if p.threads != SERIAL_LABEL and p.speedup > config.p_min]
    if not candidates:
        return SERIAL_LABEL
    buckets: list[list[PET]] = [[] for _ in config.energy_limits]
    for pet in candidates:
        buckets[config.bucket_of(pet.speedup)].append(pet)
    for j in range(len(buckets) - 1, -1, -1):
        for pet in sorted(buckets[j], key=lambda p: (-p.speedup, p.threads)):
            if pet.greenup > config.energy_limits[j]:
                return pet.threads
    return SERIAL_LABEL


def pets_from_ratios(speedup_set: SpeedupSet, greenup_set: GreenupSet) -> list[PET]:
    """Pair up a page's speedups and greenups into non-serial tuples."""
    if speedup_set.page_id != greenup_set.page_id:
        raise ValueError("speedup/greenup sets describe different pages")
    pets = []
    for t in sorted(speedup_set.entries):
        if t == SERIAL_LABEL:
            continue
        if t not in greenup_set.entries:
            raise ValueError(f"page {speedup_set.page_id!r} has no greenup at t={t}")
        pets.append(PET(t, speedup_set.entries[t], greenup_set.entries[t]))
    return pets


def write_labels_csv(labels: Iterable[tuple[str, int]], cost_model: str,
                     path: str | Path) -> None:
    if cost_model not in COST_MODELS:
        raise ValueError(f"unknown cost model {cost_model!r}")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["page_id", "label", "cost_model"])
        for page_id, label in labels:
            writer.writerow([page_id, label, cost_model])


def read_labels_csv(path: str | Path) -> dict[str, int]:
    labels: dict[str, int] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            labels[row["page_id"]] = int(row["label"])
    return labels
