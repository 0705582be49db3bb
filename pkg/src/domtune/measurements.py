"""Ingestion and aggregation of traversal timing/energy trials.

Raw trials are long-format rows (one per page, pass kind, thread count and
trial). Aggregation groups them per (page, threads) and reduces with the
median, plus the median absolute deviation of styling times as the spread
measure; medians are robust against the heavy outliers these measurements
tend to have. Speedups and greenups are ratios against the 1-thread
baseline of the same page.
"""

from __future__ import annotations

import csv
import statistics
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

__all__ = [
    "TrialMeasurement", "AggregatedMeasurement", "SpeedupSet", "GreenupSet",
    "SchemaError", "DuplicateRowError", "AggregationError", "BaselineError",
    "DegenerateMeasurementError",
    "ingest_csv", "read_energy_csv", "aggregate", "speedups", "greenups",
    "mad", "mad_summary", "group_by_page",
    "write_aggregates_csv", "write_ratios_csv", "read_ratios_csv",
]

PASS_KINDS = ("styling", "layout")


class SchemaError(ValueError):
    """The CSV is missing required columns or has malformed fields."""


class DuplicateRowError(ValueError):
    """Two rows share the same (page, pass kind, threads, trial) key."""


class AggregationError(ValueError):
    """A (page, threads) group has no usable samples."""


class BaselineError(ValueError):
    """A page has no serial (1-thread) aggregate to normalize against."""


class DegenerateMeasurementError(ValueError):
    """The serial baseline is zero, so ratios are undefined."""


@dataclass(frozen=True)
class TrialMeasurement:
    """One trial row; exactly one of the two time fields is set when the
    row came from a long-format pass row."""

    page_id: str
    threads: int
    trial_index: int
    style_time_ms: float | None = None
    layout_time_ms: float | None = None
    energy_j: float | None = None

    def __post_init__(self) -> None:
        for value in (self.style_time_ms, self.layout_time_ms, self.energy_j):
            if value is not None and value < 0:
                raise ValueError(f"negative measurement: {value}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.trial_index < 0:
            raise ValueError("trial index must be >= 0")


@dataclass(frozen=True)
class AggregatedMeasurement:
    page_id: str
    threads: int
    median_style_ms: float | None
    mad_style_ms: float | None
    median_layout_ms: float | None
    median_energy_j: float | None


@dataclass(frozen=True)
class SpeedupSet:
    """Per-thread-count speedup ratios for one page; entry 1 is exactly 1."""

    page_id: str
    entries: Mapping[int, float]


@dataclass(frozen=True)
class GreenupSet:
    """Per-thread-count energy ratios for one page; entry 1 is exactly 1.
    Values below 1 mean parallel execution used more energy."""

    page_id: str
    entries: Mapping[int, float]


def mad(samples: Sequence[float]) -> float:
    """Median absolute deviation: median(|x - median(x)|)."""
    if not samples:
        raise AggregationError("mad of empty sample")
    center = statistics.median(samples)
    return statistics.median([abs(x - center) for x in samples])


_REQUIRED_COLUMNS = ("page_id", "pass_kind", "threads", "trial", "elapsed_ms")


def ingest_csv(path: str | Path) -> list[TrialMeasurement]:
    """Read a long-format measurements CSV; one record per data row.

    Unknown columns are ignored. Rows repeating a (page, pass kind,
    threads, trial) key are duplicates; an empty energy_j field means the
    energy for that row is simply unknown.
    """
    records: list[TrialMeasurement] = []
    seen: set[tuple] = set()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in _REQUIRED_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"missing required column(s): {', '.join(missing)}")
        for line_no, row in enumerate(reader, start=2):
            try:
                pass_kind = row["pass_kind"].strip()
                threads = int(row["threads"])
                trial = int(row["trial"])
                elapsed = float(row["elapsed_ms"])
                energy_field = (row.get("energy_j") or "").strip()
                energy = float(energy_field) if energy_field else None
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"line {line_no}: malformed field ({exc})") from exc
            if pass_kind not in PASS_KINDS:
                raise SchemaError(f"line {line_no}: unknown pass_kind {pass_kind!r}")
            if elapsed < 0:
                raise ValueError(f"line {line_no}: negative elapsed_ms {elapsed}")
            key = (row["page_id"], pass_kind, threads, trial)
            if key in seen:
                raise DuplicateRowError(f"line {line_no}: duplicate row for {key}")
            seen.add(key)
            records.append(TrialMeasurement(
                page_id=row["page_id"],
                threads=threads,
                trial_index=trial,
                style_time_ms=elapsed if pass_kind == "styling" else None,
                layout_time_ms=elapsed if pass_kind == "layout" else None,
                energy_j=energy,
            ))
    return records


def read_energy_csv(path: str | Path) -> dict[tuple[str, int], float]:
    """Read a per-(page, threads) energy table: page_id,threads,energy_j."""
    table: dict[tuple[str, int], float] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in ("page_id", "threads", "energy_j") if c not in header]
        if missing:
            raise SchemaError(f"missing required column(s): {', '.join(missing)}")
        for line_no, row in enumerate(reader, start=2):
            key = (row["page_id"], int(row["threads"]))
            if key in table:
                raise DuplicateRowError(f"line {line_no}: duplicate energy row for {key}")
            energy = float(row["energy_j"])
            if energy < 0:
                raise ValueError(f"line {line_no}: negative energy_j {energy}")
            table[key] = energy
    return table


def aggregate(trials: Sequence[TrialMeasurement],
              energy_table: Mapping[tuple[str, int], float] | None = None,
              ) -> list[AggregatedMeasurement]:
    """Reduce trials to one aggregate per (page, threads), sorted by key.

    Per-trial energy is the sum of that trial's row energies (a styling
    and a layout row of the same trial count once each); the aggregate is
    the median over trials. When rows carry no energy at all, the external
    ``energy_table`` value for the (page, threads) key is used instead.
    """
    if not trials:
        raise AggregationError("no trials to aggregate")
    groups: dict[tuple[str, int], list[TrialMeasurement]] = defaultdict(list)
    for t in trials:
        groups[(t.page_id, t.threads)].append(t)

    out: list[AggregatedMeasurement] = []
    for (page_id, threads) in sorted(groups):
        rows = groups[(page_id, threads)]
        styles = [r.style_time_ms for r in rows if r.style_time_ms is not None]
        layouts = [r.layout_time_ms for r in rows if r.layout_time_ms is not None]
        per_trial_energy: dict[int, float] = defaultdict(float)
        any_energy = False
        for r in rows:
            if r.energy_j is not None:
                per_trial_energy[r.trial_index] += r.energy_j
                any_energy = True
        if any_energy:
            median_energy = statistics.median(per_trial_energy.values())
        elif energy_table is not None and (page_id, threads) in energy_table:
            median_energy = energy_table[(page_id, threads)]
        else:
            median_energy = None
        out.append(AggregatedMeasurement(
            page_id=page_id,
            threads=threads,
            median_style_ms=statistics.median(styles) if styles else None,
            mad_style_ms=mad(styles) if styles else None,
            median_layout_ms=statistics.median(layouts) if layouts else None,
            median_energy_j=median_energy,
        ))
    return out


def group_by_page(aggs: Iterable[AggregatedMeasurement],
                  ) -> dict[str, list[AggregatedMeasurement]]:
    pages: dict[str, list[AggregatedMeasurement]] = defaultdict(list)
    for agg in aggs:
        pages[agg.page_id].append(agg)
    return dict(pages)


def _ratios(page_id: str, values: dict[int, float], what: str) -> dict[int, float]:
    if 1 not in values:
        raise BaselineError(f"page {page_id!r} has no serial (1-thread) {what}")
    serial = values[1]
    if serial == 0:
        raise DegenerateMeasurementError(
            f"page {page_id!r} has a zero serial {what}, ratios are undefined")
    entries = {t: serial / x for t, x in values.items()}
    entries[1] = 1.0
    return entries


def speedups(aggs: Sequence[AggregatedMeasurement]) -> SpeedupSet:
    """Speedup per thread count for one page, on median styling times."""
    page_ids = {a.page_id for a in aggs}
    if len(page_ids) != 1:
        raise ValueError(f"expected aggregates of one page, got {sorted(page_ids)}")
    page_id = page_ids.pop()
    values: dict[int, float] = {}
    for agg in aggs:
        if agg.median_style_ms is None:
            raise AggregationError(
                f"page {page_id!r} has no styling samples at {agg.threads} threads")
        values[agg.threads] = agg.median_style_ms
    return SpeedupSet(page_id, _ratios(page_id, values, "styling time"))


def greenups(aggs: Sequence[AggregatedMeasurement]) -> GreenupSet:
    """Energy ratio per thread count for one page, on median energies."""
    page_ids = {a.page_id for a in aggs}
    if len(page_ids) != 1:
        raise ValueError(f"expected aggregates of one page, got {sorted(page_ids)}")
    page_id = page_ids.pop()
    values: dict[int, float] = {}
    for agg in aggs:
        if agg.median_energy_j is None:
            raise AggregationError(
                f"page {page_id!r} has no energy at {agg.threads} threads")
        values[agg.threads] = agg.median_energy_j
    return GreenupSet(page_id, _ratios(page_id, values, "energy"))


def mad_summary(aggs: Iterable[AggregatedMeasurement]) -> dict[int, float]:
    """Median over pages of the per-page styling-time MAD, per thread count."""
    per_threads: dict[int, list[float]] = defaultdict(list)
    for agg in aggs:
        if agg.mad_style_ms is not None:
            per_threads[agg.threads].append(agg.mad_style_ms)
    return {t: statistics.median(v) for t, v in sorted(per_threads.items())}


def write_aggregates_csv(aggs: Iterable[AggregatedMeasurement],
                         path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["page_id", "threads", "median_style_ms", "mad_style_ms",
                         "median_layout_ms", "median_energy_j"])
        for a in aggs:
            writer.writerow([a.page_id, a.threads,
                             _blank(a.median_style_ms), _blank(a.mad_style_ms),
                             _blank(a.median_layout_ms), _blank(a.median_energy_j)])


def _blank(value) -> object:
    return "" if value is None else value


def write_ratios_csv(speedup_sets: Sequence[SpeedupSet],
                     greenup_sets: Sequence[GreenupSet] | None,
                     path: str | Path) -> None:
    """Combined speedup/greenup table: page_id,threads,p_t,e_t (e_t blank
    when no energy data exists)."""
    greenup_by_page = {g.page_id: g for g in greenup_sets} if greenup_sets else {}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["page_id", "threads", "p_t", "e_t"])
        for s in speedup_sets:
            green = greenup_by_page.get(s.page_id)
            for t in sorted(s.entries):
                e_t = green.entries.get(t) if green else None
                writer.writerow([s.page_id, t, s.entries[t], _blank(e_t)])


def read_ratios_csv(path: str | Path,
                    ) -> tuple[dict[str, SpeedupSet], dict[str, GreenupSet]]:
    """Inverse of :func:`write_ratios_csv`; pages without any e_t values
    are absent from the greenup mapping."""
    p_entries: dict[str, dict[int, float]] = defaultdict(dict)
    e_entries: dict[str, dict[int, float]] = defaultdict(dict)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in ("page_id", "threads", "p_t") if c not in header]
        if missing:
            raise SchemaError(f"missing required column(s): {', '.join(missing)}")
        for row in reader:
            page_id = row["page_id"]
            threads = int(row["threads"])
            p_entries[page_id][threads] = float(row["p_t"])
            e_field = (row.get("e_t") or "").strip()
            if e_field:
                e_entries[page_id][threads] = float(e_field)
    speedup_sets = {p: SpeedupSet(p, entries) for p, entries in p_entries.items()}
    greenup_sets = {p: GreenupSet(p, entries) for p, entries in e_entries.items()}
    return speedup_sets, greenup_sets
