"""Supervised-learning pipeline around the thread-count classifier.

Covers everything from raw feature rows to an evaluated model: matrix
assembly, feature-target correlation and threshold-based selection,
training, stratified k-fold cross-validation (standardization is refit on
each fold's training rows, never on held-out rows), and the per-page
savings report comparing the model's thread choice against a fixed
default and the measured optimum.
"""

from __future__ import annotations

import csv
import math
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .features import FEATURE_COLUMNS, PageFeatures
from .measurements import AggregatedMeasurement, group_by_page
from .mnr import MnrHyperparams, MnrModel, mnr_fit
from .standardize import StandardizationParams, zscore_apply, zscore_fit

__all__ = [
    "FeatureMatrix", "CorrelationReport", "CvReport", "SavingsRow",
    "ConfigurationError", "ConstantColumnError", "ReportError",
    "matrix_from_features", "pearson_r", "correlation_report",
    "select_features", "train_model", "cross_validate", "savings_report",
    "ideal_labels",
    "write_correlation_csv", "write_cv_report_csv", "write_confusion_csv",
    "write_savings_csv",
]

# Correlation targets: speedup and energy ratio at each non-serial thread
# count of the stock {1, 2, 4} sweep.
DEFAULT_TARGETS = ("p_2", "p_4", "e_2", "e_4")


class ConfigurationError(ValueError):
    """Invalid fold count or other evaluation settings."""


class ConstantColumnError(ValueError):
    """Correlation is undefined when one column never varies."""


class ReportError(ValueError):
    """The savings report is missing a required measurement or label."""


@dataclass
class FeatureMatrix:
    page_ids: list[str]
    values: np.ndarray
    column_names: list[str]

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("feature values must be a 2-D matrix")
        if self.values.shape != (len(self.page_ids), len(self.column_names)):
            raise ValueError("matrix shape does not match ids/columns")

    def __len__(self) -> int:
        return len(self.page_ids)

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.column_names.index(name)]

    def subset(self, names: Sequence[str]) -> "FeatureMatrix":
        idx = [self.column_names.index(n) for n in names]
        return FeatureMatrix(self.page_ids, self.values[:, idx], list(names))


def matrix_from_features(feats: Sequence[PageFeatures],
                         columns: Sequence[str] = FEATURE_COLUMNS) -> FeatureMatrix:
    values = np.array([[f.value(c) for c in columns] for f in feats], dtype=float)
    return FeatureMatrix([f.page_id for f in feats], values, list(columns))


def pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson product-moment correlation of two equal-length columns."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise ValueError("pearson_r wants two equal-length 1-D columns")
    if len(x) < 2:
        raise ValueError("need at least two samples")
    xm = x - x.mean()
    ym = y - y.mean()
    sx = float((xm ** 2).sum())
    sy = float((ym ** 2).sum())
    if sx == 0.0 or sy == 0.0:
        raise ConstantColumnError("correlation is undefined for a constant column")
    r = float((xm * ym).sum()) / math.sqrt(sx * sy)
    return max(-1.0, min(1.0, r))


@dataclass
class CorrelationReport:
    """R-value of every feature against every target column."""

    targets: tuple[str, ...]
    values: dict[str, dict[str, float]]  # feature -> target -> r

    def max_abs(self, feature: str) -> float:
        return max(abs(r) for r in self.values[feature].values())


def correlation_report(matrix: FeatureMatrix,
                       targets: Mapping[str, np.ndarray]) -> CorrelationReport:
    """Correlate every feature column against every target column.

    A constant feature column carries no linear signal; it is reported as
    r = 0 (with a warning) rather than aborting the whole report.
    """
    values: dict[str, dict[str, float]] = {}
    for feature in matrix.column_names:
        col = matrix.column(feature)
        per_target: dict[str, float] = {}
        for target_name, target in targets.items():
            try:
                per_target[target_name] = pearson_r(col, np.asarray(target))
            except ConstantColumnError:
                warnings.warn(f"feature {feature!r} is constant; reporting r=0",
                              stacklevel=2)
                per_target[target_name] = 0.0
        values[feature] = per_target
    return CorrelationReport(targets=tuple(targets), values=values)


def select_features(report: CorrelationReport, threshold: float = 0.1) -> list[str]:
    """Keep features whose strongest |r| across targets exceeds the
    threshold, preserving their original order."""
    kept = [f for f in report.values if report.max_abs(f) > threshold]
    if not kept:
        warnings.warn(f"no feature exceeds |r| > {threshold}; selection is empty",
                      stacklevel=2)
    return kept


def train_model(matrix: FeatureMatrix, y: Sequence[int],
                selected: Sequence[str] | None = None,
                hyperparams: MnrHyperparams | None = None) -> MnrModel:
    """Standardize the (optionally selected) columns, fit, and package the
    model with its standardization so it can score raw rows."""
    sub = matrix.subset(selected) if selected is not None else matrix
    params = zscore_fit(sub.values)
    return mnr_fit(zscore_apply(sub.values, params), np.asarray(y),
                   sub.column_names, params, hyperparams)


@dataclass
class CvReport:
    fold_accuracies: list[float]
    mean_accuracy: float
    max_accuracy: float
    confusion: dict[tuple[int, int], int]  # (true, predicted) -> count
    label_distribution: dict[int, int]
    fold_assignments: list[int]
    fold_params: list[StandardizationParams]


def _fold_assignments(y: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Stratified fold indices; falls back to a plain shuffled split when
    some class has fewer members than folds. A single position counter
    runs across classes so fold sizes differ by at most one."""
    rng = np.random.default_rng(seed)
    folds = np.empty(len(y), dtype=int)
    counts = Counter(int(v) for v in y)
    position = 0
    if min(counts.values()) >= k:
        for cls in sorted(counts):
            for row in rng.permutation(np.flatnonzero(y == cls)):
                folds[row] = position % k
                position += 1
    else:
        for row in rng.permutation(len(y)):
            folds[row] = position % k
            position += 1
    return folds


def cross_validate(matrix: FeatureMatrix, y: Sequence[int], k: int, seed: int,
                   hyperparams: MnrHyperparams | None = None) -> CvReport:
    """k-fold cross-validation with per-fold refit of standardization and
    weights. Deterministic for a fixed seed."""
    y = np.array([int(v) for v in y])
    if len(y) != len(matrix):
        raise ValueError("feature matrix and labels disagree on row count")
    if k < 2:
        raise ConfigurationError("need at least 2 folds")
    if k > len(y):
        raise ConfigurationError(f"cannot split {len(y)} rows into {k} folds")

    folds = _fold_assignments(y, k, seed)
    accuracies: list[float] = []
    confusion: Counter = Counter()
    fold_params: list[StandardizationParams] = []
    for f in range(k):
        test = folds == f
        train = ~test
        params = zscore_fit(matrix.values[train])
        fold_params.append(params)
        model = mnr_fit(zscore_apply(matrix.values[train], params), y[train],
                        matrix.column_names, params, hyperparams)
        predicted = model.predict(matrix.values[test])
        truth = y[test]
        accuracies.append(float(np.mean([p == t for p, t in zip(predicted, truth)])))
        for p, t in zip(predicted, truth):
            confusion[(int(t), int(p))] += 1
    return CvReport(
        fold_accuracies=accuracies,
        mean_accuracy=float(np.mean(accuracies)),
        max_accuracy=float(np.max(accuracies)),
        confusion=dict(confusion),
        label_distribution=dict(Counter(int(v) for v in y)),
        fold_assignments=[int(f) for f in folds],
        fold_params=fold_params,
    )


@dataclass(frozen=True)
class SavingsRow:
    page_id: str
    ideal_label: int
    model_label: int
    default_ms: float
    model_ms: float
    ideal_ms: float
    perf_savings_pct: float
    energy_savings_pct: float | None

    @property
    def normalized_default(self) -> float:
        return self.default_ms / self.ideal_ms

    @property
    def normalized_model(self) -> float:
        return self.model_ms / self.ideal_ms


def ideal_labels(aggs: Iterable[AggregatedMeasurement]) -> dict[str, int]:
    """Per page, the measured thread count with the lowest median styling
    time (ties to the smaller count)."""
    out: dict[str, int] = {}
    for page_id, page_aggs in sorted(group_by_page(aggs).items()):
        times = {a.threads: a.median_style_ms for a in page_aggs}
        if any(v is None for v in times.values()):
            raise ReportError(f"page {page_id!r} lacks styling medians")
        out[page_id] = min(sorted(times), key=lambda t: times[t])
    return out


def savings_report(aggs: Sequence[AggregatedMeasurement],
                   predicted: Mapping[str, int],
                   default_threads: int,
                   ideal: Mapping[str, int] | None = None) -> list[SavingsRow]:
    """Compare, per page, the model's thread choice against a fixed
    default and the measured best. Positive savings mean the model's
    choice beats the default; energy savings are blank when the
    measurements carry no energy."""
    if ideal is None:
        ideal = ideal_labels(aggs)
    rows: list[SavingsRow] = []
    for page_id, page_aggs in sorted(group_by_page(aggs).items()):
        times = {a.threads: a.median_style_ms for a in page_aggs}
        energies = {a.threads: a.median_energy_j for a in page_aggs}
        if page_id not in predicted:
            raise ReportError(f"page {page_id!r} has no predicted label")
        if page_id not in ideal:
            raise ReportError(f"page {page_id!r} has no ideal label")
        model_label = predicted[page_id]
        ideal_label = ideal[page_id]
        for label, what in ((default_threads, "default"), (model_label, "model"),
                            (ideal_label, "ideal")):
            if label not in times or times[label] is None:
                raise ReportError(
                    f"page {page_id!r} has no measurement at {label} threads ({what})")
        default_ms = times[default_threads]
        model_ms = times[model_label]
        if default_ms == 0:
            raise ReportError(f"page {page_id!r} has a zero default time")
        energy_savings = None
        e_default = energies.get(default_threads)
        e_model = energies.get(model_label)
        if e_default is not None and e_model is not None and e_default > 0:
            energy_savings = (e_default - e_model) / e_default * 100.0
        rows.append(SavingsRow(
            page_id=page_id,
            ideal_label=ideal_label,
            model_label=model_label,
            default_ms=default_ms,
            model_ms=model_ms,
            ideal_ms=times[ideal_label],
            perf_savings_pct=(default_ms - model_ms) / default_ms * 100.0,
            energy_savings_pct=energy_savings,
        ))
    return rows


def write_correlation_csv(report: CorrelationReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "target", "r"])
        for feature, per_target in report.values.items():
            for target in report.targets:
                writer.writerow([feature, target, per_target[target]])


def write_cv_report_csv(report: CvReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fold", "accuracy"])
        for i, acc in enumerate(report.fold_accuracies):
            writer.writerow([i, acc])
        writer.writerow(["mean", report.mean_accuracy])
        writer.writerow(["max", report.max_accuracy])


def write_confusion_csv(report: CvReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["true_label", "predicted_label", "count"])
        for (true, pred), count in sorted(report.confusion.items()):
            writer.writerow([true, pred, count])


def write_savings_csv(rows: Iterable[SavingsRow], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["page_id", "ideal_label", "model_label", "default_ms",
                         "model_ms", "ideal_ms", "perf_savings_pct",
                         "energy_savings_pct"])
        for r in rows:
            writer.writerow([r.page_id, r.ideal_label, r.model_label, r.default_ms,
                             r.model_ms, r.ideal_ms, r.perf_savings_pct,
                             "" if r.energy_savings_pct is None else r.energy_savings_pct])
