"""Multinomial logistic regression trained by gradient ascent.

Class scores are linear; the first (smallest) class is the zero-weight
reference, so the weight matrix has one row per remaining class and one
column per feature plus an intercept. Probabilities come from an
overflow-safe softmax.

Training maximizes the objective

    mean_i log P(y_i | x_i)  -  (l2/2) * sum of squared feature weights

(the intercept column is not penalized) by full-batch gradient ascent
with a backtracking step search: a step is only accepted if it does not
decrease the objective, so the objective is non-decreasing across
iterations. Weights start at zero and nothing is randomized, which makes
training deterministic for fixed data and hyperparameters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .standardize import StandardizationParams, zscore_apply

__all__ = [
    "MnrHyperparams", "MnrModel", "DegenerateLabelsError",
    "softmax", "penalized_loglik", "loglik_gradient", "fit_weights", "mnr_fit",
    "save_model", "load_model",
]


class DegenerateLabelsError(ValueError):
    """Training data contains fewer than two distinct labels."""


@dataclass(frozen=True)
class MnrHyperparams:
    l2_strength: float = 1e-4
    max_iterations: int = 500
    tolerance: float = 1e-6

    def __post_init__(self) -> None:
        if self.l2_strength < 0:
            raise ValueError("l2_strength must be >= 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


def softmax(scores: np.ndarray) -> np.ndarray:
    """Row-wise softmax, shifted by the row max so huge scores stay finite."""
    scores = np.asarray(scores, dtype=float)
    shifted = scores - scores.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def _with_bias(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((X.shape[0], 1))])


def _scores(weights: np.ndarray, Xb: np.ndarray) -> np.ndarray:
    """(n, K) score matrix; column 0 is the reference class (all zeros)."""
    n = Xb.shape[0]
    return np.hstack([np.zeros((n, 1)), Xb @ weights.T])


def penalized_loglik(weights: np.ndarray, Xb: np.ndarray, y_idx: np.ndarray,
                     l2_strength: float) -> float:
    scores = _scores(weights, Xb)
    shifted = scores - scores.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    loglik = (shifted[np.arange(len(y_idx)), y_idx] - log_norm).mean()
    penalty = 0.5 * l2_strength * float((weights[:, :-1] ** 2).sum())
    return float(loglik) - penalty


def loglik_gradient(weights: np.ndarray, Xb: np.ndarray, y_idx: np.ndarray,
                    l2_strength: float) -> np.ndarray:
    n, _ = Xb.shape
    probs = softmax(_scores(weights, Xb))
    k_total = weights.shape[0] + 1
    onehot = np.zeros((n, k_total))
    onehot[np.arange(n), y_idx] = 1.0
    grad = ((onehot - probs)[:, 1:].T @ Xb) / n
    grad[:, :-1] -= l2_strength * weights[:, :-1]
    return grad


def fit_weights(X: np.ndarray, y_idx: np.ndarray, n_classes: int,
                hyperparams: MnrHyperparams) -> tuple[np.ndarray, bool, int]:
    """Gradient ascent from zero weights; returns (weights, converged,
    iterations). ``X`` must already be standardized and have no bias
    column; ``y_idx`` holds class indices 0..n_classes-1."""
    Xb = _with_bias(np.asarray(X, dtype=float))
    y_idx = np.asarray(y_idx)
    weights = np.zeros((n_classes - 1, Xb.shape[1]))
    value = penalized_loglik(weights, Xb, y_idx, hyperparams.l2_strength)
    step = 1.0
    converged = False
    iterations = 0
    for iterations in range(1, hyperparams.max_iterations + 1):
        grad = loglik_gradient(weights, Xb, y_idx, hyperparams.l2_strength)
        if float(np.abs(grad).max()) < hyperparams.tolerance:
            converged = True
            break
        # Backtrack until the objective does not decrease.
        while step > 1e-14:
            candidate = weights + step * grad
            candidate_value = penalized_loglik(candidate, Xb, y_idx,
                                               hyperparams.l2_strength)
            if candidate_value >= value:
                break
            step /= 2
        else:
            break  # no improving step exists; stop where we are
        weights, value = candidate, candidate_value
        step = min(step * 2, 64.0)
    return weights, converged, iterations


@dataclass
class MnrModel:
    """Trained classifier plus everything needed to apply it to raw rows:
    the feature subset, the standardization fitted on the training data,
    and the class list (sorted ascending, so argmax ties resolve to the
    smallest thread count)."""

    classes: list[int]
    selected_features: list[str]
    standardization: StandardizationParams
    weights: np.ndarray
    hyperparams: MnrHyperparams = field(default_factory=MnrHyperparams)
    converged: bool = True

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        if single:
            x = x[np.newaxis, :]
        if x.ndim != 2 or x.shape[1] != len(self.selected_features):
            raise ValueError(
                f"expected {len(self.selected_features)} feature value(s), "
                f"got shape {x.shape}")
        return x

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        """Class probabilities (columns ordered like ``classes``); accepts
        one row or a matrix of raw, unstandardized feature values."""
        rows = self._check_input(x)
        z = zscore_apply(rows, self.standardization)
        probs = softmax(_scores(self.weights, _with_bias(z)))
        return probs[0] if np.asarray(x).ndim == 1 else probs

    def predict(self, x: np.ndarray):
        probs = np.atleast_2d(self.predict_proba(x))
        picks = [self.classes[i] for i in probs.argmax(axis=1)]
        return picks[0] if np.asarray(x).ndim == 1 else picks


def mnr_fit(X: np.ndarray, y: np.ndarray, feature_names: list[str],
            standardization: StandardizationParams,
            hyperparams: MnrHyperparams | None = None) -> MnrModel:
    """Fit on an already-standardized matrix ``X`` whose columns are
    ``feature_names``; ``standardization`` is stored so prediction can be
    run on raw rows later."""
    hyperparams = hyperparams or MnrHyperparams()
    classes = sorted(set(int(v) for v in y))
    if len(classes) < 2:
        raise DegenerateLabelsError(
            f"need at least two distinct labels, got {classes}")
    index = {c: i for i, c in enumerate(classes)}
    y_idx = np.array([index[int(v)] for v in y])
    weights, converged, _ = fit_weights(X, y_idx, len(classes), hyperparams)
    return MnrModel(classes=classes, selected_features=list(feature_names),
                    standardization=standardization, weights=weights,
                    hyperparams=hyperparams, converged=converged)


_MODEL_FORMAT_VERSION = 1


def save_model(model: MnrModel, path: str | Path) -> None:
    payload = {
        "format_version": _MODEL_FORMAT_VERSION,
        "classes": model.classes,
        "selected_features": model.selected_features,
        "standardization": {
            "mean": model.standardization.mean.tolist(),
            "std": model.standardization.std.tolist(),
        },
        "weights": model.weights.tolist(),
        "hyperparams": {
            "l2_strength": model.hyperparams.l2_strength,
            "max_iterations": model.hyperparams.max_iterations,
            "tolerance": model.hyperparams.tolerance,
        },
        "converged": model.converged,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path: str | Path) -> MnrModel:
    with open(path) as fh:
        payload = json.load(fh)
    version = payload.get("format_version")
    if version != _MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version: {version}")
    hp = payload["hyperparams"]
    return MnrModel(
        classes=[int(c) for c in payload["classes"]],
        selected_features=list(payload["selected_features"]),
        standardization=StandardizationParams(
            mean=np.array(payload["standardization"]["mean"], dtype=float),
            std=np.array(payload["standardization"]["std"], dtype=float),
        ),
        weights=np.array(payload["weights"], dtype=float),
        hyperparams=MnrHyperparams(l2_strength=hp["l2_strength"],
                                   max_iterations=hp["max_iterations"],
                                   tolerance=hp["tolerance"]),
        converged=bool(payload["converged"]),
    )
