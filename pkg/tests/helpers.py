"""Test-side oracles and checkers, kept independent of the library code
paths they verify."""

from __future__ import annotations

import numpy as np


def check_top_down_order(events, parent, n, start="start", finish="finish"):
    """Every node must start only after its parent finished, and finish
    exactly once. Events are (seq, kind, node, worker) in seq order."""
    finished = set()
    started = []
    for _, kind, node, _ in events:
        if kind == start:
            p = parent[node]
            assert p < 0 or p in finished, f"node {node} started before parent {p} finished"
            started.append(node)
        elif kind == finish:
            assert node not in finished, f"node {node} finished twice"
            finished.add(node)
    assert len(started) == n
    assert len(finished) == n


def check_bottom_up_order(events, children, n):
    """Every node must start only after all of its children finished."""
    finished = set()
    started = 0
    for _, kind, node, _ in events:
        if kind == "up_start":
            for child in children[node]:
                assert child in finished, \
                    f"node {node} started before child {child} finished"
            started += 1
        elif kind == "up_finish":
            assert node not in finished, f"node {node} finished twice"
            finished.add(node)
    assert started == n
    assert len(finished) == n


# --- labeling oracles: a literal transcription of the prose rules, coded
# --- independently of the library implementation.

def oracle_performance_label(entries: dict[int, float], p_min: float) -> int:
    """Max speedup wins if it beats the threshold; ties to the smallest t."""
    non_serial = {t: p for t, p in entries.items() if t != 1}
    if not non_serial:
        return 1
    best = max(non_serial.values())
    if best > p_min:
        return min(t for t, p in non_serial.items() if p == best)
    return 1


def oracle_perf_energy_label(pets, boundaries, limits) -> int:
    """pets: iterable of (threads, speedup, greenup). Follows the prose
    steps: filter, bucket by literal interval scan, walk buckets from the
    top, stop at the first tuple whose greenup clears its bucket's limit."""
    p_min = boundaries[0]
    remaining = [(t, p, e) for (t, p, e) in pets if t != 1 and p > p_min]
    if not remaining:
        return 1
    n_buckets = len(limits)

    def bucket_index(p):
        for j in range(n_buckets):
            if boundaries[j] < p <= boundaries[j + 1]:
                return j
        return n_buckets - 1  # above the top boundary: clamp

    buckets: dict[int, list] = {}
    for tup in remaining:
        buckets.setdefault(bucket_index(tup[1]), []).append(tup)
    for j in sorted(buckets, reverse=True):
        for t, p, e in sorted(buckets[j], key=lambda tup: (-tup[1], tup[0])):
            if e > limits[j]:
                return t
    return 1


# --- synthetic learning datasets

def threshold_rule_dataset(n_rows: int, seed: int):
    """Feature rows labeled by a noiseless threshold rule on a combination
    of dom_size and avg_tree_width, with wide margins around the
    thresholds. Returns (page_ids, values, column_names, labels)."""
    rng = np.random.default_rng(seed)
    columns = ["dom_size", "attribute_count", "web_page_size", "number_of_leaves",
               "avg_tree_width", "max_tree_width", "avg_work_per_level"]
    rows, labels = [], []
    for _ in range(n_rows):
        dom_size = float(rng.integers(100, 6000))
        avg_width = float(rng.uniform(2.0, 120.0))
        score = dom_size / 1000.0 + avg_width / 25.0
        # resample anything within the margin bands around the thresholds
        while 1.7 < score < 2.3 or 3.7 < score < 4.3:
            dom_size = float(rng.integers(100, 6000))
            avg_width = float(rng.uniform(2.0, 120.0))
            score = dom_size / 1000.0 + avg_width / 25.0
        label = 1 if score <= 2 else (2 if score <= 4 else 4)
        attr = dom_size * 3 + rng.normal(0, 40)
        page_size = dom_size * 30 + rng.normal(0, 500)
        leaves = dom_size * 0.6 + rng.normal(0, 20)
        max_width = avg_width * rng.uniform(1.2, 3.0)
        work = dom_size / rng.uniform(5, 40)
        rows.append([dom_size, attr, page_size, leaves, avg_width, max_width, work])
        labels.append(label)
    page_ids = [f"page-{i:04d}" for i in range(n_rows)]
    return page_ids, np.array(rows), columns, labels


def separable_blobs(n_rows: int, n_features: int, n_classes: int, seed: int,
                    spread: float = 8.0):
    """Well-separated Gaussian blobs along the first feature axis."""
    rng = np.random.default_rng(seed)
    X = rng.normal(0, 0.5, size=(n_rows, n_features))
    labels = np.array([1, 2, 4, 8][:n_classes])[rng.integers(0, n_classes, n_rows)]
    for i, label in enumerate(labels):
        X[i, 0] += spread * sorted(set(labels.tolist())).index(label)
    return X, labels
