"""Structural features of an element tree.

Nine numbers summarize how much parallel-traversal work a page offers:
overall size (node and attribute totals, markup bytes), shape (depth,
per-level widths and their extremes), and the derived width/work averages.
``avg_tree_width`` and ``avg_work_per_level`` are the same quantity
(nodes divided by levels); both are kept because downstream consumers
correlate them against different targets.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .dom import DomTree

__all__ = [
    "FEATURE_COLUMNS", "PageFeatures", "WidthProfile",
    "compute_features", "width_profile",
    "write_features_csv", "read_features_csv", "write_width_profiles_csv",
]

# Column order of the features CSV; page_id comes first in the file.
FEATURE_COLUMNS = (
    "dom_size",
    "attribute_count",
    "web_page_size",
    "tree_depth",
    "number_of_leaves",
    "avg_tree_width",
    "max_tree_width",
    "max_avg_width_ratio",
    "avg_work_per_level",
)


@dataclass(frozen=True)
class PageFeatures:
    page_id: str
    dom_size: int
    attribute_count: int
    web_page_size: int
    tree_depth: int
    number_of_leaves: int
    avg_tree_width: float
    max_tree_width: int
    max_avg_width_ratio: float
    avg_work_per_level: float

    def value(self, column: str) -> float:
        return getattr(self, column)

    def as_row(self) -> list:
        return [self.page_id] + [getattr(self, c) for c in FEATURE_COLUMNS]


@dataclass(frozen=True)
class WidthProfile:
    """Node count per depth level; ``widths[0]`` is level 1 (the root)."""

    widths: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.widths)


def width_profile(tree: DomTree) -> WidthProfile:
    widths: list[int] = []
    for node in tree.walk():
        if node.depth > len(widths):
            widths.extend([0] * (node.depth - len(widths)))
        widths[node.depth - 1] += 1
    return WidthProfile(tuple(widths))


def compute_features(tree: DomTree, page_id: str) -> PageFeatures:
    """Compute all nine structural features for one parsed page.

    ``max_avg_width_ratio`` is evaluated as ``max_width * depth / size``
    rather than ``max_width / (size / depth)`` so exact ratios (e.g. 9/5)
    come out exact in floating point.
    """
    widths = width_profile(tree).widths
    dom_size = tree.node_count
    depth = len(widths)
    attr_total = 0
    leaves = 0
    for node in tree.walk():
        attr_total += node.attribute_count
        if not node.children:
            leaves += 1
    max_width = max(widths)
    return PageFeatures(
        page_id=page_id,
        dom_size=dom_size,
        attribute_count=attr_total,
        web_page_size=tree.source_byte_size,
        tree_depth=depth,
        number_of_leaves=leaves,
        avg_tree_width=dom_size / depth,
        max_tree_width=max_width,
        max_avg_width_ratio=max_width * depth / dom_size,
        avg_work_per_level=dom_size / depth,
    )


def write_features_csv(rows: Iterable[PageFeatures], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["page_id", *FEATURE_COLUMNS])
        for feats in rows:
            writer.writerow(feats.as_row())


def read_features_csv(path: str | Path) -> list[PageFeatures]:
    out: list[PageFeatures] = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(PageFeatures(
                page_id=row["page_id"],
                dom_size=int(row["dom_size"]),
                attribute_count=int(row["attribute_count"]),
                web_page_size=int(row["web_page_size"]),
                tree_depth=int(row["tree_depth"]),
                number_of_leaves=int(row["number_of_leaves"]),
                avg_tree_width=float(row["avg_tree_width"]),
                max_tree_width=int(row["max_tree_width"]),
                max_avg_width_ratio=float(row["max_avg_width_ratio"]),
                avg_work_per_level=float(row["avg_work_per_level"]),
            ))
    return out


def write_width_profiles_csv(profiles: Sequence[tuple[str, WidthProfile]],
                             path: str | Path) -> None:
    """One row per (page, depth level)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["page_id", "depth", "width"])
        for page_id, profile in profiles:
            for level, width in enumerate(profile.widths, start=1):
                writer.writerow([page_id, level, width])
