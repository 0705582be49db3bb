"""Shared fixtures: hand-counted HTML pages and corpus builders."""

from __future__ import annotations

import hypothesis
import pytest

from domtune.features import PageFeatures

hypothesis.settings.register_profile(
    "suite", deadline=None, max_examples=50,
    suppress_health_check=[hypothesis.HealthCheck.too_slow])
hypothesis.settings.load_profile("suite")


# Hand-counted fixtures: (page_id, html, expected features). Every number
# below was counted/derived from the markup by hand, not computed by the
# library. web_page_size is the byte length of the html string.
FIVE_NODE_HTML = "<html><body><p></p><p></p><p></p></body></html>"

HAND_FIXTURES: list[tuple[str, str, PageFeatures]] = [
    (
        "five-node",
        FIVE_NODE_HTML,
        PageFeatures(
            page_id="five-node",
            dom_size=5,               # html, body, p, p, p
            attribute_count=0,
            web_page_size=47,
            tree_depth=3,
            number_of_leaves=3,       # the three <p>
            avg_tree_width=5 / 3,
            max_tree_width=3,
            max_avg_width_ratio=9 / 5,
            avg_work_per_level=5 / 3,
        ),
    ),
    (
        "single",
        "<html></html>",
        PageFeatures(
            page_id="single",
            dom_size=1,
            attribute_count=0,
            web_page_size=13,
            tree_depth=1,
            number_of_leaves=1,
            avg_tree_width=1.0,
            max_tree_width=1,
            max_avg_width_ratio=1.0,
            avg_work_per_level=1.0,
        ),
    ),
    (
        "attrs-and-voids",
        '<html><head><meta charset=utf-8></head>'
        '<body><img src=x alt=y><p a=1 b=2 c=3>text</p></body></html>',
        PageFeatures(
            page_id="attrs-and-voids",
            dom_size=6,               # html, head, meta, body, img, p
            attribute_count=6,        # meta:1 + img:2 + p:3
            web_page_size=99,
            tree_depth=3,
            number_of_leaves=3,       # meta, img, p
            avg_tree_width=2.0,
            max_tree_width=3,         # level 3: meta, img, p
            max_avg_width_ratio=3 / 2,
            avg_work_per_level=2.0,
        ),
    ),
    (
        "mixed-depths",
        '<div id=a class=b><span></span><span></span><em><b></b></em></div>',
        PageFeatures(
            page_id="mixed-depths",
            dom_size=5,               # div, span, span, em, b
            attribute_count=2,        # div has id + class
            web_page_size=66,
            tree_depth=3,
            number_of_leaves=3,       # span, span, b
            avg_tree_width=5 / 3,
            max_tree_width=3,         # level 2: span, span, em
            max_avg_width_ratio=9 / 5,
            avg_work_per_level=5 / 3,
        ),
    ),
    (
        "binary-depth3",
        "<div><div><div></div><div></div></div>"
        "<div><div></div><div></div></div></div>",
        PageFeatures(
            page_id="binary-depth3",
            dom_size=7,               # perfect binary tree of depth 3
            attribute_count=0,
            web_page_size=77,
            tree_depth=3,
            number_of_leaves=4,
            avg_tree_width=7 / 3,
            max_tree_width=4,
            max_avg_width_ratio=12 / 7,
            avg_work_per_level=7 / 3,
        ),
    ),
    (
        "wide-flat",
        "<ul>" + "<li></li>" * 10 + "</ul>",
        PageFeatures(
            page_id="wide-flat",
            dom_size=11,
            attribute_count=0,
            web_page_size=99,
            tree_depth=2,
            number_of_leaves=10,
            avg_tree_width=11 / 2,
            max_tree_width=10,
            max_avg_width_ratio=20 / 11,
            avg_work_per_level=11 / 2,
        ),
    ),
]


@pytest.fixture
def hand_fixtures():
    return HAND_FIXTURES


@pytest.fixture
def pages_dir(tmp_path):
    """Directory with the hand fixtures written as one file per page."""
    root = tmp_path / "pages"
    root.mkdir()
    for page_id, html, _ in HAND_FIXTURES:
        (root / f"{page_id}.html").write_text(html)
    return root
