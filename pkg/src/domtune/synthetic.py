"""Seeded random element trees with controllable shape.

``depth_bias`` trades width against depth: 0 attaches new nodes to the
oldest open slot (breadth-first, bushy and shallow), 1 to the newest
(depth-first, chain-like). Node counts always hit the target exactly.

``tree_to_html`` renders a generated tree back to markup so the same
corpus can exercise file-based pipelines.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from io import StringIO

from .dom import DomNode, DomTree

__all__ = ["SyntheticTreeSpec", "UnsatisfiableSpecError", "generate_tree", "tree_to_html"]

_TAGS = ("div", "section", "span", "p", "ul", "li", "a", "table", "td", "b")
_ATTR_MAX = 4  # attribute counts are sampled uniformly from 0.._ATTR_MAX


class UnsatisfiableSpecError(ValueError):
    """The requested tree shape cannot be produced."""


@dataclass(frozen=True)
class SyntheticTreeSpec:
    target_node_count: int
    min_children: int = 2
    max_children: int = 6
    depth_bias: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        if self.target_node_count < 1:
            raise UnsatisfiableSpecError("target_node_count must be >= 1")
        if not (0 <= self.min_children <= self.max_children):
            raise UnsatisfiableSpecError(
                f"bad branching range ({self.min_children}, {self.max_children})")
        if self.max_children == 0 and self.target_node_count > 1:
            raise UnsatisfiableSpecError(
                "max_children=0 cannot grow beyond a single node")
        if not (0.0 <= self.depth_bias <= 1.0):
            raise UnsatisfiableSpecError("depth_bias must be in [0, 1]")


def generate_tree(spec: SyntheticTreeSpec) -> DomTree:
    """Grow a tree node by node until the target count is reached.

    Each node plans its child count from the branching range when created;
    planned slots are consumed oldest-first or newest-first depending on
    ``depth_bias``. Deterministic for a fixed spec. ``source_byte_size``
    is 0 (there is no source text); render with :func:`tree_to_html` if
    byte sizes matter.
    """
    spec.validate()
    rng = random.Random(spec.seed)

    def plan_children() -> int:
        return rng.randint(spec.min_children, spec.max_children)

    root = DomNode(tag=_TAGS[0], attribute_count=rng.randint(0, _ATTR_MAX), depth=1)
    count = 1
    last_added = root
    slots: deque[DomNode] = deque()
    if spec.target_node_count > 1:
        slots.extend([root] * max(1, plan_children()))

    while count < spec.target_node_count:
        if not slots:
            # Every planned slot was consumed (possible when min_children
            # is 0); reopen the most recent node so growth can continue.
            slots.append(last_added)
        if spec.depth_bias > 0 and rng.random() < spec.depth_bias:
            parent = slots.pop()
        else:
            parent = slots.popleft()
        child = DomNode(tag=_TAGS[count % len(_TAGS)],
                        attribute_count=rng.randint(0, _ATTR_MAX),
                        depth=parent.depth + 1)
        parent.children.append(child)
        count += 1
        last_added = child
        slots.extend([child] * plan_children())

    return DomTree(root=root, node_count=count, source_byte_size=0)


def tree_to_html(tree: DomTree) -> str:
    """Serialize a tree to markup that parses back to the same structure.

    Attribute counts are preserved by emitting ``a0="x" a1="x" ...``.
    Iterative so chain-shaped trees deeper than the interpreter stack
    still serialize.
    """
    buf = StringIO()
    # (node, opened) pairs: first visit writes the open tag, second closes.
    stack: list[tuple[DomNode, bool]] = [(tree.root, False)]
    while stack:
        node, opened = stack.pop()
        if opened:
            buf.write(f"</{node.tag}>")
            continue
        attrs = "".join(f' a{i}="x"' for i in range(node.attribute_count))
        buf.write(f"<{node.tag}{attrs}>")
        stack.append((node, True))
        stack.extend((child, False) for child in reversed(node.children))
    return buf.getvalue()
