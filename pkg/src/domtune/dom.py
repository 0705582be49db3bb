"""HTML element trees.

``parse_html`` turns raw HTML text into a tree of element nodes. Only
elements survive: text, comments, doctype declarations and the contents of
``<script>``/``<style>`` are dropped, because everything downstream cares
about tree *structure*, not content.

Recovery from tag soup is deliberately forgiving rather than spec-complete:
void elements never open a scope, stray end tags are ignored, and anything
still open at end of input is closed implicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Iterator

__all__ = ["DomNode", "DomTree", "EmptyDocumentError", "parse_html", "VOID_ELEMENTS"]

# Elements that never have closing tags or children.
VOID_ELEMENTS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})


class EmptyDocumentError(ValueError):
    """Raised when the input contains no HTML elements at all."""


@dataclass(eq=False)
class DomNode:
    """One element. ``depth`` is the 1-based level (root = 1)."""

    tag: str
    attribute_count: int
    depth: int = 0
    children: list["DomNode"] = field(default_factory=list, repr=False)

    def is_leaf(self) -> bool:
        return not self.children


@dataclass(eq=False)
class DomTree:
    root: DomNode
    node_count: int
    source_byte_size: int

    def walk(self) -> Iterator[DomNode]:
        """Yield every node in pre-order, without recursion (trees can be
        deeper than the interpreter stack)."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            # reversed() keeps document order for the next pops
            stack.extend(reversed(node.children))


class _TreeBuilder(HTMLParser):
    """Element-only tree construction on top of the stdlib tokenizer."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.toplevel: list[DomNode] = []
        self.stack: list[DomNode] = []
        self.count = 0

    def _add(self, tag: str, attrs: list) -> DomNode:
        node = DomNode(tag=tag, attribute_count=len(attrs))
        if self.stack:
            self.stack[-1].children.append(node)
        else:
            self.toplevel.append(node)
        self.count += 1
        return node

    def handle_starttag(self, tag: str, attrs: list) -> None:
        node = self._add(tag, attrs)
        if tag not in VOID_ELEMENTS:
            self.stack.append(node)

    def handle_startendtag(self, tag: str, attrs: list) -> None:
        self._add(tag, attrs)

    def handle_endtag(self, tag: str) -> None:
        # Pop to the matching open tag; ignore end tags that match nothing.
        if any(open_node.tag == tag for open_node in self.stack):
            while self.stack and self.stack.pop().tag != tag:
                pass

    # Text, comments, processing instructions and declarations are dropped.


def _assign_depths(root: DomNode) -> None:
    pending = [(root, 1)]
    while pending:
        node, depth = pending.pop()
        node.depth = depth
        for child in node.children:
            pending.append((child, depth + 1))


def parse_html(text: str) -> DomTree:
    """Parse HTML text into an element-only :class:`DomTree`.

    ``source_byte_size`` is the UTF-8 byte length of ``text``. When the
    markup has several top-level elements they are wrapped in a synthetic
    ``<html>`` root (which then counts as a node); a lone top-level element
    becomes the root directly.

    Raises :class:`EmptyDocumentError` for empty input or markup that
    yields no elements.
    """
    if not text.strip():
        raise EmptyDocumentError("empty document")
    builder = _TreeBuilder()
    builder.feed(text)
    builder.close()
    if not builder.toplevel:
        raise EmptyDocumentError("empty document: no elements found")
    if len(builder.toplevel) == 1:
        root = builder.toplevel[0]
        count = builder.count
    else:
        root = DomNode(tag="html", attribute_count=0, children=builder.toplevel)
        count = builder.count + 1
    _assign_depths(root)
    return DomTree(root=root, node_count=count,
                   source_byte_size=len(text.encode("utf-8")))
