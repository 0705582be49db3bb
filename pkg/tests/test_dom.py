import pytest

from domtune.dom import DomNode, EmptyDocumentError, parse_html


def walk_pairs(tree):
    """(parent, child) pairs across the whole tree."""
    for node in tree.walk():
        for child in node.children:
            yield node, child


def test_three_node_tree_with_attributes():
    tree = parse_html("<html><body><p a=1 b=2>x</p></body></html>")
    assert tree.node_count == 3
    tags = [n.tag for n in tree.walk()]
    assert tags == ["html", "body", "p"]
    p = [n for n in tree.walk() if n.tag == "p"][0]
    assert p.attribute_count == 2


def test_single_element_document():
    tree = parse_html("<html></html>")
    assert tree.node_count == 1
    assert tree.root.depth == 1
    assert tree.root.tag == "html"


def test_empty_input_raises():
    with pytest.raises(EmptyDocumentError):
        parse_html("")
    with pytest.raises(EmptyDocumentError):
        parse_html("   \n  ")


def test_no_elements_raises():
    with pytest.raises(EmptyDocumentError):
        parse_html("just some text, no tags")
    with pytest.raises(EmptyDocumentError):
        parse_html("<!-- only a comment -->")


def test_text_comments_doctype_excluded():
    tree = parse_html(
        "<!DOCTYPE html><html><!-- note --><body>words<p>more</p></body></html>")
    assert tree.node_count == 3
    assert [n.tag for n in tree.walk()] == ["html", "body", "p"]


def test_script_and_style_contents_excluded():
    html = ('<html><script>var a = "<div><div>";</script>'
            '<style>p > b { color: red }</style><p></p></html>')
    tree = parse_html(html)
    assert [n.tag for n in tree.walk()] == ["html", "script", "style", "p"]


def test_void_elements_do_not_nest():
    tree = parse_html("<div><br><img src=x><span></span></div>")
    root = tree.root
    assert [c.tag for c in root.children] == ["br", "img", "span"]
    assert all(not c.children for c in root.children)


def test_self_closing_syntax():
    tree = parse_html("<div><br/><custom/></div>")
    assert [c.tag for c in tree.root.children] == ["br", "custom"]


def test_unclosed_tags_close_at_eof():
    tree = parse_html("<div><section><p>")
    assert tree.node_count == 3
    depths = {n.tag: n.depth for n in tree.walk()}
    assert depths == {"div": 1, "section": 2, "p": 3}


def test_stray_end_tag_ignored():
    tree = parse_html("<div></p><span></span></div>")
    assert [n.tag for n in tree.walk()] == ["div", "span"]


def test_mismatched_close_pops_to_match():
    # </div> closes both the inner span and the div
    tree = parse_html("<div><span></div><p></p>")
    tags = [n.tag for n in tree.walk()]
    assert tags == ["div", "span", "p"] or tags == ["html", "div", "span", "p"]


def test_multiple_toplevel_elements_get_synthetic_root():
    tree = parse_html("<p></p><p></p>")
    assert tree.root.tag == "html"
    assert tree.node_count == 3
    assert all(c.depth == 2 for c in tree.root.children)


def test_duplicate_attributes_counted():
    tree = parse_html("<p a=1 a=2 a=3></p>")
    assert tree.root.attribute_count == 3


def test_depth_invariant_child_is_parent_plus_one():
    tree = parse_html(
        "<html><body><div><p>x</p><ul><li>a</li><li>b</li></ul></div></body></html>")
    for parent, child in walk_pairs(tree):
        assert child.depth == parent.depth + 1
    assert tree.root.depth == 1


def test_node_count_matches_reachable_nodes():
    tree = parse_html("<html><body><p></p><p></p><p></p></body></html>")
    assert tree.node_count == sum(1 for _ in tree.walk())


def test_source_byte_size_is_utf8_length():
    html = "<p>élément</p>"
    tree = parse_html(html)
    assert tree.source_byte_size == len(html.encode("utf-8"))
    assert tree.source_byte_size > len(html)


def test_parsing_is_deterministic():
    html = "<div><p a=1>x</p><p>y</p><span><b></b></span></div>"
    t1, t2 = parse_html(html), parse_html(html)
    shape1 = [(n.tag, n.depth, n.attribute_count) for n in t1.walk()]
    shape2 = [(n.tag, n.depth, n.attribute_count) for n in t2.walk()]
    assert shape1 == shape2
    assert t1.node_count == t2.node_count


def test_deep_document_does_not_recurse():
    depth = 4000
    html = "<div>" * depth + "</div>" * depth
    tree = parse_html(html)
    assert tree.node_count == depth
    assert max(n.depth for n in tree.walk()) == depth


def test_domnode_repr_skips_children():
    node = DomNode(tag="div", attribute_count=0, depth=1)
    assert "children" not in repr(node)
