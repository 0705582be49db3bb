import pytest

from domtune.dom import parse_html
from domtune.features import compute_features, width_profile
from domtune.synthetic import (SyntheticTreeSpec, UnsatisfiableSpecError,
                               generate_tree, tree_to_html)
from domtune.traversal import styling_pass


def test_single_node_target():
    tree = generate_tree(SyntheticTreeSpec(target_node_count=1, seed=3))
    assert tree.node_count == 1
    assert not tree.root.children


@pytest.mark.parametrize("target", [1, 2, 17, 100, 999])
def test_exact_node_counts(target):
    spec = SyntheticTreeSpec(target_node_count=target, min_children=0,
                             max_children=5, depth_bias=0.4, seed=target)
    assert generate_tree(spec).node_count == target


def test_wide_spec_bounds_depth():
    # branching >= 8 caps the depth of a breadth-first fill of 1000 nodes at 5
    spec = SyntheticTreeSpec(target_node_count=1000, min_children=8,
                             max_children=12, depth_bias=0.0, seed=21)
    tree = generate_tree(spec)
    assert tree.node_count == 1000
    assert len(width_profile(tree).widths) <= 5


def test_same_seed_same_tree():
    spec = SyntheticTreeSpec(target_node_count=400, min_children=1,
                             max_children=6, depth_bias=0.3, seed=77)
    t1, t2 = generate_tree(spec), generate_tree(spec)
    assert width_profile(t1).widths == width_profile(t2).widths
    assert styling_pass(t1, 1, 1).checksum == styling_pass(t2, 1, 1).checksum


def test_different_seeds_differ():
    base = dict(target_node_count=400, min_children=1, max_children=6,
                depth_bias=0.3)
    t1 = generate_tree(SyntheticTreeSpec(seed=1, **base))
    t2 = generate_tree(SyntheticTreeSpec(seed=2, **base))
    assert width_profile(t1).widths != width_profile(t2).widths


def test_depth_bias_increases_depth():
    base = dict(target_node_count=300, min_children=1, max_children=4, seed=9)
    shallow = generate_tree(SyntheticTreeSpec(depth_bias=0.0, **base))
    deep = generate_tree(SyntheticTreeSpec(depth_bias=0.9, **base))
    assert len(width_profile(shallow).widths) < len(width_profile(deep).widths)


def test_full_depth_bias_makes_a_chain():
    tree = generate_tree(SyntheticTreeSpec(target_node_count=250, min_children=1,
                                           max_children=3, depth_bias=1.0, seed=5))
    assert width_profile(tree).widths == (1,) * 250


def test_unsatisfiable_specs_rejected():
    with pytest.raises(UnsatisfiableSpecError):
        generate_tree(SyntheticTreeSpec(target_node_count=0))
    with pytest.raises(UnsatisfiableSpecError):
        generate_tree(SyntheticTreeSpec(target_node_count=10, min_children=0,
                                        max_children=0))
    with pytest.raises(UnsatisfiableSpecError):
        generate_tree(SyntheticTreeSpec(target_node_count=10, min_children=5,
                                        max_children=2))
    with pytest.raises(UnsatisfiableSpecError):
        generate_tree(SyntheticTreeSpec(target_node_count=10, depth_bias=1.5))


def test_html_round_trip_preserves_structure():
    spec = SyntheticTreeSpec(target_node_count=300, min_children=0,
                             max_children=5, depth_bias=0.35, seed=13)
    tree = generate_tree(spec)
    parsed = parse_html(tree_to_html(tree))
    assert parsed.node_count == tree.node_count
    assert width_profile(parsed).widths == width_profile(tree).widths
    original = compute_features(tree, "x")
    back = compute_features(parsed, "x")
    assert back.attribute_count == original.attribute_count
    assert back.number_of_leaves == original.number_of_leaves
    assert back.web_page_size == len(tree_to_html(tree).encode())


def test_deep_chain_serializes_without_recursion():
    tree = generate_tree(SyntheticTreeSpec(target_node_count=5000, min_children=1,
                                           max_children=1, depth_bias=1.0, seed=1))
    html = tree_to_html(tree)
    parsed = parse_html(html)
    assert parsed.node_count == 5000
    assert len(width_profile(parsed).widths) == 5000
