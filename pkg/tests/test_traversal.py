import random

import pytest
from helpers import check_bottom_up_order, check_top_down_order

from domtune.dom import parse_html
from domtune.synthetic import SyntheticTreeSpec, generate_tree
from domtune.traversal import (HAVE_NATIVE_KERNEL, PowerModel, TrialResult,
                               WorkConfig, _FlatTree, _mix64, _mix64_py,
                               estimate_energy, layout_pass, run_bench,
                               styling_pass, write_measurements_csv)

BINARY_DEPTH3 = ("<div><div><div></div><div></div></div>"
                 "<div><div></div><div></div></div></div>")


def random_trees(count, seed, max_nodes=180):
    rng = random.Random(seed)
    trees = []
    for i in range(count):
        spec = SyntheticTreeSpec(
            target_node_count=rng.randint(1, max_nodes),
            min_children=rng.randint(0, 2),
            max_children=rng.randint(2, 6),
            depth_bias=rng.random(),
            seed=rng.randrange(2**32),
        )
        trees.append(generate_tree(spec))
    return trees


def test_work_config_validation():
    with pytest.raises(ValueError):
        WorkConfig(thread_counts=(2, 4))  # serial baseline missing
    with pytest.raises(ValueError):
        WorkConfig(thread_counts=(1, 2, 2))
    with pytest.raises(ValueError):
        WorkConfig(thread_counts=(1, 0))
    with pytest.raises(ValueError):
        WorkConfig(trials_per_config=0)
    with pytest.raises(ValueError):
        WorkConfig(per_node_work_units=0)


@pytest.mark.skipif(not HAVE_NATIVE_KERNEL, reason="numba not installed")
def test_native_and_python_kernels_agree():
    rng = random.Random(42)
    for _ in range(100):
        seed = rng.getrandbits(64)
        iters = rng.randint(0, 40)
        assert _mix64(seed, iters) == _mix64_py(seed, iters)


def test_single_node_pass():
    tree = parse_html("<p></p>")
    result = styling_pass(tree, 1, 1, instrument=True)
    finishes = [e for e in result.visit_log.events if e[1] == "finish"]
    assert len(finishes) == 1
    assert layout_pass(tree, 1, 1).checksum == 1  # leaf base height


def test_layout_checksum_binary_tree_is_seven():
    tree = parse_html(BINARY_DEPTH3)
    # leaves have height 1, parents sum(children)+1: (1,1,1,1) -> (3,3) -> 7
    assert layout_pass(tree, 1, 1).checksum == 7
    assert layout_pass(tree, 4, 1).checksum == 7


def test_checksums_invariant_across_threads_and_runs():
    for tree in random_trees(5, seed=100):
        for pass_fn in (styling_pass, layout_pass):
            seen = {pass_fn(tree, threads, 2).checksum
                    for threads in (1, 2, 4) for _ in range(3)}
            assert len(seen) == 1


def test_styling_checksum_differs_between_trees():
    t1, t2 = random_trees(2, seed=200, max_nodes=120)
    assert styling_pass(t1, 1, 2).checksum != styling_pass(t2, 1, 2).checksum


def test_visit_logs_satisfy_ordering():
    for tree in random_trees(6, seed=300):
        flat = _FlatTree(tree)
        styled = styling_pass(tree, 4, 1, instrument=True)
        check_top_down_order(styled.visit_log.events, flat.parent, flat.n)
        laid_out = layout_pass(tree, 4, 1, instrument=True)
        check_top_down_order(laid_out.visit_log.events, flat.parent, flat.n)
        check_bottom_up_order(laid_out.visit_log.events, flat.children, flat.n)


def test_visit_count_equals_dom_size():
    for tree in random_trees(4, seed=400):
        result = styling_pass(tree, 2, 1, instrument=True)
        visited = {e[2] for e in result.visit_log.events if e[1] == "finish"}
        assert len(visited) == tree.node_count


def test_run_bench_counts_and_order():
    tree = random_trees(1, seed=500, max_nodes=60)[0]
    config = WorkConfig(thread_counts=(1, 2), trials_per_config=2,
                        per_node_work_units=1)
    results = run_bench(tree, config, "page")
    assert len(results) == 8  # 2 kinds x 2 thread counts x 2 trials
    assert [r.pass_kind for r in results] == ["styling"] * 4 + ["layout"] * 4
    by_kind = {}
    for r in results:
        by_kind.setdefault(r.pass_kind, set()).add(r.checksum)
    assert all(len(sums) == 1 for sums in by_kind.values())


def test_run_bench_minimal_config():
    tree = random_trees(1, seed=501, max_nodes=30)[0]
    config = WorkConfig(thread_counts=(1,), trials_per_config=1,
                        per_node_work_units=1)
    assert len(run_bench(tree, config, "p")) == 2


def test_per_worker_busy_length_matches_threads():
    tree = random_trees(1, seed=502, max_nodes=80)[0]
    result = styling_pass(tree, 3, 1)
    assert len(result.per_worker_busy_ms) == 3


def _result(elapsed_ms, busy_ms):
    return TrialResult("p", "styling", len(busy_ms), 0, elapsed_ms, 0,
                       list(busy_ms))


def test_estimate_energy_formula():
    model = PowerModel(idle_power_w=10.0, core_power_w=5.0)
    # 10 W * 1 s + 5 W * 1 s = 15 J
    assert estimate_energy(_result(1000.0, [1000.0]), model) == pytest.approx(15.0)


def test_estimate_energy_zero_busy_is_idle_only():
    model = PowerModel(idle_power_w=7.0, core_power_w=3.0)
    assert estimate_energy(_result(2000.0, [0.0, 0.0]), model) == pytest.approx(14.0)


def test_estimate_energy_active_term_is_linear_in_busy():
    model = PowerModel(idle_power_w=4.0, core_power_w=2.5)
    single = estimate_energy(_result(1000.0, [300.0, 200.0]), model)
    double = estimate_energy(_result(1000.0, [600.0, 400.0]), model)
    idle = model.idle_power_w * 1.0
    assert double - idle == pytest.approx(2 * (single - idle))


def test_estimate_energy_monotone():
    model = PowerModel(idle_power_w=2.0, core_power_w=3.0)
    base = estimate_energy(_result(1000.0, [500.0]), model)
    assert estimate_energy(_result(1500.0, [500.0]), model) >= base
    assert estimate_energy(_result(1000.0, [700.0]), model) >= base


def test_power_model_validation():
    with pytest.raises(ValueError):
        PowerModel(idle_power_w=-1.0)


def test_measurements_csv_schema(tmp_path):
    tree = random_trees(1, seed=503, max_nodes=40)[0]
    config = WorkConfig(thread_counts=(1,), trials_per_config=1,
                        per_node_work_units=1)
    results = run_bench(tree, config, "pg")
    with_energy = tmp_path / "m.csv"
    write_measurements_csv(results, with_energy, PowerModel())
    lines = with_energy.read_text().splitlines()
    assert lines[0] == "page_id,pass_kind,threads,trial,elapsed_ms,energy_j"
    assert len(lines) == 3
    assert not lines[1].endswith(",")

    blank = tmp_path / "b.csv"
    write_measurements_csv(results, blank, None)
    assert blank.read_text().splitlines()[1].endswith(",")


def test_invalid_thread_count_rejected():
    tree = parse_html("<p></p>")
    with pytest.raises(ValueError):
        styling_pass(tree, 0, 1)
