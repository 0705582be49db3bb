"""Parallel tree-traversal passes over element trees.

Two pass kinds mimic the traversal structure of a rendering engine:

* ``styling_pass`` — one top-down traversal; a node's synthetic style
  value is derived from its parent's value, so parents must complete
  before children start.
* ``layout_pass`` — a top-down width phase (child widths derive from the
  parent's) followed by a bottom-up height phase (a parent's height is the
  sum of its children's heights plus one, so the root height equals the
  subtree node count and doubles as the pass checksum).

Work is scheduled by a small work-stealing pool: each worker owns a deque,
pops from its own right end and steals from other workers' left ends. A
node with a single child is processed inline by the same task; multiple
children become one task each. Per-node cost is a fixed-iteration integer
mixing kernel scaled by the node's attribute count; the kernel is compiled
with numba (releasing the GIL so threads genuinely overlap) and falls back
to an identical pure-Python loop when numba is unavailable.

Correctness relies on CPython's GIL for cross-thread visibility of list
slot writes; result slots are written exactly once per pass.
"""

from __future__ import annotations

import csv
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .dom import DomTree

__all__ = [
    "WorkConfig", "TrialResult", "PowerModel", "VisitLog",
    "styling_pass", "layout_pass", "run_bench", "estimate_energy",
    "write_measurements_csv", "HAVE_NATIVE_KERNEL",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_STYLE_SEED = 0x5DEECE66D
_WIDTH_SEED = 0xC0FFEE123456789
_HEIGHT_SEED = 0xFEEDFACECAFEBEEF


def _mix64_py(seed: int, iters: int) -> int:
    # splitmix64, iterated; must stay bit-identical to the native kernel
    x = seed & _MASK64
    for _ in range(iters):
        x = (x + 0x9E3779B97F4A7C15) & _MASK64
        z = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
        x = z ^ (z >> 31)
    return x


try:
    import numba

    @numba.njit(numba.uint64(numba.uint64, numba.int64), nogil=True, cache=True)
    def _mix64_native(seed, iters):  # pragma: no cover - exercised via _mix64
        x = seed
        for _ in range(iters):
            x = x + numba.uint64(0x9E3779B97F4A7C15)
            z = (x ^ (x >> numba.uint64(30))) * numba.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> numba.uint64(27))) * numba.uint64(0x94D049BB133111EB)
            x = z ^ (z >> numba.uint64(31))
        return x

    def _mix64(seed: int, iters: int) -> int:
        return int(_mix64_native(seed, iters))

    HAVE_NATIVE_KERNEL = True
except ImportError:  # pragma: no cover - depends on environment
    _mix64 = _mix64_py
    HAVE_NATIVE_KERNEL = False


@dataclass(frozen=True)
class WorkConfig:
    """Benchmark sweep settings. thread_counts must include the serial
    baseline (1)."""

    thread_counts: tuple[int, ...] = (1, 2, 4)
    trials_per_config: int = 5
    per_node_work_units: int = 200

    def __post_init__(self) -> None:
        counts = tuple(self.thread_counts)
        if len(set(counts)) != len(counts) or any(t < 1 for t in counts):
            raise ValueError("thread_counts must be distinct positive integers")
        if 1 not in counts:
            raise ValueError("thread_counts must include the serial baseline 1")
        if self.trials_per_config < 1:
            raise ValueError("trials_per_config must be >= 1")
        if self.per_node_work_units < 1:
            raise ValueError("per_node_work_units must be >= 1")


@dataclass(frozen=True)
class PowerModel:
    """Crude two-term power model: a baseline draw plus a per-core draw
    while a worker is busy."""

    idle_power_w: float = 10.0
    core_power_w: float = 5.0

    def __post_init__(self) -> None:
        if self.idle_power_w < 0 or self.core_power_w < 0:
            raise ValueError("power terms must be >= 0")


class VisitLog:
    """Thread-safe event log recorded only in instrumented runs.

    Events are ``(seq, kind, node_index, worker_id)`` with kind in
    {"start", "finish", "up_start", "up_finish"}; seq is a global order.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.events: list[tuple[int, str, int, int]] = []

    def record(self, kind: str, node: int, worker: int) -> None:
        with self._lock:
            self.events.append((len(self.events), kind, node, worker))


@dataclass
class TrialResult:
    page_id: str
    pass_kind: str  # "styling" | "layout"
    threads: int
    trial_index: int
    elapsed_ms: float
    checksum: int
    per_worker_busy_ms: list[float]
    visit_log: VisitLog | None = field(default=None, repr=False)


class _FlatTree:
    """Array form of a DomTree in breadth-first order (root = index 0)."""

    __slots__ = ("n", "parent", "children", "attr")

    def __init__(self, tree: DomTree) -> None:
        parent: list[int] = []
        attr: list[int] = []
        pending = deque([(tree.root, -1)])
        while pending:
            node, parent_idx = pending.popleft()
            me = len(parent)
            parent.append(parent_idx)
            attr.append(node.attribute_count)
            for child in node.children:
                pending.append((child, me))
        n = len(parent)
        children: list[list[int]] = [[] for _ in range(n)]
        for i in range(1, n):
            children[parent[i]].append(i)
        self.n = n
        self.parent = parent
        self.children = children
        self.attr = attr


class _WorkerPool:
    """Fixed worker threads with per-worker deques and round-robin stealing.

    The pool runs *phases*: a phase seeds some deques, workers process
    tasks (spawning more) until the expected number of node completions is
    reached, then park until the next phase or shutdown. Keeping the
    threads alive between phases means a two-phase pass pays the spawn
    cost once.
    """

    def __init__(self, n_workers: int) -> None:
        if n_workers < 1:
            raise ValueError("need at least one worker")
        self.n = n_workers
        self.deques: list[deque] = [deque() for _ in range(n_workers)]
        self.busy_s = [0.0] * n_workers
        self._cond = threading.Condition()
        self._gen = 0
        self._parked = 0
        self._stop = False
        self._process: Callable | None = None
        self._remaining = 0
        self._count_lock = threading.Lock()
        self._phase_done = threading.Event()
        self._threads = [
            threading.Thread(target=self._worker, args=(i,), daemon=True)
            for i in range(n_workers)
        ]
        for t in self._threads:
            t.start()

    def __enter__(self) -> "_WorkerPool":
        return self

    def __exit__(self, *exc) -> None:
        self.shutdown()

    def _take(self, wid: int):
        try:
            return self.deques[wid].pop()
        except IndexError:
            pass
        for offset in range(1, self.n):
            try:
                return self.deques[(wid + offset) % self.n].popleft()
            except IndexError:
                continue
        return None

    def _worker(self, wid: int) -> None:
        last_gen = 0
        while True:
            with self._cond:
                self._parked += 1
                self._cond.notify_all()
                while self._gen == last_gen and not self._stop:
                    self._cond.wait()
                if self._stop:
                    return
                last_gen = self._gen
            process = self._process
            while not self._phase_done.is_set():
                task = self._take(wid)
                if task is None:
                    time.sleep(5e-5)
                    continue
                t0 = time.perf_counter()
                completed = process(task, wid, self.deques[wid])
                self.busy_s[wid] += time.perf_counter() - t0
                with self._count_lock:
                    self._remaining -= completed
                    if self._remaining <= 0:
                        self._phase_done.set()

    def run_phase(self, seeds: Iterable[int],
                  process: Callable[[int, int, deque], int],
                  expected: int) -> None:
        """Block until ``expected`` node completions have been recorded.

        ``process(task, worker_id, own_deque)`` handles one task, may push
        follow-up tasks, and returns how many nodes it completed.
        """
        with self._cond:
            while self._parked < self.n:
                self._cond.wait()
            self._parked = 0
            self._process = process
            self._remaining = expected
            self._phase_done.clear()
            for i, item in enumerate(seeds):
                self.deques[i % self.n].append(item)
            self._gen += 1
            self._cond.notify_all()
        self._phase_done.wait()

    def shutdown(self) -> None:
        with self._cond:
            while self._parked < self.n:
                self._cond.wait()
            self._stop = True
            self._cond.notify_all()
        for t in self._threads:
            t.join()


def _node_seed(index: int, base: int) -> int:
    return (base ^ ((index + 1) * _GOLDEN)) & _MASK64


def _run_top_down(flat: _FlatTree, pool: _WorkerPool, units: int,
                  phase_seed: int, log: VisitLog | None,
                  start_kind: str = "start", finish_kind: str = "finish") -> list[int]:
    """Process every node after its parent; returns the per-node values."""
    values = [0] * flat.n
    parent, children, attr = flat.parent, flat.children, flat.attr

    def process(task: int, wid: int, own: deque) -> int:
        completed = 0
        current = task
        while True:
            if log is not None:
                log.record(start_kind, current, wid)
            p = parent[current]
            base = values[p] if p >= 0 else phase_seed
            values[current] = _mix64(_node_seed(current, base),
                                     units * (1 + attr[current]))
            if log is not None:
                log.record(finish_kind, current, wid)
            completed += 1
            kids = children[current]
            if len(kids) == 1:
                current = kids[0]
                continue
            for k in kids:
                own.append(k)
            return completed

    pool.run_phase([0], process, flat.n)
    return values


def _run_bottom_up(flat: _FlatTree, pool: _WorkerPool, units: int,
                   widths: list[int], log: VisitLog | None) -> list[int]:
    """Process every node after all of its children; returns heights where
    a leaf is 1 and a parent is 1 + the sum of its children."""
    n = flat.n
    parent, children, attr = flat.parent, flat.children, flat.attr
    heights = [0] * n
    pending = [len(children[i]) for i in range(n)]
    pending_lock = threading.Lock()
    leaves = [i for i in range(n) if not children[i]]

    def process(task: int, wid: int, own: deque) -> int:
        completed = 0
        current = task
        while True:
            if log is not None:
                log.record("up_start", current, wid)
            _mix64(_node_seed(current, widths[current] ^ _HEIGHT_SEED),
                   units * (1 + attr[current]))
            total = 0
            for k in children[current]:
                total += heights[k]
            heights[current] = total + 1
            if log is not None:
                log.record("up_finish", current, wid)
            completed += 1
            p = parent[current]
            if p < 0:
                return completed
            with pending_lock:
                pending[p] -= 1
                ready = pending[p] == 0
            if not ready:
                return completed
            current = p

    pool.run_phase(leaves, process, n)
    return heights


def styling_pass(tree: DomTree, threads: int, work_units: int, *,
                 page_id: str = "", trial_index: int = 0,
                 instrument: bool = False) -> TrialResult:
    """One top-down traversal; checksum is the order-independent sum of
    all node values mod 2**64."""
    if threads < 1:
        raise ValueError("threads must be >= 1")
    flat = _FlatTree(tree)
    log = VisitLog() if instrument else None
    with _WorkerPool(threads) as pool:
        t0 = time.perf_counter()
        values = _run_top_down(flat, pool, work_units, _STYLE_SEED, log)
        elapsed = time.perf_counter() - t0
        busy = list(pool.busy_s)
    checksum = sum(values) & _MASK64
    return TrialResult(page_id, "styling", threads, trial_index,
                       elapsed * 1e3, checksum,
                       [b * 1e3 for b in busy], log)


def layout_pass(tree: DomTree, threads: int, work_units: int, *,
                page_id: str = "", trial_index: int = 0,
                instrument: bool = False) -> TrialResult:
    """Top-down width phase then bottom-up height phase; checksum is the
    root height (equal to the node count by construction)."""
    if threads < 1:
        raise ValueError("threads must be >= 1")
    flat = _FlatTree(tree)
    log = VisitLog() if instrument else None
    with _WorkerPool(threads) as pool:
        t0 = time.perf_counter()
        widths = _run_top_down(flat, pool, work_units, _WIDTH_SEED, log)
        heights = _run_bottom_up(flat, pool, work_units, widths, log)
        elapsed = time.perf_counter() - t0
        busy = list(pool.busy_s)
    return TrialResult(page_id, "layout", threads, trial_index,
                       elapsed * 1e3, heights[0],
                       [b * 1e3 for b in busy], log)


_PASS_FNS = (("styling", styling_pass), ("layout", layout_pass))


def run_bench(tree: DomTree, config: WorkConfig, page_id: str = "") -> list[TrialResult]:
    """Sweep both pass kinds over every thread count, repeating trials.

    Results are returned in execution order: all styling trials first
    (grouped by thread count), then all layout trials.
    """
    results: list[TrialResult] = []
    for _, pass_fn in _PASS_FNS:
        for threads in config.thread_counts:
            for trial in range(config.trials_per_config):
                results.append(pass_fn(tree, threads, config.per_node_work_units,
                                       page_id=page_id, trial_index=trial))
    return results


def estimate_energy(result: TrialResult, model: PowerModel) -> float:
    """Joules: idle power over the wall time plus per-core power over the
    summed worker busy time."""
    elapsed_s = result.elapsed_ms / 1e3
    busy_s = sum(result.per_worker_busy_ms) / 1e3
    return model.idle_power_w * elapsed_s + model.core_power_w * busy_s


def write_measurements_csv(results: Iterable[TrialResult], path: str | Path,
                           power_model: PowerModel | None = None) -> None:
    """Schema: page_id,pass_kind,threads,trial,elapsed_ms,energy_j.

    energy_j is left blank when no power model is given (e.g. when energy
    comes from an external meter instead).
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["page_id", "pass_kind", "threads", "trial",
                         "elapsed_ms", "energy_j"])
        for r in results:
            energy = "" if power_model is None else estimate_energy(r, power_model)
            writer.writerow([r.page_id, r.pass_kind, r.threads, r.trial_index,
                             r.elapsed_ms, energy])
