"""Batch command-line front end.

Subcommands mirror the pipeline stages::

    features  pages-dir          -> features.csv + width_profiles.csv
    bench     pages-dir|spec     -> measurements.csv
    label     measurements.csv   -> labels.csv (+ aggregates.csv, ratios.csv)
    train     features + labels  -> model.json + CV report
    predict   model + page       -> label + class probabilities
    report    measurements + labels + model -> savings.csv

Every command is deterministic given its inputs and seed, except for the
wall-clock fields bench writes. Outputs are plain CSV/JSON; exit status is
0 on success and 1 with a one-line diagnostic on stderr otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import labeling, learn, measurements, mnr, traversal
from .config import PipelineConfig
from .dom import EmptyDocumentError, parse_html
from .features import (FEATURE_COLUMNS, compute_features, read_features_csv,
                       width_profile, write_features_csv,
                       write_width_profiles_csv)
from .synthetic import SyntheticTreeSpec, generate_tree

__all__ = ["main", "build_parser"]


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    config = (PipelineConfig.from_file(args.config)
              if getattr(args, "config", None) else PipelineConfig())
    overrides = {}
    for flag, key in (("threads", "thread_counts"), ("trials", "trials"),
                      ("work_units", "per_node_work_units"), ("seed", "seed"),
                      ("cost_model", "cost_model"), ("folds", "cv_folds")):
        if getattr(args, flag, None) is not None:
            overrides[key] = getattr(args, flag)
    return config.override(**overrides)


def _page_files(pages_dir: str) -> list[Path]:
    root = Path(pages_dir)
    if not root.is_dir():
        raise ValueError(f"not a directory: {pages_dir}")
    files = sorted(p for p in root.iterdir() if p.suffix in (".html", ".htm"))
    if not files:
        raise ValueError(f"no .html/.htm files in {pages_dir}")
    return files


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_features(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    rows, profiles, errors = [], [], []
    for path in _page_files(args.pages_dir):
        page_id = path.stem
        try:
            tree = parse_html(path.read_text(errors="replace"))
        except EmptyDocumentError as exc:
            errors.append((page_id, str(exc)))
            continue
        rows.append(compute_features(tree, page_id))
        profiles.append((page_id, width_profile(tree)))
    if not rows:
        raise ValueError("no page could be parsed")
    write_features_csv(rows, out / "features.csv")
    write_width_profiles_csv(profiles, out / "width_profiles.csv")
    if errors:
        with open(out / "features_errors.txt", "w") as fh:
            for page_id, message in errors:
                fh.write(f"{page_id}\t{message}\n")
    print(f"wrote {len(rows)} feature row(s) to {out / 'features.csv'}"
          + (f" ({len(errors)} unparseable, see features_errors.txt)" if errors else ""))
    return 0


def _parse_synthetic_source(text: str, seed: int) -> list[tuple[str, SyntheticTreeSpec]]:
    """'synthetic:count=50,nodes=500,min_children=2,max_children=6,
    depth_bias=0.2' -> one spec per page, seeds derived from the base seed."""
    params = {"count": 10, "nodes": 500, "min_children": 2, "max_children": 6,
              "depth_bias": 0.2}
    body = text.split(":", 1)[1] if ":" in text else ""
    for part in filter(None, (p.strip() for p in body.split(","))):
        if "=" not in part:
            raise ValueError(f"bad synthetic parameter {part!r}")
        key, value = part.split("=", 1)
        if key not in params:
            raise ValueError(f"unknown synthetic parameter {key!r}")
        params[key] = float(value) if key == "depth_bias" else int(value)
    count = int(params.pop("count"))
    nodes = int(params.pop("nodes"))
    pages = []
    for i in range(count):
        pages.append((f"synthetic-{i:03d}",
                      SyntheticTreeSpec(target_node_count=nodes,
                                        min_children=int(params["min_children"]),
                                        max_children=int(params["max_children"]),
                                        depth_bias=params["depth_bias"],
                                        seed=seed + i)))
    return pages


def cmd_bench(args: argparse.Namespace) -> int:
    config = _load_config(args)
    out = _out_dir(args)
    if args.source.startswith("synthetic"):
        trees = [(page_id, generate_tree(spec))
                 for page_id, spec in _parse_synthetic_source(args.source, config.seed)]
    else:
        trees = []
        for path in _page_files(args.source):
            try:
                trees.append((path.stem, parse_html(path.read_text(errors="replace"))))
            except EmptyDocumentError as exc:
                print(f"skipping {path.stem}: {exc}", file=sys.stderr)
        if not trees:
            raise ValueError("no page could be parsed")
    work = config.work_config()
    results = []
    for page_id, tree in trees:
        results.extend(traversal.run_bench(tree, work, page_id))
    power = None if args.no_energy else config.power_model()
    traversal.write_measurements_csv(results, out / "measurements.csv", power)
    print(f"wrote {len(results)} trial row(s) for {len(trees)} page(s) "
          f"to {out / 'measurements.csv'}")
    return 0


def cmd_label(args: argparse.Namespace) -> int:
    config = _load_config(args)
    out = _out_dir(args)
    trials = measurements.ingest_csv(args.measurements)
    energy_table = (measurements.read_energy_csv(args.energy_csv)
                    if args.energy_csv else None)
    aggs = measurements.aggregate(trials, energy_table)
    measurements.write_aggregates_csv(aggs, out / "aggregates.csv")

    by_page = measurements.group_by_page(aggs)
    speedup_sets, greenup_sets = [], []
    for page_id in sorted(by_page):
        speedup_sets.append(measurements.speedups(by_page[page_id]))
        if all(a.median_energy_j is not None for a in by_page[page_id]):
            greenup_sets.append(measurements.greenups(by_page[page_id]))
    greenups_by_page = {g.page_id: g for g in greenup_sets}
    measurements.write_ratios_csv(speedup_sets, greenup_sets, out / "ratios.csv")

    labels = []
    for speedup_set in speedup_sets:
        page_id = speedup_set.page_id
        if config.cost_model == "perf":
            label = labeling.performance_label(speedup_set, config.p_min)
        else:
            if page_id not in greenups_by_page:
                raise ValueError(
                    f"cost model {config.cost_model!r} needs energy data, "
                    f"but page {page_id!r} has none")
            if config.cost_model == "energy":
                label = labeling.energy_label(greenups_by_page[page_id], config.e_min)
            else:
                pets = labeling.pets_from_ratios(speedup_set, greenups_by_page[page_id])
                label = labeling.performance_energy_label(pets, config.bucket_config())
        labels.append((page_id, label))
    labeling.write_labels_csv(labels, config.cost_model, out / "labels.csv")
    print(f"labeled {len(labels)} page(s) with cost model {config.cost_model!r} "
          f"-> {out / 'labels.csv'}")
    return 0


def _join_features_labels(features_path: str, labels_path: str):
    feats = read_features_csv(features_path)
    labels = labeling.read_labels_csv(labels_path)
    usable = [f for f in feats if f.page_id in labels]
    dropped = len(feats) - len(usable)
    if dropped:
        print(f"warning: {dropped} feature row(s) have no label and were dropped",
              file=sys.stderr)
    if not usable:
        raise ValueError("no pages appear in both features and labels")
    usable.sort(key=lambda f: f.page_id)
    matrix = learn.matrix_from_features(usable)
    y = [labels[f.page_id] for f in usable]
    return matrix, y


def cmd_train(args: argparse.Namespace) -> int:
    config = _load_config(args)
    out = _out_dir(args)
    matrix, y = _join_features_labels(args.features, args.labels)

    selected = list(FEATURE_COLUMNS)
    if args.speedups:
        speedup_sets, greenup_sets = measurements.read_ratios_csv(args.speedups)
        pages = [p for p in matrix.page_ids if p in speedup_sets]
        if len(pages) < len(matrix.page_ids):
            print(f"warning: correlation uses the {len(pages)} page(s) that "
                  f"have ratio data", file=sys.stderr)
        sub = learn.FeatureMatrix(
            pages,
            np.array([matrix.values[matrix.page_ids.index(p)] for p in pages]),
            matrix.column_names)
        targets = {}
        thread_set = sorted({t for p in pages for t in speedup_sets[p].entries if t != 1})
        for t in thread_set:
            targets[f"p_{t}"] = np.array([speedup_sets[p].entries[t] for p in pages])
        if all(p in greenup_sets for p in pages):
            for t in thread_set:
                targets[f"e_{t}"] = np.array(
                    [greenup_sets[p].entries[t] for p in pages])
        report = learn.correlation_report(sub, targets)
        learn.write_correlation_csv(report, out / "correlation.csv")
        selected = learn.select_features(report, config.r_threshold)
        if not selected:
            raise ValueError(f"no feature correlates above |r| > {config.r_threshold}")

    model = learn.train_model(matrix.subset(selected), y)
    mnr.save_model(model, out / "model.json")
    cv = learn.cross_validate(matrix.subset(selected), y, config.cv_folds, config.seed)
    learn.write_cv_report_csv(cv, out / "cv_report.csv")
    learn.write_confusion_csv(cv, out / "confusion.csv")
    print(f"trained on {len(y)} page(s) with features {', '.join(selected)}")
    print(f"cv mean accuracy {cv.mean_accuracy:.4f}, max {cv.max_accuracy:.4f} "
          f"({config.cv_folds} folds) -> {out / 'model.json'}")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    model = mnr.load_model(args.model)
    source = Path(args.page)
    if source.suffix == ".csv":
        feats = read_features_csv(source)
        if args.page_id is not None:
            feats = [f for f in feats if f.page_id == args.page_id]
            if not feats:
                raise ValueError(f"page {args.page_id!r} not found in {source}")
        chosen = feats[0]
    else:
        tree = parse_html(source.read_text(errors="replace"))
        chosen = compute_features(tree, source.stem)
    vector = np.array([chosen.value(c) for c in model.selected_features])
    probs = model.predict_proba(vector)
    label = model.predict(vector)
    print(json.dumps({
        "page_id": chosen.page_id,
        "label": int(label),
        "probabilities": {str(c): float(p) for c, p in zip(model.classes, probs)},
    }, sort_keys=True))
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    trials = measurements.ingest_csv(args.measurements)
    energy_table = (measurements.read_energy_csv(args.energy_csv)
                    if args.energy_csv else None)
    aggs = measurements.aggregate(trials, energy_table)
    cost_labels = labeling.read_labels_csv(args.labels)

    if args.features:
        model = mnr.load_model(args.model)
        feats = {f.page_id: f for f in read_features_csv(args.features)}
        predicted = {}
        for page_id, f in feats.items():
            vector = np.array([f.value(c) for c in model.selected_features])
            predicted[page_id] = int(model.predict(vector))
    else:
        # Without features the model cannot score pages; fall back to the
        # cost-model labels as the model's decisions.
        mnr.load_model(args.model)  # still validate the file
        predicted = cost_labels

    default_threads = args.default_threads
    if default_threads is None:
        default_threads = max(a.threads for a in aggs)
    rows = learn.savings_report(aggs, predicted, default_threads)
    learn.write_savings_csv(rows, out / "savings.csv")
    mean_perf = float(np.mean([r.perf_savings_pct for r in rows]))
    print(f"wrote savings for {len(rows)} page(s) (default={default_threads} "
          f"threads, mean perf savings {mean_perf:.2f}%) -> {out / 'savings.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="domtune",
        description="Characterize, benchmark, label, and predict per-page "
                    "thread counts for parallel tree-traversal workloads.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("features", help="extract structural features from pages")
    p.add_argument("pages_dir", help="directory of .html files (stem = page id)")
    common(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("bench", help="run traversal benchmarks")
    p.add_argument("source", help="pages directory, or "
                   "'synthetic:count=N,nodes=M[,min_children=..,max_children=..,"
                   "depth_bias=..]'")
    p.add_argument("--threads", type=lambda s: tuple(int(x) for x in s.split(",")),
                   default=None, help="comma-separated thread counts (must include 1)")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--work-units", dest="work_units", type=int, default=None)
    p.add_argument("--no-energy", action="store_true",
                   help="leave energy_j blank (defer to an external meter)")
    common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("label", help="label pages with their best thread count")
    p.add_argument("measurements", help="measurements CSV")
    p.add_argument("--energy-csv", help="per-(page,threads) energy CSV")
    p.add_argument("--cost-model", dest="cost_model",
                   choices=list(labeling.COST_MODELS), default=None)
    common(p)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("train", help="train the thread-count classifier")
    p.add_argument("features", help="features CSV")
    p.add_argument("labels", help="labels CSV")
    p.add_argument("--speedups", help="ratios CSV for correlation-based "
                   "feature selection (all features kept when omitted)")
    p.add_argument("--folds", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict the thread count for one page")
    p.add_argument("model", help="model JSON file")
    p.add_argument("page", help="an .html file, or a features CSV")
    p.add_argument("--page-id", help="row to use when reading a features CSV")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("report", help="per-page savings vs default and ideal")
    p.add_argument("measurements", help="measurements CSV")
    p.add_argument("labels", help="labels CSV (cost-model output)")
    p.add_argument("model", help="model JSON file")
    p.add_argument("--features", help="features CSV; when given, the model "
                   "predicts each page's label instead of reusing labels CSV")
    p.add_argument("--energy-csv", help="per-(page,threads) energy CSV")
    p.add_argument("--default-threads", type=int, default=None,
                   help="baseline thread count (default: highest measured)")
    common(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
