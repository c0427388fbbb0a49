"""Command-line pipeline: fetch, featurize, train, evaluate, explain, report.

Exit codes: 0 success, 2 validation problem, 3 archive fetch failure,
4 insufficient data. Global flags (--seed, --window-hours, --config,
--offline) attach to every subcommand via a shared parent parser.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import archive, boosting, features, preprocess, report, shapley, svgplot
from .config import BuzzcastConfig, load_config
from .errors import (
    FetchError,
    InsufficientDataError,
    R2UndefinedError,
    ValidationError,
)
from .events import (
    WINDOW_HOURS_DEFAULT,
    LabeledEvent,
    event_slug,
    load_viewership_csv,
)
from .sentiment import SentimentAnalyzers
from .features import aggregate_event, load_engagement_csv, write_engagement_csv

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_FETCH = 3
EXIT_INSUFFICIENT = 4


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="global random seed")
    common.add_argument(
        "--window-hours",
        type=int,
        default=WINDOW_HOURS_DEFAULT,
        help="collection window length before event start",
    )
    common.add_argument("--config", type=Path, default=None, help="TOML config file")
    common.add_argument(
        "--offline",
        action="store_true",
        help="use local fixture archives, never the network",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="buzzcast",
        description="Predict televised-sports viewership from Reddit engagement.",
    )
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "fetch", parents=[common], help="events CSV -> per-event post fixtures"
    )
    p.add_argument("--events", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="fixture output directory")
    p.add_argument(
        "--archive-dir",
        type=Path,
        default=None,
        help="fixture archive directory (required with --offline)",
    )

    p = sub.add_parser(
        "featurize", parents=[common], help="post fixtures -> engagement CSV"
    )
    p.add_argument("--events", type=Path, required=True)
    p.add_argument("--posts", type=Path, required=True, help="fixture directory")
    p.add_argument("--out", type=Path, required=True, help="engagement CSV path")

    p = sub.add_parser(
        "train",
        parents=[common],
        help="engagement CSV -> model.json + cv_table.csv + run_metadata.json",
    )
    p.add_argument("--engagement", type=Path, required=True)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--folds", type=int, default=5, help="CV fold count")

    p = sub.add_parser(
        "evaluate", parents=[common], help="model + CSV -> metrics.json + scatter SVG"
    )
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--engagement", type=Path, required=True)
    p.add_argument("--split", choices=["test", "full"], default="test")
    p.add_argument("--out-dir", type=Path, required=True)

    p = sub.add_parser(
        "explain",
        parents=[common],
        help="model + CSV -> attribution CSV + importance SVG",
    )
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--engagement", type=Path, required=True)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument(
        "--instance",
        default=None,
        help="event name to attribute (default: first test-split event)",
    )

    p = sub.add_parser(
        "report", parents=[common], help="artifacts -> heatmap SVG + summary markdown"
    )
    p.add_argument("--engagement", type=Path, required=True)
    p.add_argument(
        "--artifacts",
        type=Path,
        default=None,
        help="directory holding train/evaluate/explain outputs",
    )
    p.add_argument("--out-dir", type=Path, required=True)

    return parser


def _analyzers(config: BuzzcastConfig) -> SentimentAnalyzers:
    return SentimentAnalyzers.default(rule_config=config.sentiment)


def cmd_fetch(args, config: BuzzcastConfig) -> int:
    events = load_viewership_csv(args.events)
    args.out.mkdir(parents=True, exist_ok=True)
    for event in events:
        slug = event_slug(event.spec.name)
        if args.offline:
            if args.archive_dir is None:
                raise ValidationError("--offline fetch requires --archive-dir")
            client = archive.FixtureArchiveClient.from_file(
                args.archive_dir / f"{slug}.json"
            )
        else:
            client = archive.HttpArchiveClient(config.ingest)
        posts = archive.fetch_window(
            event.spec,
            client,
            window_hours=args.window_hours,
            page_size=config.ingest.page_size,
        )
        archive.write_posts_fixture(args.out / f"{slug}.json", posts)
        print(f"fetch: {event.spec.name}: {len(posts)} posts")
    return EXIT_OK


def cmd_featurize(args, config: BuzzcastConfig) -> int:
    events = load_viewership_csv(args.events)
    analyzers = _analyzers(config)
    rows = []
    for event in events:
        fixture = args.posts / f"{event_slug(event.spec.name)}.json"
        if not fixture.exists():
            raise ValidationError(
                f"no post fixture for {event.spec.name!r} at {fixture}"
            )
        posts = archive.load_posts_fixture(fixture)
        rows.append(aggregate_event(event, posts, analyzers))
    write_engagement_csv(args.out, rows)
    print(f"featurize: wrote {len(rows)} events to {args.out}")
    return EXIT_OK


def cmd_train(args, config: BuzzcastConfig) -> int:
    rows = load_engagement_csv(args.engagement)
    prepared = preprocess.prepare_run(rows, seed=args.seed, config=config.preprocess)
    best, results = boosting.grid_search_cv(
        prepared.X_train,
        prepared.y_train_log,
        k=args.folds,
        seed=args.seed,
    )
    model = boosting.fit_gbm(
        prepared.X_train, prepared.y_train_log, best, seed=args.seed
    ).with_states(prepared.feature_names, prepared.scaler, prepared.encoder)
    out = args.out_dir
    boosting.save_model(out / "model.json", model)
    boosting.write_cv_table(out / "cv_table.csv", results)
    meta = preprocess.run_metadata(prepared)
    meta["best_hyperparams"] = best.to_dict()
    meta["cv_mean_mae_log"] = min(r.mean_mae for r in results)
    out.mkdir(parents=True, exist_ok=True)
    (out / "run_metadata.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    best_text = ", ".join(f"{k}={v}" for k, v in best.to_dict().items())
    print(f"train: best {best_text}")
    print(f"train: CV mean MAE (log space) {meta['cv_mean_mae_log']:.4f}")
    return EXIT_OK


def _prepared_for_model(args, config, model):
    """Rebuild the screened dataset and split the model was trained under."""
    rows = load_engagement_csv(args.engagement)
    rows, _ = features.drop_zero_post_events(rows)
    kept, _ = preprocess.iqr_screen_by_sport(rows, config.preprocess)
    dataset = features.Dataset.from_rows(kept)
    seed = model.seed if model.seed is not None else args.seed
    split = preprocess.split_dataset(
        len(dataset), config.preprocess.train_ratio, seed
    )
    return dataset, split


def cmd_evaluate(args, config: BuzzcastConfig) -> int:
    model = boosting.load_model(args.model)
    dataset, split = _prepared_for_model(args, config, model)
    if args.split == "test":
        idx = np.array(split.test, dtype=np.intp)
    else:
        idx = np.arange(len(dataset), dtype=np.intp)
    X = preprocess.design_matrix(
        dataset.numeric[idx],
        [dataset.sports[i] for i in idx],
        model.scaler,
        model.encoder,
    )
    y_true = dataset.viewers[idx]
    y_pred = model.predict_viewers(X)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    try:
        metrics = report.compute_metrics(y_true, y_pred)
        r2_text = f"{metrics.r2:.4f}"
    except R2UndefinedError as exc:
        metrics = report.Metrics(mae=exc.mae, rmse=exc.rmse, r2=1.0)
        report.write_metrics_json(
            args.out_dir / "metrics.json",
            metrics,
            split=args.split,
            n=int(idx.size),
            extra={"r2": None, "note": "R^2 undefined: constant actuals"},
        )
        svgplot.render_scatter(y_true, y_pred, args.out_dir / "scatter.svg")
        print(
            f"evaluate[{args.split}]: MAE {exc.mae:.4f}M RMSE {exc.rmse:.4f}M "
            "R2 undefined"
        )
        return EXIT_OK
    report.write_metrics_json(
        args.out_dir / "metrics.json", metrics, split=args.split, n=int(idx.size)
    )
    svgplot.render_scatter(y_true, y_pred, args.out_dir / "scatter.svg")
    print(
        f"evaluate[{args.split}]: MAE {metrics.mae:.4f}M "
        f"RMSE {metrics.rmse:.4f}M R2 {r2_text}"
    )
    return EXIT_OK


def cmd_explain(args, config: BuzzcastConfig) -> int:
    model = boosting.load_model(args.model)
    dataset, split = _prepared_for_model(args, config, model)
    all_idx = np.arange(len(dataset), dtype=np.intp)
    X_all = preprocess.design_matrix(
        dataset.numeric,
        list(dataset.sports),
        model.scaler,
        model.encoder,
    )
    train_idx = np.array(split.train, dtype=np.intp)
    background = shapley.prepare_background(
        X_all[train_idx], cap=config.explain.background_cap, seed=args.seed
    )
    if args.instance is not None:
        matches = [i for i in all_idx if dataset.names[i] == args.instance]
        if not matches:
            raise ValidationError(f"no event named {args.instance!r} in dataset")
        chosen = matches[0]
    else:
        chosen = split.test[0]
    attribution = shapley.shapley_values(
        model,
        X_all[chosen],
        background,
        feature_names=model.feature_names,
        instance_name=dataset.names[chosen],
    )
    importance = shapley.global_importance(
        model, X_all, background, feature_names=model.feature_names
    )
    args.out_dir.mkdir(parents=True, exist_ok=True)
    shapley.write_attribution_csv(args.out_dir / "attribution.csv", attribution)
    svgplot.render_importance(importance, args.out_dir / "importance.svg")
    importance_doc = {
        "feature_names": list(importance.feature_names),
        "mean_abs_phi_log": list(importance.values),
        "ranks": list(importance.ranks()),
    }
    (args.out_dir / "importance.json").write_text(
        json.dumps(importance_doc, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    top = importance.ordered()[:3]
    top_text = ", ".join(f"{name} ({value:.4f})" for name, value in top)
    print(f"explain: instance {dataset.names[chosen]!r}; top features: {top_text}")
    return EXIT_OK


def cmd_report(args, config: BuzzcastConfig) -> int:
    rows = load_engagement_csv(args.engagement)
    corr, labels = features.pearson_matrix(rows)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    svgplot.render_heatmap(corr, labels, args.out_dir / "heatmap.svg")

    meta = None
    metrics_docs = []
    importance_pairs: list[tuple[str, float]] = []
    figures = [str(args.out_dir / "heatmap.svg")]
    if args.artifacts is not None:
        meta_path = args.artifacts / "run_metadata.json"
        if meta_path.exists():
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
        metrics_path = args.artifacts / "metrics.json"
        if metrics_path.exists():
            metrics_docs.append(report.load_metrics_json(metrics_path))
        importance_path = args.artifacts / "importance.json"
        if importance_path.exists():
            doc = json.loads(importance_path.read_text(encoding="utf-8"))
            pairs = list(zip(doc["feature_names"], doc["mean_abs_phi_log"]))
            importance_pairs = sorted(pairs, key=lambda p: -p[1])
        for name in ("scatter.svg", "importance.svg"):
            if (args.artifacts / name).exists():
                figures.append(str(args.artifacts / name))

    sport_counts: dict[str, int] = {}
    for r in rows:
        sport_counts[r.sport.value] = sport_counts.get(r.sport.value, 0) + 1
    split_note = None
    if meta is not None:
        train_counts = meta["split"]["train_sport_counts"]
        test_counts = meta["split"]["test_sport_counts"]
        missing = sorted(set(train_counts) - set(test_counts))
        if missing:
            split_note = (
                "the unstratified split left no test events for: "
                + ", ".join(missing)
            )
    content = report.build_summary(
        n_events=len(rows),
        sport_counts=sport_counts,
        dropped=(meta or {}).get("dropped_zero_post", []),
        flagged=sorted({f["name"] for f in (meta or {}).get("outlier_flags", [])}),
        best_params=(meta or {}).get("best_hyperparams"),
        cv_mean_mae=(meta or {}).get("cv_mean_mae_log"),
        metrics_docs=metrics_docs,
        importance=importance_pairs,
        figures=figures,
        split_note=split_note,
    )
    report.write_summary(args.out_dir / "summary.md", content)
    print(f"report: wrote {args.out_dir / 'summary.md'}")
    return EXIT_OK


_COMMANDS = {
    "fetch": cmd_fetch,
    "featurize": cmd_featurize,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "explain": cmd_explain,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        return _COMMANDS[args.command](args, config)
    except FetchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FETCH
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
