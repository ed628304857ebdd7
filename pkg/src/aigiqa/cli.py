"""Command-line interface.

Subcommands: ingest, split, serve, compute-mos, train, evaluate, report,
mos-summary, case-study. Artifacts carry content-bearing names (seed, config
hash) so runs are traceable from their outputs alone.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from pathlib import Path

from .corpus import ingest, read_split, stratified_split, write_split
from .harness.case_study import case_study
from .harness.config import labels_name, load_train_config, split_name
from .harness.evaluate import evaluate
from .harness.report import write_report
from .harness.summary import mos_summary, write_summary
from .harness.train import train
from .subjective import compute_all_mos, read_events, read_labels, write_labels


def _add_corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--manifest", required=True, help="corpus manifest (JSON lines)")
    p.add_argument(
        "--validate-images",
        action=argparse.BooleanOptionalAction,
        default=False,
        help="re-verify that every referenced image decodes",
    )


def cmd_ingest(args) -> int:
    corpus = ingest(args.manifest, validate_images=not args.skip_image_validation)
    by_subset = Counter(r.subset for r in corpus)
    by_generator = Counter(r.generator for r in corpus)
    print(f"ingested {len(corpus)} records from {args.manifest}")
    print(f"  subsets:    {dict(sorted(by_subset.items()))}")
    print(f"  generators: {dict(sorted(by_generator.items()))}")
    print(f"  groups:     {len(corpus.groups())} (generator x category)")
    return 0


def cmd_split(args) -> int:
    corpus = ingest(args.manifest, validate_images=args.validate_images)
    assignments = stratified_split(corpus, ratio=args.ratio, seed=args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / split_name(args.ratio, args.seed)
    write_split(assignments, out_path)
    folds = Counter(a.fold for a in assignments)
    print(f"wrote {out_path} (train {folds['train']}, test {folds['test']})")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app
    from .service.config import load_service_config

    config = load_service_config(args.config)
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    app = create_app(config, validate_images=args.validate_images, ui_dir=args.ui)
    uvicorn.run(app, host=config.host, port=config.port)
    return 0


def cmd_compute_mos(args) -> int:
    events = read_events(args.store)
    labels = compute_all_mos(events)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / labels_name(args.store)
    write_labels(labels, out_path)
    discarded = sum(len(lb.discarded_ids) for lb in labels)
    print(
        f"wrote {out_path}: {len(labels)} labels from {len(events)} events "
        f"({discarded} scores discarded)"
    )
    return 0


def _train_overrides(args) -> dict:
    names = (
        "backbone", "mode", "text_fusion", "text_encoder", "dimension",
        "batch_size", "eval_batch_size", "learning_rate", "weight_decay",
        "epochs", "seed", "device", "pretrained", "freeze_backbone", "freeze_text",
    )
    return {n: getattr(args, n) for n in names}


def cmd_train(args) -> int:
    config = load_train_config(args.config, overrides=_train_overrides(args))
    corpus = ingest(args.manifest, validate_images=args.validate_images)
    split = read_split(args.split)
    labels = read_labels(args.labels)
    result = train(config, corpus, split, labels, args.out_dir)
    print(f"best epoch {result.best_epoch} (eval srcc {result.best_srcc})")
    print(f"checkpoint: {result.checkpoint_path}")
    return 0


def cmd_evaluate(args) -> int:
    corpus = ingest(args.manifest, validate_images=args.validate_images)
    split = read_split(args.split)
    labels = read_labels(args.labels)
    record = evaluate(
        args.checkpoint,
        corpus,
        split,
        labels,
        fold=args.fold,
        scope=args.scope,
        batch_size=args.batch_size,
        split_path=args.split,
        labels_path=args.labels,
    )
    print(
        f"{record['method']} ({record['backbone']}) {record['dimension']} "
        f"[{record['scope']}/{record['fold']}]: "
        f"srcc {record['srcc']:.4f}  plcc {record['plcc']:.4f}  (n={record['n']})"
    )
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(record, fh, indent=2)
            fh.write("\n")
        print(f"wrote {args.out}")
    return 0


def cmd_report(args) -> int:
    records = []
    for path in args.evaluations:
        with open(path, encoding="utf-8") as fh:
            records.append(json.load(fh))
    jsonl_path, txt_path = write_report(records, args.out_dir, prefix=args.prefix)
    print(Path(txt_path).read_text(), end="")
    print(f"wrote {jsonl_path} and {txt_path}")
    return 0


def cmd_mos_summary(args) -> int:
    corpus = ingest(args.manifest, validate_images=args.validate_images)
    labels = read_labels(args.labels)
    summary = mos_summary(labels, corpus, bins=args.bins)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_summary(summary, args.out)
    for dim, data in summary["dimensions"].items():
        means = {g: round(h["mean"], 3) if h["mean"] is not None else None
                 for g, h in data["by_generator"].items()}
        print(f"{dim}: per-generator means {means}")
    print(f"wrote {args.out}")
    return 0


def cmd_case_study(args) -> int:
    corpus = ingest(args.manifest, validate_images=args.validate_images)
    split = read_split(args.split)
    labels = read_labels(args.labels)
    record = case_study(args.checkpoints, args.image_id, corpus, split, labels)
    print(json.dumps(record, indent=2))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(record, fh, indent=2)
            fh.write("\n")
        print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aigiqa",
        description="Build and benchmark a perceptual quality database of AI-generated images.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a corpus manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--skip-image-validation", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("split", help="write a stratified train/test split")
    _add_corpus_args(p)
    p.add_argument("--ratio", type=float, default=3.0, help="train:test ratio (default 3)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default="artifacts")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("serve", help="run the rating service")
    p.add_argument("--config", required=True, help="service config JSON")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--ui", default=None, help="directory with the built rating UI")
    p.add_argument(
        "--validate-images", action=argparse.BooleanOptionalAction, default=True
    )
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("compute-mos", help="reduce a rating store to MOS labels")
    p.add_argument("--store", required=True, help="rating store (JSON lines)")
    p.add_argument("--out-dir", default="artifacts")
    p.set_defaults(func=cmd_compute_mos)

    p = sub.add_parser("train", help="train one assessor for one dimension")
    _add_corpus_args(p)
    p.add_argument("--config", default=None, help="training config JSON")
    p.add_argument("--split", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out-dir", default="artifacts")
    p.add_argument("--backbone", default=None)
    p.add_argument("--mode", default=None, choices=("nr", "fr", "pr"))
    p.add_argument("--text-fusion", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--text-encoder", default=None)
    p.add_argument("--dimension", default=None,
                   choices=("quality", "authenticity", "correspondence"))
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--eval-batch-size", type=int, default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--weight-decay", type=float, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--device", default=None)
    p.add_argument("--pretrained", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--freeze-backbone", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--freeze-text", action=argparse.BooleanOptionalAction, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a checkpoint on a fold")
    _add_corpus_args(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--fold", default="test", choices=("train", "test"))
    p.add_argument("--scope", default="full", choices=("full", "t2i", "i2i"))
    p.add_argument("--batch-size", type=int, default=20)
    p.add_argument("--out", default=None, help="write the evaluation record JSON here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="assemble evaluation records into a benchmark table")
    p.add_argument("--evaluations", nargs="+", required=True)
    p.add_argument("--out-dir", default="artifacts")
    p.add_argument("--prefix", default="report")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("mos-summary", help="MOS distribution histograms and means")
    _add_corpus_args(p)
    p.add_argument("--labels", required=True)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--out", default="artifacts/mos_summary.json")
    p.set_defaults(func=cmd_mos_summary)

    p = sub.add_parser("case-study", help="per-method predictions for one test image")
    _add_corpus_args(p)
    p.add_argument("--image-id", required=True)
    p.add_argument("--checkpoints", nargs="+", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_case_study)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
