"""The ``dialect-eval`` command line.

Each subcommand is a thin wrapper over one module operation chain:
read manifests and configs, run the operation, write reports or data
files. All outputs are deterministic given identical inputs and seeds
(reports echo their configuration, seeds included), writes are atomic,
and failures exit nonzero with a machine-readable JSON error record on
stderr.

The ``DIALECT_EVAL_SEED`` environment variable supplies the default
seed wherever ``--seed`` is accepted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import DialectEvalError, ManifestError
from .manifest import (
    atomic_write_text,
    load_frames,
    load_gold,
    load_manifest,
    load_scores,
    save_manifest,
    save_scores,
)
from .matched_ngram import DEFAULT_ORDERS, matched_ngram_report
from .metrics import disparity_reduction, pr_sweep
from .report import (
    EvalReport,
    evaluate_corpus,
    paired_disparity,
    render_text,
    report_from_dict,
    report_to_dict,
    write_report,
)
from .scorer import load_scorer, save_scorer, score, train_head
from .selection import (
    SelectionConfig,
    composition_report,
    load_region_set,
    partition_by_score,
    segment_longform,
)
from .synth import generate_synthetic, spec_from_toml

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib


def _default_seed() -> int:
    return int(os.environ.get("DIALECT_EVAL_SEED", "0"))


def _parse_orders(raw: str) -> frozenset[int]:
    try:
        orders = frozenset(int(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise ValueError(f"bad --orders value {raw!r}; expected e.g. '2,3'") from None
    if not orders:
        raise ValueError("--orders must name at least one order")
    return orders


def _parse_grid(raw: str) -> list[float]:
    try:
        start, stop, step = (float(part) for part in raw.split(":"))
    except ValueError:
        raise ValueError(
            f"bad --grid value {raw!r}; expected 'start:stop:step'"
        ) from None
    if step <= 0 or stop < start:
        raise ValueError("--grid needs step > 0 and stop >= start")
    thresholds = []
    k = 0
    while True:
        t = start + k * step
        if t > stop + 1e-12:
            break
        thresholds.append(min(t, stop))
        k += 1
    return thresholds


def _cmd_eval_wer(args) -> int:
    manifest = load_manifest(args.manifest)
    result = evaluate_corpus(manifest.records, args.system)
    report = EvalReport(
        command="eval-wer",
        system=args.system,
        corpora=[(args.corpus_name, result)],
        config={"manifest": args.manifest, "system": args.system},
    )
    write_report(args.out, report)
    sys.stdout.write(render_text(report))
    return 0


def _load_baseline_disparity(path) -> float:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or data.get("disparity") is None:
        raise ValueError(f"{path}: baseline report carries no disparity")
    return data["disparity"]["disparity"]


def _cmd_eval_disparity(args) -> int:
    aae = load_manifest(args.aae)
    mae = load_manifest(args.mae)
    wer_aae = evaluate_corpus(aae.records, args.system)
    wer_mae = evaluate_corpus(mae.records, args.system)
    dis = paired_disparity(wer_aae.wer, wer_mae.wer)
    reduction = None
    if args.baseline_report:
        reduction = disparity_reduction(
            _load_baseline_disparity(args.baseline_report), dis.disparity
        )
    report = EvalReport(
        command="eval-disparity",
        system=args.system,
        corpora=[("aae", wer_aae), ("mae", wer_mae)],
        config={
            "aae": args.aae,
            "mae": args.mae,
            "system": args.system,
            "baseline_report": args.baseline_report,
        },
        disparity=dis,
        reduction=reduction,
    )
    write_report(args.out, report)
    sys.stdout.write(render_text(report))
    return 0


def _cmd_eval_matched_ngram(args) -> int:
    orders = _parse_orders(args.orders)
    aae = load_manifest(args.aae)
    mae = load_manifest(args.mae)
    matched = matched_ngram_report(aae.records, mae.records, args.system, orders)
    reduction = None
    if args.baseline_report:
        reduction = disparity_reduction(
            _load_baseline_disparity(args.baseline_report),
            matched.disparity.disparity,
        )
    report = EvalReport(
        command="eval-matched-ngram",
        system=args.system,
        corpora=[
            ("aae", matched.matched.side_a),
            ("mae", matched.matched.side_b),
        ],
        config={
            "aae": args.aae,
            "mae": args.mae,
            "system": args.system,
            "orders": sorted(orders),
            "baseline_report": args.baseline_report,
        },
        disparity=matched.disparity,
        reduction=reduction,
        matched=matched.matched,
    )
    write_report(args.out, report)
    sys.stdout.write(render_text(report))
    return 0


def _selection_config(path) -> SelectionConfig:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    unknown = set(data) - {"region_set", "aae_threshold", "mae_threshold"}
    if unknown:
        raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
    region_set = None
    if "region_set" in data:
        region_path = Path(data["region_set"])
        if not region_path.is_absolute():
            region_path = Path(path).parent / region_path
        region_set = load_region_set(region_path)
    return SelectionConfig(
        region_set=region_set,
        aae_threshold=float(data.get("aae_threshold", 0.7)),
        mae_threshold=float(data.get("mae_threshold", 0.4)),
    )


def _cmd_select_data(args) -> int:
    config = _selection_config(args.config)
    manifest = load_manifest(args.manifest)
    result = partition_by_score(manifest.records, config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, ids in (
        ("aae.ids", result.aae_ids),
        ("mae.ids", result.mae_ids),
        ("excluded.ids", result.excluded_ids),
    ):
        atomic_write_text(out_dir / name, "".join(f"{i}\n" for i in ids))
    stats = result.stats
    summary = {
        "tool": "dialect-eval",
        "version": __version__,
        "command": "select-data",
        "config": {
            "manifest": args.manifest,
            "config": args.config,
            "region_set": config.region_set.name if config.region_set else None,
            "aae_threshold": config.aae_threshold,
            "mae_threshold": config.mae_threshold,
        },
        "stats": {
            "total": stats.total,
            "aae": stats.aae,
            "mae": stats.mae,
            "excluded": stats.excluded,
            "aae_pct": stats.pct(stats.aae),
            "mae_pct": stats.pct(stats.mae),
            "excluded_pct": stats.pct(stats.excluded),
        },
    }
    atomic_write_text(
        out_dir / "selection.json", json.dumps(summary, sort_keys=True, indent=2) + "\n"
    )
    sys.stdout.write(
        f"selected {stats.aae} aae / {stats.mae} mae / "
        f"{stats.excluded} excluded of {stats.total} utterances\n"
    )
    return 0


def _cmd_segment(args) -> int:
    manifest = load_manifest(args.manifest)
    lines = []
    for rec in manifest.records:
        if rec.duration is None:
            raise ValueError(f"utterance {rec.id!r} has no duration to segment")
        for seg in segment_longform(rec.id, rec.duration, args.seed):
            lines.append(f"{seg.source_id}\t{seg.start:.3f}\t{seg.end:.3f}")
    atomic_write_text(args.out, "".join(f"{line}\n" for line in lines))
    sys.stdout.write(f"wrote {len(lines)} segments to {args.out}\n")
    return 0


def _cmd_score(args) -> int:
    head, method = load_scorer(args.scorer)
    manifest = load_manifest(args.manifest)
    base_dir = Path(args.manifest).parent
    scores: dict[str, float] = {}
    for rec in manifest.records:
        if rec.embedding is None:
            raise ValueError(f"utterance {rec.id!r} has no embedding reference")
        frames = load_frames(rec.embedding, base_dir=base_dir)
        scores[rec.id] = score(frames, method, head)
    save_scores(args.out, scores)
    sys.stdout.write(f"scored {len(scores)} utterances to {args.out}\n")
    return 0


def _cmd_train_head(args) -> int:
    manifest = load_manifest(args.manifest)
    gold = load_gold(args.gold)
    base_dir = Path(args.manifest).parent
    dataset = []
    for rec in manifest.records:
        if rec.id not in gold:
            raise ValueError(f"utterance {rec.id!r} has no gold label")
        if rec.embedding is None:
            raise ValueError(f"utterance {rec.id!r} has no embedding reference")
        dataset.append((load_frames(rec.embedding, base_dir=base_dir), gold[rec.id]))
    result = train_head(
        dataset,
        method=args.pooling,
        depth=args.depth,
        hidden=args.hidden,
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        seed=args.seed,
    )
    save_scorer(args.out, result.head, result.pooling)
    final = result.losses[-1] if result.losses else float("nan")
    sys.stdout.write(
        f"trained depth-{args.depth} head ({args.pooling} pooling) "
        f"for {args.epochs} epochs; final loss {final:.6f}\n"
    )
    return 0


def _cmd_sweep_threshold(args) -> int:
    scores = load_scores(args.scores)
    gold = load_gold(args.gold)
    missing = [utt_id for utt_id in scores if utt_id not in gold]
    if missing:
        raise ValueError(f"no gold label for ids: {missing[:5]}")
    paired = [(val, gold[utt_id]) for utt_id, val in scores.items()]
    points = pr_sweep(paired, _parse_grid(args.grid))
    lines = ["threshold\ttp\tfp\tfn\ttn\tprecision\trecall"]
    for p in points:
        lines.append(
            f"{p.threshold:.6f}\t{p.tp}\t{p.fp}\t{p.fn}\t{p.tn}"
            f"\t{p.precision:.6f}\t{p.recall:.6f}"
        )
    atomic_write_text(args.out, "".join(f"{line}\n" for line in lines))
    sys.stdout.write(f"wrote {len(points)} PR points to {args.out}\n")
    return 0


def _cmd_synth(args) -> int:
    spec = spec_from_toml(args.config)
    if args.seed is not None:
        spec.seed = args.seed
    result = generate_synthetic(spec)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, manifest in result.manifests.items():
        save_manifest(out_dir / f"{name}.jsonl", manifest)
    truth = {
        variety: {
            system: {
                "substitutions": counts.substitutions,
                "deletions": counts.deletions,
                "insertions": counts.insertions,
                "ref_words": counts.ref_words,
                "wer": counts.wer,
            }
            for system, counts in systems.items()
        }
        for variety, systems in result.truth.items()
    }
    atomic_write_text(
        out_dir / "truth.json",
        json.dumps(
            {"seed": spec.seed, "planted": truth}, sort_keys=True, indent=2
        )
        + "\n",
    )
    total = sum(len(m) for m in result.manifests.values())
    sys.stdout.write(
        f"generated {total} utterances across {len(result.manifests)} varieties "
        f"in {out_dir}\n"
    )
    return 0


def _cmd_report(args) -> int:
    with open(args.in_path, encoding="utf-8") as fh:
        report = report_from_dict(json.load(fh))
    if args.baseline:
        if report.disparity is None:
            raise ValueError("input report has no disparity to compare")
        report.reduction = disparity_reduction(
            _load_baseline_disparity(args.baseline), report.disparity.disparity
        )
        report.config = dict(report.config, baseline_report=args.baseline)
    write_report(args.out, report)
    sys.stdout.write(render_text(report))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dialect-eval",
        description="Measure ASR WER disparity between utterance sets and "
        "select training data by dialect score and region.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval-wer", help="WER of one corpus under one system")
    p.add_argument("--manifest", required=True)
    p.add_argument("--system", required=True)
    p.add_argument("--corpus-name", default="corpus")
    p.add_argument("--out", required=True, help="report base path (.json/.txt)")
    p.set_defaults(func=_cmd_eval_wer)

    p = sub.add_parser("eval-disparity", help="WER disparity between two corpora")
    p.add_argument("--aae", required=True, help="AAE-side manifest")
    p.add_argument("--mae", required=True, help="MAE-side manifest")
    p.add_argument("--system", required=True)
    p.add_argument(
        "--baseline-report",
        help="earlier eval-disparity JSON; adds disparity reduction",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_eval_disparity)

    p = sub.add_parser(
        "eval-matched-ngram", help="WER over n-grams common to both corpora"
    )
    p.add_argument("--aae", required=True)
    p.add_argument("--mae", required=True)
    p.add_argument("--system", required=True)
    p.add_argument("--orders", default=",".join(str(n) for n in sorted(DEFAULT_ORDERS)))
    p.add_argument("--baseline-report")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_eval_matched_ngram)

    p = sub.add_parser("select-data", help="partition a corpus by region and score")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", required=True, help="selection TOML")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_select_data)

    p = sub.add_parser("segment", help="cut long recordings into 5-20 s segments")
    p.add_argument("--manifest", required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", required=True, help="TSV of id/start/end")
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("score", help="score utterances with a trained scorer")
    p.add_argument("--manifest", required=True)
    p.add_argument("--scorer", required=True, help="scorer file from train-head")
    p.add_argument("--out", required=True, help="score file (id<TAB>score)")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("train-head", help="train the classifier head")
    p.add_argument("--manifest", required=True)
    p.add_argument("--gold", required=True, help="gold labels (id<TAB>0|1)")
    p.add_argument(
        "--pooling", choices=["average", "maximum", "attentional"], default="average"
    )
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--hidden", type=int, default=None)
    p.add_argument("--learning-rate", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train_head)

    p = sub.add_parser("sweep-threshold", help="precision/recall over thresholds")
    p.add_argument("--scores", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--grid", default="0:1:0.05", help="start:stop:step")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep_threshold)

    p = sub.add_parser("synth", help="generate synthetic corpora with planted errors")
    p.add_argument("--config", required=True, help="generator spec TOML")
    p.add_argument("--seed", type=int, default=None, help="override the spec seed")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("report", help="re-render a JSON report (optionally vs baseline)")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--baseline", help="baseline JSON report for disparity reduction")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DialectEvalError, ValueError, OSError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ManifestError) and exc.line is not None:
            record["line"] = exc.line
        sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
