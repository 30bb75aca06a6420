"""Evaluation reports: assembly, rendering, and (de)serialization.

Every report is emitted twice from the same data: a machine-readable
JSON file and a human-readable text table. Reports carry the tool
version and an echo of the configuration (paths, seeds, thresholds)
that produced them, and contain nothing non-deterministic, so a rerun
with identical inputs is byte-identical.

Percentages are formatted with one decimal place, rounding halves away
from zero; all arithmetic happens on unrounded fractions and rounding
is display-only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from . import __version__
from .errors import EmptyCorpus, EmptyReference, MissingHypothesis
from .manifest import atomic_write_text
from .matched_ngram import MatchedWerResult
from .metrics import DisparityReduction, DisparityResult, disparity
from .records import UtteranceRecord
from .text_align import WerResult, corpus_wer, normalize

TOOL_NAME = "dialect-eval"


def format_percent(fraction: float) -> str:
    """Render a fraction as a percentage, e.g. 0.487179 -> '48.7%'."""
    quantized = Decimal(repr(fraction * 100.0)).quantize(
        Decimal("0.1"), rounding=ROUND_HALF_UP
    )
    return f"{quantized}%"


def evaluate_corpus(records: list[UtteranceRecord], system: str) -> WerResult:
    """Micro-averaged WER of one corpus under one named system."""
    if not records:
        raise EmptyCorpus("corpus has no utterances")
    pairs = []
    for rec in records:
        if system not in rec.hypotheses:
            raise MissingHypothesis(
                f"utterance {rec.id!r} has no hypothesis for system {system!r}"
            )
        ref = normalize(rec.reference)
        if not ref:
            raise EmptyReference(f"utterance {rec.id!r} has an empty reference")
        pairs.append((ref, normalize(rec.hypotheses[system])))
    return corpus_wer(pairs)


def paired_disparity(wer_aae: float, wer_mae: float) -> DisparityResult:
    """Disparity between two measured WERs.

    Two identical WERs have zero disparity even when both are zero
    (perfect recognizers are not *unequally* good); a zero MAE-side
    WER against a nonzero AAE-side WER is still undefined and raises.
    """
    if wer_aae == wer_mae:
        return DisparityResult(wer_aae, wer_mae, 0.0)
    return disparity(wer_aae, wer_mae)


@dataclass
class EvalReport:
    command: str
    system: str
    corpora: list[tuple[str, WerResult]]
    config: dict
    disparity: DisparityResult | None = None
    reduction: DisparityReduction | None = None
    matched: MatchedWerResult | None = None
    tool: str = TOOL_NAME
    version: str = __version__


def _wer_dict(result: WerResult) -> dict:
    return {
        "substitutions": result.substitutions,
        "deletions": result.deletions,
        "insertions": result.insertions,
        "ref_words": result.ref_words,
        "wer": result.wer if result.ref_words else 0.0,
    }


def report_to_dict(report: EvalReport) -> dict:
    out: dict = {
        "tool": report.tool,
        "version": report.version,
        "command": report.command,
        "system": report.system,
        "config": report.config,
        "corpora": [
            {"name": name, **_wer_dict(result)} for name, result in report.corpora
        ],
        "disparity": None,
        "reduction": None,
        "matched": None,
    }
    if report.disparity is not None:
        out["disparity"] = {
            "wer_aae": report.disparity.wer_aae,
            "wer_mae": report.disparity.wer_mae,
            "disparity": report.disparity.disparity,
        }
    if report.reduction is not None:
        out["reduction"] = {
            "dis_old": report.reduction.dis_old,
            "dis_new": report.reduction.dis_new,
            "reduction": report.reduction.reduction,
        }
    if report.matched is not None:
        out["matched"] = {
            "pair_count": report.matched.pair_count,
            "unique_ngram_count": report.matched.unique_ngram_count,
            "sides": {
                "aae": _wer_dict(report.matched.side_a),
                "mae": _wer_dict(report.matched.side_b),
            },
        }
    return out


def report_from_dict(data: dict) -> EvalReport:
    def wer_from(d: dict) -> WerResult:
        return WerResult(
            substitutions=d["substitutions"],
            deletions=d["deletions"],
            insertions=d["insertions"],
            ref_words=d["ref_words"],
        )

    disparity_result = None
    if data.get("disparity") is not None:
        d = data["disparity"]
        disparity_result = DisparityResult(d["wer_aae"], d["wer_mae"], d["disparity"])
    reduction = None
    if data.get("reduction") is not None:
        r = data["reduction"]
        reduction = DisparityReduction(r["dis_old"], r["dis_new"], r["reduction"])
    matched = None
    if data.get("matched") is not None:
        m = data["matched"]
        matched = MatchedWerResult(
            side_a=wer_from(m["sides"]["aae"]),
            side_b=wer_from(m["sides"]["mae"]),
            pair_count=m["pair_count"],
            unique_ngram_count=m["unique_ngram_count"],
        )
    return EvalReport(
        command=data["command"],
        system=data["system"],
        corpora=[(c["name"], wer_from(c)) for c in data["corpora"]],
        config=data.get("config", {}),
        disparity=disparity_result,
        reduction=reduction,
        matched=matched,
        tool=data.get("tool", TOOL_NAME),
        version=data.get("version", __version__),
    )


def render_text(report: EvalReport) -> str:
    lines = [f"{report.tool} {report.command} (v{report.version})"]
    lines.append(f"system: {report.system}")
    lines.append("")
    header = f"{'corpus':<12} {'ref_words':>9} {'sub':>7} {'del':>7} {'ins':>7} {'WER':>8}"
    lines.append(header)
    lines.append("-" * len(header))
    for name, result in report.corpora:
        wer_str = format_percent(result.wer) if result.ref_words else "n/a"
        lines.append(
            f"{name:<12} {result.ref_words:>9} {result.substitutions:>7} "
            f"{result.deletions:>7} {result.insertions:>7} {wer_str:>8}"
        )
    if report.matched is not None:
        lines.append("")
        lines.append(
            f"matched n-grams: {report.matched.pair_count} pairs over "
            f"{report.matched.unique_ngram_count} distinct n-grams"
        )
    if report.disparity is not None:
        lines.append("")
        lines.append(f"disparity: {format_percent(report.disparity.disparity)}")
    if report.reduction is not None:
        lines.append(
            f"disparity reduction: {format_percent(report.reduction.reduction)} "
            f"(from {format_percent(report.reduction.dis_old)} "
            f"to {format_percent(report.reduction.dis_new)})"
        )
    if report.config:
        lines.append("")
        lines.append("config:")
        for key in sorted(report.config):
            lines.append(f"  {key} = {report.config[key]}")
    return "\n".join(lines) + "\n"


def render_json(report: EvalReport) -> str:
    return json.dumps(report_to_dict(report), sort_keys=True, indent=2) + "\n"


def write_report(base_path, report: EvalReport) -> tuple[str, str]:
    """Emit ``<base>.json`` and ``<base>.txt``; returns both paths."""
    json_path = f"{base_path}.json"
    text_path = f"{base_path}.txt"
    atomic_write_text(json_path, render_json(report))
    atomic_write_text(text_path, render_text(report))
    return json_path, text_path
