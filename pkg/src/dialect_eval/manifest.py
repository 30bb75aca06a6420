"""File formats: JSONL manifests, score/gold files, embedding matrices.

A manifest is line-delimited JSON, one utterance per line, so corpora
of millions of utterances stream and stay greppable. The first line
may be a header object carrying the schema version::

    {"manifest_version": 1}
    {"id": "utt-0001", "reference": "turn the lights off", "region": "southern",
     "score": 0.91, "hypotheses": {"base": "turn the light off"}}

Required record fields: ``id`` (unique) and ``reference``. Optional:
``region``, ``score`` (in [0, 1]), ``duration`` (seconds > 0),
``embedding`` (path to a frames file, resolved against the manifest's
directory), ``hypotheses`` (system name -> transcript). Unknown fields
are rejected so typos fail loudly. Every load error carries the
offending line number.

Score and gold-label files are two-column text, ``id<TAB>value``.
Embedding files hold one T x D matrix: ``.npy`` binary or whitespace
text with one frame per row.

All writers go through a write-to-temp, rename-on-success path so a
failure never leaves a partial file behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DuplicateId, MissingRequiredField, ParseError
from .records import UtteranceRecord

MANIFEST_VERSION = 1

_RECORD_FIELDS = {
    "id",
    "reference",
    "region",
    "score",
    "duration",
    "embedding",
    "hypotheses",
}


@dataclass
class Manifest:
    records: list[UtteranceRecord] = field(default_factory=list)
    version: int = MANIFEST_VERSION

    def __len__(self) -> int:
        return len(self.records)

    def by_id(self) -> dict[str, UtteranceRecord]:
        return {rec.id: rec for rec in self.records}


def atomic_write_text(path, text: str) -> None:
    """Write a whole file atomically (temp file + rename)."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_record(obj: dict, line_no: int) -> UtteranceRecord:
    unknown = set(obj) - _RECORD_FIELDS
    if unknown:
        raise ParseError(f"unknown fields {sorted(unknown)}", line_no)
    for name in ("id", "reference"):
        if name not in obj:
            raise MissingRequiredField(f"record is missing {name!r}", line_no)
        if not isinstance(obj[name], str):
            raise ParseError(f"{name!r} must be a string", line_no)
    if not obj["id"]:
        raise ParseError("'id' must be non-empty", line_no)

    region = obj.get("region")
    if region is not None and not isinstance(region, str):
        raise ParseError("'region' must be a string", line_no)
    score = obj.get("score")
    if score is not None:
        if not isinstance(score, (int, float)) or isinstance(score, bool):
            raise ParseError("'score' must be a number", line_no)
        if not 0.0 <= score <= 1.0:
            raise ParseError(f"'score' must be in [0, 1], got {score}", line_no)
        score = float(score)
    duration = obj.get("duration")
    if duration is not None:
        if not isinstance(duration, (int, float)) or isinstance(duration, bool):
            raise ParseError("'duration' must be a number", line_no)
        if duration <= 0:
            raise ParseError(f"'duration' must be positive, got {duration}", line_no)
        duration = float(duration)
    embedding = obj.get("embedding")
    if embedding is not None and not isinstance(embedding, str):
        raise ParseError("'embedding' must be a path string", line_no)
    hypotheses = obj.get("hypotheses", {})
    if not isinstance(hypotheses, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in hypotheses.items()
    ):
        raise ParseError("'hypotheses' must map system names to strings", line_no)

    return UtteranceRecord(
        id=obj["id"],
        reference=obj["reference"],
        region=region,
        score=score,
        duration=duration,
        embedding=embedding,
        hypotheses=dict(hypotheses),
    )


def load_manifest(path) -> Manifest:
    """Parse and validate a JSONL manifest; errors carry line numbers."""
    records: list[UtteranceRecord] = []
    seen: dict[str, int] = {}
    version = MANIFEST_VERSION
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line_no) from None
            if not isinstance(obj, dict):
                raise ParseError("each line must be a JSON object", line_no)
            if "manifest_version" in obj:
                if records or line_no != 1:
                    raise ParseError("header must be the first line", line_no)
                version = obj["manifest_version"]
                if version != MANIFEST_VERSION:
                    raise ParseError(f"unsupported manifest version {version}", line_no)
                continue
            rec = _parse_record(obj, line_no)
            if rec.id in seen:
                raise DuplicateId(
                    f"id {rec.id!r} already used on line {seen[rec.id]}", line_no
                )
            seen[rec.id] = line_no
            records.append(rec)
    return Manifest(records=records, version=version)


def _record_to_obj(rec: UtteranceRecord) -> dict:
    obj: dict = {"id": rec.id, "reference": rec.reference}
    if rec.region is not None:
        obj["region"] = rec.region
    if rec.score is not None:
        obj["score"] = rec.score
    if rec.duration is not None:
        obj["duration"] = rec.duration
    if rec.embedding is not None:
        obj["embedding"] = rec.embedding
    if rec.hypotheses:
        obj["hypotheses"] = rec.hypotheses
    return obj


def dump_manifest(manifest: Manifest) -> str:
    lines = [json.dumps({"manifest_version": manifest.version}, sort_keys=True)]
    for rec in manifest.records:
        lines.append(json.dumps(_record_to_obj(rec), sort_keys=True))
    return "\n".join(lines) + "\n"


def save_manifest(path, manifest: Manifest) -> None:
    atomic_write_text(path, dump_manifest(manifest))


# --- two-column id/value files -------------------------------------------


def _load_two_column(path, parse, what: str) -> dict:
    out: dict = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(f"expected 'id<TAB>{what}'", line_no)
            utt_id, raw = parts
            if utt_id in out:
                raise DuplicateId(f"id {utt_id!r} repeated", line_no)
            try:
                out[utt_id] = parse(raw)
            except ValueError:
                raise ParseError(f"bad {what} value {raw!r}", line_no) from None
    return out


def load_scores(path) -> dict[str, float]:
    """Score file: ``id<TAB>score`` with scores in [0, 1]."""

    def parse(raw: str) -> float:
        val = float(raw)
        if not 0.0 <= val <= 1.0:
            raise ValueError(raw)
        return val

    return _load_two_column(path, parse, "score")


def save_scores(path, scores: dict[str, float]) -> None:
    lines = [f"{utt_id}\t{score!r}" for utt_id, score in scores.items()]
    atomic_write_text(path, "\n".join(lines) + "\n" if lines else "")


def load_gold(path) -> dict[str, int]:
    """Gold-label file: ``id<TAB>label`` with labels 0 or 1."""

    def parse(raw: str) -> int:
        val = int(raw)
        if val not in (0, 1):
            raise ValueError(raw)
        return val

    return _load_two_column(path, parse, "label")


def save_gold(path, labels: dict[str, int]) -> None:
    lines = [f"{utt_id}\t{label}" for utt_id, label in labels.items()]
    atomic_write_text(path, "\n".join(lines) + "\n" if lines else "")


# --- embedding frames -----------------------------------------------------


def load_frames(path, base_dir=None) -> np.ndarray:
    """Load a T x D embedding matrix (.npy binary or whitespace text)."""
    path = Path(path)
    if base_dir is not None and not path.is_absolute():
        path = Path(base_dir) / path
    if path.suffix == ".npy":
        frames = np.load(path)
    else:
        frames = np.loadtxt(path, dtype=float, ndmin=2)
    return np.asarray(frames, dtype=float)


def save_frames(path, frames: np.ndarray) -> None:
    path = Path(path)
    frames = np.asarray(frames, dtype=float)
    if path.suffix == ".npy":
        np.save(path, frames)
    else:
        rows = [" ".join(repr(v) for v in row) for row in frames]
        atomic_write_text(path, "\n".join(rows) + "\n")
