"""The utterance record shared by every module.

A record carries the reference transcript plus whatever optional metadata
the downstream operations need: a region tag for geographic filtering, a
dialect-classifier score for threshold selection, named recognizer
hypotheses for WER evaluation, a duration for segmentation, and an
out-of-line embedding reference for scoring.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class UtteranceRecord:
    id: str
    reference: str
    region: str | None = None
    score: float | None = None
    duration: float | None = None
    embedding: str | None = None
    hypotheses: dict[str, str] = field(default_factory=dict)
