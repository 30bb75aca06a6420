"""dialect-eval: ASR quality-disparity measurement and data selection.

Library layout:

- ``text_align``: tokenization, Levenshtein alignment, WER.
- ``matched_ngram``: WER restricted to n-grams shared by two corpora.
- ``metrics``: disparity, disparity reduction, precision/recall sweeps.
- ``scorer``: pooling + fully-connected dialect classifier head.
- ``selection``: region filtering, score thresholds, segmentation.
- ``manifest`` / ``synth`` / ``report``: JSONL corpora, synthetic
  corpus generation with planted errors, and report emission.
- ``cli``: the ``dialect-eval`` command-line surface over all of it.
"""

__version__ = "0.1.0"

from .errors import DialectEvalError
from .matched_ngram import matched_ngram_report, matched_wer
from .metrics import disparity, disparity_reduction, pr_at_threshold, pr_sweep
from .records import UtteranceRecord
from .scorer import ScorerHead, pool, score, swish, train_head
from .selection import (
    RegionSet,
    SelectionConfig,
    composition_report,
    filter_by_region,
    partition_by_score,
    segment_longform,
)
from .text_align import Alignment, WerResult, align, corpus_wer, normalize, wer

__all__ = [
    "__version__",
    "DialectEvalError",
    "UtteranceRecord",
    "Alignment",
    "WerResult",
    "normalize",
    "align",
    "wer",
    "corpus_wer",
    "matched_wer",
    "matched_ngram_report",
    "disparity",
    "disparity_reduction",
    "pr_at_threshold",
    "pr_sweep",
    "ScorerHead",
    "pool",
    "score",
    "swish",
    "train_head",
    "RegionSet",
    "SelectionConfig",
    "filter_by_region",
    "partition_by_score",
    "composition_report",
    "segment_longform",
]
