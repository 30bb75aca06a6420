"""Geographic filtering, score-threshold partitioning, segmentation.

Data selection composes two independent steps: filter a corpus down to
a named set of region tags (a coarse proxy for language variety), then
split the remainder on classifier score. Scores at or above the upper
threshold select the AAE pool, scores below the lower threshold the
non-AAE pool, and the band in between is excluded from both. Keeping
the steps separate lets callers apply either one alone, e.g. score
partitioning within one region set, or region statistics without
scores.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from random import Random

from .errors import MissingScore
from .records import UtteranceRecord

DEFAULT_AAE_THRESHOLD = 0.7
DEFAULT_MAE_THRESHOLD = 0.4

MIN_SEGMENT_SECONDS = 5.0
MAX_SEGMENT_SECONDS = 20.0


@dataclass(frozen=True)
class RegionSet:
    name: str
    members: frozenset[str]

    def __post_init__(self):
        if not self.members:
            raise ValueError(f"region set {self.name!r} is empty")


def load_region_set(path) -> RegionSet:
    """One region tag per line; the set is named after the file stem."""
    path = Path(path)
    members = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            tag = line.strip()
            if tag:
                members.append(tag)
    return RegionSet(name=path.stem, members=frozenset(members))


@dataclass(frozen=True)
class SelectionConfig:
    region_set: RegionSet | None = None
    aae_threshold: float = DEFAULT_AAE_THRESHOLD
    mae_threshold: float = DEFAULT_MAE_THRESHOLD

    def __post_init__(self):
        if not 0.0 <= self.mae_threshold <= self.aae_threshold <= 1.0:
            raise ValueError(
                "thresholds must satisfy 0 <= mae_threshold <= aae_threshold <= 1, "
                f"got mae={self.mae_threshold} aae={self.aae_threshold}"
            )


@dataclass(frozen=True)
class SelectionStats:
    total: int
    aae: int
    mae: int
    excluded: int

    def pct(self, count: int) -> float:
        return 100.0 * count / self.total if self.total else 0.0


@dataclass(frozen=True)
class SelectionResult:
    aae_ids: list[str]
    mae_ids: list[str]
    excluded_ids: list[str]
    stats: SelectionStats


def filter_by_region(
    corpus: list[UtteranceRecord], region_set: RegionSet
) -> list[UtteranceRecord]:
    """Utterances whose region tag is in the set, order preserved."""
    return [rec for rec in corpus if rec.region in region_set.members]


def partition_by_score(
    corpus: list[UtteranceRecord], config: SelectionConfig
) -> SelectionResult:
    """Partition into AAE / non-AAE / excluded pools by score.

    When the config names a region set the corpus is filtered to it
    first; the three id lists then partition that filtered corpus
    exactly. Every considered utterance must carry a score.
    """
    if config.region_set is not None:
        corpus = filter_by_region(corpus, config.region_set)
    aae: list[str] = []
    mae: list[str] = []
    excluded: list[str] = []
    for rec in corpus:
        if rec.score is None:
            raise MissingScore(f"utterance {rec.id!r} has no classifier score")
        if rec.score >= config.aae_threshold:
            aae.append(rec.id)
        elif rec.score < config.mae_threshold:
            mae.append(rec.id)
        else:
            excluded.append(rec.id)
    stats = SelectionStats(
        total=len(corpus), aae=len(aae), mae=len(mae), excluded=len(excluded)
    )
    return SelectionResult(aae, mae, excluded, stats)


@dataclass(frozen=True)
class CompositionRow:
    name: str
    utterances: int
    pct: float
    aae: int
    aae_pct: float
    mae: int
    mae_pct: float


@dataclass(frozen=True)
class CompositionReport:
    corpus_size: int
    overall: CompositionRow
    rows: list[CompositionRow]


def composition_report(
    corpus: list[UtteranceRecord],
    region_sets: list[RegionSet],
    config: SelectionConfig,
) -> CompositionReport:
    """Counts and percentages per region set, plus overall totals.

    Percentages are of the full corpus, not of the region subset, and
    region rows are not exclusive: an utterance tagged into two
    overlapping sets is counted in both rows.
    """
    size = len(corpus)

    def row(name: str, subset: list[UtteranceRecord]) -> CompositionRow:
        split = partition_by_score(
            subset,
            SelectionConfig(
                region_set=None,
                aae_threshold=config.aae_threshold,
                mae_threshold=config.mae_threshold,
            ),
        )
        pct = lambda count: 100.0 * count / size if size else 0.0
        return CompositionRow(
            name=name,
            utterances=len(subset),
            pct=pct(len(subset)),
            aae=split.stats.aae,
            aae_pct=pct(split.stats.aae),
            mae=split.stats.mae,
            mae_pct=pct(split.stats.mae),
        )

    overall = row("(all)", list(corpus))
    rows = [row(rs.name, filter_by_region(corpus, rs)) for rs in region_sets]
    return CompositionReport(corpus_size=size, overall=overall, rows=rows)


@dataclass(frozen=True)
class Segment:
    source_id: str
    start: float
    end: float

    @property
    def length(self) -> float:
        return self.end - self.start


def segment_longform(rec_id: str, duration: float, seed: int) -> list[Segment]:
    """Cut a long recording into 5-20 s utterances, left to right.

    Lengths are drawn uniformly from [5, 20] by a generator seeded from
    (seed, recording id), so per-recording output is deterministic and
    recordings can be processed in parallel. A remainder that already
    fits in [5, 20] becomes the final segment; a tail shorter than 5 s
    is dropped. Durations below 5 s yield no segments.
    """
    if duration <= 0:
        raise ValueError(f"duration must be positive, got {duration}")
    rng = Random(f"{seed}\x1f{rec_id}")
    segments: list[Segment] = []
    start = 0.0
    while duration - start >= MIN_SEGMENT_SECONDS:
        remaining = duration - start
        if remaining <= MAX_SEGMENT_SECONDS:
            segments.append(Segment(rec_id, start, duration))
            break
        length = rng.uniform(MIN_SEGMENT_SECONDS, MAX_SEGMENT_SECONDS)
        segments.append(Segment(rec_id, start, start + length))
        start += length
    return segments
