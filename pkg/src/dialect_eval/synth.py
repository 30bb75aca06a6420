"""Synthetic corpora with planted, count-exact recognition errors.

The generator draws reference transcripts from a vocabulary and then
derives each system's hypotheses by planting an exact NUMBER of
substitutions, deletions and insertions: round(rate x total_ref_words)
of each, so the measured corpus WER equals the planted rate whenever
the product is integral (and the recorded ground truth in every case).

Two construction rules make the planted counts provably equal to the
Levenshtein-optimal edit counts the scorer will find:

  * substituted and inserted tokens are fresh marker tokens that occur
    nowhere in the vocabulary, so they can never re-match reference
    text and each costs exactly one edit;
  * deletions and insertions are never planted into the same
    utterance, because a deletion and an insertion in one utterance
    can collapse into a single cheaper substitution.

Substitutions may share an utterance with either. Every generated
token (vocabulary and markers) must survive transcript normalization
unchanged, otherwise the planted counts would not survive the
evaluation pipeline; the spec is rejected if the vocabulary does not.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpec
from .manifest import Manifest
from .records import UtteranceRecord
from .text_align import normalize

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib


@dataclass(frozen=True)
class ErrorRates:
    substitution: float = 0.0
    deletion: float = 0.0
    insertion: float = 0.0

    def __post_init__(self):
        for name, rate in (
            ("substitution", self.substitution),
            ("deletion", self.deletion),
            ("insertion", self.insertion),
        ):
            if not 0.0 <= rate <= 1.0:
                raise InvalidSpec(f"{name} rate must be in [0, 1], got {rate}")


@dataclass
class VarietySpec:
    count: int
    score_range: tuple[float, float] = (0.0, 1.0)
    regions: dict[str, float] = field(default_factory=dict)
    error_rates: dict[str, ErrorRates] = field(default_factory=dict)
    duration_range: tuple[float, float] | None = None


@dataclass
class GeneratorSpec:
    varieties: dict[str, VarietySpec]
    vocabulary: list[str]
    words_per_utt: tuple[int, int] = (4, 12)
    seed: int = 0


@dataclass(frozen=True)
class PlantedCounts:
    substitutions: int
    deletions: int
    insertions: int
    ref_words: int

    @property
    def wer(self) -> float:
        return (self.substitutions + self.deletions + self.insertions) / self.ref_words


@dataclass
class SynthResult:
    manifests: dict[str, Manifest]
    truth: dict[str, dict[str, PlantedCounts]]  # variety -> system -> counts


def _validate(spec: GeneratorSpec) -> None:
    if not spec.varieties:
        raise InvalidSpec("spec needs at least one variety")
    if len(spec.vocabulary) < 2:
        raise InvalidSpec("vocabulary needs at least two words")
    if len(set(spec.vocabulary)) != len(spec.vocabulary):
        raise InvalidSpec("vocabulary contains duplicates")
    for word in spec.vocabulary:
        if normalize(word) != [word]:
            raise InvalidSpec(
                f"vocabulary word {word!r} does not survive normalization"
            )
    lo, hi = spec.words_per_utt
    if not 1 <= lo <= hi:
        raise InvalidSpec(f"words_per_utt must satisfy 1 <= lo <= hi, got {lo}..{hi}")
    for name, variety in spec.varieties.items():
        if variety.count < 1:
            raise InvalidSpec(f"variety {name!r} count must be >= 1")
        s_lo, s_hi = variety.score_range
        if not 0.0 <= s_lo <= s_hi <= 1.0:
            raise InvalidSpec(f"variety {name!r} score_range must be within [0, 1]")
        if any(w <= 0 for w in variety.regions.values()):
            raise InvalidSpec(f"variety {name!r} region weights must be positive")
        if variety.duration_range is not None:
            d_lo, d_hi = variety.duration_range
            if not 0 < d_lo <= d_hi:
                raise InvalidSpec(f"variety {name!r} duration_range must be positive")


class _Markers:
    """Fresh hypothesis-only tokens, guaranteed outside the vocabulary."""

    def __init__(self, vocabulary: list[str]):
        self._taken = set(vocabulary)
        self._next = 0

    def fresh(self) -> str:
        while True:
            marker = f"errw{self._next}"
            self._next += 1
            if marker not in self._taken:
                return marker


def _plant_errors(
    references: list[list[str]],
    rates: ErrorRates,
    rng: np.random.Generator,
    markers: _Markers,
) -> tuple[list[list[str]], PlantedCounts]:
    total_words = sum(len(ref) for ref in references)
    n_sub = round(rates.substitution * total_words)
    n_del = round(rates.deletion * total_words)
    n_ins = round(rates.insertion * total_words)

    positions = [(u, p) for u, ref in enumerate(references) for p in range(len(ref))]
    if n_sub + n_del > len(positions):
        raise InvalidSpec("substitution+deletion rates exceed available words")
    order = rng.permutation(len(positions))
    del_positions = {positions[i] for i in order[:n_del]}
    sub_positions = {positions[i] for i in order[n_del : n_del + n_sub]}

    # Insertions go only into utterances free of deletions; see module
    # docstring for why the two must not mix.
    del_utts = {u for u, _ in del_positions}
    slots = [
        (u, p)
        for u, ref in enumerate(references)
        if u not in del_utts
        for p in range(len(ref) + 1)
    ]
    if n_ins > len(slots):
        raise InvalidSpec(
            "insertion rate infeasible: not enough deletion-free utterances"
        )
    ins_slots = {
        slots[i] for i in rng.choice(len(slots), size=n_ins, replace=False)
    } if n_ins else set()

    hypotheses = []
    for u, ref in enumerate(references):
        out: list[str] = []
        for p in range(len(ref) + 1):
            if (u, p) in ins_slots:
                out.append(markers.fresh())
            if p == len(ref):
                break
            if (u, p) in del_positions:
                continue
            out.append(markers.fresh() if (u, p) in sub_positions else ref[p])
        hypotheses.append(out)
    counts = PlantedCounts(n_sub, n_del, n_ins, total_words)
    return hypotheses, counts


def generate_synthetic(spec: GeneratorSpec) -> SynthResult:
    """Build per-variety manifests plus the planted ground truth."""
    _validate(spec)
    rng = np.random.default_rng(spec.seed)
    vocab = np.array(spec.vocabulary)
    markers = _Markers(spec.vocabulary)
    lo, hi = spec.words_per_utt

    manifests: dict[str, Manifest] = {}
    truth: dict[str, dict[str, PlantedCounts]] = {}
    for name, variety in spec.varieties.items():
        lengths = rng.integers(lo, hi + 1, size=variety.count)
        references = [list(rng.choice(vocab, size=n)) for n in lengths]
        scores = rng.uniform(*variety.score_range, size=variety.count)
        regions: list[str | None]
        if variety.regions:
            tags = list(variety.regions)
            weights = np.array([variety.regions[t] for t in tags], dtype=float)
            weights /= weights.sum()
            regions = [tags[i] for i in rng.choice(len(tags), size=variety.count, p=weights)]
        else:
            regions = [None] * variety.count
        durations: list[float | None]
        if variety.duration_range is not None:
            durations = list(rng.uniform(*variety.duration_range, size=variety.count))
        else:
            durations = [None] * variety.count

        per_system_hyps: dict[str, list[list[str]]] = {}
        truth[name] = {}
        for system, rates in variety.error_rates.items():
            hyps, counts = _plant_errors(references, rates, rng, markers)
            per_system_hyps[system] = hyps
            truth[name][system] = counts

        records = []
        for i in range(variety.count):
            records.append(
                UtteranceRecord(
                    id=f"{name}-{i:06d}",
                    reference=" ".join(references[i]),
                    region=regions[i],
                    score=float(scores[i]),
                    duration=durations[i],
                    hypotheses={
                        system: " ".join(hyps[i])
                        for system, hyps in per_system_hyps.items()
                    },
                )
            )
        manifests[name] = Manifest(records=records)
    return SynthResult(manifests=manifests, truth=truth)


# --- TOML spec ------------------------------------------------------------
#
# seed = 42
# vocabulary = ["yes", "no", ...]     # or: vocab_size = 50
# words_per_utt = [4, 12]
#
# [varieties.aae]
# count = 1000
# score_range = [0.7, 1.0]
# regions = { southern = 0.8, metro = 0.2 }
# duration_range = [6.0, 30.0]        # optional
# [varieties.aae.error_rates.base]
# substitution = 0.021


def default_vocabulary(size: int) -> list[str]:
    if size < 2:
        raise InvalidSpec("vocab_size must be >= 2")
    return [f"w{i:04d}" for i in range(size)]


def spec_from_toml(path) -> GeneratorSpec:
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise InvalidSpec(f"{path}: {exc}") from None
    return spec_from_dict(data)


def spec_from_dict(data: dict) -> GeneratorSpec:
    data = dict(data)
    if "vocabulary" in data and "vocab_size" in data:
        raise InvalidSpec("give either 'vocabulary' or 'vocab_size', not both")
    if "vocab_size" in data:
        vocabulary = default_vocabulary(int(data.pop("vocab_size")))
    elif "vocabulary" in data:
        vocabulary = [str(w) for w in data.pop("vocabulary")]
    else:
        raise InvalidSpec("spec needs 'vocabulary' or 'vocab_size'")
    try:
        varieties_raw = data.pop("varieties")
    except KeyError:
        raise InvalidSpec("spec needs a [varieties.*] table") from None

    varieties: dict[str, VarietySpec] = {}
    for name, v in varieties_raw.items():
        v = dict(v)
        try:
            rates = {
                system: ErrorRates(**r)
                for system, r in v.pop("error_rates", {}).items()
            }
            varieties[name] = VarietySpec(
                count=int(v.pop("count")),
                score_range=tuple(v.pop("score_range", (0.0, 1.0))),
                regions={str(k): float(w) for k, w in v.pop("regions", {}).items()},
                error_rates=rates,
                duration_range=(
                    tuple(v.pop("duration_range")) if "duration_range" in v else None
                ),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidSpec(f"variety {name!r}: {exc}") from None
        if v:
            raise InvalidSpec(f"variety {name!r}: unknown keys {sorted(v)}")

    words_per_utt = tuple(int(x) for x in data.pop("words_per_utt", (4, 12)))
    seed = int(data.pop("seed", 0))
    if data:
        raise InvalidSpec(f"unknown keys {sorted(data)}")
    try:
        return GeneratorSpec(
            varieties=varieties,
            vocabulary=vocabulary,
            words_per_utt=words_per_utt,  # type: ignore[arg-type]
            seed=seed,
        )
    except TypeError as exc:
        raise InvalidSpec(str(exc)) from None
