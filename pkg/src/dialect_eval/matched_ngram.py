"""Matched n-gram WER: score only text both corpora share.

Two corpora with different transcript distributions confound acoustic
quality with lexical content. This module evaluates each recognizer on
n-grams whose reference text occurs in *both* corpora, so the residual
WER difference reflects acoustics rather than vocabulary:

  1. extract all n-grams of the configured orders from each corpus,
  2. intersect the two n-gram inventories,
  3. pair utterances across corpora per shared n-gram,
  4. align each paired utterance in full, then keep only the alignment
     edges covered by the matched n-gram's span in the reference and
     re-count WER over those spans.

An utterance may be paired once per n-gram but can recur across
different n-grams; overlapping spans are counted each time they are
paired, and both the pair count and the distinct-n-gram count are
reported so the overlap is auditable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyCorpus, MissingHypothesis, NgramNotFound
from .metrics import DisparityResult, disparity
from .records import UtteranceRecord
from .text_align import (
    DELETION,
    INSERTION,
    SUBSTITUTION,
    Alignment,
    TokenSeq,
    WerResult,
    align,
    normalize,
)

NgramKey = tuple[str, ...]

# occurrence = (utterance id, start position in the reference tokens)
Occurrence = tuple[str, int]

DEFAULT_ORDERS = frozenset({2, 3})


@dataclass(frozen=True)
class MatchedPair:
    ngram: NgramKey
    utt_a: str
    utt_b: str


@dataclass(frozen=True)
class MatchedWerResult:
    side_a: WerResult
    side_b: WerResult
    pair_count: int
    unique_ngram_count: int


@dataclass(frozen=True)
class MatchedNgramReport:
    matched: MatchedWerResult
    disparity: DisparityResult


def extract_ngrams(
    corpus: list[UtteranceRecord], orders: frozenset[int] | set[int]
) -> dict[NgramKey, list[Occurrence]]:
    """Every contiguous n-gram occurrence of each requested order.

    Occurrence lists follow corpus order, then start position, which
    downstream pairing relies on for determinism.
    """
    if not orders:
        raise ValueError("orders must be non-empty")
    if any(n < 1 for n in orders):
        raise ValueError("n-gram orders must be >= 1")
    ordered = sorted(orders)
    out: dict[NgramKey, list[Occurrence]] = {}
    for rec in corpus:
        tokens = normalize(rec.reference)
        for n in ordered:
            for start in range(len(tokens) - n + 1):
                key = tuple(tokens[start : start + n])
                out.setdefault(key, []).append((rec.id, start))
    return out


def common_ngrams(
    map1: dict[NgramKey, list[Occurrence]],
    map2: dict[NgramKey, list[Occurrence]],
) -> list[NgramKey]:
    """Keys present in both maps, sorted lexicographically."""
    return sorted(k for k in map1 if k in map2)


def pair_utterances(
    ngram: NgramKey, occ1: list[Occurrence], occ2: list[Occurrence]
) -> list[MatchedPair]:
    """Zip the two corpora's utterances containing ``ngram``.

    Each side contributes its distinct utterances in corpus order; the
    pair count is the smaller side's count. An utterance appears at
    most once per n-gram even when the n-gram repeats inside it.
    """
    if not occ1 or not occ2:
        raise ValueError("occurrence lists must be non-empty")
    utts1 = _distinct_in_order(occ1)
    utts2 = _distinct_in_order(occ2)
    return [MatchedPair(ngram, a, b) for a, b in zip(utts1, utts2)]


def _distinct_in_order(occurrences: list[Occurrence]) -> list[str]:
    seen = set()
    out = []
    for utt_id, _ in occurrences:
        if utt_id not in seen:
            seen.add(utt_id)
            out.append(utt_id)
    return out


def matched_wer(
    pairs: list[MatchedPair],
    refs_a: dict[str, TokenSeq],
    hyps_a: dict[str, TokenSeq],
    refs_b: dict[str, TokenSeq],
    hyps_b: dict[str, TokenSeq],
) -> MatchedWerResult:
    """WER over matched spans only, per corpus side.

    For each pair and side: align the full reference against the
    hypothesis, locate the n-gram's first occurrence in the reference,
    and keep the edges whose reference index falls in that span plus
    insertions strictly between two in-span reference positions
    (boundary insertions belong to the surrounding context). Reference
    words counted per span equal the n-gram order.
    """
    cache_a: dict[str, Alignment] = {}
    cache_b: dict[str, Alignment] = {}
    totals = [[0, 0, 0, 0], [0, 0, 0, 0]]  # per side: subs, dels, ins, ref_words
    for pair in pairs:
        for side, (utt, refs, hyps, cache) in enumerate(
            (
                (pair.utt_a, refs_a, hyps_a, cache_a),
                (pair.utt_b, refs_b, hyps_b, cache_b),
            )
        ):
            if utt not in hyps:
                raise MissingHypothesis(f"utterance {utt!r} has no hypothesis")
            alignment = cache.get(utt)
            if alignment is None:
                alignment = align(refs[utt], hyps[utt])
                cache[utt] = alignment
            subs, dels, ins = _span_counts(alignment, refs[utt], pair.ngram, utt)
            totals[side][0] += subs
            totals[side][1] += dels
            totals[side][2] += ins
            totals[side][3] += len(pair.ngram)
    return MatchedWerResult(
        side_a=WerResult(*totals[0]),
        side_b=WerResult(*totals[1]),
        pair_count=len(pairs),
        unique_ngram_count=len({p.ngram for p in pairs}),
    )


def _find_span(tokens: TokenSeq, ngram: NgramKey) -> int:
    n = len(ngram)
    for start in range(len(tokens) - n + 1):
        if tuple(tokens[start : start + n]) == ngram:
            return start
    raise NgramNotFound(f"{ngram!r} not in reference")


def _span_counts(
    alignment: Alignment, ref: TokenSeq, ngram: NgramKey, utt: str
) -> tuple[int, int, int]:
    try:
        start = _find_span(ref, ngram)
    except NgramNotFound:
        raise NgramNotFound(f"{ngram!r} not in reference of {utt!r}")
    end = start + len(ngram)  # span is [start, end)

    # For insertions we need the nearest reference positions on both
    # sides; precompute the next reference index after each op.
    ops = alignment.ops
    next_ref = [alignment.ref_len] * len(ops)
    upcoming = alignment.ref_len
    for idx in range(len(ops) - 1, -1, -1):
        next_ref[idx] = upcoming
        if ops[idx].ref_index is not None:
            upcoming = ops[idx].ref_index

    subs = dels = ins = 0
    prev_ref = -1
    for idx, op in enumerate(ops):
        if op.ref_index is not None:
            if start <= op.ref_index < end:
                if op.kind == SUBSTITUTION:
                    subs += 1
                elif op.kind == DELETION:
                    dels += 1
            prev_ref = op.ref_index
        elif op.kind == INSERTION:
            if prev_ref >= start and next_ref[idx] < end:
                ins += 1
    return subs, dels, ins


def matched_ngram_report(
    corpus_aae: list[UtteranceRecord],
    corpus_mae: list[UtteranceRecord],
    system: str,
    orders: frozenset[int] | set[int] = DEFAULT_ORDERS,
) -> MatchedNgramReport:
    """Run the full matched n-gram pipeline and attach disparity.

    side_a of the result is the AAE corpus, side_b the MAE corpus.
    When both restricted WERs are exactly zero the disparity is
    reported as zero rather than undefined; a zero MAE-side WER with a
    nonzero AAE-side WER still raises ZeroDenominator.
    """
    if not corpus_aae or not corpus_mae:
        raise EmptyCorpus("matched n-gram evaluation needs two non-empty corpora")
    ngrams_a = extract_ngrams(corpus_aae, orders)
    ngrams_b = extract_ngrams(corpus_mae, orders)
    pairs: list[MatchedPair] = []
    for key in common_ngrams(ngrams_a, ngrams_b):
        pairs.extend(pair_utterances(key, ngrams_a[key], ngrams_b[key]))
    refs_a = {rec.id: normalize(rec.reference) for rec in corpus_aae}
    refs_b = {rec.id: normalize(rec.reference) for rec in corpus_mae}
    hyps_a = {
        rec.id: normalize(rec.hypotheses[system])
        for rec in corpus_aae
        if system in rec.hypotheses
    }
    hyps_b = {
        rec.id: normalize(rec.hypotheses[system])
        for rec in corpus_mae
        if system in rec.hypotheses
    }
    matched = matched_wer(pairs, refs_a, hyps_a, refs_b, hyps_b)
    wer_aae = matched.side_a.wer if matched.side_a.ref_words else 0.0
    wer_mae = matched.side_b.wer if matched.side_b.ref_words else 0.0
    if wer_aae == 0.0 and wer_mae == 0.0:
        dis = DisparityResult(wer_aae, wer_mae, 0.0)
    else:
        dis = disparity(wer_aae, wer_mae)
    return MatchedNgramReport(matched=matched, disparity=dis)
