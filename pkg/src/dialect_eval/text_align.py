"""Tokenization, Levenshtein alignment with backtrace, and WER.

Everything else in the toolkit is built on the three primitives here:
``normalize`` turns raw transcript text into a token sequence, ``align``
produces a full edit alignment between two token sequences, and ``wer``
/ ``corpus_wer`` reduce alignments to error-rate results.

All functions are pure and the result objects are treated as immutable,
so values are safe to share between threads; corpus-level work can be
sharded per utterance pair by the caller (counts sum in any order).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import EmptyCorpus, EmptyReference

TokenSeq = list[str]

# Edit-operation kinds.
MATCH = "match"
SUBSTITUTION = "substitution"
DELETION = "deletion"
INSERTION = "insertion"

# Drop everything except word characters, whitespace, apostrophes and
# hyphens; underscores count as punctuation here.
_PUNCT_RE = re.compile(r"[^\w\s'-]+|_")
# Apostrophes/hyphens survive only between two word characters.
_EDGE_RE = re.compile(r"(?<!\w)['-]|['-](?!\w)")


def normalize(raw_text: str) -> TokenSeq:
    """Lowercase, strip punctuation and split into word tokens.

    Apostrophes and hyphens are kept when they sit inside a word
    ("don't", "mother-in-law") and stripped otherwise. Idempotent:
    normalizing already-normalized text is the identity. Empty or
    punctuation-only input yields an empty sequence.
    """
    lowered = raw_text.lower()
    no_punct = _PUNCT_RE.sub(" ", lowered)
    trimmed = _EDGE_RE.sub(" ", no_punct)
    return trimmed.split()


@dataclass(frozen=True)
class EditOp:
    """One edge of an edit alignment.

    match/substitution carry both indices, deletion only ``ref_index``,
    insertion only ``hyp_index``.
    """

    kind: str
    ref_index: int | None = None
    hyp_index: int | None = None


@dataclass(frozen=True)
class Alignment:
    """A minimal-cost edit path between a reference and a hypothesis.

    The ops visit every reference index exactly once in increasing order,
    and likewise every hypothesis index; the number of non-match ops
    equals the Levenshtein distance between the two sequences.
    """

    ops: tuple[EditOp, ...]
    ref_len: int
    hyp_len: int

    @property
    def cost(self) -> int:
        return sum(1 for op in self.ops if op.kind != MATCH)


@dataclass(frozen=True)
class WerResult:
    substitutions: int
    deletions: int
    insertions: int
    ref_words: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def wer(self) -> float:
        """Errors over reference words; may exceed 1.0, never clamped."""
        return self.errors / self.ref_words


def align(ref: TokenSeq, hyp: TokenSeq) -> Alignment:
    """Levenshtein edit alignment with unit costs and full backtrace.

    Among equal-cost alignments the match count is not unique, so the
    result is canonicalized in two steps: first maximize the number of
    matches (this pins down all four op counts, making them invariant
    under swapping the roles of reference and hypothesis), then break
    the remaining order ties while backtracing by preferring
    match > substitution > deletion > insertion.
    """
    n, m = len(ref), len(hyp)

    # Single table for the combined objective (cost, -matches): each
    # edit costs STEP, each match scores -1. STEP exceeds any possible
    # match count, so minimizing the combined value minimizes cost
    # first and maximizes matches second.
    step = n + m + 1
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        table[i][0] = i * step
    for j in range(1, m + 1):
        table[0][j] = j * step

    for i in range(1, n + 1):
        ref_tok = ref[i - 1]
        row = table[i]
        prev = table[i - 1]
        for j in range(1, m + 1):
            diag = prev[j - 1] + (-1 if ref_tok == hyp[j - 1] else step)
            dele = prev[j] + step
            ins = row[j - 1] + step
            row[j] = diag if diag <= dele and diag <= ins else min(dele, ins)

    ops: list[EditOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        here = table[i][j]
        if i > 0 and j > 0:
            if ref[i - 1] == hyp[j - 1]:
                if table[i - 1][j - 1] - 1 == here:
                    ops.append(EditOp(MATCH, ref_index=i - 1, hyp_index=j - 1))
                    i -= 1
                    j -= 1
                    continue
            elif table[i - 1][j - 1] + step == here:
                ops.append(EditOp(SUBSTITUTION, ref_index=i - 1, hyp_index=j - 1))
                i -= 1
                j -= 1
                continue
        if i > 0 and table[i - 1][j] + step == here:
            ops.append(EditOp(DELETION, ref_index=i - 1))
            i -= 1
            continue
        ops.append(EditOp(INSERTION, hyp_index=j - 1))
        j -= 1
    ops.reverse()
    return Alignment(ops=tuple(ops), ref_len=n, hyp_len=m)


def wer_counts(alignment: Alignment) -> WerResult:
    """Reduce an alignment to substitution/deletion/insertion counts."""
    subs = dels = ins = 0
    for op in alignment.ops:
        if op.kind == SUBSTITUTION:
            subs += 1
        elif op.kind == DELETION:
            dels += 1
        elif op.kind == INSERTION:
            ins += 1
    return WerResult(subs, dels, ins, alignment.ref_len)


def wer(ref: TokenSeq, hyp: TokenSeq) -> WerResult:
    """Word error rate of one reference/hypothesis pair.

    Raises EmptyReference when the reference has no tokens.
    """
    if not ref:
        raise EmptyReference("reference has no tokens")
    return wer_counts(align(ref, hyp))


def corpus_wer(pairs: list[tuple[TokenSeq, TokenSeq]]) -> WerResult:
    """Pooled WER over (reference, hypothesis) pairs.

    Error counts and reference words are summed before dividing
    (micro-average), which is not the mean of per-utterance WERs.
    """
    if not pairs:
        raise EmptyCorpus("no utterance pairs to score")
    subs = dels = ins = words = 0
    for ref, hyp in pairs:
        r = wer(ref, hyp)
        subs += r.substitutions
        dels += r.deletions
        ins += r.insertions
        words += r.ref_words
    return WerResult(subs, dels, ins, words)
