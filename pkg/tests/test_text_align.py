"""Tokenization, alignment and WER unit/property tests."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dialect_eval.errors import EmptyCorpus, EmptyReference
from dialect_eval.text_align import (
    DELETION,
    INSERTION,
    MATCH,
    SUBSTITUTION,
    align,
    corpus_wer,
    normalize,
    wer,
)

from oracles import canonical_optimal_path, levenshtein_distance


# --- normalize ------------------------------------------------------------


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("The cat, sat!", ["the", "cat", "sat"]),
        ("", []),
        ("don't  stop", ["don't", "stop"]),
        ("  \t\n ", []),
        ("state-of-the-art?!", ["state-of-the-art"]),
        ("'em all --- they're 'fine'", ["em", "all", "they're", "fine"]),
        ("A B-, -C d_e", ["a", "b", "c", "d", "e"]),
        ("42 Mph!!", ["42", "mph"]),
    ],
)
def test_normalize_examples(raw, expected):
    assert normalize(raw) == expected


@given(st.text(max_size=80))
@settings(max_examples=300)
def test_normalize_idempotent_and_clean(raw):
    tokens = normalize(raw)
    assert normalize(" ".join(tokens)) == tokens
    for tok in tokens:
        assert tok
        assert not any(c.isspace() for c in tok)
        assert tok == tok.lower()


# --- align ----------------------------------------------------------------


def kinds(alignment):
    return [op.kind for op in alignment.ops]


def test_align_identity():
    a = align(["a", "b", "c"], ["a", "b", "c"])
    assert kinds(a) == [MATCH, MATCH, MATCH]
    assert a.cost == 0


def test_align_trailing_deletion():
    # Expected ops confirmed against the exhaustive-search oracle.
    ref, hyp = ["the", "cat", "sat"], ["the", "cat"]
    a = align(ref, hyp)
    assert kinds(a) == [MATCH, MATCH, DELETION]
    assert a.cost == 1
    assert [(op.kind, op.ref_index, op.hyp_index) for op in a.ops] == (
        canonical_optimal_path(ref, hyp)
    )


def test_align_leading_insertion():
    ref, hyp = ["a"], ["b", "a"]
    a = align(ref, hyp)
    assert kinds(a) == [INSERTION, MATCH]
    assert a.ops[0].hyp_index == 0
    assert [(op.kind, op.ref_index, op.hyp_index) for op in a.ops] == (
        canonical_optimal_path(ref, hyp)
    )


def test_align_empty_sides():
    assert align([], []).ops == ()
    assert kinds(align(["x"], [])) == [DELETION]
    assert kinds(align([], ["x"])) == [INSERTION]


def _index_invariants(alignment):
    ref_indices = [op.ref_index for op in alignment.ops if op.ref_index is not None]
    hyp_indices = [op.hyp_index for op in alignment.ops if op.hyp_index is not None]
    assert ref_indices == list(range(alignment.ref_len))
    assert hyp_indices == list(range(alignment.hyp_len))
    for op in alignment.ops:
        if op.kind in (MATCH, SUBSTITUTION):
            assert op.ref_index is not None and op.hyp_index is not None
        elif op.kind == DELETION:
            assert op.ref_index is not None and op.hyp_index is None
        else:
            assert op.ref_index is None and op.hyp_index is not None


@given(
    st.lists(st.sampled_from("abcde"), max_size=30),
    st.lists(st.sampled_from("abcde"), max_size=30),
)
@settings(max_examples=300, deadline=None)
def test_align_cost_matches_distance_oracle(ref, hyp):
    a = align(ref, hyp)
    assert a.cost == levenshtein_distance(ref, hyp)
    _index_invariants(a)


def test_align_is_canonical_against_exhaustive_search():
    rng = random.Random(1234)
    for _ in range(400):
        alpha = "abc"[: rng.randint(1, 3)]
        ref = [rng.choice(alpha) for _ in range(rng.randint(0, 6))]
        hyp = [rng.choice(alpha) for _ in range(rng.randint(0, 6))]
        got = [(op.kind, op.ref_index, op.hyp_index) for op in align(ref, hyp).ops]
        assert got == canonical_optimal_path(ref, hyp), (ref, hyp)


def test_align_swap_symmetry():
    rng = random.Random(99)
    for _ in range(500):
        alpha = "abcde"[: rng.randint(1, 5)]
        ref = [rng.choice(alpha) for _ in range(rng.randint(0, 12))]
        hyp = [rng.choice(alpha) for _ in range(rng.randint(0, 12))]
        fwd = wer(ref, hyp) if ref else None
        rev = wer(hyp, ref) if hyp else None
        if fwd is None or rev is None:
            continue
        assert fwd.substitutions == rev.substitutions
        assert fwd.deletions == rev.insertions
        assert fwd.insertions == rev.deletions


# --- wer ------------------------------------------------------------------


def test_wer_identity_is_zero():
    result = wer(["a", "b", "c", "d"], ["a", "b", "c", "d"])
    assert result.wer == 0.0
    assert result.errors == 0


def test_wer_single_deletion():
    result = wer(["the", "cat", "sat"], ["the", "cat"])
    assert result.deletions == 1
    assert result.wer == pytest.approx(1 / 3)


def test_wer_can_exceed_one():
    # 2 substitutions + 1 insertion over 2 reference words.
    result = wer(["a", "b"], ["c", "d", "e"])
    assert (result.substitutions, result.deletions, result.insertions) == (2, 0, 1)
    assert result.wer == pytest.approx(1.5)


def test_wer_empty_reference_raises():
    with pytest.raises(EmptyReference):
        wer([], ["a"])


def test_corpus_wer_micro_average():
    # 1 error / 1 word plus 0 errors / 9 words pools to 0.1, not 0.5.
    pair_a = (["x"], ["y"])
    pair_b = (list("abcdefghi"), list("abcdefghi"))
    result = corpus_wer([pair_a, pair_b])
    assert result.wer == pytest.approx(0.1)


def test_corpus_wer_planted_substitutions():
    # 100 single-word pairs; exactly 5 planted substitutions.
    pairs = []
    for i in range(100):
        ref = [f"w{i}"]
        hyp = [f"sub{i}"] if i < 5 else [f"w{i}"]
        pairs.append((ref, hyp))
    result = corpus_wer(pairs)
    assert result.substitutions == 5
    assert result.ref_words == 100
    assert result.wer == pytest.approx(0.05)


def test_corpus_wer_empty_inputs():
    with pytest.raises(EmptyCorpus):
        corpus_wer([])
    with pytest.raises(EmptyReference):
        corpus_wer([(["a"], ["a"]), ([], ["b"])])
