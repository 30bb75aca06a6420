"""Disparity arithmetic and PR threshold machinery."""

import random

import pytest

from dialect_eval.errors import EmptyInput, ZeroDenominator
from dialect_eval.metrics import (
    disparity,
    disparity_reduction,
    pr_at_threshold,
    pr_sweep,
)

from oracles import pr_recount


# --- disparity --------------------------------------------------------------


@pytest.mark.parametrize(
    "wer_aae,wer_mae,expected_pct",
    [
        (6.5, 5.2, 25.0),
        (2.1, 1.2, 75.0),
        (6.1, 5.5, 10.9),
        (6.3, 5.4, 16.7),
        (6.6, 4.3, 53.5),
        (1.8, 1.3, 38.5),
    ],
)
def test_disparity_known_wer_pairs(wer_aae, wer_mae, expected_pct):
    # Published WER pairs must reproduce to within 0.05 percentage points.
    result = disparity(wer_aae, wer_mae)
    assert result.disparity * 100 == pytest.approx(expected_pct, abs=0.05)


def test_disparity_equal_inputs_zero():
    for x in (0.01, 1.0, 42.0):
        assert disparity(x, x).disparity == 0.0


def test_disparity_negative_is_signed():
    assert disparity(4.0, 5.0).disparity == pytest.approx(-0.2)


def test_disparity_scale_invariance():
    rng = random.Random(5)
    for _ in range(200):
        wer_aae = rng.uniform(0.001, 2.0)
        wer_mae = rng.uniform(0.001, 2.0)
        scale = rng.uniform(0.01, 100.0)
        base = disparity(wer_aae, wer_mae).disparity
        scaled = disparity(scale * wer_aae, scale * wer_mae).disparity
        assert scaled == pytest.approx(base, rel=1e-9)


def test_disparity_zero_denominator():
    with pytest.raises(ZeroDenominator):
        disparity(0.5, 0.0)


# --- disparity reduction -----------------------------------------------------


def test_reduction_known_values():
    # Baseline 75.0% down to 38.5% is a 48.7% relative reduction.
    assert disparity_reduction(0.75, 0.385).reduction * 100 == pytest.approx(
        48.7, abs=0.05
    )
    # From the unrounded fine-tuned disparity the figure still rounds to 48.7%.
    fine_tuned = disparity(1.8, 1.3).disparity
    assert disparity_reduction(0.75, fine_tuned).reduction * 100 == pytest.approx(
        48.7, abs=0.05
    )
    assert disparity_reduction(0.535, 0.454).reduction * 100 == pytest.approx(
        15.1, abs=0.05
    )


def test_reduction_identity_and_literal_formula():
    assert disparity_reduction(0.4, 0.4).reduction == 0.0
    rng = random.Random(11)
    for _ in range(200):
        dis_old = rng.uniform(-2, 2)
        dis_new = rng.uniform(-2, 2)
        if dis_old == 0:
            continue
        r = disparity_reduction(dis_old, dis_new)
        assert r.reduction == pytest.approx(1.0 - dis_new / dis_old, rel=1e-12)


def test_reduction_zero_denominator():
    with pytest.raises(ZeroDenominator):
        disparity_reduction(0.0, 0.1)


# --- precision / recall ------------------------------------------------------


def test_pr_all_positive_perfect():
    scores = [(1.0, 1)] * 7
    p = pr_at_threshold(scores, 0.5)
    assert (p.tp, p.fp, p.fn, p.tn) == (7, 0, 0, 0)
    assert p.precision == 1.0 and p.recall == 1.0


def test_pr_mixed_counts():
    scores = [(0.9, 1), (0.8, 0), (0.3, 1)]
    p = pr_at_threshold(scores, 0.5)
    assert (p.tp, p.fp, p.fn, p.tn) == (1, 1, 1, 0)
    assert p.precision == 0.5 and p.recall == 0.5


def test_pr_threshold_zero_recall_one():
    rng = random.Random(3)
    scores = [(rng.random(), rng.randint(0, 1)) for _ in range(50)]
    scores.append((0.5, 1))  # ensure at least one gold positive
    p = pr_at_threshold(scores, 0.0)
    assert p.fn == 0
    assert p.recall == 1.0


def test_pr_threshold_comparison_is_geq():
    p = pr_at_threshold([(0.7, 1)], 0.7)
    assert p.tp == 1  # score equal to the threshold predicts positive


def test_pr_empty_raises():
    with pytest.raises(EmptyInput):
        pr_at_threshold([], 0.5)
    with pytest.raises(EmptyInput):
        pr_sweep([], [0.5])


def test_pr_sweep_monotonicity_and_recounts():
    rng = random.Random(21)
    scores = [(rng.random(), rng.randint(0, 1)) for _ in range(100)]
    thresholds = [i / 20 for i in range(21)]
    points = pr_sweep(scores, thresholds)
    assert len(points) == len(thresholds)
    gold_positives = points[0].tp + points[0].fn
    prev = None
    for p in points:
        assert (p.tp, p.fp, p.fn, p.tn) == pr_recount(scores, p.threshold)
        assert p.tp + p.fn == gold_positives
        if prev is not None:
            assert p.tp <= prev.tp
            assert p.fp <= prev.fp
            assert p.recall <= prev.recall
        prev = p


def test_pr_sweep_single_point_three_thresholds():
    points = pr_sweep([(0.6, 1)], [0.0, 0.5, 1.0])
    predicted_positive = [p.tp + p.fp for p in points]
    assert predicted_positive == sorted(predicted_positive, reverse=True)
    assert predicted_positive == [1, 1, 0]


def test_pr_sweep_degenerate_same_scores():
    scores = [(0.5, 1), (0.5, 0), (0.5, 1)]
    points = pr_sweep(scores, [i / 10 for i in range(11)])
    distinct = {(p.tp, p.fp, p.fn, p.tn) for p in points}
    assert len(distinct) <= 2


def test_pr_sweep_rejects_unsorted():
    with pytest.raises(ValueError):
        pr_sweep([(0.5, 1)], [0.6, 0.4])
