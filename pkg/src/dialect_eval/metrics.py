"""Disparity arithmetic and precision/recall at score thresholds.

Disparity is the relative increase of the AAE-side WER over the MAE
side; disparity reduction compares that figure between two systems.
Both are computed from unrounded inputs and carry their sign (a
negative disparity means the AAE side scored better).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyInput, ZeroDenominator


@dataclass(frozen=True)
class DisparityResult:
    wer_aae: float
    wer_mae: float
    disparity: float


@dataclass(frozen=True)
class DisparityReduction:
    dis_old: float
    dis_new: float
    reduction: float


@dataclass(frozen=True)
class PrCurvePoint:
    threshold: float
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def precision(self) -> float:
        predicted = self.tp + self.fp
        return self.tp / predicted if predicted else 0.0

    @property
    def recall(self) -> float:
        positives = self.tp + self.fn
        return self.tp / positives if positives else 0.0


def disparity(wer_aae: float, wer_mae: float) -> DisparityResult:
    """Relative WER increase of the AAE set over the MAE set.

    Scale-invariant, so the inputs may be fractions or percentages as
    long as both use the same units. Raises ZeroDenominator when the
    MAE-side WER is zero.
    """
    if wer_mae == 0:
        raise ZeroDenominator("MAE-side WER is zero; disparity undefined")
    return DisparityResult(wer_aae, wer_mae, (wer_aae - wer_mae) / wer_mae)


def disparity_reduction(dis_old: float, dis_new: float) -> DisparityReduction:
    """Relative shrinkage of disparity from an old system to a new one."""
    if dis_old == 0:
        raise ZeroDenominator("old disparity is zero; reduction undefined")
    return DisparityReduction(dis_old, dis_new, (dis_old - dis_new) / dis_old)


def pr_at_threshold(
    scores: list[tuple[float, int]], threshold: float
) -> PrCurvePoint:
    """Precision/recall counts predicting positive at score >= threshold.

    ``scores`` pairs each classifier score with its gold label (1 for
    positive). Precision and recall are 0.0 when their denominator is
    zero.
    """
    if not scores:
        raise EmptyInput("no scored examples")
    tp = fp = fn = tn = 0
    for score, gold in scores:
        predicted = score >= threshold
        if predicted and gold:
            tp += 1
        elif predicted:
            fp += 1
        elif gold:
            fn += 1
        else:
            tn += 1
    return PrCurvePoint(threshold, tp, fp, fn, tn)


def pr_sweep(
    scores: list[tuple[float, int]], thresholds: list[float]
) -> list[PrCurvePoint]:
    """One PR point per threshold; thresholds must be sorted ascending."""
    if not scores:
        raise EmptyInput("no scored examples")
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be sorted ascending")
    return [pr_at_threshold(scores, t) for t in thresholds]
