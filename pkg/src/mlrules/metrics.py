"""Confusion matrices, outcome grids and the bipartition measures.

Counting convention for candidate selection: on covered examples a predicted
value equal to the ground truth counts as TP (also for correct negative
predictions) and FP otherwise; on uncovered examples the rule abstains, so
absent labels count as TN and present ones as FN. Scores are exact rationals
so that equality and pruning decisions inside the search are never subject to
floating-point noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .dataset import Dataset
from .rules import Head, Rule, coverage_mask

TP, FP, TN, FN = "TP", "FP", "TN", "FN"
_CELL_CODES = {0: TP, 1: FP, 2: TN, 3: FN}

PRECISION = "precision"
HAMMING = "hamming_accuracy"
F_MEASURE = "f_measure"
SUBSET_ACCURACY = "subset_accuracy"
RECALL = "recall"

DECOMPOSABLE = "decomposable"
ANTI_MONOTONE = "anti_monotone"

_PROPERTIES = {
    PRECISION: DECOMPOSABLE,
    HAMMING: DECOMPOSABLE,
    F_MEASURE: DECOMPOSABLE,
    RECALL: DECOMPOSABLE,
    SUBSET_ACCURACY: ANTI_MONOTONE,
}


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion matrix cells must be non-negative")

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp,
                               self.tn + other.tn, self.fn + other.fn)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @staticmethod
    def zero() -> "ConfusionMatrix":
        return ConfusionMatrix()


@dataclass(frozen=True)
class Metric:
    """Evaluation measure plus its fixed structural property."""

    kind: str
    beta: Fraction = Fraction(1, 2)  # only used by the F-measure

    def __post_init__(self):
        if self.kind not in _PROPERTIES:
            raise ValueError(f"unknown metric {self.kind!r}")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")

    @property
    def structural_property(self) -> str:
        return _PROPERTIES[self.kind]

    @property
    def decomposable(self) -> bool:
        return self.structural_property == DECOMPOSABLE

    @property
    def anti_monotone(self) -> bool:
        return True  # decomposability implies anti-monotonicity

    @staticmethod
    def precision() -> "Metric":
        return Metric(PRECISION)

    @staticmethod
    def hamming() -> "Metric":
        return Metric(HAMMING)

    @staticmethod
    def f_measure(beta: Union[Fraction, str, int] = Fraction(1, 2)) -> "Metric":
        return Metric(F_MEASURE, Fraction(beta))

    @staticmethod
    def subset_accuracy() -> "Metric":
        return Metric(SUBSET_ACCURACY)

    @staticmethod
    def recall() -> "Metric":
        return Metric(RECALL)


@dataclass(frozen=True)
class OutcomeGrid:
    """Cell classification for each (head label, example) pair."""

    head: Head
    coverage: np.ndarray  # bool, length m
    cells: tuple[tuple[str, ...], ...]  # |head| rows of m cells

    @property
    def m(self) -> int:
        return len(self.coverage)


def classify_outcome(truth: int, prediction: Optional[int]) -> str:
    """Cell for one (example, label) pair; prediction None means abstain."""
    if prediction is None:
        return FN if truth else TN
    return TP if prediction == truth else FP


def rule_outcome_grid(head: Head, coverage: np.ndarray, d: Dataset) -> OutcomeGrid:
    if len(head) == 0:
        raise ValueError("head must be non-empty")
    if len(coverage) != d.m:
        raise ValueError("coverage length must equal the number of examples")
    cells = []
    for i, bit in head.assignments:
        row = tuple(
            classify_outcome(int(d.y[j, i]), bit if coverage[j] else None)
            for j in range(d.m))
        cells.append(row)
    return OutcomeGrid(head, np.asarray(coverage, dtype=bool), tuple(cells))


def micro_aggregate(grid: OutcomeGrid) -> ConfusionMatrix:
    counts = {TP: 0, FP: 0, TN: 0, FN: 0}
    for row in grid.cells:
        for cell in row:
            counts[cell] += 1
    return ConfusionMatrix(counts[TP], counts[FP], counts[TN], counts[FN])


def score_micro(metric: Metric, c: ConfusionMatrix) -> Fraction:
    """Apply a micro-averageable measure; zero denominators score 0."""
    if metric.kind == SUBSET_ACCURACY:
        raise ValueError("subset accuracy is example-based, use score_subset_accuracy")
    if metric.kind == PRECISION:
        den = c.tp + c.fp
        return Fraction(c.tp, den) if den else Fraction(0)
    if metric.kind == HAMMING:
        den = c.total
        return Fraction(c.tp + c.tn, den) if den else Fraction(0)
    if metric.kind == RECALL:
        den = c.tp + c.fn
        return Fraction(c.tp, den) if den else Fraction(0)
    # F-measure, via the count identity (1+b^2)*tp / ((1+b^2)*tp + b^2*fn + fp);
    # equals the weighted harmonic mean of precision and recall when both exist.
    b2 = metric.beta * metric.beta
    num = (1 + b2) * c.tp
    den = (1 + b2) * c.tp + b2 * c.fn + c.fp
    return Fraction(num, den) if den else Fraction(0)


def score_subset_accuracy(grid: OutcomeGrid) -> Fraction:
    if grid.m == 0:
        raise ValueError("subset accuracy is undefined on an empty dataset")
    correct = 0
    for j in range(grid.m):
        if all(row[j] in (TP, TN) for row in grid.cells):
            correct += 1
    return Fraction(correct, grid.m)


# ---------------------------------------------------------------------------
# Fast path (kernel-backed); bit-equivalent to the grid composition above
# ---------------------------------------------------------------------------

def _kernel_args(head: Head, coverage: np.ndarray, d: Dataset):
    y = np.ascontiguousarray(d.y, dtype=np.uint8)
    cov = np.ascontiguousarray(coverage, dtype=np.uint8)
    idxs = np.asarray(head.indices, dtype=np.int64)
    bits = np.asarray(head.bits, dtype=np.uint8)
    return y, cov, idxs, bits


def confusion_for_head(head: Head, coverage: np.ndarray, d: Dataset) -> ConfusionMatrix:
    if len(head) == 0:
        raise ValueError("head must be non-empty")
    tp, fp, tn, fn = kernels.confusion_counts(*_kernel_args(head, coverage, d))
    return ConfusionMatrix(tp, fp, tn, fn)


def subset_correct(head: Head, coverage: np.ndarray, d: Dataset) -> int:
    return kernels.subset_correct_count(*_kernel_args(head, coverage, d))


def evaluate_head(head: Head, coverage: np.ndarray, d: Dataset, metric: Metric) -> Fraction:
    """Score one head for a fixed coverage; h in [0, 1] as an exact rational."""
    if metric.kind == SUBSET_ACCURACY:
        if d.m == 0:
            raise ValueError("subset accuracy is undefined on an empty dataset")
        return Fraction(subset_correct(head, coverage, d), d.m)
    return score_micro(metric, confusion_for_head(head, coverage, d))


def evaluate_rule(rule_or_head: Union[Rule, Head], d: Dataset, metric: Metric,
                  coverage: Optional[np.ndarray] = None) -> Fraction:
    """Score a rule: coverage from its body, then the metric on the outcome grid."""
    if isinstance(rule_or_head, Rule):
        head = rule_or_head.head
        cov = coverage_mask(rule_or_head.body, d)
    else:
        head = rule_or_head
        if coverage is None:
            raise ValueError("coverage required when evaluating a bare head")
        cov = coverage
    return evaluate_head(head, cov, d, metric)
