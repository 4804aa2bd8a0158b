"""Search for the best head of a fixed rule body.

Three interchangeable strategies: exhaustive enumeration (the correctness
oracle), breadth-first search pruned by anti-monotonicity, and the
linear-cost merge of single-label optima available for decomposable metrics.
All strategies agree on the best achievable score; the returned head may
differ (the merge intentionally returns the union of all maximizers, the
other strategies the tie-rule minimum).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import kernels
from .dataset import Dataset
from .metrics import (F_MEASURE, HAMMING, PRECISION, RECALL, SUBSET_ACCURACY,
                      Metric, evaluate_head)
from .rules import Head

AUTO = "auto"
EXHAUSTIVE = "exhaustive"
PRUNED_BFS = "pruned_bfs"
DECOMPOSABLE_MERGE = "decomposable"

MAX_EXHAUSTIVE_POSITIVE = 16
MAX_EXHAUSTIVE_NEGATIVE = 10

Assignment = tuple[int, int]
HeadTuple = tuple[Assignment, ...]


class IncompatibleStrategyError(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    allow_negative: bool = True
    strategy: str = AUTO
    single_label: bool = False
    subset_memo: bool = True  # veto via recorded decreasing heads; optional, sound either way

    def __post_init__(self):
        if self.strategy not in (AUTO, EXHAUSTIVE, PRUNED_BFS, DECOMPOSABLE_MERGE):
            raise ValueError(f"unknown search strategy {self.strategy!r}")


@dataclass(frozen=True)
class SearchOutcome:
    best_head: Head
    best_h: Fraction
    evaluated_count: int
    pruned_count: int
    strategy: str
    pruned_heads: tuple[Head, ...] = field(default=(), repr=False)


def _tie_key(head: HeadTuple):
    return (len(head), tuple(i for i, _ in head), tuple(1 - b for _, b in head))


class _HeadScorer:
    """Scores heads for one fixed coverage.

    Micro-averageable metrics only need the per-(label, bit) single-label
    confusion cells, precomputed once; subset accuracy needs a per-example
    pass and goes through the counting kernel.
    """

    def __init__(self, coverage: np.ndarray, d: Dataset, metric: Metric):
        self.d = d
        self.metric = metric
        self.m = d.m
        self.y = np.ascontiguousarray(d.y, dtype=np.uint8)
        self.cov = np.ascontiguousarray(coverage, dtype=np.uint8)
        pos_cov, pos_unc = kernels.label_pos_counts(self.y, self.cov)
        c = int(self.cov.sum())
        u = self.m - c
        n = d.n
        # cells[bit][label] for the single-label head (label, bit)
        self.tp = {1: pos_cov, 0: c - pos_cov}
        self.fp = {1: c - pos_cov, 0: pos_cov}
        self.fn = {1: pos_unc, 0: pos_unc}
        self.tn = {1: u - pos_unc, 0: u - pos_unc}
        if metric.kind == F_MEASURE:
            # integer form of (1+b^2)tp / ((1+b^2)tp + b^2 fn + fp), b^2 = p/q
            b2 = metric.beta * metric.beta
            self._fp_num, self._fp_den = b2.numerator, b2.denominator

    def score(self, head: HeadTuple) -> Fraction:
        kind = self.metric.kind
        if kind == SUBSET_ACCURACY:
            idxs = np.asarray([i for i, _ in head], dtype=np.int64)
            bits = np.asarray([b for _, b in head], dtype=np.uint8)
            return Fraction(kernels.subset_correct_count(self.y, self.cov, idxs, bits), self.m)
        tp = fp = fn = tn = 0
        for i, b in head:
            tp += int(self.tp[b][i])
            fp += int(self.fp[b][i])
            fn += int(self.fn[b][i])
            tn += int(self.tn[b][i])
        if kind == PRECISION:
            den = tp + fp
        elif kind == RECALL:
            den = tp + fn
        elif kind == HAMMING:
            return Fraction(tp + tn, tp + fp + tn + fn) if tp + fp + tn + fn else Fraction(0)
        else:  # F-measure
            p, q = self._fp_num, self._fp_den
            num = (p + q) * tp
            den = (p + q) * tp + p * fn + q * fp
            return Fraction(num, den) if den else Fraction(0)
        return Fraction(tp, den) if den else Fraction(0)


def _enumerate_singles(n: int, allow_negative: bool):
    for i in range(n):
        yield ((i, 1),)
        if allow_negative:
            yield ((i, 0),)


def _bit_choices(allow_negative: bool):
    return (1, 0) if allow_negative else (1,)


def best_head_exhaustive(coverage: np.ndarray, d: Dataset, metric: Metric,
                         cfg: SearchConfig) -> SearchOutcome:
    """Score every non-empty head; the oracle the other strategies are checked against."""
    n = d.n
    limit = MAX_EXHAUSTIVE_NEGATIVE if cfg.allow_negative else MAX_EXHAUSTIVE_POSITIVE
    if n > limit and not cfg.single_label:
        raise ValueError(f"{n} labels exceed the exhaustive search guard of {limit}")
    scorer = _HeadScorer(coverage, d, metric)
    best: Optional[HeadTuple] = None
    best_h = Fraction(-1)
    evaluated = 0
    max_size = 1 if cfg.single_label else n
    level: list[HeadTuple] = [()]
    for _ in range(max_size):
        next_level: list[HeadTuple] = []
        for head in level:
            start = head[-1][0] + 1 if head else 0
            for i in range(start, n):
                for b in _bit_choices(cfg.allow_negative):
                    child = head + ((i, b),)
                    h = scorer.score(child)
                    evaluated += 1
                    if h > best_h or (h == best_h and _tie_key(child) < _tie_key(best)):
                        best, best_h = child, h
                    next_level.append(child)
        level = next_level
    return SearchOutcome(Head(best), best_h, evaluated, 0, EXHAUSTIVE)


def best_head_decomposable(coverage: np.ndarray, d: Dataset, metric: Metric,
                           cfg: SearchConfig) -> SearchOutcome:
    """Merge all single-label maximizers into one head (decomposable metrics only)."""
    if not metric.decomposable:
        raise IncompatibleStrategyError(
            f"{metric.kind} is not decomposable; use pruned BFS or the oracle")
    scorer = _HeadScorer(coverage, d, metric)
    singles = [(head, scorer.score(head)) for head in
               _enumerate_singles(d.n, cfg.allow_negative)]
    evaluated = len(singles)
    best_h = max(h for _, h in singles)
    merged: dict[int, int] = {}
    for head, h in singles:
        if h == best_h:
            (i, b), = head
            # both assignments of one label tying at the maximum: keep the positive
            if i not in merged or b > merged[i]:
                merged[i] = b
    head = Head(tuple(sorted(merged.items())))
    if cfg.single_label:
        candidates = [(hd, h) for hd, h in singles if h == best_h]
        head = Head(min((hd for hd, _ in candidates), key=_tie_key))
    else:
        merged_h = scorer.score(head.assignments)
        if merged_h != best_h:
            raise AssertionError(
                f"decomposability violated: merged head scores {merged_h}, singles {best_h}")
    return SearchOutcome(head, best_h, evaluated, 0, DECOMPOSABLE_MERGE)


def best_head_pruned_bfs(coverage: np.ndarray, d: Dataset, metric: Metric,
                         cfg: SearchConfig) -> SearchOutcome:
    """Level-wise head enumeration pruned by anti-monotonicity.

    A scored child whose score drops strictly below its generating parent's is
    recorded as decreasing and its subtree is never expanded; any later head
    containing a recorded decreasing head is vetoed without being scored.
    """
    n = d.n
    scorer = _HeadScorer(coverage, d, metric)
    best: Optional[HeadTuple] = None
    best_h = Fraction(-1)
    evaluated = 0
    pruned: list[HeadTuple] = []
    decreasing: list[frozenset[Assignment]] = []

    expandable: list[tuple[HeadTuple, Fraction]] = []
    for head in _enumerate_singles(n, cfg.allow_negative):
        h = scorer.score(head)
        evaluated += 1
        if h > best_h or (h == best_h and _tie_key(head) < _tie_key(best)):
            best, best_h = head, h
        expandable.append((head, h))

    max_size = 1 if cfg.single_label else n
    size = 1
    while expandable and size < max_size:
        next_level: list[tuple[HeadTuple, Fraction]] = []
        for head, parent_h in expandable:
            start = head[-1][0] + 1
            for i in range(start, n):
                for b in _bit_choices(cfg.allow_negative):
                    child = head + ((i, b),)
                    if cfg.subset_memo and decreasing:
                        child_set = frozenset(child)
                        if any(dec <= child_set for dec in decreasing):
                            pruned.append(child)
                            continue
                    h = scorer.score(child)
                    evaluated += 1
                    if h > best_h or (h == best_h and _tie_key(child) < _tie_key(best)):
                        best, best_h = child, h
                    if h < parent_h:
                        pruned.append(child)
                        if cfg.subset_memo:
                            decreasing.append(frozenset(child))
                    else:
                        next_level.append((child, h))
        expandable = next_level
        size += 1
    return SearchOutcome(Head(best), best_h, evaluated, len(pruned), PRUNED_BFS,
                         tuple(Head(p) for p in pruned))


def find_best_head(coverage: np.ndarray, d: Dataset, metric: Metric,
                   cfg: SearchConfig) -> SearchOutcome:
    """Dispatch: decomposable metrics to the merge, anti-monotone-only to pruned BFS."""
    strategy = cfg.strategy
    if strategy == AUTO:
        strategy = DECOMPOSABLE_MERGE if metric.decomposable else PRUNED_BFS
    if strategy == DECOMPOSABLE_MERGE and not metric.decomposable:
        raise IncompatibleStrategyError(
            f"metric {metric.kind} cannot use the decomposable merge strategy")
    if strategy == EXHAUSTIVE:
        return best_head_exhaustive(coverage, d, metric, cfg)
    if strategy == DECOMPOSABLE_MERGE:
        return best_head_decomposable(coverage, d, metric, cfg)
    return best_head_pruned_bfs(coverage, d, metric, cfg)
