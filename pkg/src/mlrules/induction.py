"""Top-down greedy growth of a single rule.

Candidates are nominal equality tests and numeric threshold tests at
midpoints of adjacent distinct values, both generated from the examples the
current body still covers among the active (not yet removed) examples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dataset import Dataset
from .head_search import SearchConfig, find_best_head
from .metrics import Metric, confusion_for_head
from .rules import OP_EQ, OP_GT, OP_LEQ, Condition, Rule, coverage_mask


@dataclass(frozen=True)
class InductionConfig:
    metric: Metric
    search: SearchConfig = field(default_factory=SearchConfig)
    min_coverage: int = 1
    max_conditions: Optional[int] = None

    def __post_init__(self):
        if self.min_coverage < 1:
            raise ValueError("min_coverage must be at least 1")
        if self.max_conditions is not None and self.max_conditions < 1:
            raise ValueError("max_conditions must be at least 1")


def _implied_by_body(cond: Condition, body: Sequence[Condition]) -> bool:
    for existing in body:
        if existing.attribute != cond.attribute:
            continue
        if cond.op == OP_EQ and existing.op == OP_EQ:
            return True  # covered examples all share the body's category
        if cond.op == OP_LEQ and existing.op == OP_LEQ and existing.value <= cond.value:
            return True
        if cond.op == OP_GT and existing.op == OP_GT and existing.value >= cond.value:
            return True
    return False


def candidate_conditions(d: Dataset, active: np.ndarray,
                         body: Sequence[Condition] = ()) -> list[Condition]:
    """Refinement candidates in canonical order (attribute, then test order)."""
    covered = np.asarray(active, dtype=bool) & coverage_mask(body, d)
    candidates: list[Condition] = []
    for a, attr in enumerate(d.attributes):
        col = d.columns[a][covered]
        if attr.kind == "nominal":
            observed = set(int(c) for c in col if c >= 0)
            for code, cat in enumerate(attr.categories):
                if code in observed:
                    cond = Condition(a, OP_EQ, cat)
                    if not _implied_by_body(cond, body):
                        candidates.append(cond)
        else:
            values = np.unique(col[~np.isnan(col)])
            for lo, hi in zip(values, values[1:]):
                threshold = float((lo + hi) / 2.0)
                for op in (OP_LEQ, OP_GT):
                    cond = Condition(a, op, threshold)
                    if not _implied_by_body(cond, body):
                        candidates.append(cond)
    return candidates


def learn_rule(d: Dataset, active: np.ndarray, cfg: InductionConfig) -> Optional[Rule]:
    """Grow one rule greedily; None when nothing scores above zero.

    Coverage and metric cells are computed on the active examples only, so a
    rule is judged against the residual training data.
    """
    active = np.asarray(active, dtype=bool)
    if not active.any():
        raise ValueError("learn_rule requires at least one active example")
    sub = d.restrict(active)
    if int(active.sum()) < cfg.min_coverage:
        return None

    body: list[Condition] = []
    cov = np.ones(sub.m, dtype=bool)
    outcome = find_best_head(cov, sub, cfg.metric, cfg.search)
    h = outcome.best_h

    while cfg.max_conditions is None or len(body) < cfg.max_conditions:
        best_cond = None
        best_outcome = None
        best_cov = None
        best_h = h
        for cond in candidate_conditions(sub, np.ones(sub.m, dtype=bool), body):
            new_cov = cov & cond.mask(sub)
            if int(new_cov.sum()) < cfg.min_coverage:
                continue
            cand = find_best_head(new_cov, sub, cfg.metric, cfg.search)
            if cand.best_h > best_h:  # strict improvement; first maximum wins ties
                best_cond, best_outcome, best_cov, best_h = cond, cand, new_cov, cand.best_h
        if best_cond is None:
            break
        body.append(best_cond)
        cov, outcome, h = best_cov, best_outcome, best_h

    if h == 0:
        return None
    return Rule(tuple(body), outcome.best_head, h,
                confusion_for_head(outcome.best_head, cov, sub))
