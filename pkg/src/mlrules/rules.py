"""Rule bodies, heads and the coverage predicate."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from .dataset import Dataset, FeatureValue

if TYPE_CHECKING:
    from .metrics import ConfusionMatrix

OP_EQ = "=="
OP_LEQ = "<="
OP_GT = ">"


@dataclass(frozen=True)
class Condition:
    """Single attribute test: nominal equality or a numeric threshold."""

    attribute: int
    op: str  # OP_EQ, OP_LEQ or OP_GT
    value: FeatureValue

    def __post_init__(self):
        if self.op not in (OP_EQ, OP_LEQ, OP_GT):
            raise ValueError(f"unknown condition operator {self.op!r}")
        if self.op != OP_EQ and not math.isfinite(float(self.value)):
            raise ValueError("numeric threshold must be finite")

    def matches(self, value: FeatureValue) -> bool:
        if value is None:  # missing values never satisfy a condition
            return False
        if self.op == OP_EQ:
            return value == self.value
        if self.op == OP_LEQ:
            return float(value) <= self.value
        return float(value) > self.value

    def mask(self, d: Dataset) -> np.ndarray:
        col = d.columns[self.attribute]
        if self.op == OP_EQ:
            code = d.attributes[self.attribute].categories.index(self.value)
            return col == code
        if self.op == OP_LEQ:
            return col <= self.value  # NaN compares False, so missing never covered
        return col > self.value

    def render(self, attr_name: str) -> str:
        if self.op == OP_EQ:
            return f"{attr_name}={self.value}"
        op = "<=" if self.op == OP_LEQ else ">"
        return f"{attr_name}{op}{self.value!r}"


@dataclass(frozen=True)
class Head:
    """Partial assignment of predicted bits to labels, in ascending label order."""

    assignments: tuple[tuple[int, int], ...]

    def __post_init__(self):
        idxs = [i for i, _ in self.assignments]
        if idxs != sorted(set(idxs)):
            raise ValueError("head assignments must be sorted and unique per label")
        if any(b not in (0, 1) for _, b in self.assignments):
            raise ValueError("head bits must be 0 or 1")

    @staticmethod
    def of(*assignments: tuple[int, int]) -> "Head":
        return Head(tuple(sorted(assignments)))

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.assignments)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(b for _, b in self.assignments)

    def __len__(self) -> int:
        return len(self.assignments)

    def sort_key(self):
        """Tie rule: fewer labels, smallest indices, positive before negative."""
        return (len(self.assignments), self.indices, tuple(1 - b for b in self.bits))

    def is_subset_of(self, other: "Head") -> bool:
        return set(self.assignments) <= set(other.assignments)


@dataclass(frozen=True)
class Rule:
    """Conjunctive body with a multi-label head and its training score."""

    body: tuple[Condition, ...]
    head: Head
    train_h: Fraction
    train_confusion: Optional["ConfusionMatrix"] = None

    def __post_init__(self):
        if len(self.head) == 0:
            raise ValueError("rule head must be non-empty")


def covers(body: Sequence[Condition], x: Sequence[FeatureValue]) -> bool:
    """True iff every condition holds; the empty body covers everything."""
    return all(c.matches(x[c.attribute]) for c in body)


def coverage_mask(body: Sequence[Condition], d: Dataset) -> np.ndarray:
    mask = np.ones(d.m, dtype=bool)
    for c in body:
        mask &= c.mask(d)
    return mask
