"""Covering loop, decision-list prediction, model evaluation and persistence."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .dataset import Dataset, FeatureValue
from .induction import InductionConfig, learn_rule
from .metrics import ConfusionMatrix, Metric
from .rules import OP_EQ, OP_GT, OP_LEQ, Condition, Head, Rule, coverage_mask, covers

MODEL_FORMAT_VERSION = "v1"
DEFAULT_MAX_RULES = 1000


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class RuleList:
    """Ordered decision list; earlier rules win when setting a label."""

    rules: tuple[Rule, ...]
    attribute_names: tuple[str, ...]
    label_names: tuple[str, ...]
    metric: Metric

    @property
    def n(self) -> int:
        return len(self.label_names)


@dataclass(frozen=True)
class EvaluationReport:
    micro_precision: float
    micro_recall: float
    micro_f1: float
    hamming_accuracy: float
    subset_accuracy: float
    macro_f1: float
    per_label: tuple[tuple[str, ConfusionMatrix], ...]
    rule_count: int
    avg_head_size: float
    avg_body_length: float


def learn_model(d: Dataset, cfg: InductionConfig, tau: float = 1.0,
                max_rules: int = DEFAULT_MAX_RULES) -> RuleList:
    """Separate-and-conquer: learn a rule, mark predicted labels on the
    examples it covers, remove examples once their predicted-label fraction
    reaches tau, repeat on the residual.
    """
    attribute_names = tuple(a.name for a in d.attributes)
    rules: list[Rule] = []
    active = np.ones(d.m, dtype=bool)
    predicted = np.zeros((d.m, d.n), dtype=bool)

    while active.any() and len(rules) < max_rules:
        rule = learn_rule(d, active, cfg)
        if rule is None:
            break
        rules.append(rule)
        covered = active & coverage_mask(rule.body, d)
        for i, _ in rule.head.assignments:
            predicted[covered, i] = True
        removable = active & (predicted.sum(axis=1) / d.n >= tau)
        if not removable.any():
            break  # the residual cannot change, a rerun would learn the same rule
        active &= ~removable
    return RuleList(tuple(rules), attribute_names, d.label_names, cfg.metric)


def predict(model: RuleList, x: Sequence[FeatureValue]) -> list[int]:
    """Full bit vector: first firing rule sets each label, unset labels default to 0."""
    if len(x) != len(model.attribute_names):
        raise ValueError(f"expected {len(model.attribute_names)} feature values, got {len(x)}")
    result = [0] * model.n
    decided = [False] * model.n
    for rule in model.rules:
        if covers(rule.body, x):
            for i, bit in rule.head.assignments:
                if not decided[i]:
                    result[i] = bit
                    decided[i] = True
    return result


def predict_dataset(model: RuleList, d: Dataset) -> np.ndarray:
    if tuple(a.name for a in d.attributes) != model.attribute_names:
        raise ValueError("dataset schema does not match the model's attributes")
    preds = np.zeros((d.m, d.n), dtype=np.uint8)
    decided = np.zeros((d.m, d.n), dtype=bool)
    for rule in model.rules:
        covered = coverage_mask(rule.body, d)
        for i, bit in rule.head.assignments:
            fresh = covered & ~decided[:, i]
            preds[fresh, i] = bit
            decided[fresh, i] = True
    return preds


def _f1(c: ConfusionMatrix) -> Fraction:
    den = 2 * c.tp + c.fp + c.fn
    return Fraction(2 * c.tp, den) if den else Fraction(0)


def evaluate_model(model: RuleList, d: Dataset) -> EvaluationReport:
    """Final-model evaluation over full predicted vectors (no abstentions)."""
    if d.m == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    preds = predict_dataset(model, d)
    y = d.y.astype(bool)
    p = preds.astype(bool)
    per_label = []
    for i, name in enumerate(model.label_names):
        tp = int((y[:, i] & p[:, i]).sum())
        fp = int((~y[:, i] & p[:, i]).sum())
        fn = int((y[:, i] & ~p[:, i]).sum())
        tn = int((~y[:, i] & ~p[:, i]).sum())
        per_label.append((name, ConfusionMatrix(tp, fp, tn, fn)))
    total = ConfusionMatrix.zero()
    for _, c in per_label:
        total = total + c
    micro_p = Fraction(total.tp, total.tp + total.fp) if total.tp + total.fp else Fraction(0)
    micro_r = Fraction(total.tp, total.tp + total.fn) if total.tp + total.fn else Fraction(0)
    subset = Fraction(int((preds == d.y).all(axis=1).sum()), d.m)
    macro_f1 = sum(_f1(c) for _, c in per_label) / len(per_label)
    rule_count = len(model.rules)
    return EvaluationReport(
        micro_precision=float(micro_p),
        micro_recall=float(micro_r),
        micro_f1=float(_f1(total)),
        hamming_accuracy=float(Fraction(total.tp + total.tn, total.total)),
        subset_accuracy=float(subset),
        macro_f1=float(macro_f1),
        per_label=tuple(per_label),
        rule_count=rule_count,
        avg_head_size=(sum(len(r.head) for r in model.rules) / rule_count) if rule_count else 0.0,
        avg_body_length=(sum(len(r.body) for r in model.rules) / rule_count) if rule_count else 0.0,
    )


# ---------------------------------------------------------------------------
# Persistence (versioned UTF-8 text) and human-readable rendering
# ---------------------------------------------------------------------------

def _render_condition(cond: Condition, attr_names: Sequence[str]) -> str:
    name = attr_names[cond.attribute]
    if cond.op == OP_EQ:
        return f"{name}={cond.value}"
    op = "<=" if cond.op == OP_LEQ else ">"
    return f"{name}{op}{cond.value!r}"


def _rule_line(rule: Rule, model: RuleList) -> str:
    head = ", ".join(f"{model.label_names[i]}={bit}" for i, bit in rule.head.assignments)
    body = ", ".join(_render_condition(c, model.attribute_names) for c in rule.body)
    return f"{head} <- {body}".rstrip()


def serialize_model(model: RuleList) -> str:
    lines = [
        f"mlrules-model {MODEL_FORMAT_VERSION}",
        f"metric {model.metric.kind}",
        f"beta {model.metric.beta}",
        "attributes " + "\t".join(model.attribute_names),
        "labels " + "\t".join(model.label_names),
        f"rules {len(model.rules)}",
    ]
    lines.extend(_rule_line(r, model) for r in model.rules)
    return "\n".join(lines) + "\n"


def _parse_condition(text: str, attr_names: Sequence[str]) -> Condition:
    for op_text, op in (("<=", OP_LEQ), (">", OP_GT), ("=", OP_EQ)):
        pos = text.find(op_text)
        if pos > 0:
            name, value = text[:pos], text[pos + len(op_text):]
            if name not in attr_names:
                raise ModelFormatError(f"unknown attribute {name!r} in condition {text!r}")
            idx = attr_names.index(name)
            return Condition(idx, op, value if op == OP_EQ else float(value))
    raise ModelFormatError(f"malformed condition {text!r}")


def _expect(line: str, key: str) -> str:
    if not line.startswith(key + " ") and line != key:
        raise ModelFormatError(f"expected {key!r} line, got {line!r}")
    return line[len(key):].strip()


def parse_model(text: str) -> RuleList:
    lines = text.splitlines()
    if not lines:
        raise ModelFormatError("empty model text")
    header = lines[0].split()
    if len(header) != 2 or header[0] != "mlrules-model":
        raise ModelFormatError(f"not a model file: {lines[0]!r}")
    if header[1] != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format version {header[1]!r}")
    if len(lines) < 6:
        raise ModelFormatError("truncated model header")
    metric_kind = _expect(lines[1], "metric")
    beta = Fraction(_expect(lines[2], "beta"))
    attr_line = _expect(lines[3], "attributes")
    attribute_names = tuple(attr_line.split("\t")) if attr_line else ()
    label_names = tuple(_expect(lines[4], "labels").split("\t"))
    rule_count = int(_expect(lines[5], "rules"))
    metric = Metric(metric_kind, beta)

    rules = []
    rule_lines = [ln for ln in lines[6:] if ln.strip()]
    if len(rule_lines) != rule_count:
        raise ModelFormatError(f"expected {rule_count} rules, found {len(rule_lines)}")
    for ln in rule_lines:
        if " <-" not in ln:
            raise ModelFormatError(f"malformed rule line {ln!r}")
        head_text, _, body_text = ln.partition(" <-")
        assignments = []
        for part in head_text.split(", "):
            name, _, bit = part.rpartition("=")
            if name not in label_names or bit not in ("0", "1"):
                raise ModelFormatError(f"malformed head assignment {part!r}")
            assignments.append((label_names.index(name), int(bit)))
        body = tuple(_parse_condition(p.strip(), attribute_names)
                     for p in body_text.split(", ") if p.strip())
        rules.append(Rule(body, Head(tuple(sorted(assignments))), Fraction(0)))
    return RuleList(tuple(rules), attribute_names, label_names, metric)


def _render_condition_compact(cond: Condition, attr_names: Sequence[str]) -> str:
    name = attr_names[cond.attribute]
    if cond.op == OP_EQ:
        return f"{name}={cond.value}"
    op = "<=" if cond.op == OP_LEQ else ">"
    return f"{name}{op}{cond.value:g}"


def render_rule(rule: Rule, model: RuleList) -> str:
    """Human-readable form, e.g. ``red, green ← colors>5`` (negatives as !name)."""
    head = ", ".join(
        (model.label_names[i] if bit else f"!{model.label_names[i]}")
        for i, bit in rule.head.assignments)
    if not rule.body:
        return f"{head} ← true"
    body = ", ".join(_render_condition_compact(c, model.attribute_names) for c in rule.body)
    return f"{head} ← {body}"
