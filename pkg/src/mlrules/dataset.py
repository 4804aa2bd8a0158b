"""ARFF ingestion and label binding for multi-label datasets.

A dataset is parsed in two stages: ``parse_arff`` reads the raw relation
(schema + rows), ``bind_labels`` splits off the label columns according to a
:class:`LabelSpec` and produces the immutable :class:`Dataset` every other
module works on.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

FeatureValue = Union[float, str, None]  # None marks a missing value

_BINARY_TOKENS = {
    "0": 0, "1": 1,
    "false": 0, "true": 1,
    "no": 0, "yes": 1,
}


class ArffParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class LabelXmlError(ValueError):
    pass


class LabelBindingError(ValueError):
    pass


@dataclass(frozen=True)
class AttributeSchema:
    name: str
    kind: str  # "numeric" or "nominal"
    categories: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.kind not in ("numeric", "nominal"):
            raise ValueError(f"unknown attribute kind {self.kind!r}")
        if self.kind == "nominal":
            if not self.categories:
                raise ValueError(f"nominal attribute {self.name!r} has no categories")
            if len(set(self.categories)) != len(self.categories):
                raise ValueError(f"duplicate categories in attribute {self.name!r}")


@dataclass(frozen=True)
class RawRelation:
    name: str
    attributes: tuple[AttributeSchema, ...]
    rows: tuple[tuple[FeatureValue, ...], ...]


@dataclass(frozen=True)
class LabelSpec:
    """How to designate label columns: explicit names or a positional slice."""

    mode: str  # "xml_names", "last_k" or "first_k"
    names: Optional[tuple[str, ...]] = None
    k: Optional[int] = None

    @staticmethod
    def last(k: int) -> "LabelSpec":
        return LabelSpec("last_k", k=k)

    @staticmethod
    def first(k: int) -> "LabelSpec":
        return LabelSpec("first_k", k=k)

    @staticmethod
    def from_names(names: Sequence[str]) -> "LabelSpec":
        return LabelSpec("xml_names", names=tuple(names))


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable table of examples with a binary ground-truth label matrix.

    ``feature_rows`` keeps raw per-example values (float, category string or
    None for missing); ``columns`` holds the same data column-wise as numpy
    arrays (float64 with NaN, or int16 category codes with -1) for fast
    coverage tests. ``y`` is the (m, n) uint8 label matrix.
    """

    attributes: tuple[AttributeSchema, ...]
    label_names: tuple[str, ...]
    feature_rows: tuple[tuple[FeatureValue, ...], ...]
    y: np.ndarray
    columns: tuple[np.ndarray, ...] = field(repr=False, default=())

    def __post_init__(self):
        if len(self.label_names) < 1:
            raise ValueError("dataset needs at least one label")
        for row in self.feature_rows:
            if len(row) != len(self.attributes):
                raise ValueError("feature vector length does not match schema")
        if self.y.shape != (len(self.feature_rows), len(self.label_names)):
            raise ValueError("label matrix shape mismatch")
        if not self.columns:
            object.__setattr__(self, "columns", _build_columns(self.attributes, self.feature_rows))
        self.y.setflags(write=False)

    @property
    def m(self) -> int:
        return len(self.feature_rows)

    @property
    def n(self) -> int:
        return len(self.label_names)

    def restrict(self, mask: np.ndarray) -> "Dataset":
        """Row subset sharing the schema; used for residual training data."""
        idx = np.flatnonzero(mask)
        rows = tuple(self.feature_rows[i] for i in idx)
        return Dataset(self.attributes, self.label_names, rows,
                       np.ascontiguousarray(self.y[idx]),
                       tuple(col[idx] for col in self.columns))

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.attributes == other.attributes
                and self.label_names == other.label_names
                and self._rows_equal(other)
                and np.array_equal(self.y, other.y))

    def _rows_equal(self, other: "Dataset") -> bool:
        if len(self.feature_rows) != len(other.feature_rows):
            return False
        for a, b in zip(self.feature_rows, other.feature_rows):
            for va, vb in zip(a, b):
                if isinstance(va, float) and isinstance(vb, float):
                    if not (va == vb or (math.isnan(va) and math.isnan(vb))):
                        return False
                elif va != vb:
                    return False
        return True


@dataclass(frozen=True)
class DatasetStats:
    m: int
    n: int
    cardinality: float
    density: float


def _build_columns(attributes, rows) -> tuple[np.ndarray, ...]:
    cols = []
    for i, attr in enumerate(attributes):
        if attr.kind == "numeric":
            col = np.array([math.nan if r[i] is None else float(r[i]) for r in rows],
                           dtype=np.float64)
        else:
            lookup = {c: j for j, c in enumerate(attr.categories)}
            col = np.array([-1 if r[i] is None else lookup[r[i]] for r in rows],
                           dtype=np.int16)
        col.setflags(write=False)
        cols.append(col)
    return tuple(cols)


# ---------------------------------------------------------------------------
# ARFF parsing
# ---------------------------------------------------------------------------

def _unquote(token: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in ("'", '"'):
        return token[1:-1]
    return token


def _split_values(text: str, sep: str = ",") -> list[str]:
    """Split on sep while respecting single/double quotes."""
    parts, buf, quote = [], [], None
    for ch in text:
        if quote:
            buf.append(ch)
            if ch == quote:
                quote = None
        elif ch in ("'", '"'):
            quote = ch
            buf.append(ch)
        elif ch == sep:
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    parts.append("".join(buf))
    return parts


def _parse_attribute_decl(rest: str, line: int) -> AttributeSchema:
    rest = rest.strip()
    if not rest:
        raise ArffParseError("empty @attribute declaration", line)
    if rest[0] in ("'", '"'):
        quote = rest[0]
        end = rest.find(quote, 1)
        if end < 0:
            raise ArffParseError("unterminated quoted attribute name", line)
        name = rest[1:end]
        type_part = rest[end + 1:].strip()
    else:
        fields = rest.split(None, 1)
        if len(fields) != 2:
            raise ArffParseError("malformed @attribute declaration", line)
        name, type_part = fields[0], fields[1].strip()
    if not name:
        raise ArffParseError("empty attribute name", line)
    if type_part.startswith("{"):
        if not type_part.endswith("}"):
            raise ArffParseError(f"unterminated nominal specification for {name!r}", line)
        cats = [_unquote(c) for c in _split_values(type_part[1:-1])]
        cats = [c.strip() if not c else c for c in cats]
        if any(c == "" for c in cats):
            raise ArffParseError(f"empty category in nominal attribute {name!r}", line)
        if len(set(cats)) != len(cats):
            raise ArffParseError(f"duplicate category in nominal attribute {name!r}", line)
        return AttributeSchema(name, "nominal", tuple(cats))
    if type_part.lower() in ("numeric", "real", "integer"):
        return AttributeSchema(name, "numeric")
    raise ArffParseError(f"unsupported attribute type {type_part!r} for {name!r}", line)


def _parse_cell(token: str, attr: AttributeSchema, line: int) -> FeatureValue:
    token = _unquote(token.strip())
    if token == "?":
        return None
    if attr.kind == "numeric":
        try:
            return float(token)
        except ValueError:
            raise ArffParseError(f"invalid numeric value {token!r} for attribute {attr.name!r}", line) from None
    if token not in attr.categories:
        raise ArffParseError(f"value {token!r} not declared for nominal attribute {attr.name!r}", line)
    return token


def _sparse_default(attr: AttributeSchema) -> FeatureValue:
    return 0.0 if attr.kind == "numeric" else attr.categories[0]


def parse_arff(text: str) -> RawRelation:
    """Parse ARFF text into a raw relation (schema + rows).

    Supports numeric and nominal attributes, ``%`` comments, ``?`` missing
    values and sparse ``{index value, ...}`` data rows.
    """
    relation = None
    attributes: list[AttributeSchema] = []
    names_seen: set[str] = set()
    rows: list[tuple[FeatureValue, ...]] = []
    in_data = False

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if not in_data:
            low = line.lower()
            if low.startswith("@relation"):
                relation = _unquote(line[len("@relation"):].strip())
            elif low.startswith("@attribute"):
                attr = _parse_attribute_decl(line[len("@attribute"):], lineno)
                if attr.name in names_seen:
                    raise ArffParseError(f"duplicate attribute name {attr.name!r}", lineno)
                names_seen.add(attr.name)
                attributes.append(attr)
            elif low.startswith("@data"):
                if not attributes:
                    raise ArffParseError("@data before any @attribute declaration", lineno)
                in_data = True
            else:
                raise ArffParseError(f"unexpected declaration {line.split()[0]!r}", lineno)
            continue

        if line.startswith("{"):
            if not line.endswith("}"):
                raise ArffParseError("unterminated sparse row", lineno)
            row: list[FeatureValue] = [_sparse_default(a) for a in attributes]
            body = line[1:-1].strip()
            if body:
                for entry in _split_values(body):
                    entry = entry.strip()
                    fields = entry.split(None, 1)
                    if len(fields) != 2:
                        raise ArffParseError(f"malformed sparse entry {entry!r}", lineno)
                    try:
                        idx = int(fields[0])
                    except ValueError:
                        raise ArffParseError(f"invalid sparse index {fields[0]!r}", lineno) from None
                    if not 0 <= idx < len(attributes):
                        raise ArffParseError(f"sparse index {idx} out of range", lineno)
                    row[idx] = _parse_cell(fields[1], attributes[idx], lineno)
            rows.append(tuple(row))
        else:
            values = _split_values(line)
            if len(values) != len(attributes):
                raise ArffParseError(
                    f"row has {len(values)} values, expected {len(attributes)}", lineno)
            rows.append(tuple(_parse_cell(v, a, lineno) for v, a in zip(values, attributes)))

    if not in_data:
        raise ArffParseError("missing @data section")
    return RawRelation(relation or "", tuple(attributes), tuple(rows))


def parse_label_xml(text: str) -> tuple[str, ...]:
    """Read label names from a Mulan-style labels XML document."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise LabelXmlError(f"malformed label XML: {exc}") from exc
    names: list[str] = []
    for child in root.iter("label"):
        name = child.get("name")
        if name is None:
            raise LabelXmlError("<label> element without name attribute")
        if name in names:
            raise LabelXmlError(f"duplicate label name {name!r}")
        names.append(name)
    if not names:
        raise LabelXmlError("label XML declares zero labels")
    return tuple(names)


def _label_bit(value: FeatureValue, attr: AttributeSchema) -> int:
    if value is None:
        raise LabelBindingError(f"missing value in label column {attr.name!r}")
    return _BINARY_TOKENS[str(value).lower()]


def bind_labels(raw: RawRelation, spec: LabelSpec) -> Dataset:
    """Split the raw relation into features and a binary label matrix."""
    n_attrs = len(raw.attributes)
    if spec.mode in ("last_k", "first_k"):
        k = spec.k or 0
        if k < 1:
            raise LabelBindingError("label spec resolves to zero labels")
        if k > n_attrs:
            raise LabelBindingError(f"label spec wants {k} labels but relation has {n_attrs} attributes")
        label_idx = list(range(n_attrs - k, n_attrs)) if spec.mode == "last_k" else list(range(k))
    elif spec.mode == "xml_names":
        if not spec.names:
            raise LabelBindingError("label spec resolves to zero labels")
        by_name = {a.name: i for i, a in enumerate(raw.attributes)}
        missing = [nm for nm in spec.names if nm not in by_name]
        if missing:
            raise LabelBindingError(f"label names not found in relation: {missing}")
        label_idx = [by_name[nm] for nm in spec.names]
    else:
        raise LabelBindingError(f"unknown label spec mode {spec.mode!r}")

    for i in label_idx:
        attr = raw.attributes[i]
        if attr.kind != "nominal" or len(attr.categories) > 2 or any(
                c.lower() not in _BINARY_TOKENS for c in attr.categories):
            raise LabelBindingError(
                f"label attribute {attr.name!r} is not binary-interpretable")

    label_set = set(label_idx)
    feat_idx = [i for i in range(n_attrs) if i not in label_set]
    attributes = tuple(raw.attributes[i] for i in feat_idx)
    label_names = tuple(raw.attributes[i].name for i in label_idx)

    feature_rows = tuple(tuple(row[i] for i in feat_idx) for row in raw.rows)
    y = np.zeros((len(raw.rows), len(label_idx)), dtype=np.uint8)
    for j, row in enumerate(raw.rows):
        for col, i in enumerate(label_idx):
            y[j, col] = _label_bit(row[i], raw.attributes[i])
    return Dataset(attributes, label_names, feature_rows, y)


def dataset_stats(d: Dataset) -> DatasetStats:
    if d.m == 0:
        raise ValueError("cannot compute statistics of an empty dataset")
    cardinality = float(d.y.sum()) / d.m
    return DatasetStats(d.m, d.n, cardinality, cardinality / d.n)


# ---------------------------------------------------------------------------
# Serialization (round-trip support; datasets are otherwise never persisted)
# ---------------------------------------------------------------------------

def _render_token(value: str) -> str:
    if any(ch in value for ch in (" ", ",", "'", '"', "{", "}", "%")):
        return "'" + value.replace("'", "\\'") + "'"
    return value


def _render_cell(value: FeatureValue, attr: AttributeSchema) -> str:
    if value is None:
        return "?"
    if attr.kind == "numeric":
        return repr(float(value))
    return _render_token(str(value))


def to_arff(d: Dataset, relation: str = "dataset") -> str:
    """Serialize a dataset back to dense ARFF, labels as trailing {0,1} columns."""
    lines = [f"@relation {_render_token(relation)}"]
    for attr in d.attributes:
        if attr.kind == "numeric":
            lines.append(f"@attribute {_render_token(attr.name)} numeric")
        else:
            cats = ",".join(_render_token(c) for c in attr.categories)
            lines.append(f"@attribute {_render_token(attr.name)} {{{cats}}}")
    for name in d.label_names:
        lines.append(f"@attribute {_render_token(name)} {{0,1}}")
    lines.append("@data")
    for j, row in enumerate(d.feature_rows):
        cells = [_render_cell(v, a) for v, a in zip(row, d.attributes)]
        cells.extend(str(int(b)) for b in d.y[j])
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
