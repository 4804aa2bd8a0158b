import math

import numpy as np
import pytest

from mlrules.dataset import (ArffParseError, LabelBindingError, LabelSpec,
                             LabelXmlError, bind_labels, dataset_stats,
                             parse_arff, parse_label_xml, to_arff)

SIMPLE = "@relation t\n@attribute a numeric\n@attribute l1 {0,1}\n@data\n1.5,1\n"


def test_parse_simple_relation():
    raw = parse_arff(SIMPLE)
    assert raw.name == "t"
    assert [a.name for a in raw.attributes] == ["a", "l1"]
    assert raw.attributes[0].kind == "numeric"
    assert raw.attributes[1].kind == "nominal"
    assert raw.attributes[1].categories == ("0", "1")
    assert raw.rows == ((1.5, "1"),)


def test_comments_are_transparent():
    commented = "% header\n@relation t\n% mid\n@attribute a numeric\n" \
                "@attribute l1 {0,1}\n@data\n% before row\n1.5,1\n% after\n"
    assert parse_arff(commented) == parse_arff(SIMPLE)


def test_undeclared_nominal_value_names_attribute_and_line():
    bad = "@relation t\n@attribute a numeric\n@attribute l1 {0,1}\n@data\n1.5,2\n"
    with pytest.raises(ArffParseError) as exc:
        parse_arff(bad)
    assert "l1" in str(exc.value)
    assert "line 5" in str(exc.value)


def test_row_arity_mismatch():
    with pytest.raises(ArffParseError):
        parse_arff("@relation t\n@attribute a numeric\n@data\n1,2\n")


def test_empty_data_section_is_accepted():
    raw = parse_arff("@relation t\n@attribute a numeric\n@data\n")
    assert raw.rows == ()


def test_missing_values_and_quoting():
    raw = parse_arff("@relation t\n@attribute 'an attr' numeric\n"
                     "@attribute c {'x y',z}\n@data\n?,'x y'\n")
    assert raw.attributes[0].name == "an attr"
    assert raw.rows == ((None, "x y"),)


def test_sparse_rows_default_to_zero_and_first_category():
    raw = parse_arff("@relation t\n@attribute a numeric\n@attribute c {p,q}\n"
                     "@attribute l1 {0,1}\n@data\n{0 2.5, 2 1}\n{}\n")
    assert raw.rows[0] == (2.5, "p", "1")
    assert raw.rows[1] == (0.0, "p", "0")


def test_malformed_declaration():
    with pytest.raises(ArffParseError):
        parse_arff("@relation t\n@attribute broken\n@data\n")
    with pytest.raises(ArffParseError):
        parse_arff("@relation t\n@nonsense x\n@data\n")


def test_label_xml_roundtrip():
    names = parse_label_xml('<labels><label name="red"/><label name="blue"/></labels>')
    assert names == ("red", "blue")


def test_label_xml_duplicate():
    with pytest.raises(LabelXmlError):
        parse_label_xml('<labels><label name="red"/><label name="red"/></labels>')


def test_label_xml_empty():
    with pytest.raises(LabelXmlError):
        parse_label_xml("<labels/>")


THREE = ("@relation t\n@attribute a numeric\n@attribute l1 {0,1}\n"
         "@attribute l2 {0,1}\n@data\n1.0,1,0\n2.0,0,1\n")


def test_bind_last_k():
    d = bind_labels(parse_arff(THREE), LabelSpec.last(2))
    assert [a.name for a in d.attributes] == ["a"]
    assert d.label_names == ("l1", "l2")
    assert d.y.tolist() == [[1, 0], [0, 1]]
    assert d.feature_rows == ((1.0,), (2.0,))


def test_bind_by_names():
    d = bind_labels(parse_arff(THREE), LabelSpec.from_names(["l2"]))
    assert [a.name for a in d.attributes] == ["a", "l1"]
    assert d.label_names == ("l2",)
    assert d.y.tolist() == [[0], [1]]


def test_bind_too_many_labels():
    raw = parse_arff("@relation t\n@attribute l1 {0,1}\n@attribute l2 {0,1}\n@data\n")
    with pytest.raises(LabelBindingError):
        bind_labels(raw, LabelSpec.last(3))


def test_bind_rejects_non_binary_label():
    raw = parse_arff("@relation t\n@attribute a numeric\n@attribute l {p,q}\n@data\n1,p\n")
    with pytest.raises(LabelBindingError):
        bind_labels(raw, LabelSpec.last(1))


def test_bind_rejects_missing_label_value():
    raw = parse_arff("@relation t\n@attribute a numeric\n@attribute l {0,1}\n@data\n1,?\n")
    with pytest.raises(LabelBindingError):
        bind_labels(raw, LabelSpec.last(1))


def test_bind_accepts_yes_no_and_true_false():
    raw = parse_arff("@relation t\n@attribute l1 {no,yes}\n@attribute l2 {false,true}\n"
                     "@data\nyes,false\n")
    d = bind_labels(raw, LabelSpec.last(2))
    assert d.y.tolist() == [[1, 0]]


def test_f1_stats(f1):
    stats = dataset_stats(f1)
    assert (stats.m, stats.n) == (6, 4)
    assert stats.cardinality == 2.0
    assert stats.density == 0.5


def test_stats_all_zero_labels():
    raw = parse_arff("@relation t\n@attribute a numeric\n@attribute l {0,1}\n"
                     "@data\n1,0\n2,0\n")
    d = bind_labels(raw, LabelSpec.last(1))
    stats = dataset_stats(d)
    assert stats.cardinality == 0.0
    assert stats.density == 0.0


def test_stats_empty_dataset_rejected():
    raw = parse_arff("@relation t\n@attribute a numeric\n@attribute l {0,1}\n@data\n")
    d = bind_labels(raw, LabelSpec.last(1))
    with pytest.raises(ValueError):
        dataset_stats(d)


def test_arff_roundtrip(f1):
    again = bind_labels(parse_arff(to_arff(f1)), LabelSpec.last(f1.n))
    assert again == f1


def test_arff_roundtrip_with_missing_and_numeric():
    raw = parse_arff("@relation t\n@attribute a numeric\n@attribute c {p,q}\n"
                     "@attribute l {0,1}\n@data\n0.1,p,1\n?,?,0\n")
    d = bind_labels(raw, LabelSpec.last(1))
    again = bind_labels(parse_arff(to_arff(d)), LabelSpec.last(1))
    assert again == d


def test_bind_preserves_columns_and_m():
    rng = np.random.default_rng(7)
    rows = [f"{rng.uniform():.6f},{rng.integers(2)},{rng.integers(2)}" for _ in range(15)]
    text = ("@relation r\n@attribute x numeric\n@attribute l1 {0,1}\n"
            "@attribute l2 {0,1}\n@data\n" + "\n".join(rows) + "\n")
    raw = parse_arff(text)
    d = bind_labels(raw, LabelSpec.last(2))
    assert d.m == len(raw.rows)
    assert [r[0] for r in d.feature_rows] == [r[0] for r in raw.rows]
    assert [tuple(map(int, row)) for row in d.y] == [(int(r[1]), int(r[2])) for r in raw.rows]


def test_cardinality_matches_matrix_sum():
    rng = np.random.default_rng(11)
    for _ in range(20):
        m, n = int(rng.integers(1, 30)), int(rng.integers(1, 6))
        y = rng.integers(0, 2, size=(m, n))
        lines = [",".join(["0.0"] + [str(v) for v in row]) for row in y]
        text = ("@relation r\n@attribute x numeric\n"
                + "\n".join(f"@attribute l{i} {{0,1}}" for i in range(n))
                + "\n@data\n" + "\n".join(lines) + "\n")
        d = bind_labels(parse_arff(text), LabelSpec.last(n))
        stats = dataset_stats(d)
        assert math.isclose(stats.cardinality, y.sum() / m)
