"""Access to the bundled canonical test dataset."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .dataset import Dataset, LabelSpec, bind_labels, parse_arff


def f1_path() -> Path:
    return Path(resources.files("mlrules.data").joinpath("f1.arff"))


def load_f1() -> Dataset:
    """Six examples, four labels; rows 4-6 form the covered group."""
    return bind_labels(parse_arff(f1_path().read_text(encoding="utf-8")),
                       LabelSpec.last(4))


def f1_coverage(d: Dataset) -> np.ndarray:
    """Coverage bitmask of the cov=yes group."""
    code = d.attributes[0].categories.index("yes")
    return d.columns[0] == code
