import numpy as np
import pytest

from mlrules.dataset import AttributeSchema, Dataset
from mlrules.fixtures import f1_coverage, load_f1


def make_label_dataset(y) -> Dataset:
    """Feature-less dataset around a given label matrix (for head-search tests)."""
    y = np.asarray(y, dtype=np.uint8)
    m, n = y.shape
    return Dataset((), tuple(f"l{i + 1}" for i in range(n)),
                   tuple(() for _ in range(m)), y)


def random_label_dataset(rng, m, n) -> Dataset:
    return make_label_dataset(rng.integers(0, 2, size=(m, n)))


@pytest.fixture(scope="session")
def f1() -> Dataset:
    return load_f1()


@pytest.fixture(scope="session")
def f1_cov(f1):
    return f1_coverage(f1)
