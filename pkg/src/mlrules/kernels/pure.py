"""Numpy implementations of the counting kernels.

Fallback used when the compiled extension is unavailable (or when
``MLRULES_PURE=1`` forces it). Must stay bit-equivalent to ``_fast``.
"""

from __future__ import annotations

import numpy as np


def label_pos_counts(y: np.ndarray, cov: np.ndarray):
    """Per-label counts of present labels among covered / uncovered examples.

    Returns ``(pos_cov, pos_unc)``, two int64 arrays of length n.
    """
    covered = cov.astype(bool)
    pos_cov = y[covered].sum(axis=0, dtype=np.int64)
    pos_unc = y[~covered].sum(axis=0, dtype=np.int64)
    return pos_cov, pos_unc


def confusion_counts(y: np.ndarray, cov: np.ndarray, idxs: np.ndarray, bits: np.ndarray):
    """Aggregate TP/FP/TN/FN for a partial head over one coverage bitmask.

    Covered examples: a predicted value equal to the ground truth counts as
    TP, otherwise FP. Uncovered examples: absent labels count as TN, present
    ones as FN.
    """
    covered = cov.astype(bool)
    sub = y[:, idxs]
    eq = sub == bits[np.newaxis, :]
    k = len(idxs)
    c = int(covered.sum())
    u = y.shape[0] - c
    tp = int(eq[covered].sum())
    fp = c * k - tp
    fn = int(sub[~covered].sum())
    tn = u * k - fn
    return tp, fp, tn, fn


def subset_correct_count(y: np.ndarray, cov: np.ndarray, idxs: np.ndarray, bits: np.ndarray) -> int:
    """Number of examples whose head cells are all TP or TN."""
    covered = cov.astype(bool)
    sub = y[:, idxs]
    cov_ok = (sub == bits[np.newaxis, :]).all(axis=1) & covered
    unc_ok = (sub == 0).all(axis=1) & ~covered
    return int(cov_ok.sum() + unc_ok.sum())
