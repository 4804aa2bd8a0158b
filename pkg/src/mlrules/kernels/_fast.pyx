# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernels. Semantics mirror mlrules.kernels.pure."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def label_pos_counts(const unsigned char[:, ::1] y, const unsigned char[::1] cov):
    cdef Py_ssize_t m = y.shape[0]
    cdef Py_ssize_t n = y.shape[1]
    pos_cov_arr = np.zeros(n, dtype=np.int64)
    pos_unc_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] pos_cov = pos_cov_arr
    cdef long long[::1] pos_unc = pos_unc_arr
    cdef Py_ssize_t i, j
    for j in range(m):
        if cov[j]:
            for i in range(n):
                pos_cov[i] += y[j, i]
        else:
            for i in range(n):
                pos_unc[i] += y[j, i]
    return pos_cov_arr, pos_unc_arr


def confusion_counts(const unsigned char[:, ::1] y, const unsigned char[::1] cov,
                     const long long[::1] idxs, const unsigned char[::1] bits):
    cdef Py_ssize_t m = y.shape[0]
    cdef Py_ssize_t k = idxs.shape[0]
    cdef long long tp = 0, fp = 0, tn = 0, fn = 0
    cdef Py_ssize_t i, j
    cdef unsigned char truth
    for j in range(m):
        if cov[j]:
            for i in range(k):
                if y[j, idxs[i]] == bits[i]:
                    tp += 1
                else:
                    fp += 1
        else:
            for i in range(k):
                if y[j, idxs[i]]:
                    fn += 1
                else:
                    tn += 1
    return int(tp), int(fp), int(tn), int(fn)


def subset_correct_count(const unsigned char[:, ::1] y, const unsigned char[::1] cov,
                         const long long[::1] idxs, const unsigned char[::1] bits):
    cdef Py_ssize_t m = y.shape[0]
    cdef Py_ssize_t k = idxs.shape[0]
    cdef long long correct = 0
    cdef Py_ssize_t i, j
    cdef bint ok
    for j in range(m):
        ok = True
        if cov[j]:
            for i in range(k):
                if y[j, idxs[i]] != bits[i]:
                    ok = False
                    break
        else:
            for i in range(k):
                if y[j, idxs[i]]:
                    ok = False
                    break
        if ok:
            correct += 1
    return int(correct)
