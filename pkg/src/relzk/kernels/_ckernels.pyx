# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def binding_success_counts(long long q):
    cdef cnp.ndarray[cnp.int64_t, ndim=2] counts = np.zeros((q, q), dtype=np.int64)
    cdef long long c0, c1, a, w, hits
    cdef bint found
    for c0 in range(q):
        for c1 in range(q):
            hits = 0
            for a in range(q):
                found = False
                for w in range(q):
                    if w == c0 and w == (a + c1) % q:
                        found = True
                        break
                if found:
                    hits += 1
            counts[c0, c1] = hits
    return counts


def coloring_acceptance(strat1, strat2, pair_q1, pair_q2, pair_weight, accept):
    cdef cnp.int64_t[:, :] s1 = np.ascontiguousarray(strat1, dtype=np.int64)
    cdef cnp.int64_t[:, :] s2 = np.ascontiguousarray(strat2, dtype=np.int64)
    cdef cnp.int64_t[:] k1 = np.ascontiguousarray(pair_q1, dtype=np.int64)
    cdef cnp.int64_t[:] k2 = np.ascontiguousarray(pair_q2, dtype=np.int64)
    cdef cnp.int64_t[:] wt = np.ascontiguousarray(pair_weight, dtype=np.int64)
    cdef cnp.uint8_t[:, :, :] acc = np.ascontiguousarray(accept, dtype=np.uint8)
    cdef Py_ssize_t n_strat = s1.shape[0], n_pair = wt.shape[0], i, p
    out_arr = np.zeros(n_strat, dtype=np.int64)
    cdef cnp.int64_t[:] out = out_arr
    cdef cnp.int64_t total
    for i in range(n_strat):
        total = 0
        for p in range(n_pair):
            if acc[p, s1[i, k1[p]], s2[i, k2[p]]]:
                total += wt[p]
        out[i] = total
    return out_arr
