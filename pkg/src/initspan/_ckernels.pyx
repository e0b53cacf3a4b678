# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled dynamic programs for the linear-chain CRF.

Signature-compatible with initspan.kernels_py; see that module for the
score convention. Loops are written out explicitly because the label
alphabet is tiny (2 or 5) and sequence counts are large during training.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log

cnp.import_array()

BACKEND = "compiled"


cdef inline double _lse_row(double[::1] buf, Py_ssize_t n) noexcept nogil:
    cdef double m = buf[0]
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(1, n):
        if buf[i] > m:
            m = buf[i]
    for i in range(n):
        s += exp(buf[i] - m)
    return m + log(s)


def log_partition(double[:, ::1] emissions, double[:, ::1] trans,
                  double[::1] start, double[::1] end):
    cdef Py_ssize_t T = emissions.shape[0]
    cdef Py_ssize_t L = emissions.shape[1]
    cdef cnp.ndarray[double, ndim=1] alpha_arr = np.empty(L)
    cdef cnp.ndarray[double, ndim=1] prev_arr = np.empty(L)
    cdef cnp.ndarray[double, ndim=1] buf_arr = np.empty(L)
    cdef double[::1] alpha = alpha_arr, prev = prev_arr, buf = buf_arr
    cdef Py_ssize_t t, a, b

    for b in range(L):
        alpha[b] = start[b] + emissions[0, b]
    for t in range(1, T):
        for b in range(L):
            prev[b] = alpha[b]
        for b in range(L):
            for a in range(L):
                buf[a] = prev[a] + trans[a, b]
            alpha[b] = _lse_row(buf, L) + emissions[t, b]
    for b in range(L):
        buf[b] = alpha[b] + end[b]
    return _lse_row(buf, L)


def forward_backward(double[:, ::1] emissions, double[:, ::1] trans,
                     double[::1] start, double[::1] end):
    cdef Py_ssize_t T = emissions.shape[0]
    cdef Py_ssize_t L = emissions.shape[1]
    cdef cnp.ndarray[double, ndim=2] alpha_arr = np.empty((T, L))
    cdef cnp.ndarray[double, ndim=2] beta_arr = np.empty((T, L))
    cdef cnp.ndarray[double, ndim=2] unary_arr = np.empty((T, L))
    cdef cnp.ndarray[double, ndim=2] pair_arr = np.zeros((L, L))
    cdef cnp.ndarray[double, ndim=1] buf_arr = np.empty(L)
    cdef double[:, ::1] alpha = alpha_arr, beta = beta_arr
    cdef double[:, ::1] unary = unary_arr, pair = pair_arr
    cdef double[::1] buf = buf_arr
    cdef double log_z
    cdef Py_ssize_t t, a, b

    for b in range(L):
        alpha[0, b] = start[b] + emissions[0, b]
    for t in range(1, T):
        for b in range(L):
            for a in range(L):
                buf[a] = alpha[t - 1, a] + trans[a, b]
            alpha[t, b] = _lse_row(buf, L) + emissions[t, b]

    for a in range(L):
        beta[T - 1, a] = end[a]
    for t in range(T - 2, -1, -1):
        for a in range(L):
            for b in range(L):
                buf[b] = trans[a, b] + emissions[t + 1, b] + beta[t + 1, b]
            beta[t, a] = _lse_row(buf, L)

    for b in range(L):
        buf[b] = alpha[T - 1, b] + end[b]
    log_z = _lse_row(buf, L)

    for t in range(T):
        for b in range(L):
            unary[t, b] = exp(alpha[t, b] + beta[t, b] - log_z)
    for t in range(1, T):
        for a in range(L):
            for b in range(L):
                pair[a, b] += exp(
                    alpha[t - 1, a] + trans[a, b]
                    + emissions[t, b] + beta[t, b] - log_z
                )
    return log_z, unary_arr, pair_arr


def viterbi(double[:, ::1] emissions, double[:, ::1] trans,
            double[::1] start, double[::1] end):
    cdef Py_ssize_t T = emissions.shape[0]
    cdef Py_ssize_t L = emissions.shape[1]
    cdef cnp.ndarray[double, ndim=2] delta_arr = np.empty((T, L))
    cdef cnp.ndarray[cnp.int64_t, ndim=2] back_arr = np.zeros((T, L), dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] path_arr = np.zeros(T, dtype=np.int64)
    cdef double[:, ::1] delta = delta_arr
    cdef cnp.int64_t[:, ::1] back = back_arr
    cdef cnp.int64_t[::1] path = path_arr
    cdef double best, cand, sc
    cdef Py_ssize_t t, a, b, arg

    for b in range(L):
        delta[0, b] = start[b] + emissions[0, b]
    for t in range(1, T):
        for b in range(L):
            best = delta[t - 1, 0] + trans[0, b]
            arg = 0
            for a in range(1, L):
                cand = delta[t - 1, a] + trans[a, b]
                if cand > best:  # strict: ties keep the lowest index
                    best = cand
                    arg = a
            delta[t, b] = best + emissions[t, b]
            back[t, b] = arg

    best = delta[T - 1, 0] + end[0]
    arg = 0
    for b in range(1, L):
        cand = delta[T - 1, b] + end[b]
        if cand > best:
            best = cand
            arg = b
    path[T - 1] = arg
    for t in range(T - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return best, path_arr
