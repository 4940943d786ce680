# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled voting-step kernel.

Mirrors _kernels_py exactly: identical sampling rule (truncate u*degree,
clamp to degree-1) so compiled and pure-python runs are bit-identical.
"""

import numpy as np

cimport numpy as cnp


def step_csr(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
             cnp.uint8_t[::1] colours, cnp.float64_t[:, ::1] u,
             int k, bint keep_own, cnp.float64_t[::1] tie_u):
    cdef Py_ssize_t n = colours.shape[0]
    out = np.empty(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] out_v = out
    cdef Py_ssize_t v
    cdef int j, s
    cdef cnp.int64_t base, deg, idx
    cdef cnp.uint8_t c0 = 0, c1 = 0, cj = 0
    for v in range(n):
        base = indptr[v]
        deg = indptr[v + 1] - base
        s = 0
        for j in range(k):
            idx = <cnp.int64_t>(u[v, j] * deg)
            if idx >= deg:
                idx = deg - 1
            cj = colours[indices[base + idx]]
            if j == 0:
                c0 = cj
            elif j == 1:
                c1 = cj
            s += cj
        if k == 3:
            out_v[v] = 1 if s >= 2 else 0
        elif k == 1:
            out_v[v] = c0
        else:
            if s == 2:
                out_v[v] = 1
            elif s == 0:
                out_v[v] = 0
            elif keep_own:
                out_v[v] = colours[v]
            else:
                out_v[v] = c1 if tie_u[v] >= 0.5 else c0
    return out


def step_complete(Py_ssize_t n, cnp.uint8_t[::1] colours, cnp.float64_t[:, ::1] u,
                  int k, bint keep_own, cnp.float64_t[::1] tie_u):
    cdef Py_ssize_t m = n - 1
    out = np.empty(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] out_v = out
    cdef Py_ssize_t v
    cdef int j, s
    cdef cnp.int64_t idx
    cdef cnp.uint8_t c0 = 0, c1 = 0, cj = 0
    for v in range(n):
        s = 0
        for j in range(k):
            idx = <cnp.int64_t>(u[v, j] * m)
            if idx >= m:
                idx = m - 1
            if idx >= v:
                idx += 1
            cj = colours[idx]
            if j == 0:
                c0 = cj
            elif j == 1:
                c1 = cj
            s += cj
        if k == 3:
            out_v[v] = 1 if s >= 2 else 0
        elif k == 1:
            out_v[v] = c0
        else:
            if s == 2:
                out_v[v] = 1
            elif s == 0:
                out_v[v] = 0
            elif keep_own:
                out_v[v] = colours[v]
            else:
                out_v[v] = c1 if tie_u[v] >= 0.5 else c0
    return out
