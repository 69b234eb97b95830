# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi kernel for stacks of small real symmetric matrices."""

import numpy as np
from libc.math cimport sqrt, fabs, hypot


cdef double _off_norm(double[:, ::1] a, Py_ssize_t n) nogil:
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += a[i, j] * a[i, j]
    return sqrt(acc)


cdef int _jacobi_one(double[:, ::1] a, double[:, ::1] v, bint want_v,
                     double tol_rel, int max_sweeps) nogil:
    """Diagonalise ``a`` in place; returns sweeps used or -1 on failure."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, r
    cdef double frob = 0.0, thresh, apq, theta, t, c, s, arp, arq
    cdef int sweep
    for p in range(n):
        for q in range(n):
            frob += a[p, q] * a[p, q]
    thresh = tol_rel * sqrt(frob)
    for sweep in range(max_sweeps + 1):
        if _off_norm(a, n) <= thresh:
            return sweep
        if sweep == max_sweeps:
            return -1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (fabs(theta) + hypot(theta, 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for r in range(n):
                    if r != p and r != q:
                        arp = a[r, p]
                        arq = a[r, q]
                        a[r, p] = c * arp - s * arq
                        a[r, q] = s * arp + c * arq
                        a[p, r] = a[r, p]
                        a[q, r] = a[r, q]
                a[p, p] = a[p, p] - t * apq
                a[q, q] = a[q, q] + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                if want_v:
                    for r in range(n):
                        arp = v[r, p]
                        arq = v[r, q]
                        v[r, p] = c * arp - s * arq
                        v[r, q] = s * arp + c * arq
    return -1


def jacobi_batch(a_in, double tol_rel, int max_sweeps, bint want_vectors):
    """Unsorted eigenvalues (and eigenvectors) of a ``(B, n, n)`` stack.

    Returns ``(w, v, sweeps)``; ``sweeps[b] == -1`` flags non-convergence.
    """
    cdef double[:, :, ::1] a = np.array(a_in, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t B = a.shape[0], n = a.shape[1], b, i
    cdef Py_ssize_t nv = B if want_vectors else 1
    v_shape = (nv, n, n)
    v_arr = np.zeros(v_shape, dtype=np.float64)
    cdef double[:, :, ::1] v = v_arr
    w_arr = np.empty((B, n), dtype=np.float64)
    cdef double[:, ::1] w = w_arr
    sweeps_arr = np.empty(B, dtype=np.intc)
    cdef int[::1] sweeps = sweeps_arr
    with nogil:
        for b in range(B):
            if want_vectors:
                for i in range(n):
                    v[b, i, i] = 1.0
                sweeps[b] = _jacobi_one(a[b], v[b], True, tol_rel, max_sweeps)
            else:
                sweeps[b] = _jacobi_one(a[b], v[0], False, tol_rel, max_sweeps)
            for i in range(n):
                w[b, i] = a[b, i, i]
    return w_arr, (v_arr if want_vectors else None), sweeps_arr
