# distutils: language = c++
# cython: language_level=3
# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled persistence backend.

Same contract and same simplex ordering as ``_fallback``; the triangle
boundary columns are kept as sorted C++ vectors of edge indices and
added over Z/2 with a two-pointer symmetric difference.
"""

import numpy as np

cimport numpy as cnp
from libcpp.vector cimport vector

cnp.import_array()

BACKEND_NAME = "cython"


cdef long _find(long[::1] parent, long x) noexcept:
    cdef long root = x
    cdef long nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


cdef void _xor_merge(vector[long]& a, vector[long]& b, vector[long]& out) noexcept:
    # Symmetric difference of two ascending index vectors, into out.
    cdef size_t i = 0, j = 0
    out.clear()
    while i < a.size() and j < b.size():
        if a[i] < b[j]:
            out.push_back(a[i]); i += 1
        elif b[j] < a[i]:
            out.push_back(b[j]); j += 1
        else:
            i += 1; j += 1
    while i < a.size():
        out.push_back(a[i]); i += 1
    while j < b.size():
        out.push_back(b[j]); j += 1


def rips_h0_h1(cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] dist, double cap):
    """See ``_fallback.rips_h0_h1``; identical output, compiled loops."""
    cdef Py_ssize_t n = dist.shape[0]
    cdef double[:, ::1] d = dist

    # --- edges within the cap, sorted by (weight, i, j)
    cdef list e_list = []
    cdef Py_ssize_t i, j, k
    cdef double w
    for i in range(n):
        for j in range(i + 1, n):
            w = d[i, j]
            if w <= cap:
                e_list.append((w, i, j))
    e_list.sort()
    cdef Py_ssize_t m = len(e_list)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ew = np.empty(m, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ei = np.empty(m, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ej = np.empty(m, dtype=np.int64)
    cdef Py_ssize_t e
    for e in range(m):
        ew[e] = e_list[e][0]
        ei[e] = e_list[e][1]
        ej[e] = e_list[e][2]

    # --- H0: Kruskal over the sorted edges
    cdef cnp.ndarray[cnp.int64_t, ndim=1] parent_arr = np.arange(n, dtype=np.int64)
    cdef long[::1] parent = parent_arr
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] cycle_edge = np.zeros(m, dtype=np.uint8)
    cdef list h0_deaths = []
    cdef long ra, rb
    for e in range(m):
        ra = _find(parent, ei[e])
        rb = _find(parent, ej[e])
        if ra == rb:
            cycle_edge[e] = 1
        else:
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb
            if ew[e] > 0.0:
                h0_deaths.append(ew[e])
    cdef long n_components = 0
    cdef long v
    for v in range(n):
        if _find(parent, v) == v:
            n_components += 1

    # --- H1: reduce triangle boundaries in filtration order
    cdef list h1_births = []
    cdef list h1_deaths = []
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pivot_owner = np.full(
        max(m, 1), -1, dtype=np.int64
    )
    cdef long[::1] owner = pivot_owner
    cdef vector[vector[long]] stored
    cdef cnp.ndarray[cnp.int64_t, ndim=2] edge_id_arr
    cdef long[:, ::1] edge_id
    cdef list t_list
    cdef double f, dab, dac, dbc
    cdef long a, b, c, pivot, own
    cdef vector[long] col, scratch
    cdef Py_ssize_t t

    if n >= 3 and m >= 3:
        edge_id_arr = np.full((n, n), -1, dtype=np.int64)
        edge_id = edge_id_arr
        for e in range(m):
            edge_id[ei[e], ej[e]] = e
            edge_id[ej[e], ei[e]] = e

        t_list = []
        for i in range(n):
            for j in range(i + 1, n):
                dab = d[i, j]
                if dab > cap:
                    continue
                for k in range(j + 1, n):
                    dac = d[i, k]
                    dbc = d[j, k]
                    f = dab
                    if dac > f:
                        f = dac
                    if dbc > f:
                        f = dbc
                    if f <= cap:
                        t_list.append((f, i, j, k))
        t_list.sort()

        for t in range(len(t_list)):
            f = t_list[t][0]
            a = t_list[t][1]
            b = t_list[t][2]
            c = t_list[t][3]
            col.clear()
            col.push_back(edge_id[a, b])
            col.push_back(edge_id[a, c])
            col.push_back(edge_id[b, c])
            # edge ids are sorted by (weight, i, j); sort the column
            # ascending so back() is the pivot
            if col[0] > col[1]:
                col[0], col[1] = col[1], col[0]
            if col[1] > col[2]:
                col[1], col[2] = col[2], col[1]
            if col[0] > col[1]:
                col[0], col[1] = col[1], col[0]
            while col.size() > 0:
                pivot = col[col.size() - 1]
                own = owner[pivot]
                if own < 0:
                    owner[pivot] = <long> stored.size()
                    stored.push_back(col)
                    if ew[pivot] < f:
                        h1_births.append(ew[pivot])
                        h1_deaths.append(f)
                    break
                _xor_merge(col, stored[own], scratch)
                col.swap(scratch)

    cdef list h1_essential = []
    for e in range(m):
        if cycle_edge[e] and owner[e] < 0:
            h1_essential.append(ew[e])

    return (
        np.asarray(h0_deaths, dtype=np.float64),
        int(n_components),
        np.asarray(h1_births, dtype=np.float64),
        np.asarray(h1_deaths, dtype=np.float64),
        np.asarray(h1_essential, dtype=np.float64),
    )
