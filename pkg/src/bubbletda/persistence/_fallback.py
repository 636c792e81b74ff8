"""Pure-Python persistence backend.

Same contract as the compiled kernel in ``_kernel.pyx``: given a dense
distance matrix and a filtration cap, return the H0 merge times, the
number of surviving components, and the H1 pairs plus essential births.
Kept dependency-free (NumPy only) so the package works without a C
compiler; the compiled kernel is preferred when available.

Columns of the triangle boundary matrix are stored as Python integers
used as bitmasks over edge indices.  Column addition over Z/2 is then a
single XOR and the largest set bit (the pivot) comes from
``int.bit_length``.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

BACKEND_NAME = "python"


def _edges_sorted(dist: np.ndarray, cap: float):
    """Edge list (i, j, weight) with weight <= cap, sorted by
    (weight, i, j)."""
    n = dist.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    w = dist[iu, ju]
    keep = w <= cap
    iu, ju, w = iu[keep], ju[keep], w[keep]
    order = np.lexsort((ju, iu, w))
    return iu[order], ju[order], w[order]


def rips_h0_h1(dist: np.ndarray, cap: float):
    """Reduce the Vietoris-Rips filtration of ``dist`` up to ``cap``.

    Returns ``(h0_deaths, n_components, h1_births, h1_deaths,
    h1_essential)``.  ``h0_deaths`` are the positive merge times (one
    per non-singleton merge); zero-persistence pairs in either
    dimension are dropped.
    """
    dist = np.ascontiguousarray(dist, dtype=float)
    n = dist.shape[0]
    ei, ej, ew = _edges_sorted(dist, cap)
    m = len(ew)

    # H0 by Kruskal: an edge either merges two components (a death at
    # its weight) or closes a cycle (a candidate H1 birth).
    parent = list(range(n))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    h0_deaths = []
    is_cycle_edge = np.zeros(m, dtype=bool)
    for e in range(m):
        ra, rb = find(int(ei[e])), find(int(ej[e]))
        if ra == rb:
            is_cycle_edge[e] = True
        else:
            parent[max(ra, rb)] = min(ra, rb)
            if ew[e] > 0.0:
                h0_deaths.append(ew[e])
    n_components = sum(1 for v in range(n) if find(v) == v)

    # Triangles in filtration order (value = longest edge), ties broken
    # by vertex triple.  Only triangles within the cap enter; their
    # edges are then automatically present too.
    h1_births: list[float] = []
    h1_deaths: list[float] = []
    pivot_column: dict[int, int] = {}
    if n >= 3 and m >= 3:
        edge_id = np.full((n, n), -1, dtype=np.int64)
        edge_id[ei, ej] = np.arange(m)
        edge_id[ej,ei] = edge_id[ei, ej]

        tri = np.array(list(combinations(range(n), 3)), dtype=np.int64)
        ta, tb, tc = tri[:, 0], tri[:, 1], tri[:, 2]
        filt = np.maximum(np.maximum(dist[ta, tb], dist[ta, tc]), dist[tb, tc])
        keep = filt <= cap
        ta, tb, tc, filt = ta[keep], tb[keep], tc[keep], filt[keep]
        order = np.lexsort((tc, tb, ta, filt))

        for t in order:
            a, b, c = ta[t], tb[t], tc[t]
            column = (
                (1 << int(edge_id[a, b]))
                | (1 << int(edge_id[a, c]))
                | (1 << int(edge_id[b, c]))
            )
            while column:
                pivot = column.bit_length() - 1
                other = pivot_column.get(pivot)
                if other is None:
                    pivot_column[pivot] = column
                    birth = ew[pivot]
                    death = filt[t]
                    if birth < death:
                        h1_births.append(birth)
                        h1_deaths.append(death)
                    break
                column ^= other

    h1_essential = [
        ew[e] for e in range(m) if is_cycle_edge[e] and e not in pivot_column
    ]
    return (
        np.asarray(h0_deaths, dtype=float),
        int(n_components),
        np.asarray(h1_births, dtype=float),
        np.asarray(h1_deaths, dtype=float),
        np.asarray(h1_essential, dtype=float),
    )
