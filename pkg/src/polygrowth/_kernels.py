"""Compiled backtracking kernels over a materialized ball (CSR adjacency).

Each kernel continues a fixed walk prefix and records every extension of it
(including the prefix itself), up to ``n_max`` steps.  Counts are int64: every
increment is +1, so a wrap would need ~9e18 recorded walks.
"""
import numpy as np
from numba import njit


@njit(nogil=True, cache=True)
def saw_kernel(indptr, indices, root_adjacent, dist, prefix, n_max, hist_n, counts, adj_counts, hist):
    nv = indptr.size - 1
    visited = np.zeros(nv, np.uint8)
    path = np.empty(n_max + 1, np.int64)
    ptr = np.empty(n_max + 1, np.int64)
    base = prefix.size - 1
    for i in range(prefix.size):
        path[i] = prefix[i]
        visited[prefix[i]] = 1
    depth = base
    v = path[depth]
    counts[depth] += 1
    if root_adjacent[v]:
        adj_counts[depth] += 1
    if depth == hist_n:
        hist[dist[v]] += 1
    if depth == n_max:
        return
    ptr[depth] = indptr[v]
    while depth >= base:
        v = path[depth]
        if ptr[depth] < indptr[v + 1]:
            u = indices[ptr[depth]]
            ptr[depth] += 1
            if visited[u]:
                continue
            depth += 1
            path[depth] = u
            counts[depth] += 1
            if root_adjacent[u]:
                adj_counts[depth] += 1
            if depth == hist_n:
                hist[dist[u]] += 1
            if depth < n_max:
                visited[u] = 1
                ptr[depth] = indptr[u]
            else:
                depth -= 1
        else:
            visited[v] = 0
            depth -= 1


@njit(nogil=True, cache=True)
def bridge_kernel(indptr, indices, heights, prefix, prefix_max, n_max, census_n, counts, census):
    """Walks with every non-initial height above the start; a prefix is a
    bridge when its last height equals the running maximum."""
    nv = indptr.size - 1
    visited = np.zeros(nv, np.uint8)
    path = np.empty(n_max + 1, np.int64)
    ptr = np.empty(n_max + 1, np.int64)
    runmax = np.empty(n_max + 1, np.int64)
    h0 = heights[prefix[0]]
    base = prefix.size - 1
    for i in range(prefix.size):
        path[i] = prefix[i]
        visited[prefix[i]] = 1
    depth = base
    runmax[depth] = prefix_max
    v = path[depth]
    if depth == 0 or heights[v] == prefix_max:
        counts[depth] += 1
        if depth == census_n:
            census[v] += 1
    if depth == n_max:
        return
    ptr[depth] = indptr[v]
    while depth >= base:
        v = path[depth]
        if ptr[depth] < indptr[v + 1]:
            u = indices[ptr[depth]]
            ptr[depth] += 1
            hu = heights[u]
            if visited[u] or hu <= h0:
                continue
            depth += 1
            path[depth] = u
            m = runmax[depth - 1]
            if hu >= m:
                m = hu
                counts[depth] += 1
                if depth == census_n:
                    census[u] += 1
            runmax[depth] = m
            if depth < n_max:
                visited[u] = 1
                ptr[depth] = indptr[u]
            else:
                depth -= 1
        else:
            visited[v] = 0
            depth -= 1
