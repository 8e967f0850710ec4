"""Compiled inner loops for parent search.

All routines share the same distance, norm and half-space arithmetic
(sums accumulated axis by axis, no fused multiply-add) so that grid search,
brute force and incremental insertion produce bit-identical results.

Index conventions: ``-1`` is the origin (RST root), ``-2`` is "no parent"
(DSF).  Candidates are ordered by squared distance, then squared norm, then
coordinates lexicographically, then index.
"""

import numpy as np
from numba import njit

ROOT = -1
NONE = -2

_SHRINK = 1.0 - 1e-9


@njit(cache=True)
def sqdist(points, i, z):
    acc = 0.0
    for k in range(points.shape[1]):
        diff = points[i, k] - z[k]
        acc += diff * diff
    return acc


@njit(cache=True)
def sqdist_idx(points, i, j):
    acc = 0.0
    for k in range(points.shape[1]):
        diff = points[i, k] - points[j, k]
        acc += diff * diff
    return acc


@njit(cache=True)
def norms2(points):
    n, d = points.shape
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        for k in range(d):
            acc += points[i, k] * points[i, k]
        out[i] = acc
    return out


@njit(cache=True)
def behind(e, points, i, j):
    """<e, p_j - p_i> <= 0."""
    acc = 0.0
    for k in range(points.shape[1]):
        acc += e[k] * (points[j, k] - points[i, k])
    return acc <= 0.0


@njit(cache=True)
def _coord(points, j, k):
    if j < 0:
        return 0.0
    return points[j, k]


@njit(cache=True)
def key_less(points, norm2, a, b):
    """(norm^2, coordinates) of a strictly below that of b; -1 is the origin."""
    na = 0.0 if a < 0 else norm2[a]
    nb = 0.0 if b < 0 else norm2[b]
    if na < nb:
        return True
    if na > nb:
        return False
    for k in range(points.shape[1]):
        ca = _coord(points, a, k)
        cb = _coord(points, b, k)
        if ca < cb:
            return True
        if ca > cb:
            return False
    return False


@njit(cache=True)
def better(points, norm2, d2a, a, d2b, b):
    if d2a < d2b:
        return True
    if d2a > d2b:
        return False
    if a == b:
        return False
    if key_less(points, norm2, a, b):
        return True
    if key_less(points, norm2, b, a):
        return False
    return a < b


# ---------------------------------------------------------------- brute force

@njit(cache=True)
def rst_brute(points, norm2):
    n = points.shape[0]
    parent = np.empty(n, np.int64)
    best = np.empty(n)
    for i in range(n):
        bj = ROOT
        bd = norm2[i]
        for j in range(n):
            if j == i or not key_less(points, norm2, j, i):
                continue
            d2 = sqdist_idx(points, i, j)
            if better(points, norm2, d2, j, bd, bj):
                bd = d2
                bj = j
        parent[i] = bj
        best[i] = bd
    return parent, best


@njit(cache=True)
def dsf_brute(points, norm2, e):
    n = points.shape[0]
    parent = np.empty(n, np.int64)
    best = np.empty(n)
    for i in range(n):
        bj = NONE
        bd = np.inf
        for j in range(n):
            if j == i or not behind(e, points, i, j):
                continue
            d2 = sqdist_idx(points, i, j)
            if better(points, norm2, d2, j, bd, bj):
                bd = d2
                bj = j
        parent[i] = bj
        best[i] = bd
    return parent, best


# ----------------------------------------------------------------- grid index

@njit(cache=True)
def grid_cells(points, lo, h, ncell):
    n, d = points.shape
    out = np.empty(n, np.int64)
    for i in range(n):
        lin = 0
        for k in range(d):
            c = int(np.floor((points[i, k] - lo[k]) / h))
            if c < 0:
                c = 0
            elif c >= ncell[k]:
                c = ncell[k] - 1
            lin = lin * ncell[k] + c
        out[i] = lin
    return out


@njit(cache=True)
def grid_csr(cells, ntotal):
    counts = np.zeros(ntotal + 1, np.int64)
    for c in cells:
        counts[c + 1] += 1
    for c in range(ntotal):
        counts[c + 1] += counts[c]
    items = np.empty(cells.size, np.int64)
    fill = counts[:-1].copy()
    for i in range(cells.size):
        c = cells[i]
        items[fill[c]] = i
        fill[c] += 1
    return counts, items


@njit(cache=True)
def _query_cell(x, lo, h, ncell):
    d = x.size
    c = np.empty(d, np.int64)
    for k in range(d):
        v = np.floor((x[k] - lo[k]) / h)
        if v < 0:
            v = 0
        elif v > ncell[k] - 1:
            v = ncell[k] - 1
        c[k] = int(v)
    return c


@njit(cache=True)
def _max_shell(c, ncell):
    m = 0
    for k in range(c.size):
        a = c[k]
        b = ncell[k] - 1 - c[k]
        if a > m:
            m = a
        if b > m:
            m = b
    return m


@njit(cache=True)
def _ring_cells(c, k, ncell):
    """Linear ids of grid cells at Chebyshev distance exactly k from c."""
    d = c.size
    lo = np.empty(d, np.int64)
    hi = np.empty(d, np.int64)
    for a in range(d):
        lo[a] = max(0, c[a] - k)
        hi[a] = min(ncell[a] - 1, c[a] + k)
    out = []
    if k == 0:
        lin = 0
        for a in range(d):
            lin = lin * ncell[a] + c[a]
        out.append(lin)
        return out
    # odometer over the first d-1 axes; the last axis is either the full
    # range (ring reached already) or just its two faces
    idx = lo[:d - 1].copy()
    last = d - 1
    while True:
        on_ring = False
        base = 0
        for a in range(d - 1):
            if abs(idx[a] - c[a]) == k:
                on_ring = True
            base = base * ncell[a] + idx[a]
        base = base * ncell[last]
        if on_ring:
            for v in range(lo[last], hi[last] + 1):
                out.append(base + v)
        else:
            v = c[last] - k
            if v >= 0:
                out.append(base + v)
            v = c[last] + k
            if v <= ncell[last] - 1:
                out.append(base + v)
        a = d - 2
        while a >= 0:
            idx[a] += 1
            if idx[a] <= hi[a]:
                break
            idx[a] = lo[a]
            a -= 1
        if a < 0:
            break
    return out


@njit(cache=True)
def shell_members(x, k, lo, h, ncell, start, items):
    c = _query_cell(x, lo, h, ncell)
    res = []
    for cell in _ring_cells(c, k, ncell):
        for s in range(start[cell], start[cell + 1]):
            res.append(items[s])
    return np.array(res, np.int64)


@njit(cache=True)
def _grid_search(points, norm2, i, radial, e, lo, h, ncell, start, items):
    x = points[i]
    if radial:
        bj = ROOT
        bd = norm2[i]
    else:
        bj = NONE
        bd = np.inf
    c = _query_cell(x, lo, h, ncell)
    kmax = _max_shell(c, ncell)
    for k in range(kmax + 1):
        if k >= 2:
            lb = (k - 1) * h
            if bd < lb * lb * _SHRINK:
                break
        for cell in _ring_cells(c, k, ncell):
            for s in range(start[cell], start[cell + 1]):
                j = items[s]
                if j == i:
                    continue
                if radial:
                    if not key_less(points, norm2, j, i):
                        continue
                elif not behind(e, points, i, j):
                    continue
                d2 = sqdist_idx(points, i, j)
                if better(points, norm2, d2, j, bd, bj):
                    bd = d2
                    bj = j
    return bj, bd


@njit(cache=True)
def grid_build_all(points, norm2, radial, e, lo, h, ncell, start, items):
    n = points.shape[0]
    parent = np.empty(n, np.int64)
    best = np.empty(n)
    for i in range(n):
        bj, bd = _grid_search(points, norm2, i, radial, e, lo, h, ncell, start, items)
        parent[i] = bj
        best[i] = bd
    return parent, best


# ------------------------------------------------------------------ insertion

@njit(cache=True)
def insert_last(points, norm2, parent, best, radial, e):
    """Parents after appending the last row of ``points`` to a built graph.

    ``parent``/``best`` describe the graph on the first n-1 rows.  Returns
    fresh arrays of length n; only points whose parent can change are
    touched, which gives exactly what a full rebuild would.
    """
    n = points.shape[0]
    z = n - 1
    new_parent = np.empty(n, np.int64)
    new_best = np.empty(n)
    if radial:
        bj = ROOT
        bd = norm2[z]
    else:
        bj = NONE
        bd = np.inf
    for j in range(z):
        if radial:
            if not key_less(points, norm2, j, z):
                continue
        elif not behind(e, points, z, j):
            continue
        d2 = sqdist_idx(points, z, j)
        if better(points, norm2, d2, j, bd, bj):
            bd = d2
            bj = j
    new_parent[z] = bj
    new_best[z] = bd
    for i in range(z):
        new_parent[i] = parent[i]
        new_best[i] = best[i]
        if radial:
            if not key_less(points, norm2, z, i):
                continue
        elif not behind(e, points, i, z):
            continue
        d2 = sqdist_idx(points, i, z)
        if better(points, norm2, d2, z, best[i], parent[i]):
            new_parent[i] = z
            new_best[i] = d2
    return new_parent, new_best


@njit(cache=True)
def changed_mask(parent_old, parent_new):
    n = parent_old.size
    out = np.zeros(parent_new.size, np.bool_)
    for i in range(n):
        out[i] = parent_old[i] != parent_new[i]
    for i in range(n, parent_new.size):
        out[i] = True
    return out


@njit(cache=True)
def radial_query(points, norm2, x, xn2):
    """Radial parent of an external point x (not part of ``points``)."""
    bj = ROOT
    bd = xn2
    n, d = points.shape
    for j in range(n):
        # key(p_j) < key(x)
        if norm2[j] > xn2:
            continue
        if norm2[j] == xn2:
            less = False
            for k in range(d):
                if points[j, k] < x[k]:
                    less = True
                    break
                if points[j, k] > x[k]:
                    break
            if not less:
                continue
        d2 = sqdist(points, j, x)
        if better(points, norm2, d2, j, bd, bj):
            bd = d2
            bj = j
    return bj, bd


@njit(cache=True)
def directed_query(points, norm2, x, e):
    """Directed parent of an external point x (not part of ``points``)."""
    bj = NONE
    bd = np.inf
    n, d = points.shape
    for j in range(n):
        acc = 0.0
        for k in range(d):
            acc += e[k] * (points[j, k] - x[k])
        if acc > 0.0:
            continue
        d2 = sqdist(points, j, x)
        if better(points, norm2, d2, j, bd, bj):
            bd = d2
            bj = j
    return bj, bd
