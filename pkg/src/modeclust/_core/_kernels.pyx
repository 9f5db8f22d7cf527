# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels.

Line-for-line mirror of ``_purepy`` with C loops and preallocated
workspaces.  The floating-point operation order is kept identical so both
backends return bit-identical values (the extension is compiled with
-ffp-contract=off to keep the compiler from fusing multiply-adds).
"""

from libc.math cimport HUGE_VAL
from libc.stdlib cimport free, malloc

import numpy as np

__all__ = [
    "dip_counts",
    "kdip2_counts",
    "kdip3_counts",
    "taut_knots",
    "kmedoids_cost",
    "kmedoids_cuts",
]


# ---------------------------------------------------------------------------
# dip statistic
# ---------------------------------------------------------------------------

cdef double _dip_core(const double* x, Py_ssize_t start, Py_ssize_t stop,
                      Py_ssize_t* mn, Py_ssize_t* mj,
                      Py_ssize_t* gcm, Py_ssize_t* lcm) noexcept nogil:
    cdef Py_ssize_t n = stop - start
    cdef Py_ssize_t low, high, j, mnj, mnmnj, mjj, mjmjj
    cdef Py_ssize_t l_gcm, l_lcm, ig, ih, ix, iv
    cdef Py_ssize_t gcmix, lcmiv, gcmi1, lcmiv1, jb, je, jj
    cdef double best, d, dx, dn_x, dip_l, dip_u, max_t, t, c, dnew

    if n < 4 or x[stop - 1] == x[start]:
        return 1.0

    low = start
    high = stop - 1
    best = 1.0

    while True:
        mn[low] = low
        for j in range(low + 1, high + 1):
            mn[j] = j - 1
            while True:
                mnj = mn[j]
                if mnj == low:
                    break
                mnmnj = mn[mnj]
                if (x[j] - x[mnj]) * (mnj - mnmnj) \
                        < (x[mnj] - x[mnmnj]) * (j - mnj):
                    break
                mn[j] = mnmnj

        mj[high] = high
        for j in range(high - 1, low - 1, -1):
            mj[j] = j + 1
            while True:
                mjj = mj[j]
                if mjj == high:
                    break
                mjmjj = mj[mjj]
                if (x[j] - x[mjj]) * (mjj - mjmjj) \
                        < (x[mjj] - x[mjmjj]) * (j - mjj):
                    break
                mj[j] = mjmjj

        l_gcm = 0
        gcm[0] = high
        while gcm[l_gcm] > low:
            gcm[l_gcm + 1] = mn[gcm[l_gcm]]
            l_gcm += 1
        l_lcm = 0
        lcm[0] = low
        while lcm[l_lcm] < high:
            lcm[l_lcm + 1] = mj[lcm[l_lcm]]
            l_lcm += 1

        ig = l_gcm
        ih = l_lcm

        if l_gcm > 1 or l_lcm > 1:
            d = 0.0
            ix = ig - 1
            iv = 1
            while True:
                gcmix = gcm[ix]
                lcmiv = lcm[iv]
                if gcmix > lcmiv:
                    gcmi1 = gcm[ix + 1]
                    dn_x = x[gcmix] - x[gcmi1]
                    if dn_x > 0.0:
                        dx = (lcmiv - gcmi1 + 1) \
                            - (x[lcmiv] - x[gcmi1]) * (gcmix - gcmi1) / dn_x
                    else:
                        dx = <double>(lcmiv - gcmi1 + 1)
                    iv += 1
                    if dx >= d:
                        d = dx
                        ig = ix + 1
                        ih = iv - 1
                else:
                    lcmiv1 = lcm[iv - 1]
                    dn_x = x[lcmiv] - x[lcmiv1]
                    if dn_x > 0.0:
                        dx = (x[gcmix] - x[lcmiv1]) * (lcmiv - lcmiv1) / dn_x \
                            - (gcmix - lcmiv1 - 1)
                    else:
                        dx = <double>(lcmiv - gcmix + 1)
                    ix -= 1
                    if dx >= d:
                        d = dx
                        ig = ix + 1
                        ih = iv
                if ix < 0:
                    ix = 0
                if iv > l_lcm:
                    iv = l_lcm
                if gcm[ix] == lcm[iv]:
                    break
        else:
            d = 1.0

        if d < best:
            break

        dip_l = 0.0
        for j in range(ig, l_gcm):
            max_t = 1.0
            jb = gcm[j + 1]
            je = gcm[j]
            if je - jb > 1 and x[je] != x[jb]:
                c = (je - jb) / (x[je] - x[jb])
                for jj in range(jb, je + 1):
                    t = (jj - jb + 1) - (x[jj] - x[jb]) * c
                    if max_t < t:
                        max_t = t
            if dip_l < max_t:
                dip_l = max_t

        dip_u = 0.0
        for j in range(ih, l_lcm):
            max_t = 1.0
            jb = lcm[j]
            je = lcm[j + 1]
            if je - jb > 1 and x[je] != x[jb]:
                c = (je - jb) / (x[je] - x[jb])
                for jj in range(jb, je + 1):
                    t = (x[jj] - x[jb]) * c - (jj - jb - 1)
                    if max_t < t:
                        max_t = t
            if dip_u < max_t:
                dip_u = max_t

        dnew = dip_l if dip_l > dip_u else dip_u
        if best < dnew:
            best = dnew

        if low == gcm[ig] and high == lcm[ih]:
            break
        low = gcm[ig]
        high = lcm[ih]

    return best


cdef struct _DipWork:
    Py_ssize_t* mn
    Py_ssize_t* mj
    Py_ssize_t* gcm
    Py_ssize_t* lcm


cdef int _work_alloc(_DipWork* w, Py_ssize_t size) except -1:
    w.mn = <Py_ssize_t*>malloc(size * sizeof(Py_ssize_t))
    w.mj = <Py_ssize_t*>malloc(size * sizeof(Py_ssize_t))
    w.gcm = <Py_ssize_t*>malloc(size * sizeof(Py_ssize_t))
    w.lcm = <Py_ssize_t*>malloc(size * sizeof(Py_ssize_t))
    if w.mn == NULL or w.mj == NULL or w.gcm == NULL or w.lcm == NULL:
        _work_free(w)
        raise MemoryError()
    return 0


cdef void _work_free(_DipWork* w) noexcept:
    free(w.mn)
    free(w.mj)
    free(w.gcm)
    free(w.lcm)


def dip_counts(const double[::1] x, Py_ssize_t start, Py_ssize_t stop):
    """Dip of the sorted block ``x[start:stop]`` in count units (2*n*D)."""
    if start < 0 or stop > x.shape[0] or start > stop:
        raise IndexError("block out of range")
    if stop - start < 4:
        return 1.0
    cdef _DipWork w
    cdef double out
    _work_alloc(&w, stop + 1)
    try:
        out = _dip_core(&x[0], start, stop, w.mn, w.mj, w.gcm, w.lcm)
    finally:
        _work_free(&w)
    return out


# ---------------------------------------------------------------------------
# k-segment dip
# ---------------------------------------------------------------------------

cdef double _cross_min_c(const double* x, Py_ssize_t left_start,
                         Py_ssize_t stop, Py_ssize_t lo_cut,
                         Py_ssize_t hi_cut, _DipWork* w) noexcept nogil:
    cdef Py_ssize_t lo = lo_cut
    cdef Py_ssize_t hi = hi_cut
    cdef Py_ssize_t mid
    cdef double a, b, best, m
    while lo < hi:
        mid = (lo + hi) // 2
        if _dip_core(x, left_start, mid, w.mn, w.mj, w.gcm, w.lcm) \
                < _dip_core(x, mid, stop, w.mn, w.mj, w.gcm, w.lcm):
            lo = mid + 1
        else:
            hi = mid
    a = _dip_core(x, left_start, lo, w.mn, w.mj, w.gcm, w.lcm)
    b = _dip_core(x, lo, stop, w.mn, w.mj, w.gcm, w.lcm)
    best = a if a > b else b
    if lo > lo_cut:
        a = _dip_core(x, left_start, lo - 1, w.mn, w.mj, w.gcm, w.lcm)
        b = _dip_core(x, lo - 1, stop, w.mn, w.mj, w.gcm, w.lcm)
        m = a if a > b else b
        if m < best:
            best = m
    return best


def kdip2_counts(const double[::1] x):
    """2-segment dip of the sorted array in count units (2*n*kdip)."""
    cdef Py_ssize_t n = x.shape[0]
    if n < 4:
        raise ValueError("2-segment dip needs at least 4 rows")
    cdef _DipWork w
    cdef double out
    _work_alloc(&w, n + 1)
    try:
        with nogil:
            out = _cross_min_c(&x[0], 0, n, 2, n - 2, &w)
    finally:
        _work_free(&w)
    return out


def kdip3_counts(const double[::1] x):
    """3-segment dip of the sorted array in count units (2*n*kdip)."""
    cdef Py_ssize_t n = x.shape[0]
    if n < 6:
        raise ValueError("3-segment dip needs at least 6 rows")
    cdef _DipWork w
    cdef double best, left, inner, cand
    cdef Py_ssize_t c1
    _work_alloc(&w, n + 1)
    try:
        with nogil:
            best = HUGE_VAL
            for c1 in range(2, n - 3):
                left = _dip_core(&x[0], 0, c1, w.mn, w.mj, w.gcm, w.lcm)
                if left >= best:
                    break
                inner = _cross_min_c(&x[0], c1, n, c1 + 2, n - 2, &w)
                cand = left if left > inner else inner
                if cand < best:
                    best = cand
    finally:
        _work_free(&w)
    return best


# ---------------------------------------------------------------------------
# taut string
# ---------------------------------------------------------------------------

def taut_knots(const double[::1] t, const double[::1] lo,
               const double[::1] hi):
    """Shortest path through the vertical gates [lo[i], hi[i]] at t[i].

    Same funnel sweep as the pure backend; the two chains live in flat
    arrays with head/tail cursors.
    """
    cdef Py_ssize_t m = t.shape[0]
    if m < 2:
        raise ValueError("need at least two gates")
    if lo.shape[0] != m or hi.shape[0] != m:
        raise ValueError("gate arrays must share a length")
    if lo[0] != hi[0] or lo[m - 1] != hi[m - 1]:
        raise ValueError("end gates must be pinned (lo == hi)")

    kx_arr = np.empty(m + 2, dtype=np.float64)
    ky_arr = np.empty(m + 2, dtype=np.float64)
    cdef double[::1] kx = kx_arr
    cdef double[::1] ky = ky_arr

    cdef double* ux = <double*>malloc(4 * (m + 2) * sizeof(double))
    if ux == NULL:
        raise MemoryError()
    cdef double* uy = ux + (m + 2)
    cdef double* dnx = uy + (m + 2)
    cdef double* dny = dnx + (m + 2)

    cdef Py_ssize_t uh = 0, ut = 0, dh = 0, dt = 0  # chain windows
    cdef Py_ssize_t nk = 0, i, v
    cdef double ax = t[0], ay = lo[0]
    cdef double px, py, bx, by, cx, cy, fx, fy, gx, gy

    kx[0] = ax
    ky[0] = ay
    nk = 1

    try:
        for i in range(1, m):
            px = t[i]

            # upper gate endpoint
            py = hi[i]
            while ut > uh:
                bx = ux[ut - 1]
                by = uy[ut - 1]
                if ut - uh >= 2:
                    cx = ux[ut - 2]
                    cy = uy[ut - 2]
                else:
                    cx = ax
                    cy = ay
                if (by - cy) * (px - bx) >= (py - by) * (bx - cx):
                    ut -= 1
                else:
                    break
            ux[ut] = px
            uy[ut] = py
            ut += 1
            while dt > dh:
                fx = ux[uh]
                fy = uy[uh]
                gx = dnx[dh]
                gy = dny[dh]
                if (fy - ay) * (gx - ax) >= (gy - ay) * (fx - ax):
                    break
                kx[nk] = gx
                ky[nk] = gy
                nk += 1
                ax = gx
                ay = gy
                dh += 1
                while ut - uh >= 2:
                    fx = ux[uh]
                    fy = uy[uh]
                    gx = ux[uh + 1]
                    gy = uy[uh + 1]
                    if (fy - ay) * (gx - fx) >= (gy - fy) * (fx - ax):
                        uh += 1
                    else:
                        break

            # lower gate endpoint
            py = lo[i]
            while dt > dh:
                bx = dnx[dt - 1]
                by = dny[dt - 1]
                if dt - dh >= 2:
                    cx = dnx[dt - 2]
                    cy = dny[dt - 2]
                else:
                    cx = ax
                    cy = ay
                if (py - by) * (bx - cx) >= (by - cy) * (px - bx):
                    dt -= 1
                else:
                    break
            dnx[dt] = px
            dny[dt] = py
            dt += 1
            while ut > uh:
                fx = ux[uh]
                fy = uy[uh]
                gx = dnx[dh]
                gy = dny[dh]
                if (fy - ay) * (gx - ax) >= (gy - ay) * (fx - ax):
                    break
                kx[nk] = fx
                ky[nk] = fy
                nk += 1
                ax = fx
                ay = fy
                uh += 1
                while dt - dh >= 2:
                    fx = dnx[dh]
                    fy = dny[dh]
                    gx = dnx[dh + 1]
                    gy = dny[dh + 1]
                    if (gy - fy) * (fx - ax) >= (fy - ay) * (gx - fx):
                        dh += 1
                    else:
                        break

        if ut - uh > 1:
            for v in range(uh, ut):
                kx[nk] = ux[v]
                ky[nk] = uy[v]
                nk += 1
        elif dt - dh > 1:
            for v in range(dh, dt):
                kx[nk] = dnx[v]
                ky[nk] = dny[v]
                nk += 1
        else:
            kx[nk] = ux[ut - 1]
            ky[nk] = uy[ut - 1]
            nk += 1
    finally:
        free(ux)

    return kx_arr[:nk].copy(), ky_arr[:nk].copy()


# ---------------------------------------------------------------------------
# one-dimensional k-medoids
# ---------------------------------------------------------------------------

cdef inline double _seg_cost_c(const double* x, const double* pre,
                               Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t med = (i + j) // 2
    cdef double xm = x[med]
    cdef double right = (pre[j + 1] - pre[med]) - (j - med + 1) * xm
    cdef double left = (med - i + 1) * xm - (pre[med + 1] - pre[i])
    return right + left


def _kmedoids_table_c(const double[::1] x, Py_ssize_t k):
    cdef Py_ssize_t n = x.shape[0]
    pre_arr = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] pre = pre_arr
    cdef Py_ssize_t i, g, c
    pre[0] = 0.0
    for i in range(n):
        pre[i + 1] = pre[i] + x[i]
    suffix_arr = np.full((k + 1, n + 1), np.inf)
    cdef double[:, ::1] suffix = suffix_arr
    cdef double best, v
    with nogil:
        for i in range(n - 1, -1, -1):
            suffix[1, i] = _seg_cost_c(&x[0], &pre[0], i, n - 1)
        for g in range(2, k + 1):
            for i in range(n - g, -1, -1):
                best = HUGE_VAL
                for c in range(i + 1, n - g + 2):
                    v = _seg_cost_c(&x[0], &pre[0], i, c - 1) + suffix[g - 1, c]
                    if v < best:
                        best = v
                suffix[g, i] = best
    return pre_arr, suffix_arr


def kmedoids_cost(const double[::1] x, Py_ssize_t k):
    """Minimum total L1 cost of a contiguous k-group split of the sorted
    array, each group represented by its (lower) median."""
    cdef Py_ssize_t n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    _, suffix = _kmedoids_table_c(x, k)
    return float(suffix[k, 0])


def kmedoids_cuts(const double[::1] x, Py_ssize_t k):
    """Optimal contiguous k-group split; ties resolve toward the leftmost
    first cut.  Returns (cuts, cost)."""
    cdef Py_ssize_t n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    pre_arr, suffix_arr = _kmedoids_table_c(x, k)
    cdef double[::1] pre = pre_arr
    cdef double[:, ::1] suffix = suffix_arr
    cdef Py_ssize_t i = 0, g, c
    cdef double v
    cuts = []
    for g in range(k, 1, -1):
        for c in range(i + 1, n - g + 2):
            v = _seg_cost_c(&x[0], &pre[0], i, c - 1) + suffix[g - 1, c]
            if v == suffix[g, i]:
                cuts.append(c)
                i = c
                break
    return cuts, float(suffix[k, 0])
