"""Pure-Python reference kernels.

Every function here has a compiled twin in ``_kernels.pyx`` with the same
signature and the same floating-point operation order, so the two backends
agree bit-for-bit.  This module is the fallback when the extension is not
built and the ground truth the compiled kernels are tested against.

All kernels operate on *sorted* float64 arrays.
"""

from collections import deque

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

def dip_counts(x, start, stop):
    """Dip of the sorted block ``x[start:stop]`` in count units (2*n*D).

    The classical iteration: fit the greatest convex minorant and least
    concave majorant of the empirical step function, measure the largest
    discrepancy inside the current modal interval, shrink the interval and
    repeat.  Heights are row counts, so the returned value is ``2*n*D``
    where ``D`` is the dip in distribution-function units; the caller
    divides by ``2*n``.

    Degenerate blocks (fewer than 4 rows, or all values tied) return 1.0,
    i.e. the floor ``D = 1/(2n)``.
    """
    n = stop - start
    if n < 4 or x[stop - 1] == x[start]:
        return 1.0

    low = start
    high = stop - 1
    best = 1.0

    mn = np.empty(stop, dtype=np.intp)
    mj = np.empty(stop, dtype=np.intp)

    while True:
        # Predecessor pointers for the greatest convex minorant on
        # [low, high]: heights are indices, abscissae the sample values,
        # and a vertex is kept only while the chain stays strictly convex.
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

        # Successor pointers for the least concave majorant, symmetric.
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

        # Vertex lists: gcm descends high -> low, lcm ascends low -> high.
        gcm = [high]
        while gcm[-1] > low:
            gcm.append(mn[gcm[-1]])
        lcm = [low]
        while lcm[-1] < high:
            lcm.append(mj[lcm[-1]])

        l_gcm = len(gcm) - 1
        l_lcm = len(lcm) - 1
        ig = l_gcm
        ih = l_lcm

        # Largest distance between the two hull chains, walking both in
        # lockstep from the low end.
        if l_gcm > 1 or l_lcm > 1:
            d = 0.0
            ix = ig - 1
            iv = 1
            while True:
                gcmix = gcm[ix]
                lcmiv = lcm[iv]
                if gcmix > lcmiv:
                    # Next vertex upward belongs to the majorant chain:
                    # measure it against the minorant segment it falls in.
                    gcmi1 = gcm[ix + 1]
                    dn_x = x[gcmix] - x[gcmi1]
                    if dn_x > 0.0:
                        dx = (lcmiv - gcmi1 + 1) \
                            - (x[lcmiv] - x[gcmi1]) * (gcmix - gcmi1) / dn_x
                    else:
                        dx = float(lcmiv - gcmi1 + 1)
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
                        dx = float(lcmiv - gcmix + 1)
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
            # Both hulls are single chords: the step function is exactly
            # linear, only the floor remains.
            d = 1.0

        if d < best:
            break

        # Largest violation below the modal interval, against the convex
        # minorant.  Each hull segment contributes the worst step corner.
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

        # And above the modal interval, against the concave majorant.
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


# ---------------------------------------------------------------------------
# k-segment dip
# ---------------------------------------------------------------------------
#
# The k-segment dip of a sorted sample is the smallest achievable value of
#     max_j  (n_j / n) * dip(block_j)
# over contiguous splits into k blocks of at least 2 rows each.  In count
# units the per-block weight n_j * dip_j equals dip_counts(block)/2, and it
# never decreases when a block is extended (every constraint of the smaller
# block is kept).  That monotonicity turns the inner minimisation over a cut
# position into a search for the crossing point of a nondecreasing and a
# nonincreasing sequence.

def _cross_min(x, left_start, stop, lo_cut, hi_cut):
    """Minimum over cuts c in [lo_cut, hi_cut] of
    max(dip_counts(x, left_start, c), dip_counts(x, c, stop)).

    The left term is nondecreasing and the right nonincreasing in c, so
    their max is quasiconvex: binary-search the crossing, then compare the
    two candidate cuts around it.
    """
    lo = lo_cut
    hi = hi_cut
    while lo < hi:
        mid = (lo + hi) // 2
        if dip_counts(x, left_start, mid) < dip_counts(x, mid, stop):
            lo = mid + 1
        else:
            hi = mid
    a = dip_counts(x, left_start, lo)
    b = dip_counts(x, lo, stop)
    best = a if a > b else b
    if lo > lo_cut:
        a = dip_counts(x, left_start, lo - 1)
        b = dip_counts(x, lo - 1, stop)
        m = a if a > b else b
        if m < best:
            best = m
    return best


def kdip2_counts(x):
    """2-segment dip of the sorted array in count units (2*n*kdip)."""
    n = len(x)
    if n < 4:
        raise ValueError("2-segment dip needs at least 4 rows")
    return float(_cross_min(x, 0, n, 2, n - 2))


def kdip3_counts(x):
    """3-segment dip of the sorted array in count units (2*n*kdip)."""
    n = len(x)
    if n < 6:
        raise ValueError("3-segment dip needs at least 6 rows")
    best = np.inf
    for c1 in range(2, n - 3):
        left = dip_counts(x, 0, c1)
        if left >= best:
            # The first block only grows from here on.
            break
        inner = _cross_min(x, c1, n, c1 + 2, n - 2)
        cand = left if left > inner else inner
        if cand < best:
            best = cand
    return float(best)


# ---------------------------------------------------------------------------
# taut string
# ---------------------------------------------------------------------------

def taut_knots(t, lo, hi):
    """Shortest path through the vertical gates [lo[i], hi[i]] at t[i].

    The first and last gates must be degenerate (lo == hi) so both ends are
    pinned.  Returns the knot coordinates (kx, ky) of the piecewise-linear
    taut string, a funnel sweep over the gates: two monotone chains bound
    the set of taut continuations from the current committed point, and a
    chain vertex is committed as a knot whenever the cone between them
    closes.
    """
    m = len(t)
    if m < 2:
        raise ValueError("need at least two gates")
    if lo[0] != hi[0] or lo[m - 1] != hi[m - 1]:
        raise ValueError("end gates must be pinned (lo == hi)")

    ax = float(t[0])
    ay = float(lo[0])
    kx = [ax]
    ky = [ay]
    up = deque()  # upper-funnel vertices, slopes nondecreasing from apex
    dn = deque()  # lower-funnel vertices, slopes nonincreasing from apex

    def slope_ge(px, py, qx, qy, rx, ry, sx, sy):
        # slope(p->q) >= slope(r->s), cross-multiplied (all dx > 0)
        return (qy - py) * (sx - rx) >= (sy - ry) * (qx - px)

    for i in range(1, m):
        px = float(t[i])

        # --- upper gate endpoint ---------------------------------------
        py = float(hi[i])
        while up:
            bx, by = up[-1]
            if len(up) >= 2:
                cx, cy = up[-2]
            else:
                cx, cy = ax, ay
            # keep the chain convex: pop while slope(c->b) >= slope(b->p)
            if slope_ge(cx, cy, bx, by, bx, by, px, py):
                up.pop()
            else:
                break
        up.append((px, py))
        # cone closed from below: the string is forced onto the lower chain
        while dn:
            ux, uy = up[0]
            dx_, dy_ = dn[0]
            if slope_ge(ax, ay, ux, uy, ax, ay, dx_, dy_):
                break
            kx.append(dx_)
            ky.append(dy_)
            ax, ay = dx_, dy_
            dn.popleft()
            while len(up) >= 2:
                ux, uy = up[0]
                vx, vy = up[1]
                if slope_ge(ax, ay, ux, uy, ux, uy, vx, vy):
                    up.popleft()
                else:
                    break

        # --- lower gate endpoint ---------------------------------------
        py = float(lo[i])
        while dn:
            bx, by = dn[-1]
            if len(dn) >= 2:
                cx, cy = dn[-2]
            else:
                cx, cy = ax, ay
            # keep the chain concave: pop while slope(c->b) <= slope(b->p)
            if slope_ge(bx, by, px, py, cx, cy, bx, by):
                dn.pop()
            else:
                break
        dn.append((px, py))
        # cone closed from above: commit upper-chain vertices
        while up:
            ux, uy = up[0]
            dx_, dy_ = dn[0]
            if slope_ge(ax, ay, ux, uy, ax, ay, dx_, dy_):
                break
            kx.append(ux)
            ky.append(uy)
            ax, ay = ux, uy
            up.popleft()
            while len(dn) >= 2:
                ux, uy = dn[0]
                vx, vy = dn[1]
                if slope_ge(ux, uy, vx, vy, ax, ay, ux, uy):
                    dn.popleft()
                else:
                    break

    # The terminal point closes both chains; at most one of them still
    # holds intermediate vertices, and by convexity every one of them is a
    # binding bend.
    if len(up) > 1:
        for vx, vy in up:
            kx.append(vx)
            ky.append(vy)
    elif len(dn) > 1:
        for vx, vy in dn:
            kx.append(vx)
            ky.append(vy)
    else:
        vx, vy = up[-1]
        kx.append(vx)
        ky.append(vy)

    return np.asarray(kx, dtype=np.float64), np.asarray(ky, dtype=np.float64)


# ---------------------------------------------------------------------------
# one-dimensional k-medoids
# ---------------------------------------------------------------------------

def _seg_cost(x, pre, i, j):
    """Sum of |x[t] - median| over the sorted segment x[i..j] inclusive,
    using the lower median and prefix sums ``pre``."""
    med = (i + j) // 2
    xm = x[med]
    right = (pre[j + 1] - pre[med]) - (j - med + 1) * xm
    left = (med - i + 1) * xm - (pre[med + 1] - pre[i])
    return right + left


def _kmedoids_table(x, k):
    n = len(x)
    pre = np.empty(n + 1, dtype=np.float64)
    pre[0] = 0.0
    for i in range(n):
        pre[i + 1] = pre[i] + x[i]
    # suffix[g][i]: best cost of splitting x[i:] into g groups
    suffix = np.full((k + 1, n + 1), np.inf)
    for i in range(n - 1, -1, -1):
        suffix[1][i] = _seg_cost(x, pre, i, n - 1)
    for g in range(2, k + 1):
        for i in range(n - g, -1, -1):
            best = np.inf
            for c in range(i + 1, n - g + 2):
                v = _seg_cost(x, pre, i, c - 1) + suffix[g - 1][c]
                if v < best:
                    best = v
            suffix[g][i] = best
    return pre, suffix


def kmedoids_cost(x, k):
    """Minimum total L1 cost of partitioning the sorted array into k
    contiguous groups, each represented by its (lower) median."""
    n = len(x)
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    _, suffix = _kmedoids_table(x, k)
    return float(suffix[k][0])


def kmedoids_cuts(x, k):
    """Optimal contiguous k-group split of the sorted array.

    Returns (cuts, cost) where cuts lists the first index of each group
    after the first.  Reconstruction runs front to back taking the
    smallest cut that achieves the optimum, so cost ties resolve toward
    the leftmost first cut.
    """
    n = len(x)
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    pre, suffix = _kmedoids_table(x, k)
    cuts = []
    i = 0
    for g in range(k, 1, -1):
        for c in range(i + 1, n - g + 2):
            v = _seg_cost(x, pre, i, c - 1) + suffix[g - 1][c]
            if v == suffix[g][i]:
                cuts.append(c)
                i = c
                break
    return cuts, float(suffix[k][0])
