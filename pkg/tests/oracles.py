"""Independent reference implementations the test-suite measures against.

Slow, simple, and where possible exact.  The centrepiece is a rational
linear-programming oracle for the dip statistic: the distance from an
empirical distribution function to the nearest unimodal distribution
function, minimised placement by placement over every position the mode
could take.  Nothing here shares code with the fast library paths.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from modeclust._core import dip_counts

# ---------------------------------------------------------------------------
# exact simplex (dense tableau, two-phase, Dantzig with a Bland fallback)
# ---------------------------------------------------------------------------

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _run_simplex(tab, cost, basis, bland_after=400):
    """Iterate ``min cost`` on an inequality-standard-form tableau in place.

    ``tab`` rows are lists of Fractions ending in the right-hand side;
    ``cost`` is the reduced-cost row (same width), its last cell holding the
    negated objective value.  Dantzig's rule runs first and Bland's rule
    takes over permanently if the pivot count suggests cycling.
    """
    m = len(tab)
    width = len(cost) - 1
    pivots = 0
    while True:
        use_bland = pivots >= bland_after
        col = -1
        best = _ZERO
        for j in range(width):
            cj = cost[j]
            if cj < best:
                col = j
                if use_bland:
                    break
                best = cj
        if col < 0:
            return
        row = -1
        ratio = None
        for i in range(m):
            a = tab[i][col]
            if a > 0:
                r = tab[i][-1] / a
                if ratio is None or r < ratio or (r == ratio and basis[i] < basis[row]):
                    ratio = r
                    row = i
        if row < 0:
            raise ArithmeticError("unbounded program")
        piv = tab[row][col]
        if piv != _ONE:
            tab[row] = [v / piv for v in tab[row]]
        prow = tab[row]
        for i in range(m):
            if i != row:
                f = tab[i][col]
                if f:
                    tab[i] = [v - f * p for v, p in zip(tab[i], prow)]
        f = cost[col]
        if f:
            cost[:] = [v - f * p for v, p in zip(cost, prow)]
        basis[row] = col
        pivots += 1


def simplex_min(objective, rows, rhs):
    """Exact ``min objective . x`` subject to ``rows . x <= rhs``, ``x >= 0``.

    Everything is Fraction arithmetic; returns the optimal value or raises
    if the program is infeasible or unbounded.
    """
    m = len(rows)
    nv = len(objective)
    flipped = [rhs[i] < 0 for i in range(m)]
    n_art = sum(flipped)
    width = nv + m + n_art

    tab = []
    basis = []
    art_cols = []
    seen = 0
    for i in range(m):
        sign = -1 if flipped[i] else 1
        row = [sign * Fraction(v) for v in rows[i]]
        row.extend([_ZERO] * (m + n_art))
        row.append(sign * Fraction(rhs[i]))
        row[nv + i] = Fraction(sign)
        if flipped[i]:
            col = nv + m + seen
            row[col] = _ONE
            art_cols.append(col)
            basis.append(col)
            seen += 1
        else:
            basis.append(nv + i)
        tab.append(row)

    if n_art:
        # Phase 1: minimise the artificial total, expressed through the
        # starting basis (every artificial row contributes negatively).
        cost = [_ZERO] * (width + 1)
        for i in range(m):
            if basis[i] in art_cols:
                cost = [c - v for c, v in zip(cost, tab[i])]
        for col in art_cols:
            cost[col] += _ONE  # unit objective on the artificials themselves
        _run_simplex(tab, cost, basis)
        if -cost[-1] != 0:
            raise ArithmeticError("infeasible program")
        for i in range(m):
            if basis[i] in art_cols:
                # Degenerate leftover: swap any usable original column in.
                for j in range(nv + m):
                    if tab[i][j] != 0:
                        piv = tab[i][j]
                        tab[i] = [v / piv for v in tab[i]]
                        for ii in range(m):
                            if ii != i and tab[ii][j]:
                                f = tab[ii][j]
                                tab[ii] = [v - f * p for v, p in zip(tab[ii], tab[i])]
                        basis[i] = j
                        break
        for row in tab:
            for col in art_cols:
                row[col] = _ZERO

    cost = [Fraction(v) for v in objective] + [_ZERO] * (m + n_art) + [_ZERO]
    for i in range(m):
        f = cost[basis[i]]
        if f:
            cost = [c - f * v for c, v in zip(cost, tab[i])]
    _run_simplex(tab, cost, basis)
    return -cost[-1]


# ---------------------------------------------------------------------------
# exact dip oracle
# ---------------------------------------------------------------------------

def dyadic_sample(rng, n, grid=1 << 16):
    """Sorted random sample on the grid k/2^16, ties allowed.

    Dyadic values convert to Fractions with one shared small denominator,
    keeping the exact solver's integers tiny.
    """
    vals = rng.integers(0, grid + 1, size=n)
    return np.sort(vals.astype(np.float64) / grid)


def _support(values):
    """Distinct sorted support as Fractions plus multiplicities.

    The support is shifted and rescaled to integers (the dip only depends
    on the ordering geometry, not the units), which keeps every numerator
    and denominator in the exact solver small.
    """
    zs = []
    counts = []
    for v in sorted(values):
        f = Fraction(float(v))
        if zs and f == zs[-1]:
            counts[-1] += 1
        else:
            zs.append(f)
            counts.append(1)
    scale = math.lcm(*(f.denominator for f in zs))
    z0 = zs[0]
    return [(f - z0) * scale for f in zs], counts


class _Program:
    """One mode placement: minimise d over its shape constraints."""

    def __init__(self, nv, d_index):
        self.nv = nv
        self.d = d_index
        self.rows = []
        self.rhs = []

    def add(self, pairs, rhs):
        row = [_ZERO] * self.nv
        for idx, coef in pairs:
            row[idx] += coef
        self.rows.append(row)
        self.rhs.append(rhs)

    def float_value(self):
        c = np.zeros(self.nv)
        c[self.d] = 1.0
        res = linprog(
            c,
            A_ub=np.array(self.rows, dtype=float),
            b_ub=np.array(self.rhs, dtype=float),
            bounds=(0, None),
            method="highs",
        )
        if not res.success:
            raise AssertionError(f"prescreen failed: {res.message}")
        return res.fun

    def exact_value(self):
        obj = [_ZERO] * self.nv
        obj[self.d] = _ONE
        return simplex_min(obj, self.rows, self.rhs)


def _mode_programs(z, counts, include_dominated=False):
    """Yield one linear program per mode placement.

    Variables are the fitted distribution's values at the support points,
    the band half-width ``d``, and the left limit at the mode, where the
    fitted distribution may carry an atom.  One program per support point
    suffices: a mode anywhere in a gap is dominated by the program at the
    adjacent support point, whose feasible set contains it (take the left
    limit equal to the value there).  ``include_dominated`` adds the gap
    programs anyway so the domination argument itself can be tested.
    """
    r = len(z)
    n = sum(counts)
    cum = [0]
    for c in counts:
        cum.append(cum[-1] + c)
    frac = [Fraction(c, n) for c in cum]
    gaps = [z[i + 1] - z[i] for i in range(r - 1)]
    d = r  # variable index of the band half-width

    def base(extra_h=False):
        prog = _Program(r + 2 if extra_h else r + 1, d)
        prog.add([(r - 1, _ONE)], _ONE)  # the fit never exceeds one
        return prog

    def band_at(prog, i):
        # both one-sided limits at support point i stay inside the band
        prog.add([(i, -_ONE), (d, -_ONE)], -frac[i + 1])
        prog.add([(i, _ONE), (d, -_ONE)], frac[i])

    def seg(i, hvar=None):
        # rise of segment i as coefficient pairs; hvar swaps in the left
        # limit at an atom for the segment ending there
        top = hvar if hvar is not None else i + 1
        return ((top, _ONE), (i, -_ONE))

    def chain_convex(prog, segs, hvar_at=None):
        def rise(i):
            return seg(i, hvar_at[1] if hvar_at and i == hvar_at[0] else None)

        if not segs:
            return
        first = rise(segs[0])
        prog.add([(v, -c) for v, c in first], _ZERO)  # first slope >= 0
        for a, b in zip(segs, segs[1:]):
            # slope_a <= slope_b, cross-multiplied by the positive gaps
            pairs = [(v, c * gaps[b]) for v, c in rise(a)]
            pairs += [(v, -c * gaps[a]) for v, c in rise(b)]
            prog.add(pairs, _ZERO)

    def chain_concave(prog, segs, hvar_at=None):
        def rise(i):
            return seg(i, hvar_at[1] if hvar_at and i == hvar_at[0] else None)

        if not segs:
            return
        last = rise(segs[-1])
        prog.add([(v, -c) for v, c in last], _ZERO)  # last slope >= 0
        for a, b in zip(segs, segs[1:]):
            # slope_a >= slope_b
            pairs = [(v, -c * gaps[b]) for v, c in rise(a)]
            pairs += [(v, c * gaps[a]) for v, c in rise(b)]
            prog.add(pairs, _ZERO)

    all_segs = list(range(r - 1))

    if include_dominated:
        # mode off a support point: convex up to some split, concave after
        for split in range(r):
            prog = base()
            for i in range(r):
                band_at(prog, i)
            chain_convex(prog, all_segs[:split])
            chain_concave(prog, all_segs[split:])
            yield prog

    # mode at support point j, with an optional atom there
    for j in range(r):
        prog = base(extra_h=True)
        h = r + 1
        for i in range(r):
            if i == j:
                continue
            band_at(prog, i)
        prog.add([(j, -_ONE), (d, -_ONE)], -frac[j + 1])
        prog.add([(j, _ONE), (d, -_ONE)], frac[j + 1])
        prog.add([(h, -_ONE), (d, -_ONE)], -frac[j])
        prog.add([(h, _ONE), (d, -_ONE)], frac[j])
        prog.add([(h, _ONE), (j, -_ONE)], _ZERO)  # atom is nonnegative
        if j > 0:
            prog.add([(j - 1, _ONE), (h, -_ONE)], _ZERO)  # monotone into the atom
        chain_convex(prog, all_segs[:j], hvar_at=(j - 1, h) if j > 0 else None)
        chain_concave(prog, all_segs[j:])
        yield prog


def exact_dip(values, screen_slack=1e-7, include_dominated=False):
    """Exact dip of a 1-D sample as a Fraction (distribution-function units).

    Every placement program is first solved in floating point; the
    contenders within ``screen_slack`` of the apparent optimum are then
    settled exactly, and the two routes must agree to the same slack.
    """
    z, counts = _support(values)
    if len(z) == 1:
        return _ZERO  # a point mass is itself unimodal
    progs = list(_mode_programs(z, counts, include_dominated))
    screened = [p.float_value() for p in progs]
    best_float = min(screened)
    exact = [
        p.exact_value()
        for p, v in zip(progs, screened)
        if v <= best_float + screen_slack
    ]
    out = min(exact)
    if abs(float(out) - best_float) > screen_slack:
        raise AssertionError("floating prescreen and exact optimum disagree")
    return out


# ---------------------------------------------------------------------------
# split-search oracles
# ---------------------------------------------------------------------------

def exhaustive_kdip_counts(x, k):
    """Multi-segment dip by trying every contiguous split, no pruning.

    Splits the sorted array into ``k`` blocks of at least two rows and
    returns the smallest achievable worst block dip, in count units.
    """
    n = len(x)
    if n < 2 * k:
        raise ValueError("need at least 2k rows")
    best = math.inf
    for cuts in itertools.combinations(range(2, n - 1), k - 1):
        bounds = (0,) + cuts + (n,)
        if any(b - a < 2 for a, b in zip(bounds, bounds[1:])):
            continue
        worst = max(dip_counts(x, a, b) for a, b in zip(bounds, bounds[1:]))
        if worst < best:
            best = worst
    return best


def exhaustive_kmedoids_cost(x, k):
    """True k-medoids cost: every choice of k representative points,
    every point assigned to its nearest representative."""
    n = len(x)
    best = math.inf
    for meds in itertools.combinations(range(n), k):
        cost = sum(min(abs(x[i] - x[j]) for j in meds) for i in range(n))
        if cost < best:
            best = cost
    return best


def exhaustive_max_weight_independent(neighbors, weights):
    """Exact maximum-weight independent set by subset enumeration."""
    n = len(weights)
    best = -math.inf
    best_set = ()
    for mask in range(1 << n):
        members = [i for i in range(n) if mask >> i & 1]
        ok = all(j not in neighbors[i] for i in members for j in members if j > i)
        if not ok:
            continue
        w = sum(weights[i] for i in members)
        if w > best:
            best = w
            best_set = tuple(members)
    return best, best_set


# ---------------------------------------------------------------------------
# taut-string certificate
# ---------------------------------------------------------------------------

def check_taut_certificate(t, lo, hi, kx, ky, tol=1e-9):
    """Assert (kx, ky) is the shortest path through the vertical gates.

    The characterisation is local: the polyline stays inside every gate,
    ends are pinned, and each genuine bend rests on the gate side that
    blocks shortening -- a slope drop on a lower endpoint, a slope rise on
    an upper one.  For a tube those conditions are also sufficient.
    """
    t = np.asarray(t, dtype=float)
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    assert kx[0] == t[0] and kx[-1] == t[-1]
    assert abs(ky[0] - lo[0]) <= tol and abs(ky[-1] - lo[-1]) <= tol
    assert np.all(np.diff(kx) > 0), "knot abscissae must increase"

    path = np.interp(t, kx, ky)
    assert np.all(path >= np.asarray(lo) - tol), "string dips below a gate"
    assert np.all(path <= np.asarray(hi) + tol), "string rises above a gate"

    gate_of = np.searchsorted(t, kx)
    assert np.all(t[gate_of] == kx), "every knot must sit on a gate"
    slopes = np.diff(ky) / np.diff(kx)
    for v in range(1, len(kx) - 1):
        g = gate_of[v]
        if slopes[v] < slopes[v - 1] - 1e-12:
            assert abs(ky[v] - lo[g]) <= tol, f"downward bend off the lower bound at {kx[v]}"
        elif slopes[v] > slopes[v - 1] + 1e-12:
            assert abs(ky[v] - hi[g]) <= tol, f"upward bend off the upper bound at {kx[v]}"


# ---------------------------------------------------------------------------
# order-statistic means and partition-comparison references
# ---------------------------------------------------------------------------

def order_stat_mean_exact(sorted_values, j, m):
    """E[X_(j:m)] under resampling without replacement, by the direct
    combinatorial weights, exact up to the float inputs."""
    n = len(sorted_values)
    den = math.comb(n, m)
    total = Fraction(0)
    for i in range(1, n + 1):
        w = math.comb(i - 1, j - 1) * math.comb(n - i, m - j)
        if w:
            total += Fraction(w, den) * Fraction(float(sorted_values[i - 1]))
    return total


def pair_count_ari(a, b):
    """Adjusted Rand index by explicit pair counting, exact rationals."""
    n = len(a)
    both = a_only = b_only = neither = 0
    for i in range(n):
        for j in range(i + 1, n):
            sa = a[i] == a[j]
            sb = b[i] == b[j]
            if sa and sb:
                both += 1
            elif sa:
                a_only += 1
            elif sb:
                b_only += 1
            else:
                neither += 1
    num = 2 * (both * neither - a_only * b_only)
    den = (both + a_only) * (a_only + neither) + (both + b_only) * (b_only + neither)
    if den == 0:
        return Fraction(1)
    return Fraction(num, den)


def entropy_vi(a, b):
    """Variation of information as conditional entropies, float route."""
    n = len(a)
    joint = {}
    ca = {}
    cb = {}
    for x, y in zip(a, b):
        joint[x, y] = joint.get((x, y), 0) + 1
        ca[x] = ca.get(x, 0) + 1
        cb[y] = cb.get(y, 0) + 1

    def h(counts):
        return -sum(c / n * math.log(c / n) for c in counts.values())

    mi = sum(
        c / n * math.log(c * n / (ca[x] * cb[y])) for (x, y), c in joint.items()
    )
    return max(0.0, h(ca) + h(cb) - 2.0 * mi)
