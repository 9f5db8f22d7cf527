"""Taut-string density estimation and 1-D contiguous k-medoids splitting.

The taut string is the shortest path through a tube of vertical gates
centred on the empirical distribution function; its derivative is a
piecewise-constant density whose local maxima and minima give modal and
antimodal intervals.  The tube radius scales like ``kappa / sqrt(n)``, so a
larger ``kappa`` yields a wider tube and never more modes.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from ._core import kmedoids_cuts, taut_knots

#: Tube half-width per unit kappa, in units of 1/sqrt(n).  Frozen after
#: calibration against the seeded unimodal/bimodal recovery rates.
RADIUS_SCALE = 0.08

DEFAULT_KAPPA = 19.0


@dataclasses.dataclass(frozen=True)
class TautStringFit:
    """Piecewise-linear taut string and its piecewise-constant density.

    ``knots_x``/``knots_y`` are the string's vertices; ``density[i]`` is the
    slope between knots i and i+1.  ``modes`` and ``antimodes`` are x-axis
    intervals of locally maximal and locally minimal density; they alternate,
    and there is exactly one antimode between consecutive modes.
    """

    knots_x: np.ndarray
    knots_y: np.ndarray
    density: np.ndarray
    modes: tuple[tuple[float, float], ...]
    antimodes: tuple[tuple[float, float], ...]
    kappa: float
    radius: float


@dataclasses.dataclass(frozen=True)
class ModalSplit:
    """Cut-points and the contiguous sorted-sample groups they induce."""

    cutpoints: np.ndarray
    groups: tuple[tuple[int, int], ...]


def tube_radius(n: int, kappa: float) -> float:
    return RADIUS_SCALE * kappa / np.sqrt(n)


def _checked_sample(sample, minimum: int) -> np.ndarray:
    x = np.ascontiguousarray(sample, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("expected a one-dimensional sample")
    if x.size < minimum:
        raise ValueError(f"need at least {minimum} points, got {x.size}")
    if not np.isfinite(x).all():
        raise ValueError("sample contains non-finite values")
    d = np.diff(x)
    if np.any(d < 0.0):
        raise ValueError("sample must be sorted ascending")
    return x


def _extract_extrema(kx: np.ndarray, ky: np.ndarray):
    """Mode/antimode intervals from the string's slope sequence.

    Adjacent segments with exactly equal slope are merged first, so a
    plateau at a local minimum counts as a single antimodal component.
    """
    slopes = np.diff(ky) / np.diff(kx)
    runs = []  # (slope, x_lo, x_hi)
    for i, s in enumerate(slopes):
        if runs and runs[-1][0] == s:
            runs[-1][2] = kx[i + 1]
        else:
            runs.append([s, kx[i], kx[i + 1]])

    modes = []
    antimodes = []
    for t, (s, lo, hi) in enumerate(runs):
        left = runs[t - 1][0] if t > 0 else None
        right = runs[t + 1][0] if t + 1 < len(runs) else None
        if (left is None or s > left) and (right is None or s > right):
            modes.append((lo, hi))
        elif left is not None and right is not None and s < left and s < right:
            antimodes.append((lo, hi))
    return slopes, tuple(modes), tuple(antimodes)


def taut_string(sample, kappa: float = DEFAULT_KAPPA) -> TautStringFit:
    """Fit the taut string through a distribution-function tube.

    Parameters
    ----------
    sample : array-like of float, sorted ascending
        At least four pairwise-distinct finite values; run the noise phase
        first if ties are possible.
    kappa : float
        Tube-width parameter; the half-width is ``RADIUS_SCALE * kappa /
        sqrt(n)``.  Larger values produce fewer modes.

    Returns
    -------
    TautStringFit
        The string is pinned to height 0 at the smallest sample value and 1
        at the largest, so the density integrates to exactly 1.
    """
    x = _checked_sample(sample, minimum=4)
    if np.any(np.diff(x) == 0.0):
        raise ValueError("sample has tied values; break ties first")
    if not kappa > 0.0:
        raise ValueError("kappa must be positive")
    n = x.size
    r = tube_radius(n, kappa)
    centers = (np.arange(n) + 0.5) / n
    lo = np.clip(centers - r, 0.0, 1.0)
    hi = np.clip(centers + r, 0.0, 1.0)
    lo[0] = hi[0] = 0.0
    lo[-1] = hi[-1] = 1.0
    kx, ky = taut_knots(x, lo, hi)
    slopes, modes, antimodes = _extract_extrema(kx, ky)
    return TautStringFit(
        knots_x=kx,
        knots_y=ky,
        density=slopes,
        modes=modes,
        antimodes=antimodes,
        kappa=float(kappa),
        radius=r,
    )


def antimode_cutpoints(fit: TautStringFit, sample) -> ModalSplit:
    """One cut-point per antimodal component: the mean of the sample values
    falling inside it (endpoints inclusive).

    Groups are formed by thresholding the sorted sample at the cut-points
    (strictly-below goes left), with the sample extremes as outer fences.
    """
    if len(fit.modes) < 2:
        raise RuntimeError("antimode cut-points require at least two modes")
    x = _checked_sample(sample, minimum=2)
    cuts = []
    for lo, hi in fit.antimodes:
        inside = x[(x >= lo) & (x <= hi)]
        if inside.size == 0:
            raise RuntimeError("antimodal component contains no sample values")
        cuts.append(float(inside.mean()))
    cutpoints = np.asarray(cuts)
    edges = np.searchsorted(x, cutpoints, side="left")
    bounds = [0, *edges.tolist(), x.size]
    groups = tuple((bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1))
    return ModalSplit(cutpoints=cutpoints, groups=groups)


def kmedoids_1d(sample, k: int) -> ModalSplit:
    """Globally optimal contiguous k-group split minimising total absolute
    deviation from each group's medoid, by dynamic programming.

    Cut-points are midpoints between the adjacent group boundary values.
    Equal-cost partitions resolve to the one whose first cut is leftmost.
    """
    x = _checked_sample(sample, minimum=1)
    n = x.size
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    cuts, _cost = kmedoids_cuts(x, k)
    cutpoints = np.asarray([(x[c - 1] + x[c]) / 2.0 for c in cuts])
    bounds = [0, *cuts, n]
    groups = tuple((bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1))
    return ModalSplit(cutpoints=cutpoints, groups=groups)
