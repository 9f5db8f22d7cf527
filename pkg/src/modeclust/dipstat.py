"""Dip statistic, Monte-Carlo calibration tables, and mode-count estimation.

The dip statistic measures the sup-norm distance between an empirical
distribution function and the nearest unimodal distribution function.  The
k-block extension measures departure from k-modality by splitting the sorted
sample into k contiguous blocks and taking the worst per-block dip, minimised
over all splits.  P-values are calibrated against the uniform null with
pre-built Monte-Carlo tables.
"""

from __future__ import annotations

import dataclasses
import importlib.resources
import math
from collections.abc import Mapping
from pathlib import Path

import numpy as np

from ._core import dip_counts, kdip2_counts, kdip3_counts

_TABLE_FORMAT_VERSION = 1

#: Sample-size grids for the bundled tables.  The k=1 grid extends down to
#: n=4 so that p-values exist for every cluster admitted by the library-level
#: minimum cluster size; the k>1 grids stop at 399 because the block-dip
#: estimator is only consulted below 400 observations.
DEFAULT_GRIDS = {
    1: (4, 5, 6, 8, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000),
    2: (4, 6, 8, 10, 20, 50, 100, 200, 399),
    3: (6, 8, 10, 20, 50, 100, 200, 399),
}
DEFAULT_TRIALS = {1: 10000, 2: 2000, 3: 2000}
DEFAULT_TABLE_SEED = 20240817


@dataclasses.dataclass(frozen=True)
class DipResult:
    """A dip-type statistic together with the sample size it came from."""

    statistic: float
    n: int


@dataclasses.dataclass(frozen=True)
class ModalEstimate:
    """Estimated number of modes and the per-stage p-values that led to it."""

    k_hat: int
    pvalues: tuple[float, ...]


def _check_sorted_finite(x: np.ndarray) -> None:
    if x.ndim != 1:
        raise ValueError("expected a one-dimensional sample")
    if x.size == 0:
        raise ValueError("empty sample")
    if not np.isfinite(x).all():
        raise ValueError("sample contains non-finite values")
    if np.any(np.diff(x) < 0.0):
        raise ValueError("sample must be sorted ascending")


def dip_statistic(sample) -> DipResult:
    """Dip statistic of a sorted sample.

    Parameters
    ----------
    sample : array-like of float, sorted ascending
        At least one finite value.  Ties are permitted.

    Returns
    -------
    DipResult
        ``statistic`` is the sup-norm distance to the nearest unimodal
        distribution function; it always lies in ``[1/(2n), 1/4]`` for
        ``n >= 2`` and equals exactly ``1/(2n)`` for equally spaced data.
    """
    x = np.ascontiguousarray(sample, dtype=np.float64)
    _check_sorted_finite(x)
    n = x.size
    return DipResult(statistic=dip_counts(x, 0, n) / (2.0 * n), n=n)


def kdip_statistic(sample, k: int) -> DipResult:
    """Block-dip statistic for k = 2 or 3 contiguous blocks.

    The sorted sample is split into ``k`` contiguous blocks, each with at
    least two points; the statistic is the minimum over splits of the worst
    block-weighted dip.  Small values are compatible with a k-modal shape.
    """
    if k not in (2, 3):
        raise ValueError(f"block dip supports k in {{2, 3}}, got {k}")
    x = np.ascontiguousarray(sample, dtype=np.float64)
    _check_sorted_finite(x)
    n = x.size
    if n < 2 * k:
        raise ValueError(f"need at least {2 * k} points for k={k}, got {n}")
    counts = kdip2_counts(x) if k == 2 else kdip3_counts(x)
    return DipResult(statistic=counts / (2.0 * n), n=n)


@dataclasses.dataclass(frozen=True)
class CritTable:
    """Monte-Carlo null distribution of a (block-)dip statistic.

    ``draws`` holds, for each grid sample size, the sorted statistics of
    ``trials`` uniform(0,1) null samples.  P-values are empirical upper-tail
    fractions; sample sizes between grid rows are served by interpolating
    the null quantile function linearly in log n between the bracketing
    rows.
    """

    k: int
    n_grid: np.ndarray
    draws: np.ndarray
    trials: int
    seed: int

    def __post_init__(self) -> None:
        grid = np.asarray(self.n_grid, dtype=np.int64)
        draws = np.asarray(self.draws, dtype=np.float64)
        if self.k not in (1, 2, 3):
            raise ValueError("tables exist only for k in {1, 2, 3}")
        if self.trials < 1000:
            raise ValueError("need at least 1000 Monte-Carlo trials")
        if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
            raise ValueError("n-grid must be strictly increasing")
        if draws.shape != (grid.size, self.trials):
            raise ValueError("draws shape does not match grid and trials")
        if np.any(np.diff(draws, axis=1) < 0.0):
            raise ValueError("per-n draws must be sorted ascending")
        object.__setattr__(self, "n_grid", grid)
        object.__setattr__(self, "draws", draws)

    def _row_pvalue(self, row: int, statistic: float) -> float:
        below = int(np.searchsorted(self.draws[row], statistic, side="left"))
        return (self.trials - below) / self.trials

    def pvalue(self, d: DipResult) -> float:
        """Upper-tail p-value of ``d`` against this table's null draws.

        Sample sizes between grid points read the statistic against an
        interpolated null: the element-wise convex combination of the two
        bracketing sorted rows, weighted linearly in log n.  Combining rows
        at matching sorted ranks interpolates the null quantile function,
        which tracks the 1/sqrt(n) shrinkage of the statistic; averaging
        tail fractions at a fixed statistic instead would overstate p
        between rows.  Sizes above the largest grid point clamp to the last
        row; sizes below the smallest grid point are an error.  A returned
        0.0 means the statistic exceeded every null draw and should be
        reported as "< 1/trials".
        """
        grid = self.n_grid
        if d.n < int(grid[0]):
            raise ValueError(
                f"sample size {d.n} below the smallest table size {int(grid[0])}"
            )
        hi = int(np.searchsorted(grid, d.n, side="left"))
        if hi >= grid.size:
            return self._row_pvalue(grid.size - 1, d.statistic)
        if int(grid[hi]) == d.n:
            return self._row_pvalue(hi, d.statistic)
        lo = hi - 1
        w = (math.log(d.n) - math.log(grid[lo])) / (
            math.log(grid[hi]) - math.log(grid[lo])
        )
        quantiles = (1.0 - w) * self.draws[lo] + w * self.draws[hi]
        below = int(np.searchsorted(quantiles, d.statistic, side="left"))
        return (self.trials - below) / self.trials

    def save(self, path) -> None:
        np.savez_compressed(
            path,
            format_version=np.int64(_TABLE_FORMAT_VERSION),
            k=np.int64(self.k),
            n_grid=self.n_grid,
            trials=np.int64(self.trials),
            seed=np.int64(self.seed),
            draws=self.draws,
        )

    @staticmethod
    def load(path) -> "CritTable":
        with np.load(path) as payload:
            version = int(payload["format_version"])
            if version != _TABLE_FORMAT_VERSION:
                raise ValueError(f"unsupported table format version {version}")
            return CritTable(
                k=int(payload["k"]),
                n_grid=payload["n_grid"],
                draws=payload["draws"],
                trials=int(payload["trials"]),
                seed=int(payload["seed"]),
            )


def dip_pvalue(d: DipResult, table: CritTable) -> float:
    """P-value of a plain dip statistic; ``table`` must have k = 1."""
    if table.k != 1:
        raise ValueError("dip_pvalue needs a k=1 table")
    return table.pvalue(d)


def kdip_pvalue(d: DipResult, table: CritTable) -> float:
    """P-value of a block-dip statistic against a k=2 or k=3 table."""
    if table.k not in (2, 3):
        raise ValueError("kdip_pvalue needs a k=2 or k=3 table")
    return table.pvalue(d)


def _trial_statistic(k: int, n: int, n_index: int, trial: int, seed: int) -> float:
    """Null statistic for one Monte-Carlo trial, on its own RNG stream."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(k, n_index, trial))
    x = np.random.Generator(np.random.PCG64(seq)).random(n)
    x.sort()
    if k == 1:
        counts = dip_counts(x, 0, n)
    elif k == 2:
        counts = kdip2_counts(x)
    else:
        counts = kdip3_counts(x)
    return counts / (2.0 * n)


def build_crit_table(k: int, n_grid, trials: int, seed: int, threads: int = 1) -> CritTable:
    """Build a Monte-Carlo null table for the k-block dip.

    Bitwise reproducible: each trial draws from an RNG stream derived from
    ``(seed, k, grid index, trial index)``, so the result is independent of
    ``threads``.
    """
    if k not in (1, 2, 3):
        raise ValueError("tables exist only for k in {1, 2, 3}")
    if trials < 1000:
        raise ValueError("need at least 1000 Monte-Carlo trials")
    grid = np.asarray(sorted(int(n) for n in n_grid), dtype=np.int64)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("n-grid entries must be distinct")
    if int(grid[0]) < 2 * k:
        raise ValueError(f"grid sizes must be at least {2 * k} for k={k}")

    def one_row(row: int) -> np.ndarray:
        n = int(grid[row])
        out = np.empty(trials)
        for t in range(trials):
            out[t] = _trial_statistic(k, n, row, t, seed)
        out.sort()
        return out

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one_row, range(grid.size)))
    else:
        rows = [one_row(row) for row in range(grid.size)]
    return CritTable(k=k, n_grid=grid, draws=np.vstack(rows), trials=trials, seed=seed)


def build_default_tables(threads: int = 1) -> dict[int, CritTable]:
    return {
        k: build_crit_table(k, DEFAULT_GRIDS[k], DEFAULT_TRIALS[k], DEFAULT_TABLE_SEED, threads)
        for k in (1, 2, 3)
    }


def _bundled_table_path(k: int) -> Path:
    resource = importlib.resources.files("modeclust.tables") / f"dip_k{k}.npz"
    return Path(str(resource))


def load_default_tables() -> dict[int, CritTable]:
    """Load the three bundled calibration tables shipped with the package."""
    tables = {}
    for k in (1, 2, 3):
        path = _bundled_table_path(k)
        if not path.exists():
            raise FileNotFoundError(
                f"bundled table {path.name} is missing; run `modeclust tables build`"
            )
        tables[k] = CritTable.load(path)
    return tables


def verify_table(table: CritTable, spot_trials: int = 3) -> None:
    """Spot-check a table by recomputing a few trials per grid row.

    Recomputed statistics must appear bitwise-exactly among the stored
    sorted draws.  Raises ``ValueError`` on any mismatch.
    """
    for row in range(table.n_grid.size):
        n = int(table.n_grid[row])
        picks = sorted({0, table.trials // 2, table.trials - 1})[:spot_trials]
        for t in picks:
            stat = _trial_statistic(table.k, n, row, t, table.seed)
            j = int(np.searchsorted(table.draws[row], stat, side="left"))
            if j >= table.trials or table.draws[row][j] != stat:
                raise ValueError(
                    f"table verification failed at k={table.k}, n={n}, trial {t}"
                )


def estimate_num_modes(sample, alpha: float, tables: Mapping[int, CritTable]) -> ModalEstimate:
    """Sequential mode-count estimate for a small sorted sample.

    The plain dip is tested at level ``alpha``; failure to reject yields one
    mode.  Otherwise the 2-block dip is tested at ``alpha/2`` and then the
    3-block dip at ``alpha/3``; the first failure to reject fixes the count,
    and rejection at every stage concludes four modes.  Stages whose block
    count cannot fit the sample (n < 2k) conclude k directly.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    x = np.ascontiguousarray(sample, dtype=np.float64)
    _check_sorted_finite(x)
    n = x.size

    p1 = dip_pvalue(dip_statistic(x), tables[1])
    if p1 > alpha:
        return ModalEstimate(k_hat=1, pvalues=(p1,))
    if n < 4:
        return ModalEstimate(k_hat=2, pvalues=(p1,))
    p2 = kdip_pvalue(kdip_statistic(x, 2), tables[2])
    if p2 > alpha / 2.0:
        return ModalEstimate(k_hat=2, pvalues=(p1, p2))
    if n < 6:
        return ModalEstimate(k_hat=3, pvalues=(p1, p2))
    p3 = kdip_pvalue(kdip_statistic(x, 3), tables[3])
    if p3 > alpha / 3.0:
        return ModalEstimate(k_hat=3, pvalues=(p1, p2, p3))
    return ModalEstimate(k_hat=4, pvalues=(p1, p2, p3))
