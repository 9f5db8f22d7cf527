"""Structured per-column noise: uniform tie-breaking, then Gaussian rank
perturbation scaled by neighbouring order-statistic gaps."""

from __future__ import annotations

import dataclasses

import numpy as np

_STREAM_NOISE = 0  # spawn-key namespace tag; keeps noise streams disjoint
_MAX_REDRAWS = 100


@dataclasses.dataclass(frozen=True)
class NoiseConfig:
    gamma: float = 4.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.gamma > 0.0:
            raise ValueError("gamma must be positive")


def _checked_column(column) -> np.ndarray:
    x = np.asarray(column, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("expected a one-dimensional column")
    if not np.isfinite(x).all():
        raise ValueError("column contains non-finite values")
    return x


def break_ties_uniform(column, rng: np.random.Generator) -> np.ndarray:
    """Replace tied entries with uniform draws between the neighbouring
    order-statistic midpoints.

    Each group of entries tied at a value v draws independently from
    ``Uniform((prev+v)/2, (v+next)/2)``; a non-unique minimum uses v itself
    as the lower bound, and a non-unique maximum uses v as the upper bound.
    Unique entries pass through unchanged, so the relative order of distinct
    original values is preserved and the output is almost surely tie-free.
    """
    x = _checked_column(column).copy()
    values, counts = np.unique(x, return_counts=True)
    if values.size == 1 and x.size > 1:
        raise ValueError("constant column cannot be de-tied")
    if not np.any(counts > 1):
        return x

    for _ in range(_MAX_REDRAWS):
        for i in np.flatnonzero(counts > 1):
            v = values[i]
            lo = v if i == 0 else (values[i - 1] + v) / 2.0
            hi = v if i == values.size - 1 else (v + values[i + 1]) / 2.0
            where = np.flatnonzero(x == v)
            x[where] = rng.uniform(lo, hi, size=where.size)
        if np.unique(x).size == x.size:
            return x
        # Probability-zero collision: rebuild the tie groups and redraw.
        values, counts = np.unique(x, return_counts=True)
    raise RuntimeError("tie-breaking failed to produce distinct values")


def perturb_gaussian(column, cfg: NoiseConfig, rng: np.random.Generator) -> np.ndarray:
    """Perturb each entry with a Gaussian centred on it, with standard
    deviation ``(upper neighbour - lower neighbour) / (2 * gamma)`` computed
    from the fixed pre-perturbation order statistics.

    The extremes use their single one-sided gap.  Columns with fewer than
    three entries have no neighbour pair and come back unchanged.
    """
    x = _checked_column(column)
    n = x.size
    if n < 3:
        return x.copy()
    order = np.argsort(x, kind="stable")
    s = x[order]
    if np.any(np.diff(s) <= 0.0):
        raise ValueError("column must be tie-free; break ties first")
    sigma = np.empty(n)
    sigma[1:-1] = (s[2:] - s[:-2]) / (2.0 * cfg.gamma)
    sigma[0] = (s[1] - s[0]) / (2.0 * cfg.gamma)
    sigma[-1] = (s[-1] - s[-2]) / (2.0 * cfg.gamma)
    perturbed = s + sigma * rng.standard_normal(n)
    out = np.empty(n)
    out[order] = perturbed
    return out


def column_stream(cfg: NoiseConfig, column_index: int, iteration: int) -> np.random.Generator:
    """The per-column RNG stream for one noise pass.

    Streams are keyed by (seed, column index, iteration index), so noising a
    column in isolation gives bitwise the same result as noising it inside
    the full matrix.
    """
    seq = np.random.SeedSequence(
        entropy=cfg.seed, spawn_key=(_STREAM_NOISE, column_index, iteration)
    )
    return np.random.Generator(np.random.PCG64(seq))


def noise_column(column, cfg: NoiseConfig, rng: np.random.Generator) -> np.ndarray:
    return perturb_gaussian(break_ties_uniform(column, rng), cfg, rng)


def noise_matrix(matrix, cfg: NoiseConfig, iteration: int = 0) -> np.ndarray:
    """Apply both noise stages column by column on independent streams."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("expected a two-dimensional matrix")
    out = np.empty_like(m)
    for j in range(m.shape[1]):
        out[:, j] = noise_column(m[:, j], cfg, column_stream(cfg, j, iteration))
    return out
