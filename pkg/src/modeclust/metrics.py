"""Clustering-comparison metrics: adjusted Rand index and variation of
information."""

from __future__ import annotations

import dataclasses
import math

import numpy as np


@dataclasses.dataclass(frozen=True)
class Clustering:
    """A partition of n rows given as per-row integer labels."""

    labels: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", np.asarray(self.labels))

    def __len__(self) -> int:
        return self.labels.size


def _labels(x) -> np.ndarray:
    arr = np.asarray(getattr(x, "labels", x))
    if arr.ndim != 1:
        raise ValueError("expected a one-dimensional label vector")
    return arr


def _contingency(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    return table


def adjusted_rand_index(a, b) -> float:
    """Adjusted Rand index between two clusterings of the same rows.

    Identical partitions score 1; independent ones score 0 in expectation;
    the value can be negative.  Computed in exact integer arithmetic from
    the pair-counting contingency table.  The degenerate zero-denominator
    case only arises when both partitions are identically trivial, which
    counts as perfect agreement.
    """
    la, lb = _labels(a), _labels(b)
    if la.size != lb.size:
        raise ValueError("clusterings must have the same length")
    if la.size == 0:
        raise ValueError("empty clusterings")
    table = _contingency(la, lb)
    n = int(la.size)

    def comb2(v: int) -> int:
        return v * (v - 1) // 2

    index = sum(comb2(int(v)) for v in table.ravel())
    sum_a = sum(comb2(int(v)) for v in table.sum(axis=1))
    sum_b = sum(comb2(int(v)) for v in table.sum(axis=0))
    total = comb2(n)
    # Work over the common denominator 2*total to stay in exact integers;
    # (sum_a + sum_b) * total can be odd, so a halved denominator would
    # floor away a half unit.
    numerator = 2 * (index * total - sum_a * sum_b)
    denominator = (sum_a + sum_b) * total - 2 * sum_a * sum_b
    if denominator == 0:
        return 1.0
    return numerator / denominator


def vi_distance(a, b) -> float:
    """Variation of information between two clusterings, in nats.

    Zero exactly for identical partitions; at most log n; a metric on the
    space of partitions.
    """
    la, lb = _labels(a), _labels(b)
    if la.size != lb.size:
        raise ValueError("clusterings must have the same length")
    if la.size == 0:
        raise ValueError("empty clusterings")
    table = _contingency(la, lb).astype(np.float64)
    n = float(la.size)
    joint = table / n
    pa = joint.sum(axis=1, keepdims=True)
    pb = joint.sum(axis=0, keepdims=True)
    mask = joint > 0.0
    # H(A|B) + H(B|A) = -sum p_ij * log(p_ij^2 / (p_i * p_j))
    terms = np.zeros_like(joint)
    terms[mask] = joint[mask] * (
        2.0 * np.log(joint[mask])
        - np.log(np.broadcast_to(pa, joint.shape)[mask])
        - np.log(np.broadcast_to(pb, joint.shape)[mask])
    )
    return float(max(0.0, -terms.sum()))


def max_vi(n: int) -> float:
    """Upper bound of the VI distance for n rows."""
    return math.log(n)
