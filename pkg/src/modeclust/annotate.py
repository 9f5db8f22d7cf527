"""Cluster annotation: boundary derivation from logged cut-points,
per-cluster fraction labels with a word dictionary, and cross-iteration
voting with max-vote and run-off heuristics."""

from __future__ import annotations

import dataclasses
from collections.abc import Sequence

import numpy as np

from .forest import CutPointLog


@dataclasses.dataclass(frozen=True)
class LabelingConfig:
    """Percentile offset: labels compare the 50-epsilon, 50th, and
    50+epsilon percentiles of a cluster against the boundaries."""

    epsilon: float = 17.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon < 50.0:
            raise ValueError("epsilon must lie in [0, 50)")


@dataclasses.dataclass(frozen=True)
class AnnotationBoundaries:
    """Per-coordinate boundary vectors (component-wise medians of the most
    frequent cut-point count)."""

    boundaries: dict[int, np.ndarray]

    def coordinates(self) -> list[int]:
        return sorted(self.boundaries)


def derive_boundaries(log: CutPointLog) -> AnnotationBoundaries:
    """Pick, per coordinate, the cut-point count with the most logged
    vectors (smallest count on ties) and take component-wise medians.

    Coordinates never split stay unannotated and are absent from the result.
    """
    out: dict[int, np.ndarray] = {}
    for j in log.coordinates():
        by_len = {a: vs for a, vs in log.vectors(j).items() if vs}
        if not by_len:
            continue
        top = max(len(vs) for vs in by_len.values())
        a = min(a for a, vs in by_len.items() if len(vs) == top)
        stacked = np.array(sorted(by_len[a]))
        medians = np.median(stacked, axis=0)
        if np.any(np.diff(medians) <= 0.0):
            raise RuntimeError("boundary medians are not strictly increasing")
        out[j] = medians
    return AnnotationBoundaries(boundaries=out)


def fraction_word(numerator: int, denominator: int) -> str:
    """Dictionary rendering of an annotation fraction."""
    pair = (numerator, denominator)
    if numerator == 0:
        return "lowest"
    if numerator == denominator:
        return "highest"
    if pair in ((1, 2), (2, 4)):
        return "medium"
    if pair in ((1, 4), (1, 3)):
        return "medium-low"
    if pair in ((3, 4), (2, 3)):
        return "medium-high"
    if denominator <= 8:
        return f"level-{numerator}-of-{denominator}"
    return f"{numerator}/{denominator}"


@dataclasses.dataclass(frozen=True)
class ClusterLabel:
    """Fractions per annotated coordinate, as (coordinate, numerator,
    denominator) triples sorted by coordinate."""

    fractions: tuple[tuple[int, int, int], ...]

    def render(self, names: Sequence[str] | None = None) -> str:
        if not self.fractions:
            return "unannotated"
        parts = []
        for j, num, den in self.fractions:
            name = names[j] if names is not None else f"c{j}"
            parts.append(f"{name} {fraction_word(num, den)}")
        return "; ".join(parts)


def label_cluster(
    matrix,
    rows: np.ndarray,
    boundaries: AnnotationBoundaries,
    cfg: LabelingConfig = LabelingConfig(),
) -> list[tuple[np.ndarray, ClusterLabel]]:
    """Label a cluster against the annotation boundaries, splitting it when
    a single-boundary coordinate straddles its boundary.

    With one boundary k1: a cluster whose lower percentile sits at or above
    k1 is 1/1, one whose upper percentile sits at or below k1 is 0/1, and
    anything straddling splits at k1 into a 0/1 and a 1/1 piece.  With a
    boundaries, the label is i/a where i counts boundaries strictly below
    the median.  Coordinates refine pieces in column order, re-evaluating
    percentiles per piece.
    """
    mat = np.asarray(matrix, dtype=np.float64)
    pieces: list[tuple[np.ndarray, dict[int, tuple[int, int]]]] = [(np.asarray(rows), {})]
    for j in boundaries.coordinates():
        bounds = boundaries.boundaries[j]
        a = len(bounds)
        refined = []
        for piece_rows, fracs in pieces:
            vals = mat[piece_rows, j]
            if a == 1:
                k1 = bounds[0]
                q_lo = np.percentile(vals, 50.0 - cfg.epsilon)
                q_hi = np.percentile(vals, 50.0 + cfg.epsilon)
                if q_lo >= k1:
                    refined.append((piece_rows, {**fracs, j: (1, 1)}))
                elif q_hi <= k1:
                    refined.append((piece_rows, {**fracs, j: (0, 1)}))
                else:
                    below = piece_rows[vals < k1]
                    above = piece_rows[vals >= k1]
                    refined.append((below, {**fracs, j: (0, 1)}))
                    refined.append((above, {**fracs, j: (1, 1)}))
            else:
                q_mid = np.percentile(vals, 50.0)
                i = int(np.sum(bounds < q_mid))
                refined.append((piece_rows, {**fracs, j: (i, a)}))
        pieces = refined
    return [
        (piece_rows, ClusterLabel(tuple((j, n, d) for j, (n, d) in sorted(fracs.items()))))
        for piece_rows, fracs in pieces
    ]


def combine_labels(first: tuple[int, int], second: tuple[int, int]) -> tuple[int, int]:
    """Combine two fractions a/b and c/d for one coordinate into
    (a*d + b*c) / (2*b*d), left unreduced."""
    a, b = first
    c, d = second
    return a * d + b * c, 2 * b * d


def _combine_structured(top: ClusterLabel, other: ClusterLabel) -> ClusterLabel:
    other_map = {j: (n, d) for j, n, d in other.fractions}
    merged = []
    for j, n, d in top.fractions:
        if j in other_map:
            nn, nd = combine_labels((n, d), other_map[j])
            merged.append((j, nn, nd))
        else:
            merged.append((j, n, d))
    return ClusterLabel(tuple(merged))


class VoteLedger:
    """Per-row counters of rendered labels across iterations.

    Rendered strings are the vote keys; the first structured label seen for
    a string is kept as its representative for run-off combination.
    """

    def __init__(self, n_rows: int, names: Sequence[str] | None = None):
        self.n_rows = n_rows
        self.names = list(names) if names is not None else None
        self.iterations = 0
        self.counts: list[dict[str, int]] = [{} for _ in range(n_rows)]
        self._reps: dict[str, ClusterLabel] = {}

    def record(self, labels: Sequence[ClusterLabel]) -> None:
        if len(labels) != self.n_rows:
            raise ValueError("one label per row is required")
        self.iterations += 1
        for row, label in enumerate(labels):
            key = label.render(self.names)
            self.counts[row][key] = self.counts[row].get(key, 0) + 1
            self._reps.setdefault(key, label)

    def top(self, row: int, k: int = 3) -> list[tuple[str, int]]:
        ranked = sorted(self.counts[row].items(), key=lambda kv: (-kv[1], kv[0]))
        return ranked[:k]

    def representative(self, key: str) -> ClusterLabel:
        return self._reps[key]


def vote(ledger: VoteLedger, mode: str = "max") -> list[str]:
    """Resolve each row's final label from its vote counts.

    ``max`` takes the most frequent label (ties to the lexicographically
    smallest).  ``runoff`` keeps an outright majority; a 30-50% leader whose
    runner-up clears 20% combines with it coordinate-wise; a 20-30% leader
    with second and third above 15% combines with both, left-associatively;
    anything else falls back to the max-vote label.
    """
    if mode not in ("max", "runoff"):
        raise ValueError(f"unknown vote mode: {mode!r}")
    if ledger.iterations == 0:
        raise ValueError("ledger holds no votes")
    total = ledger.iterations
    out = []
    for row in range(ledger.n_rows):
        ranked = ledger.top(row, k=3)
        top_key, c1 = ranked[0]
        if mode == "max" or 2 * c1 > total:
            out.append(top_key)
            continue
        c2 = ranked[1][1] if len(ranked) > 1 else 0
        c3 = ranked[2][1] if len(ranked) > 2 else 0
        if 10 * c1 > 3 * total and 5 * c2 > total:
            combined = _combine_structured(
                ledger.representative(top_key), ledger.representative(ranked[1][0])
            )
            out.append(combined.render(ledger.names))
        elif 5 * c1 > total and 20 * c2 > 3 * total and 20 * c3 > 3 * total:
            combined = _combine_structured(
                ledger.representative(top_key), ledger.representative(ranked[1][0])
            )
            combined = _combine_structured(combined, ledger.representative(ranked[2][0]))
            out.append(combined.render(ledger.names))
        else:
            out.append(top_key)
    return out
