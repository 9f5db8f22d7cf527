"""Recursive random search of the annotation forest for candidate clusters.

A tree splits the matrix along one multimodal coordinate at a time,
recursing into the groups between that coordinate's mode-separating
cut-points.  A leaf whose every coordinate looks unimodal at level alpha and
holds at least ``m`` rows is a candidate cluster; undersized or still-mixed
leaves are pruned.  Trees are sampled on independent RNG streams until a
candidate budget is met or fresh trees stop contributing.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .density import DEFAULT_KAPPA, antimode_cutpoints, kmedoids_1d, taut_string
from .dipstat import CritTable, dip_pvalue, dip_statistic, estimate_num_modes

_STREAM_TREES = 1  # spawn-key namespace tag (noise uses 0)

#: Sub-matrices at least this large use the taut-string splitter; smaller
#: ones use the sequential block-dip estimate plus contiguous k-medoids.
TAUT_STRING_MIN_N = 400

#: Trees per scheduling batch.  Results merge in tree-index order, so the
#: outcome is independent of the thread count.
BATCH_SIZE = 16

#: The search is exhausted after this many consecutive trees that
#: contribute no previously-unseen candidate.
BARREN_LIMIT = 64


@dataclasses.dataclass(frozen=True)
class SearchConfig:
    """Knobs for the candidate-cluster search."""

    alpha: float = 0.25
    m: int = 25
    max_antimodes: int = 100
    max_candidates: int = 200
    allow_repeat_coordinate: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.m < 4:
            raise ValueError("minimum cluster size m must be at least 4")
        if self.max_antimodes < 1:
            raise ValueError("max_antimodes must be at least 1")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be at least 1")


@dataclasses.dataclass
class CandidateCluster:
    """A leaf cluster: row indices plus the dip p-values that admitted it."""

    rows: np.ndarray
    pvalues: np.ndarray
    moments: np.ndarray | None = None

    def key(self) -> bytes:
        return self.rows.tobytes()

    @property
    def delta(self) -> float:
        return float(self.pvalues.min())


class CutPointLog:
    """Per-coordinate sets of cut-point vectors, grouped by vector length.

    A merge-only accumulator: vectors from repeated identical splits
    collapse by set membership.
    """

    def __init__(self) -> None:
        self._sets: dict[int, dict[int, set[tuple[float, ...]]]] = {}

    def add(self, coordinate: int, cuts: tuple[float, ...]) -> None:
        if len(cuts) == 0:
            raise ValueError("cut vector must be nonempty")
        if any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise ValueError("cut vector must be strictly increasing")
        by_len = self._sets.setdefault(coordinate, {})
        by_len.setdefault(len(cuts), set()).add(tuple(float(c) for c in cuts))

    def merge(self, other: "CutPointLog") -> None:
        for j, by_len in other._sets.items():
            mine = self._sets.setdefault(j, {})
            for length, vectors in by_len.items():
                mine.setdefault(length, set()).update(vectors)

    def coordinates(self) -> list[int]:
        return sorted(self._sets)

    def vectors(self, coordinate: int) -> dict[int, set[tuple[float, ...]]]:
        return self._sets.get(coordinate, {})

    def __len__(self) -> int:
        return len(self._sets)


# Leaf / node statuses.
INTERNAL = "internal"
CANDIDATE = "candidate"
PRUNED_SMALL = "pruned-small"
PRUNED_MIXED = "pruned-multimodal"
PRUNED_CAP = "pruned-antimode-cap"
PRUNED_NOSPLIT = "pruned-nosplit"


@dataclasses.dataclass
class TreeNode:
    rows: np.ndarray
    status: str = INTERNAL
    coordinate: int | None = None
    cutpoints: tuple[float, ...] = ()
    children: list["TreeNode"] = dataclasses.field(default_factory=list)

    pvalues: np.ndarray | None = None  # set on candidate leaves


@dataclasses.dataclass
class PartitionTree:
    root_coordinate: int
    root: TreeNode

    def leaves(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.children:
                stack.extend(reversed(node.children))
            else:
                yield node

    def candidates(self) -> list[CandidateCluster]:
        return [
            CandidateCluster(rows=leaf.rows, pvalues=leaf.pvalues)
            for leaf in self.leaves()
            if leaf.status == CANDIDATE
        ]


@dataclasses.dataclass(frozen=True)
class SplitOutcome:
    kind: str  # "split" | "unimodal" | "cap"
    pvalue: float
    cutpoints: tuple[float, ...] = ()
    groups: tuple[tuple[int, int], ...] = ()


class _SearchContext:
    """Memoises per-(row-set, coordinate) dip p-values and split outcomes
    for one matrix snapshot.  Recomputation races under threads are benign:
    every computation is deterministic, so late writes store equal values."""

    def __init__(self, matrix: np.ndarray, cfg: SearchConfig, tables: Mapping[int, CritTable]):
        self.matrix = matrix
        self.cfg = cfg
        self.tables = tables
        self._pvals: dict[tuple[bytes, int], float] = {}
        self._splits: dict[tuple[bytes, int], SplitOutcome] = {}

    def pvalue(self, rows: np.ndarray, key: bytes, j: int) -> float:
        p = self._pvals.get((key, j))
        if p is None:
            col = np.sort(self.matrix[rows, j])
            p = dip_pvalue(dip_statistic(col), self.tables[1])
            self._pvals[(key, j)] = p
        return p

    def split(self, rows: np.ndarray, key: bytes, j: int) -> SplitOutcome:
        cached = self._splits.get((key, j))
        if cached is not None:
            return cached
        pval = self.pvalue(rows, key, j)
        col = np.sort(self.matrix[rows, j])
        if col.size >= TAUT_STRING_MIN_N:
            fit = taut_string(col, DEFAULT_KAPPA)
            if len(fit.modes) < 2:
                outcome = SplitOutcome(kind="unimodal", pvalue=pval)
            elif len(fit.antimodes) > self.cfg.max_antimodes:
                outcome = SplitOutcome(kind="cap", pvalue=pval)
            else:
                split = antimode_cutpoints(fit, col)
                outcome = SplitOutcome(
                    kind="split",
                    pvalue=pval,
                    cutpoints=tuple(float(c) for c in split.cutpoints),
                    groups=split.groups,
                )
        else:
            est = estimate_num_modes(col, self.cfg.alpha, self.tables)
            split = kmedoids_1d(col, est.k_hat)
            if len(split.cutpoints) > self.cfg.max_antimodes:
                outcome = SplitOutcome(kind="cap", pvalue=pval)
            else:
                outcome = SplitOutcome(
                    kind="split",
                    pvalue=pval,
                    cutpoints=tuple(float(c) for c in split.cutpoints),
                    groups=split.groups,
                )
        self._splits[(key, j)] = outcome
        return outcome


def split_coordinate(
    column,
    cfg: SearchConfig,
    tables: Mapping[int, CritTable],
    rng=None,
) -> SplitOutcome:
    """Decide how one sub-matrix column splits.

    Multimodality is judged by the dip p-value at ``cfg.alpha``.  Rejected
    columns with at least 400 points split at taut-string antimode
    cut-points (or terminate the branch when antimodes exceed the cap);
    smaller columns split by contiguous k-medoids with the estimated mode
    count.  ``rng`` is unused; the decision is deterministic.
    """
    col = np.sort(np.ascontiguousarray(column, dtype=np.float64))
    matrix = col.reshape(-1, 1)
    ctx = _SearchContext(matrix, cfg, tables)
    rows = np.arange(col.size)
    outcome = ctx.split(rows, rows.tobytes(), 0)
    if outcome.kind != "cap" and outcome.pvalue > cfg.alpha:
        return SplitOutcome(kind="unimodal", pvalue=outcome.pvalue)
    return outcome


def _grow(
    node: TreeNode,
    path: frozenset[int],
    ctx: _SearchContext,
    rng: np.random.Generator,
    log: CutPointLog,
    forced_coordinate: int | None = None,
) -> None:
    cfg = ctx.cfg
    rows = node.rows
    key = rows.tobytes()
    p = ctx.matrix.shape[1]

    if cfg.allow_repeat_coordinate:
        available = list(range(p))
    else:
        available = [j for j in range(p) if j not in path]
    splittable = [j for j in available if ctx.pvalue(rows, key, j) <= cfg.alpha]

    while splittable or forced_coordinate is not None:
        if forced_coordinate is not None:
            j = forced_coordinate
            forced_coordinate = None
            if j in splittable:
                splittable.remove(j)
        else:
            j = splittable.pop(int(rng.integers(len(splittable))))
        outcome = ctx.split(rows, key, j)
        if outcome.kind == "cap":
            node.status = PRUNED_CAP
            return
        if outcome.kind == "unimodal":
            continue  # dip rejected but no usable cut-points on this column
        node.coordinate = j
        node.cutpoints = outcome.cutpoints
        log.add(j, outcome.cutpoints)
        order = np.argsort(ctx.matrix[rows, j], kind="stable")
        child_path = path | {j}
        for a, b in outcome.groups:
            child = TreeNode(rows=np.sort(rows[order[a:b]]))
            node.children.append(child)
            if child.rows.size < cfg.m:
                child.status = PRUNED_SMALL
            else:
                _grow(child, child_path, ctx, rng, log)
        node.status = INTERNAL
        return

    # Leaf: nothing left to split.  Re-test every coordinate, including any
    # on the path, before admitting the rows as a candidate cluster.
    pvals = np.array([ctx.pvalue(rows, key, j) for j in range(p)])
    if np.all(pvals > cfg.alpha):
        node.status = CANDIDATE
        node.pvalues = pvals
    else:
        node.status = PRUNED_MIXED


def _grow_in_context(
    ctx: _SearchContext,
    root_coordinate: int,
    rng: np.random.Generator,
    log: CutPointLog,
) -> PartitionTree:
    rows = np.arange(ctx.matrix.shape[0])
    root = TreeNode(rows=rows)
    pval = ctx.pvalue(rows, rows.tobytes(), root_coordinate)
    if pval > ctx.cfg.alpha:
        raise ValueError(
            f"root coordinate {root_coordinate} is unimodal at level {ctx.cfg.alpha}"
        )
    outcome = ctx.split(rows, rows.tobytes(), root_coordinate)
    if outcome.kind == "unimodal":
        root.status = PRUNED_NOSPLIT
    elif outcome.kind == "cap":
        root.status = PRUNED_CAP
    else:
        _grow(root, frozenset(), ctx, rng, log, forced_coordinate=root_coordinate)
    return PartitionTree(root_coordinate=root_coordinate, root=root)


def grow_tree(
    matrix,
    root_coordinate: int,
    cfg: SearchConfig,
    tables: Mapping[int, CritTable],
    rng: np.random.Generator,
    log: CutPointLog | None = None,
) -> PartitionTree:
    """Grow one partition tree rooted at a given multimodal coordinate.

    Raises ``ValueError`` if the root coordinate is not multimodal at
    ``cfg.alpha`` in the full matrix.  When ``log`` is given, every split's
    cut-point vector is recorded in it.
    """
    m = np.ascontiguousarray(matrix, dtype=np.float64)
    ctx = _SearchContext(m, cfg, tables)
    return _grow_in_context(ctx, root_coordinate, rng, log if log is not None else CutPointLog())


def _as_seedseq(rng) -> np.random.SeedSequence:
    if isinstance(rng, np.random.SeedSequence):
        return rng
    if isinstance(rng, (int, np.integer)):
        return np.random.SeedSequence(entropy=int(rng))
    raise TypeError("rng must be an int seed or a numpy SeedSequence")


def _tree_stream(base: np.random.SeedSequence, tree_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(
        entropy=base.entropy, spawn_key=tuple(base.spawn_key) + (tree_index,)
    )
    return np.random.Generator(np.random.PCG64(seq))


def sample_forest(
    matrix,
    cfg: SearchConfig,
    tables: Mapping[int, CritTable],
    rng,
    threads: int = 1,
) -> tuple[list[CandidateCluster], CutPointLog]:
    """Sample random partition trees and pool their candidate clusters.

    Each tree picks its root, and every later split coordinate, uniformly
    among the currently splittable coordinates, on an RNG stream derived
    from ``(rng, tree index)``.  Candidates are deduplicated by row set; the
    search stops at ``cfg.max_candidates`` distinct candidates, or once
    ``BARREN_LIMIT`` consecutive trees contribute nothing new.  Results are
    bitwise independent of ``threads``.
    """
    mat = np.ascontiguousarray(matrix, dtype=np.float64)
    if mat.ndim != 2:
        raise ValueError("expected a two-dimensional matrix")
    base = _as_seedseq(rng)
    ctx = _SearchContext(mat, cfg, tables)
    log = CutPointLog()

    all_rows = np.arange(mat.shape[0])
    all_key = all_rows.tobytes()
    pool = [
        j for j in range(mat.shape[1])
        if ctx.pvalue(all_rows, all_key, j) <= cfg.alpha
    ]
    if not pool:
        return [], log

    def one_tree(t: int) -> tuple[PartitionTree, CutPointLog]:
        tree_rng = _tree_stream(base, t)
        root = pool[int(tree_rng.integers(len(pool)))]
        local_log = CutPointLog()
        tree = _grow_in_context(ctx, root, tree_rng, local_log)
        return tree, local_log

    candidates: list[CandidateCluster] = []
    seen: set[bytes] = set()
    barren = 0
    max_trees = max(256, BATCH_SIZE * cfg.max_candidates)
    next_tree = 0
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while next_tree < max_trees:
            batch = list(range(next_tree, min(next_tree + BATCH_SIZE, max_trees)))
            next_tree = batch[-1] + 1
            if executor is not None:
                results = list(executor.map(one_tree, batch))
            else:
                results = [one_tree(t) for t in batch]
            done = False
            for tree, local_log in results:
                log.merge(local_log)
                fresh = 0
                for cand in tree.candidates():
                    if cand.key() in seen:
                        continue
                    seen.add(cand.key())
                    candidates.append(cand)
                    fresh += 1
                    if len(candidates) >= cfg.max_candidates:
                        done = True
                        break
                barren = barren + 1 if fresh == 0 else 0
                if done or barren >= BARREN_LIMIT:
                    done = True
                    break
            if done:
                break
    finally:
        if executor is not None:
            executor.shutdown(wait=False)
    return candidates, log
