"""End-to-end run orchestration: standardize once, then per iteration
noise, search, select, and annotate; accumulate votes; emit both final
clusterings and a deterministic report."""

from __future__ import annotations

import dataclasses
import json
import sys
import time
from collections.abc import Mapping, Sequence

import numpy as np

from .annotate import LabelingConfig, VoteLedger, derive_boundaries, label_cluster, vote
from .data import pca_rotate, standardize
from .dipstat import CritTable
from .forest import SearchConfig
from .noise import NoiseConfig, noise_matrix
from .select import cluster_matrix

_STREAM_TREES = 1  # spawn-key namespace for search streams (noise uses 0)


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Full configuration of one clustering run."""

    alpha: float = 0.25
    m: int = 25
    gamma: float = 4.0
    iterations: int = 1
    candidates: int = 200
    seed: int = 0
    threads: int = 1
    vote: str = "runoff"
    max_antimodes: int = 100
    pca: int | None = None
    epsilon: float = 17.0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.m < 6:
            raise ValueError("minimum cluster size m must be at least 6")
        if not self.gamma > 0.0:
            raise ValueError("gamma must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if self.candidates < 1:
            raise ValueError("candidate budget must be at least 1")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        if self.vote not in ("max", "runoff"):
            raise ValueError("vote mode must be 'max' or 'runoff'")
        if self.max_antimodes < 1:
            raise ValueError("max_antimodes must be at least 1")
        if self.pca is not None and self.pca < 1:
            raise ValueError("pca component count must be at least 1")

    def search_config(self) -> SearchConfig:
        return SearchConfig(
            alpha=self.alpha,
            m=self.m,
            max_antimodes=self.max_antimodes,
            max_candidates=self.candidates,
            allow_repeat_coordinate=False,
            seed=self.seed,
        )


@dataclasses.dataclass
class RunReport:
    """Outputs of a run: both vote-mode labelings plus per-row vote
    histories and deterministic run metadata (timings go to stderr, not
    here, so reports are byte-comparable)."""

    config: dict
    columns: list[str]
    labels_max: list[str]
    labels_runoff: list[str]
    top_counts: list[list[tuple[str, int]]]
    candidates_per_iteration: list[int]
    clusters_per_iteration: list[int]

    def chosen_labels(self) -> list[str]:
        return self.labels_runoff if self.config["vote"] == "runoff" else self.labels_max

    def to_json(self) -> str:
        rows = [
            {
                "max_label": self.labels_max[i],
                "runoff_label": self.labels_runoff[i],
                "top_counts": [[label, count] for label, count in self.top_counts[i]],
            }
            for i in range(len(self.labels_max))
        ]
        payload = {
            "config": self.config,
            "columns": self.columns,
            "n_rows": len(self.labels_max),
            "candidates_per_iteration": self.candidates_per_iteration,
            "clusters_per_iteration": self.clusters_per_iteration,
            "rows": rows,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _config_dict(config: RunConfig) -> dict:
    # threads is execution infrastructure, not run semantics; leaving it out
    # keeps reports byte-identical across thread counts.
    return {
        "alpha": config.alpha,
        "m": config.m,
        "gamma": config.gamma,
        "iterations": config.iterations,
        "candidates": config.candidates,
        "seed": config.seed,
        "vote": config.vote,
        "max_antimodes": config.max_antimodes,
        "pca": config.pca,
        "epsilon": config.epsilon,
    }


def run_pipeline(
    matrix,
    names: Sequence[str],
    config: RunConfig,
    tables: Mapping[int, CritTable],
    progress: bool = False,
) -> RunReport:
    """Cluster a raw matrix end to end.

    The matrix is standardized once (and optionally rotated onto principal
    components); each iteration then noises it afresh, partitions it, and
    labels every row; the vote ledger resolves final labels both ways.
    """
    mat = np.asarray(matrix, dtype=np.float64)
    if mat.ndim != 2:
        raise ValueError("expected a two-dimensional matrix")
    if len(names) != mat.shape[1]:
        raise ValueError("one column name per matrix column is required")

    std = standardize(mat, list(names))
    if config.pca is not None:
        std = pca_rotate(std, config.pca)
        names = [f"pc{i + 1}" for i in range(config.pca)]
    n = std.shape[0]

    noise_cfg = NoiseConfig(gamma=config.gamma, seed=config.seed)
    search_cfg = config.search_config()
    label_cfg = LabelingConfig(epsilon=config.epsilon)
    ledger = VoteLedger(n, names)
    candidate_counts: list[int] = []
    cluster_counts: list[int] = []

    for iteration in range(config.iterations):
        started = time.perf_counter()
        noised = noise_matrix(std, noise_cfg, iteration)
        search_seq = np.random.SeedSequence(
            entropy=config.seed, spawn_key=(_STREAM_TREES, iteration)
        )
        result = cluster_matrix(
            noised, search_cfg, tables, search_seq, threads=config.threads
        )
        boundaries = derive_boundaries(result.cutlog)
        row_labels = [None] * n
        for cluster in result.clusters:
            for piece_rows, label in label_cluster(noised, cluster.rows, boundaries, label_cfg):
                for r in piece_rows.tolist():
                    row_labels[r] = label
        ledger.record(row_labels)
        candidate_counts.append(result.n_candidates)
        cluster_counts.append(len(result.clusters))
        if progress:
            elapsed = time.perf_counter() - started
            print(
                f"iteration {iteration + 1}/{config.iterations}: "
                f"{len(result.clusters)} clusters, "
                f"{result.n_candidates} candidates, {elapsed:.2f}s",
                file=sys.stderr,
            )

    return RunReport(
        config=_config_dict(config),
        columns=list(names),
        labels_max=vote(ledger, "max"),
        labels_runoff=vote(ledger, "runoff"),
        top_counts=[ledger.top(i, 3) for i in range(n)],
        candidates_per_iteration=candidate_counts,
        clusters_per_iteration=cluster_counts,
    )
