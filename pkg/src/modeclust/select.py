"""Candidate scoring by trimmed L-moments, greedy independent-set
selection over the overlap graph, and the residual re-clustering loop."""

from __future__ import annotations

import dataclasses
from collections.abc import Mapping

import numpy as np

from .dipstat import CritTable, dip_pvalue, dip_statistic
from .forest import CandidateCluster, CutPointLog, SearchConfig, _as_seedseq, sample_forest


def _order_stat_mean(x: np.ndarray, logfact: np.ndarray, j: int, m: int) -> float:
    """Unbiased estimate of E[X_(j:m)] from the sorted sample ``x``.

    Uses the combinatorial order-statistic weights C(i-1, j-1) C(n-i, m-j)
    / C(n, m), evaluated through log-factorials for stability.
    """
    n = x.size
    i = np.arange(1, n + 1)
    valid = (i >= j) & (i <= n - m + j)
    iv = i[valid]
    log_c = (
        logfact[iv - 1] - logfact[j - 1] - logfact[iv - j]
        + logfact[n - iv] - logfact[m - j] - logfact[n - iv - (m - j)]
        - (logfact[n] - logfact[m] - logfact[n - m])
    )
    return float(np.exp(log_c) @ x[valid])


def _logfact(n: int) -> np.ndarray:
    return np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, n + 1)))))


def trimmed_lmoments(sample) -> tuple[float, float, float]:
    """Sample L-moments of orders 2, 3, 4 with one observation trimmed from
    each tail.

    Returns the trimmed L-scale, third-order, and fourth-order moments.
    Needs at least six points.
    """
    x = np.sort(np.asarray(sample, dtype=np.float64))
    if x.ndim != 1:
        raise ValueError("expected a one-dimensional sample")
    if x.size < 6:
        raise ValueError(f"trimmed L-moments need at least 6 points, got {x.size}")
    if not np.isfinite(x).all():
        raise ValueError("sample contains non-finite values")
    lf = _logfact(x.size)
    e = {(j, m): _order_stat_mean(x, lf, j, m) for m in (4, 5, 6) for j in range(2, m)}
    sigma = (e[(3, 4)] - e[(2, 4)]) / 2.0
    tau = (e[(4, 5)] - 2.0 * e[(3, 5)] + e[(2, 5)]) / 3.0
    phi = (e[(5, 6)] - 3.0 * e[(4, 6)] + 3.0 * e[(3, 6)] - e[(2, 6)]) / 4.0
    return sigma, tau, phi


def plain_lmoments(sample) -> tuple[float, float, float]:
    """Untrimmed sample L-moments of orders 2, 3, 4; the small-sample
    fallback for clusters of four or five rows."""
    x = np.sort(np.asarray(sample, dtype=np.float64))
    if x.size < 4:
        raise ValueError(f"L-moments of order 4 need at least 4 points, got {x.size}")
    lf = _logfact(x.size)
    e = {(j, m): _order_stat_mean(x, lf, j, m) for m in (2, 3, 4) for j in range(1, m + 1)}
    l2 = (e[(2, 2)] - e[(1, 2)]) / 2.0
    l3 = (e[(3, 3)] - 2.0 * e[(2, 3)] + e[(1, 3)]) / 3.0
    l4 = (e[(4, 4)] - 3.0 * e[(3, 4)] + 3.0 * e[(2, 4)] - e[(1, 4)]) / 4.0
    return l2, l3, l4


@dataclasses.dataclass(frozen=True)
class ClusterScore:
    """Preference-score breakdown for one candidate cluster."""

    delta: float
    sigma_max: float
    sigma_sum: float
    tau_max: float
    tau_sum: float
    phi_max: float
    phi_sum: float
    sigma_nm: float
    sigma_ns: float
    tau_nm: float
    tau_ns: float
    phi_nm: float
    phi_ns: float
    preference: float


def _normalized(value: float, set_max: float) -> float:
    # A zero set-maximum means the aggregate cannot discriminate; every
    # candidate then receives the full bonus for that term.
    if set_max == 0.0:
        return 1.0
    return 1.0 - value / set_max


def score_candidates(matrix, candidates: list[CandidateCluster]) -> list[ClusterScore]:
    """Score candidates: the minimum coordinate dip p-value plus averaged
    normalized L-moment terms, higher is better.

    Per-coordinate moments are trimmed when the cluster has at least six
    rows and untrimmed otherwise; each candidate caches them.  Normalization
    is against the maxima of the candidate set passed here, so scores are
    only comparable within one call.
    """
    if not candidates:
        raise ValueError("candidate set is empty")
    mat = np.asarray(matrix, dtype=np.float64)
    p = mat.shape[1]
    for cand in candidates:
        if cand.moments is None:
            fn = trimmed_lmoments if cand.rows.size >= 6 else plain_lmoments
            cand.moments = np.array([fn(mat[cand.rows, j]) for j in range(p)])

    agg = np.empty((len(candidates), 6))
    for idx, cand in enumerate(candidates):
        mabs = np.abs(cand.moments)
        agg[idx] = (
            mabs[:, 0].max(), mabs[:, 0].sum(),
            mabs[:, 1].max(), mabs[:, 1].sum(),
            mabs[:, 2].max(), mabs[:, 2].sum(),
        )
    set_max = agg.max(axis=0)

    scores = []
    for idx, cand in enumerate(candidates):
        sm, ss, tm, ts, pm, ps = agg[idx]
        terms = [_normalized(agg[idx][t], set_max[t]) for t in range(6)]
        preference = (
            cand.delta
            + (terms[0] + terms[1]) / 2.0
            + (terms[2] + terms[3]) / 2.0
            + (terms[4] + terms[5]) / 2.0
        )
        scores.append(
            ClusterScore(
                delta=cand.delta,
                sigma_max=sm, sigma_sum=ss,
                tau_max=tm, tau_sum=ts,
                phi_max=pm, phi_sum=ps,
                sigma_nm=terms[0], sigma_ns=terms[1],
                tau_nm=terms[2], tau_ns=terms[3],
                phi_nm=terms[4], phi_ns=terms[5],
                preference=preference,
            )
        )
    return scores


@dataclasses.dataclass
class OverlapGraph:
    """Candidates as nodes, with an edge wherever two row sets intersect."""

    candidates: list[CandidateCluster]
    neighbors: list[set[int]]


def build_overlap_graph(candidates: list[CandidateCluster]) -> OverlapGraph:
    by_row: dict[int, list[int]] = {}
    for idx, cand in enumerate(candidates):
        for r in cand.rows.tolist():
            by_row.setdefault(r, []).append(idx)
    neighbors: list[set[int]] = [set() for _ in candidates]
    for members in by_row.values():
        for a in members:
            for b in members:
                if a != b:
                    neighbors[a].add(b)
    return OverlapGraph(candidates=candidates, neighbors=neighbors)


def greedy_mwis(graph: OverlapGraph, scores: list[ClusterScore]) -> list[int]:
    """Greedy maximum-weight independent set: repeatedly take the
    highest-preference candidate and knock out its overlap neighbours.

    Ties resolve toward the lexicographically smaller row-index set.  The
    result is independent and maximal but not necessarily optimal.
    """
    order = sorted(
        range(len(graph.candidates)),
        key=lambda i: (-scores[i].preference, tuple(graph.candidates[i].rows.tolist())),
    )
    selected: list[int] = []
    blocked: set[int] = set()
    for i in order:
        if i in blocked:
            continue
        selected.append(i)
        blocked.add(i)
        blocked.update(graph.neighbors[i])
    return selected


@dataclasses.dataclass
class FinalCluster:
    rows: np.ndarray
    kind: str  # "selected" | "residual"


@dataclasses.dataclass
class ClusterResult:
    assignments: np.ndarray
    clusters: list[FinalCluster]
    cutlog: CutPointLog
    n_candidates: int = 0


def _is_alpha_m_cluster(sub: np.ndarray, alpha: float, tables: Mapping[int, CritTable]) -> bool:
    for j in range(sub.shape[1]):
        col = np.sort(sub[:, j])
        if dip_pvalue(dip_statistic(col), tables[1]) <= alpha:
            return False
    return True


def cluster_matrix(
    matrix,
    cfg: SearchConfig,
    tables: Mapping[int, CritTable],
    rng,
    threads: int = 1,
) -> ClusterResult:
    """Partition a noised matrix by repeated search-and-select passes.

    Each pass searches the residual rows, scores the candidates, and keeps a
    greedy independent set of them.  The loop ends when the residual is
    empty, is itself a cluster with every coordinate unimodal at alpha, has
    fewer than ``cfg.m`` rows, or yields no candidates; leftover rows form a
    single residual cluster.  Only the first pass feeds the returned
    cut-point log.
    """
    mat = np.ascontiguousarray(matrix, dtype=np.float64)
    if mat.ndim != 2:
        raise ValueError("expected a two-dimensional matrix")
    base = _as_seedseq(rng)
    n = mat.shape[0]

    residual = np.arange(n)
    clusters: list[FinalCluster] = []
    cutlog = CutPointLog()
    n_candidates = 0
    pass_idx = 0
    while residual.size:
        if residual.size < cfg.m:
            clusters.append(FinalCluster(rows=residual, kind="residual"))
            break
        sub = mat[residual]
        if _is_alpha_m_cluster(sub, cfg.alpha, tables):
            clusters.append(FinalCluster(rows=residual, kind="selected"))
            break
        pass_seq = np.random.SeedSequence(
            entropy=base.entropy, spawn_key=tuple(base.spawn_key) + (pass_idx,)
        )
        cands, log = sample_forest(sub, cfg, tables, pass_seq, threads=threads)
        n_candidates += len(cands)
        if pass_idx == 0:
            cutlog = log
        if not cands:
            clusters.append(FinalCluster(rows=residual, kind="residual"))
            break
        scores = score_candidates(sub, cands)
        graph = build_overlap_graph(cands)
        picked = greedy_mwis(graph, scores)
        taken = np.zeros(residual.size, dtype=bool)
        for i in picked:
            clusters.append(FinalCluster(rows=residual[cands[i].rows], kind="selected"))
            taken[cands[i].rows] = True
        residual = residual[~taken]
        pass_idx += 1

    assignments = np.full(n, -1, dtype=np.int64)
    for cid, cluster in enumerate(clusters):
        assignments[cluster.rows] = cid
    return ClusterResult(
        assignments=assignments,
        clusters=clusters,
        cutlog=cutlog,
        n_candidates=n_candidates,
    )
