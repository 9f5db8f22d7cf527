"""Selective clustering by modal structure of coordinate projections.

The package splits a numeric matrix into clusters whose per-coordinate
projections all look unimodal, then labels each cluster by where it sits
relative to per-coordinate annotation boundaries.  Entry points:

* :func:`run_pipeline` / the ``modeclust`` CLI for the full procedure,
* :mod:`modeclust.dipstat` for the multimodality statistics,
* :mod:`modeclust.density` for taut-string density estimates.
"""

from ._core import BACKEND
from .annotate import (
    AnnotationBoundaries,
    ClusterLabel,
    LabelingConfig,
    VoteLedger,
    combine_labels,
    derive_boundaries,
    fraction_word,
    label_cluster,
    vote,
)
from .data import load_matrix_csv, pca_rotate, standardize
from .density import (
    DEFAULT_KAPPA,
    RADIUS_SCALE,
    ModalSplit,
    TautStringFit,
    antimode_cutpoints,
    kmedoids_1d,
    taut_string,
    tube_radius,
)
from .dipstat import (
    CritTable,
    DipResult,
    ModalEstimate,
    build_crit_table,
    build_default_tables,
    dip_pvalue,
    dip_statistic,
    estimate_num_modes,
    kdip_pvalue,
    kdip_statistic,
    load_default_tables,
    verify_table,
)
from .forest import (
    CandidateCluster,
    CutPointLog,
    PartitionTree,
    SearchConfig,
    SplitOutcome,
    grow_tree,
    sample_forest,
    split_coordinate,
)
from .metrics import Clustering, adjusted_rand_index, max_vi, vi_distance
from .noise import NoiseConfig, break_ties_uniform, noise_matrix, perturb_gaussian
from .pipeline import RunConfig, RunReport, run_pipeline
from .select import (
    ClusterResult,
    ClusterScore,
    FinalCluster,
    OverlapGraph,
    build_overlap_graph,
    cluster_matrix,
    greedy_mwis,
    plain_lmoments,
    score_candidates,
    trimmed_lmoments,
)
from .simulate import MixtureSpec, scenario_one, simulate_mixture

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    "AnnotationBoundaries",
    "ClusterLabel",
    "LabelingConfig",
    "VoteLedger",
    "combine_labels",
    "derive_boundaries",
    "fraction_word",
    "label_cluster",
    "vote",
    "load_matrix_csv",
    "pca_rotate",
    "standardize",
    "DEFAULT_KAPPA",
    "RADIUS_SCALE",
    "ModalSplit",
    "TautStringFit",
    "antimode_cutpoints",
    "kmedoids_1d",
    "taut_string",
    "tube_radius",
    "CritTable",
    "DipResult",
    "ModalEstimate",
    "build_crit_table",
    "build_default_tables",
    "dip_pvalue",
    "dip_statistic",
    "estimate_num_modes",
    "kdip_pvalue",
    "kdip_statistic",
    "load_default_tables",
    "verify_table",
    "CandidateCluster",
    "CutPointLog",
    "PartitionTree",
    "SearchConfig",
    "SplitOutcome",
    "grow_tree",
    "sample_forest",
    "split_coordinate",
    "Clustering",
    "adjusted_rand_index",
    "max_vi",
    "vi_distance",
    "NoiseConfig",
    "break_ties_uniform",
    "noise_matrix",
    "perturb_gaussian",
    "RunConfig",
    "RunReport",
    "run_pipeline",
    "ClusterResult",
    "ClusterScore",
    "FinalCluster",
    "OverlapGraph",
    "build_overlap_graph",
    "cluster_matrix",
    "greedy_mwis",
    "plain_lmoments",
    "score_candidates",
    "trimmed_lmoments",
    "MixtureSpec",
    "scenario_one",
    "simulate_mixture",
]
