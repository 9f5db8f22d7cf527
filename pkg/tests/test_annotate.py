"""Boundary derivation, fraction labels, and cross-iteration voting."""

from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from modeclust.annotate import (
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
from modeclust.forest import CutPointLog


# ---------------------------------------------------------------------------
# boundary derivation
# ---------------------------------------------------------------------------

def test_median_of_three_singleton_cuts():
    log = CutPointLog()
    for c in (1.0, 1.2, 0.8):
        log.add(0, (c,))
    got = derive_boundaries(log)
    assert got.coordinates() == [0]
    assert_array_equal(got.boundaries[0], [1.0])


def test_tied_cardinalities_prefer_fewer_cuts():
    log = CutPointLog()
    for i in range(5):
        log.add(2, (float(i),))
        log.add(2, (float(i), float(i) + 10.0))
    got = derive_boundaries(log)
    assert got.boundaries[2].shape == (1,)


def test_unsplit_coordinate_stays_unannotated():
    log = CutPointLog()
    log.add(3, (0.5,))
    got = derive_boundaries(log)
    assert got.coordinates() == [3]
    assert 0 not in got.boundaries


def test_component_medians_match_direct_recomputation():
    rng = np.random.default_rng(90)
    log = CutPointLog()
    vectors = []
    for _ in range(9):
        lo = rng.uniform(-2.0, 0.0)
        vec = (lo, lo + rng.uniform(0.5, 2.0))
        vectors.append(vec)
        log.add(1, vec)
    got = derive_boundaries(log).boundaries[1]
    uniq = sorted(set(vectors))  # the log stores a set, not a multiset
    for comp in range(2):
        vals = sorted(v[comp] for v in uniq)
        mid = len(vals) // 2
        want = vals[mid] if len(vals) % 2 else (vals[mid - 1] + vals[mid]) / 2.0
        assert got[comp] == pytest.approx(want)
    assert got[0] < got[1]


def test_boundary_vectors_strictly_increase():
    rng = np.random.default_rng(91)
    for t in range(20):
        log = CutPointLog()
        a = int(rng.integers(2, 5))
        for _ in range(rng.integers(3, 12)):
            cuts = np.cumsum(rng.uniform(0.1, 1.0, size=a)) + rng.uniform(-3, 3)
            log.add(0, tuple(cuts))
        got = derive_boundaries(log).boundaries[0]
        assert (np.diff(got) > 0).all()


# ---------------------------------------------------------------------------
# words and fraction arithmetic
# ---------------------------------------------------------------------------

def test_fraction_words():
    assert fraction_word(0, 1) == "lowest"
    assert fraction_word(0, 3) == "lowest"
    assert fraction_word(1, 1) == "highest"
    assert fraction_word(2, 2) == "highest"
    assert fraction_word(1, 2) == "medium"
    assert fraction_word(2, 4) == "medium"
    assert fraction_word(1, 4) == "medium-low"
    assert fraction_word(1, 3) == "medium-low"
    assert fraction_word(3, 4) == "medium-high"
    assert fraction_word(2, 3) == "medium-high"
    assert fraction_word(3, 8) == "level-3-of-8"
    assert fraction_word(5, 16) == "5/16"


def test_combine_is_exact_integer_arithmetic():
    assert combine_labels((0, 1), (1, 2)) == (1, 4)
    assert combine_labels((1, 1), (0, 1)) == (1, 2)
    # same fraction twice lands on the same rational, unreduced
    for x, y in ((1, 2), (2, 3), (0, 1), (3, 4)):
        n, d = combine_labels((x, y), (x, y))
        assert (n, d) == (2 * x * y, 2 * y * y)
        assert Fraction(n, d) == Fraction(x, y)


def test_render_uses_names_and_words():
    label = ClusterLabel(((0, 1, 1), (2, 1, 2)))
    assert label.render(["flow", "side", "area"]) == "flow highest; area medium"
    assert label.render() == "c0 highest; c2 medium"
    assert ClusterLabel(()).render() == "unannotated"


# ---------------------------------------------------------------------------
# cluster labeling
# ---------------------------------------------------------------------------

def _single_coord(k):
    return AnnotationBoundaries(boundaries={0: np.asarray(k, dtype=float)})


def test_cluster_below_single_boundary_is_lowest():
    rng = np.random.default_rng(10)
    mat = rng.standard_normal((40, 1))
    pieces = label_cluster(mat, np.arange(40), _single_coord([5.0]))
    assert len(pieces) == 1
    rows, label = pieces[0]
    assert_array_equal(rows, np.arange(40))
    assert label.fractions == ((0, 0, 1),)
    assert label.render() == "c0 lowest"


def test_cluster_above_single_boundary_is_highest():
    rng = np.random.default_rng(11)
    mat = rng.standard_normal((40, 1)) + 9.0
    (_, label), = label_cluster(mat, np.arange(40), _single_coord([5.0]))
    assert label.fractions == ((0, 1, 1),)


def test_straddling_cluster_splits_at_the_boundary():
    rng = np.random.default_rng(12)
    mat = np.concatenate([rng.standard_normal((30, 1)) - 3.0,
                          rng.standard_normal((30, 1)) + 3.0])
    pieces = label_cluster(mat, np.arange(60), _single_coord([0.0]))
    assert len(pieces) == 2
    frac_by_rows = {tuple(rows.tolist()): label.fractions[0][1:] for rows, label in pieces}
    lows = tuple(np.flatnonzero(mat[:, 0] < 0.0).tolist())
    highs = tuple(np.flatnonzero(mat[:, 0] >= 0.0).tolist())
    assert frac_by_rows == {lows: (0, 1), highs: (1, 1)}


def test_two_boundary_middle_cluster_is_medium():
    rng = np.random.default_rng(13)
    mat = rng.standard_normal((50, 1)) * 0.2 + 3.0
    (_, label), = label_cluster(mat, np.arange(50), _single_coord([1.0, 5.0]))
    assert label.fractions == ((0, 1, 2),)
    assert label.render() == "c0 medium"


def test_three_boundary_top_cluster_is_highest():
    mat = np.linspace(10.0, 11.0, 30).reshape(-1, 1)
    (_, label), = label_cluster(mat, np.arange(30), _single_coord([1.0, 2.0, 3.0]))
    assert label.fractions == ((0, 3, 3),)
    assert fraction_word(3, 3) == "highest"


def test_pieces_reevaluate_percentiles_per_piece():
    """After a split on one coordinate the next coordinate labels each piece
    from its own values, not the parent cluster's."""
    rng = np.random.default_rng(14)
    n = 40
    coord0 = np.concatenate([rng.standard_normal(n // 2) - 4.0,
                             rng.standard_normal(n // 2) + 4.0])
    coord1 = np.where(coord0 < 0.0, 0.0, 10.0) + rng.standard_normal(n) * 0.1
    mat = np.column_stack([coord0, coord1])
    bounds = AnnotationBoundaries(boundaries={0: np.array([0.0]),
                                              1: np.array([3.0, 6.0])})
    pieces = label_cluster(mat, np.arange(n), bounds)
    assert len(pieces) == 2
    by_first = {label.fractions[0][1]: label.fractions[1][1:] for _, label in pieces}
    # low piece sits below both coord-1 cuts, high piece above both; a
    # whole-cluster median would have called both pieces 1/2
    assert by_first == {0: (0, 2), 1: (2, 2)}


def test_shifting_values_up_never_lowers_a_fraction():
    rng = np.random.default_rng(15)
    for t in range(25):
        mat = rng.standard_normal((30, 2)) * rng.uniform(0.5, 3.0)
        bounds = AnnotationBoundaries(boundaries={
            0: np.sort(rng.uniform(-2.0, 2.0, size=2)),
            1: np.sort(rng.uniform(-2.0, 2.0, size=3)),
        })
        if (np.diff(bounds.boundaries[0]) <= 0).any() or (np.diff(bounds.boundaries[1]) <= 0).any():
            continue
        (_, before), = label_cluster(mat, np.arange(30), bounds)
        (_, after), = label_cluster(mat + rng.uniform(0.0, 4.0), np.arange(30), bounds)
        for (j1, n1, d1), (j2, n2, d2) in zip(before.fractions, after.fractions):
            assert (j1, d1) == (j2, d2)
            assert n2 >= n1


def test_labeling_config_validation():
    with pytest.raises(ValueError):
        LabelingConfig(epsilon=50.0)
    with pytest.raises(ValueError):
        LabelingConfig(epsilon=-1.0)


# ---------------------------------------------------------------------------
# the vote ledger
# ---------------------------------------------------------------------------

LOW = ClusterLabel(((0, 0, 1),))
HIGH = ClusterLabel(((0, 1, 1),))
MED = ClusterLabel(((0, 1, 2),))


def _ledger_from_counts(pairs):
    """One-row ledger fed the given (label, count) sequence."""
    ledger = VoteLedger(1)
    for label, count in pairs:
        for _ in range(count):
            ledger.record([label])
    return ledger


def test_majority_label_wins_both_modes():
    filler = [(ClusterLabel(((0, i, 7),)), 8) for i in range(1, 6)]
    ledger = _ledger_from_counts([(HIGH, 60)] + filler)
    assert ledger.iterations == 100
    assert vote(ledger, "max") == ["c0 highest"]
    assert vote(ledger, "runoff") == ["c0 highest"]


def test_runoff_combines_top_two():
    # 40% lowest, 25% medium, the rest split below: combined 1/4
    rest = [(ClusterLabel(((0, i, 7),)), c) for i, c in ((2, 18), (3, 17))]
    ledger = _ledger_from_counts([(LOW, 40), (MED, 25)] + rest)
    assert vote(ledger, "runoff") == ["c0 medium-low"]
    assert vote(ledger, "max") == ["c0 lowest"]


def test_runoff_three_way_combination_is_left_associative():
    # 25% lowest + 20% highest + 16% medium: (0/1 ∘ 1/1) = 1/2, then
    # (1/2 ∘ 1/2) = 4/8
    rest = [(ClusterLabel(((0, i, 7),)), 13) for i in (2, 3, 4)]
    ledger = _ledger_from_counts([(LOW, 25), (HIGH, 20), (MED, 16)] + rest)
    assert vote(ledger, "runoff") == ["c0 level-4-of-8"]


def test_runoff_at_exactly_half_is_not_a_majority():
    rest = [(ClusterLabel(((0, i, 7),)), c) for i, c in ((2, 15), (3, 14))]
    ledger = _ledger_from_counts([(LOW, 50), (MED, 21)] + rest)
    # 50/100 fails the >1/2 test but clears the 30% band, so it combines
    assert vote(ledger, "runoff") == ["c0 medium-low"]


def test_runoff_fallback_when_no_threshold_met():
    pairs = [(ClusterLabel(((0, i, 11),)), 10) for i in range(10)]
    ledger = _ledger_from_counts(pairs)
    got = vote(ledger, "runoff")
    assert got == vote(ledger, "max")
    assert got == ["c0 1/11"]  # ten-way tie breaks to the smallest string


def test_combination_keeps_top_label_for_unshared_coordinates():
    top = ClusterLabel(((0, 0, 1), (1, 1, 2)))
    second = ClusterLabel(((0, 1, 1),))
    rest = [(ClusterLabel(((0, i, 7),)), c) for i, c in ((2, 18), (3, 17))]
    ledger = _ledger_from_counts([(top, 40), (second, 25)] + rest)
    assert vote(ledger, "runoff") == ["c0 medium; c1 medium"]


def test_ledger_counts_sum_to_iterations():
    rng = np.random.default_rng(42)
    reps = [LOW, HIGH, MED, ClusterLabel(((1, 2, 3),))]
    ledger = VoteLedger(6)
    for it in range(50):
        ledger.record([reps[rng.integers(len(reps))] for _ in range(6)])
    assert ledger.iterations == 50
    for row in range(6):
        assert sum(ledger.counts[row].values()) == 50
    for key in vote(ledger, "max"):
        assert any(key in ledger.counts[r] for r in range(6))


def test_max_vote_returns_a_key_from_each_rows_ledger():
    rng = np.random.default_rng(43)
    reps = [LOW, HIGH, MED]
    ledger = VoteLedger(10)
    for it in range(30):
        ledger.record([reps[rng.integers(3)] for _ in range(10)])
    got = vote(ledger, "max")
    for row, key in enumerate(got):
        assert key in ledger.counts[row]
        assert ledger.counts[row][key] == max(ledger.counts[row].values())


def test_ledger_and_vote_errors():
    ledger = VoteLedger(3)
    with pytest.raises(ValueError):
        ledger.record([LOW, HIGH])
    with pytest.raises(ValueError):
        vote(ledger)
    ledger.record([LOW, HIGH, MED])
    with pytest.raises(ValueError):
        vote(ledger, "plurality")
