import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hdpbench.stats import (
    ContingencyTable,
    bh_adjust,
    cliffs_delta,
    compare_pair,
    diversity_table,
    mcnemar,
    satisfactory,
    satisfactory_ratio,
    scott_knott,
    wilcoxon_signed_rank,
)
from hdpbench.udp import ScoredPrediction

# ---------------------------------------------------------------------------
# Wilcoxon signed-rank


def test_wilcoxon_identical_samples():
    assert wilcoxon_signed_rank([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 1.0


def test_wilcoxon_five_positive_differences():
    assert wilcoxon_signed_rank([1, 2, 3, 4, 5], [0, 1, 2, 3, 4]) == pytest.approx(2 / 32)


def oracle_exact_wilcoxon(x, y):
    """Full 2^n sign enumeration, independent of the implementation."""
    diffs = [a - b for a, b in zip(x, y) if a != b]
    n = len(diffs)
    if n == 0:
        return 1.0
    magnitudes = sorted(abs(d) for d in diffs)
    ranks = []
    for d in diffs:
        tied = [i for i, m in enumerate(magnitudes) if m == abs(d)]
        ranks.append(sum(t + 1 for t in tied) / len(tied))
    w_obs = sum(r for r, d in zip(ranks, diffs) if d > 0)
    ge = le = total = 0
    for signs in itertools.product([0, 1], repeat=n):
        w = sum(r for r, s in zip(ranks, signs) if s)
        total += 1
        ge += w >= w_obs - 1e-9
        le += w <= w_obs + 1e-9
    return min(1.0, 2 * min(ge / total, le / total))


def test_wilcoxon_matches_enumeration_oracle():
    rng = np.random.default_rng(0)
    for _ in range(30):
        n = int(rng.integers(1, 11))
        x = rng.integers(0, 6, size=n).astype(float)
        y = rng.integers(0, 6, size=n).astype(float)
        assert wilcoxon_signed_rank(x, y) == pytest.approx(
            oracle_exact_wilcoxon(x, y), abs=1e-12
        )


def test_wilcoxon_normal_path_tracks_exact():
    rng = np.random.default_rng(2)
    import hdpbench.stats as stats_module

    for _ in range(20):
        x = rng.normal(size=12)
        y = x + rng.normal(0.3, 1.0, size=12)
        exact = wilcoxon_signed_rank(x, y)
        original = stats_module._EXACT_LIMIT
        try:
            stats_module._EXACT_LIMIT = 0  # force the approximation
            approx = wilcoxon_signed_rank(x, y)
        finally:
            stats_module._EXACT_LIMIT = original
        assert abs(exact - approx) < 0.02


# ---------------------------------------------------------------------------
# Benjamini-Hochberg


def test_bh_single_value_unchanged():
    assert bh_adjust([0.04]) == [0.04]


def test_bh_step_up_example():
    assert bh_adjust([0.01, 0.02, 0.04]) == pytest.approx([0.03, 0.03, 0.04])


def test_bh_adjusted_at_least_raw():
    rng = np.random.default_rng(3)
    p = rng.random(20)
    adjusted = bh_adjust(p)
    assert all(a >= r - 1e-15 for a, r in zip(adjusted, p))
    assert all(a <= 1 for a in adjusted)


def test_bh_preserves_order_positions():
    p = [0.9, 0.001, 0.5]
    adjusted = bh_adjust(p)
    assert adjusted[1] == min(adjusted)


def test_bh_monotone_in_sorted_order():
    rng = np.random.default_rng(4)
    p = rng.random(15)
    adjusted = np.array(bh_adjust(p))
    order = np.argsort(p)
    assert np.all(np.diff(adjusted[order]) >= -1e-15)


def test_bh_fixed_point_on_constant_vectors():
    assert bh_adjust([0.2, 0.2, 0.2]) == pytest.approx([0.2, 0.2, 0.2])


def test_bh_rejects_bad_input():
    with pytest.raises(ValueError):
        bh_adjust([1.5])


# ---------------------------------------------------------------------------
# Cliff's delta


def test_cliffs_identical():
    assert cliffs_delta([1, 2, 3], [1, 2, 3]) == 0.0


def test_cliffs_fully_separated():
    assert cliffs_delta([10, 11], [1, 2]) == 1.0


def test_cliffs_enumerated_example():
    assert cliffs_delta([1, 2], [1, 3]) == -0.25


@given(
    st.lists(st.integers(-5, 5), min_size=1, max_size=8),
    st.lists(st.integers(-5, 5), min_size=1, max_size=8),
)
def test_cliffs_antisymmetry(x, y):
    assert cliffs_delta(x, y) == -cliffs_delta(y, x)


# ---------------------------------------------------------------------------
# compare_pair


def test_compare_identical_is_tie():
    x = list(range(20))
    assert compare_pair(x, x) == "tie"


def test_compare_large_shift_wins():
    rng = np.random.default_rng(5)
    y = rng.random(20).tolist()
    x = [v + 10 for v in y]
    assert compare_pair(x, y) == "win"
    assert compare_pair(y, x) == "loss"


def test_compare_negligible_effect_is_tie():
    # significant p but tiny delta: it stays a tie
    rng = np.random.default_rng(6)
    y = rng.normal(0, 1, 40)
    x = y + 1e-6
    assert compare_pair(list(x), list(y), adjusted_p=0.001) == "tie"


def test_compare_drops_absent_pairs():
    x = [1.0, None, 3.0]
    y = [0.5, 2.0, None]
    assert compare_pair(x, y) == "tie"  # one surviving pair


def test_compare_invariant_under_affine_transform():
    rng = np.random.default_rng(7)
    for _ in range(10):
        y = rng.normal(size=15)
        x = y + rng.normal(0.5, 0.3, size=15)
        base = compare_pair(list(x), list(y))
        scaled = compare_pair(list(3 * x + 11), list(3 * y + 11))
        assert base == scaled


# ---------------------------------------------------------------------------
# Scott-Knott


def test_scott_knott_identical_methods_one_group():
    samples = {"a": [0.5, 0.6, 0.7], "b": [0.5, 0.6, 0.7]}
    ranking = scott_knott(samples)
    assert ranking.groups == (("a", "b"),)


def test_scott_knott_clearly_separated_methods():
    rng = np.random.default_rng(8)
    samples = {
        "good": list(rng.normal(100, 0.1, 20)),
        "bad": list(rng.normal(0, 0.1, 20)),
    }
    ranking = scott_knott(samples)
    assert ranking.groups == (("good",), ("bad",))
    assert ranking.rank_of("good") == 1


def test_scott_knott_identically_distributed_usually_one_group():
    one_group = 0
    for trial in range(100):
        rng = np.random.default_rng(trial)
        samples = {f"m{k}": list(rng.normal(0.5, 0.1, 30)) for k in range(5)}
        one_group += len(scott_knott(samples).groups) == 1
    assert one_group >= 95


def test_scott_knott_name_permutation_invariant():
    rng = np.random.default_rng(9)
    data = {f"m{k}": list(rng.normal(k * 0.5, 0.4, 15)) for k in range(4)}
    base = scott_knott(data)
    shuffled = dict(reversed(list(data.items())))
    assert scott_knott(shuffled).groups == base.groups


def test_scott_knott_requires_two_samples():
    with pytest.raises(ValueError):
        scott_knott({"a": [1.0]})


def test_scott_knott_three_tiers():
    rng = np.random.default_rng(10)
    samples = {
        "top": list(rng.normal(10, 0.2, 25)),
        "mid1": list(rng.normal(5, 0.2, 25)),
        "mid2": list(rng.normal(5.02, 0.2, 25)),
        "low": list(rng.normal(0, 0.2, 25)),
    }
    ranking = scott_knott(samples)
    assert len(ranking.groups) == 3
    assert ranking.groups[0] == ("top",)
    assert set(ranking.groups[1]) == {"mid1", "mid2"}
    assert ranking.groups[2] == ("low",)


# ---------------------------------------------------------------------------
# McNemar and diversity


PAPER_TABLE = {
    "method1": [0, 0, 0, 0, 0, 1, 1, 0, 0, 0],
    "method2": [1, 1, 1, 1, 1, 0, 1, 1, 1, 1],
    "method3": [0, 0, 1, 1, 0, 0, 0, 1, 1, 0],
}


def paper_preds(key):
    return [
        ScoredPrediction(f"m{i}", float(v), bool(v), 1.0)
        for i, v in enumerate(PAPER_TABLE[key])
    ]


def paper_truth():
    return {f"m{i}": True for i in range(10)}


def test_diversity_counts_for_worked_example():
    table = diversity_table(paper_preds("method1"), paper_preds("method2"), paper_truth())
    assert (table.n_cc, table.n_cw, table.n_wc, table.n_ww) == (1, 1, 8, 0)
    assert table.total == 10


def test_mcnemar_reproduces_worked_p_values():
    t12 = diversity_table(paper_preds("method1"), paper_preds("method2"), paper_truth())
    assert mcnemar(t12) == pytest.approx(0.0196, abs=1e-3)
    t13 = diversity_table(paper_preds("method1"), paper_preds("method3"), paper_truth())
    assert mcnemar(t13) == pytest.approx(0.4142, abs=1e-3)


def test_mcnemar_balanced_discordants():
    assert mcnemar(ContingencyTable(3, 4, 4, 2)) == 1.0
    assert mcnemar(ContingencyTable(5, 0, 0, 5)) == 1.0


def test_diversity_identical_predictions():
    table = diversity_table(paper_preds("method1"), paper_preds("method1"), paper_truth())
    assert table.n_cw == 0 and table.n_wc == 0


def test_diversity_ignores_non_defective_modules():
    preds_a = [ScoredPrediction("a", 1, True, 1.0), ScoredPrediction("b", 0, False, 1.0)]
    preds_b = [ScoredPrediction("a", 1, False, 1.0), ScoredPrediction("b", 0, True, 1.0)]
    truth = {"a": True, "b": False}
    table = diversity_table(preds_a, preds_b, truth)
    assert table.total == 1
    assert table.n_cw == 1


def test_diversity_alignment_error():
    preds_a = [ScoredPrediction("a", 1, True, 1.0)]
    preds_b = [ScoredPrediction("zzz", 1, True, 1.0)]
    with pytest.raises(ValueError):
        diversity_table(preds_a, preds_b, {"a": True})


# ---------------------------------------------------------------------------
# satisfactory criteria


def test_satisfactory_both_criteria():
    assert satisfactory(0.80, 0.80, "SC1")
    assert satisfactory(0.80, 0.80, "SC2")


def test_satisfactory_sc2_only():
    assert not satisfactory(0.60, 0.75, "SC1")
    assert satisfactory(0.60, 0.75, "SC2")


def test_satisfactory_boundaries_are_strict():
    assert not satisfactory(0.75, 0.75, "SC1")
    assert not satisfactory(0.50, 0.71, "SC2")
    assert not satisfactory(0.51, 0.70, "SC2")


def test_satisfactory_ratio_values():
    results = [(0.8, 0.8)] * 3 + [(0.1, 0.1)] * 28
    assert satisfactory_ratio(results, "SC1") == 9.68
    assert satisfactory_ratio([(0.0, 0.0)] * 5, "SC1") == 0.0
    assert satisfactory_ratio([(0.9, 0.9)] * 4, "SC2") == 100.0


def test_satisfactory_rejects_unknown_criterion():
    with pytest.raises(ValueError):
        satisfactory(0.5, 0.5, "SC3")
