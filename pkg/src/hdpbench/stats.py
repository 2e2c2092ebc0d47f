"""Statistical comparison machinery: Wilcoxon signed-rank with BH
correction and Cliff's delta win/tie/loss calls, Scott-Knott mean-rank
grouping, McNemar diversity analysis, and the satisfactory criteria.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import chi2

from .measures import _average_ranks
from .udp import ScoredPrediction

ALPHA = 0.05
NEGLIGIBLE_DELTA = 0.147  # |delta| below this is a negligible effect
_EXACT_LIMIT = 12  # enumerate 2^n sign assignments up to this many nonzero diffs


def wilcoxon_signed_rank(x: Sequence[float], y: Sequence[float]) -> float:
    """Two-sided Wilcoxon signed-rank p-value for paired samples.

    Zero differences are dropped and tied |differences| share averaged
    ranks. The p-value is exact (full sign enumeration) for up to 12
    remaining pairs; beyond that a normal approximation with tie and
    continuity corrections keeps the two paths within 0.02 of each other
    at the crossover. All-zero differences give p = 1.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) == 0:
        raise ValueError("x and y must be equal-length non-empty vectors")
    diffs = x - y
    diffs = diffs[diffs != 0]
    n = len(diffs)
    if n == 0:
        return 1.0
    ranks = _average_ranks(np.abs(diffs))
    w_plus = float(ranks[diffs > 0].sum())
    if n <= _EXACT_LIMIT:
        signs = (np.arange(2**n, dtype=np.uint32)[:, None] >> np.arange(n)) & 1
        sums = signs @ ranks
        p_ge = float(np.mean(sums >= w_plus - 1e-9))
        p_le = float(np.mean(sums <= w_plus + 1e-9))
        return min(1.0, 2.0 * min(p_ge, p_le))
    mu = n * (n + 1) / 4.0
    _, tie_counts = np.unique(np.abs(diffs), return_counts=True)
    sigma2 = n * (n + 1) * (2 * n + 1) / 24.0 - float(np.sum(tie_counts**3 - tie_counts)) / 48.0
    z = max(abs(w_plus - mu) - 0.5, 0.0) / math.sqrt(sigma2)
    return math.erfc(z / math.sqrt(2.0))


def bh_adjust(pvals: Sequence[float]) -> list[float]:
    """Benjamini-Hochberg step-up adjusted p-values, original order kept."""
    p = np.asarray(pvals, dtype=float)
    if p.ndim != 1 or len(p) == 0:
        raise ValueError("need a non-empty vector of p-values")
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    m = len(p)
    order = np.argsort(p, kind="stable")
    scaled = p[order] * m / np.arange(1, m + 1)
    adjusted = np.minimum(1.0, np.minimum.accumulate(scaled[::-1])[::-1])
    out = np.empty(m)
    out[order] = adjusted
    return out.tolist()


def cliffs_delta(x: Sequence[float], y: Sequence[float]) -> float:
    """(#{x_i > y_j} - #{x_i < y_j}) / (|x| * |y|), in [-1, 1]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) == 0 or len(y) == 0:
        raise ValueError("both samples must be non-empty")
    greater = int(np.sum(x[:, None] > y[None, :]))
    less = int(np.sum(x[:, None] < y[None, :]))
    return (greater - less) / (len(x) * len(y))


def compare_pair(
    x: Sequence[float | None],
    y: Sequence[float | None],
    adjusted_p: float | None = None,
) -> str:
    """'win' / 'tie' / 'loss' for the first sample against the second.

    A difference counts only when the (possibly BH-corrected) p-value is
    below 0.05 and the Cliff's delta effect is not negligible. Pairs with
    an absent value on either side are dropped; fewer than two surviving
    pairs is a tie.
    """
    if len(x) != len(y):
        raise ValueError("paired samples must have equal length")
    kept = [(a, b) for a, b in zip(x, y) if a is not None and b is not None]
    if len(kept) < 2:
        return "tie"
    xs = [a for a, _ in kept]
    ys = [b for _, b in kept]
    p = wilcoxon_signed_rank(xs, ys) if adjusted_p is None else adjusted_p
    if p >= ALPHA:
        return "tie"
    delta = cliffs_delta(xs, ys)
    if delta >= NEGLIGIBLE_DELTA:
        return "win"
    if delta <= -NEGLIGIBLE_DELTA:
        return "loss"
    return "tie"


@dataclass(frozen=True)
class WtlRecord:
    win: int
    tie: int
    loss: int

    def __post_init__(self):
        if min(self.win, self.tie, self.loss) < 0:
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return self.win + self.tie + self.loss

    def __str__(self) -> str:
        return f"{self.win}/{self.tie}/{self.loss}"


@dataclass(frozen=True)
class SkRanking:
    """Scott-Knott result: statistically distinct groups, best mean first."""

    groups: tuple[tuple[str, ...], ...]
    means: dict[str, float]

    def rank_of(self, method: str) -> int:
        for rank, group in enumerate(self.groups, start=1):
            if method in group:
                return rank
        raise KeyError(method)


_SK_FACTOR = math.pi / (2.0 * (math.pi - 2.0))


def scott_knott(samples: Mapping[str, Sequence[float]], alpha: float = ALPHA) -> SkRanking:
    """Recursive mean-based grouping of methods into distinct ranks.

    Methods are ordered by mean; the split maximizing the between-group sum
    of squares is accepted when the lambda statistic exceeds the chi-square
    critical value at ``alpha`` with k/(pi - 2) degrees of freedom, then
    both halves are partitioned recursively. The error variance of a
    treatment mean is pooled once over all methods.
    """
    if not samples:
        raise ValueError("need at least one method")
    arrays = {name: np.asarray(vals, dtype=float) for name, vals in samples.items()}
    for name, vals in arrays.items():
        if vals.ndim != 1 or len(vals) < 2:
            raise ValueError(f"method {name!r} needs at least 2 samples")
    means = {name: float(vals.mean()) for name, vals in arrays.items()}
    nu = sum(len(v) - 1 for v in arrays.values())
    sse = sum(float(((v - v.mean()) ** 2).sum()) for v in arrays.values())
    mse = sse / nu if nu > 0 else 0.0
    mean_replication = float(np.mean([len(v) for v in arrays.values()]))
    s2_mean = mse / mean_replication

    ordered = sorted(arrays, key=lambda name: (-means[name], name))
    groups: list[tuple[str, ...]] = []

    def partition(group: list[str]) -> None:
        k = len(group)
        if k >= 2:
            ms = np.array([means[name] for name in group])
            overall = ms.mean()
            best_b0, best_split = -1.0, 1
            for split in range(1, k):
                left, right = ms[:split], ms[split:]
                b0 = split * (left.mean() - overall) ** 2 + (k - split) * (right.mean() - overall) ** 2
                if b0 > best_b0:
                    best_b0, best_split = b0, split
            sigma02 = (float(((ms - overall) ** 2).sum()) + nu * s2_mean) / (k + nu)
            if sigma02 > 0:
                lam = _SK_FACTOR * best_b0 / sigma02
                if lam > chi2.isf(alpha, k / (math.pi - 2.0)):
                    partition(group[:best_split])
                    partition(group[best_split:])
                    return
        groups.append(tuple(group))

    partition(ordered)
    return SkRanking(tuple(groups), means)


@dataclass(frozen=True)
class ContingencyTable:
    """Counts over actually-defective modules for two methods' predictions."""

    n_cc: int
    n_cw: int
    n_wc: int
    n_ww: int

    def __post_init__(self):
        if min(self.n_cc, self.n_cw, self.n_wc, self.n_ww) < 0:
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return self.n_cc + self.n_cw + self.n_wc + self.n_ww


def mcnemar(ct: ContingencyTable) -> float:
    """Asymptotic McNemar p-value without continuity correction.

    chi^2 = (n_cw - n_wc)^2 / (n_cw + n_wc) on 1 degree of freedom; zero
    discordant counts give p = 1.
    """
    discordant = ct.n_cw + ct.n_wc
    if discordant == 0:
        return 1.0
    stat = (ct.n_cw - ct.n_wc) ** 2 / discordant
    return float(chi2.sf(stat, 1))


def diversity_table(
    preds_a: Sequence[ScoredPrediction],
    preds_b: Sequence[ScoredPrediction],
    truth: Mapping[str, bool],
) -> ContingencyTable:
    """Contingency counts restricted to defective modules; a correct
    prediction is predicting defective."""
    by_a = {p.module_id: p.predicted for p in preds_a}
    by_b = {p.module_id: p.predicted for p in preds_b}
    if by_a.keys() != by_b.keys() or not by_a.keys() <= truth.keys():
        raise ValueError("predictions and truth are not aligned by module id")
    cc = cw = wc = ww = 0
    for mid, defective in truth.items():
        if not defective:
            continue
        a_correct = by_a[mid]
        b_correct = by_b[mid]
        if a_correct and b_correct:
            cc += 1
        elif a_correct:
            cw += 1
        elif b_correct:
            wc += 1
        else:
            ww += 1
    return ContingencyTable(cc, cw, wc, ww)


def satisfactory(precision: float, recall: float, criterion: str) -> bool:
    """SC1: precision and recall both above 75%; SC2: recall above 70% and
    precision above 50%. Inequalities are strict."""
    for value in (precision, recall):
        if not 0 <= value <= 1:
            raise ValueError("precision/recall must lie in [0, 1]")
    if criterion == "SC1":
        return precision > 0.75 and recall > 0.75
    if criterion == "SC2":
        return recall > 0.70 and precision > 0.50
    raise ValueError(f"unknown criterion {criterion!r}")


def satisfactory_ratio(
    results: Sequence[tuple[float, float]], criterion: str
) -> float:
    """Percentage (two decimals) of (precision, recall) pairs meeting the criterion."""
    if not results:
        raise ValueError("need at least one combination")
    hits = sum(satisfactory(p, r, criterion) for p, r in results)
    return round(100.0 * hits / len(results), 2)
