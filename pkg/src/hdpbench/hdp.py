"""Heterogeneous defect predictors and the external-method plugin hook.

Two methods are built in: metric selection + distribution matching +
maximum-weight bipartite matching feeding a logistic model, and the
distribution-characteristics re-representation that maps every module to a
fixed 14-statistic vector. Further heterogeneous methods plug in through
``register_external_method`` and run in the harness like the built-ins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .datasets import DefectDataset, effort_values
from .learner import TrainConfig, predict_proba, train_logistic
from .udp import ScoredPrediction

SELECTION_FRACTION = 0.15
MATCH_CUTOFF = 0.05

BUILTIN_METHOD_NAMES = ("hdp1", "hdp5", "cla", "clami", "spectral", "manual", "bestmetric")
_RESERVED_NAMES = frozenset(BUILTIN_METHOD_NAMES) | {"truth"}


@dataclass(frozen=True)
class MetricMatch:
    """A matching of source metrics to target metrics with KS similarity weights."""

    pairs: tuple[tuple[str, str, float], ...]

    def __post_init__(self):
        sources = [p[0] for p in self.pairs]
        targets = [p[1] for p in self.pairs]
        if len(set(sources)) != len(sources) or len(set(targets)) != len(targets):
            raise ValueError("matched metrics must be unique on both sides")

    def total_weight(self) -> float:
        return sum(p[2] for p in self.pairs)


@dataclass(frozen=True)
class HdpOutcome:
    """Either per-module predictions or a recorded failure reason."""

    predictions: list[ScoredPrediction] | None = None
    failure: str | None = None

    def __post_init__(self):
        if (self.predictions is None) == (self.failure is None):
            raise ValueError("exactly one of predictions/failure must be set")

    @property
    def ok(self) -> bool:
        return self.failure is None


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    probs = counts[counts > 0] / total
    return float(-(probs * np.log2(probs)).sum())


def equal_frequency_bins(feature: np.ndarray, n_bins: int = 10) -> np.ndarray:
    """Bin indices from order-statistic cut points (duplicates merged).

    Cut points are taken at the k/n_bins quantiles using the lower order
    statistic, so binning depends only on ranks and is invariant under
    strictly monotone transforms.
    """
    x = np.asarray(feature, dtype=float)
    cuts = np.unique(np.quantile(x, np.arange(1, n_bins) / n_bins, method="lower"))
    return np.searchsorted(cuts, x, side="right")


def gain_ratio(feature: Sequence[float], labels: Sequence[bool]) -> float:
    """Information gain over intrinsic value after 10 equal-frequency bins.

    Defined as 0 when the intrinsic value is 0 (all samples in one bin).
    """
    x = np.asarray(feature, dtype=float)
    y = np.asarray(labels, dtype=bool)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("feature/labels must be equal-length with >= 2 samples")
    bins = equal_frequency_bins(x)
    bin_ids, bin_counts = np.unique(bins, return_counts=True)
    intrinsic = _entropy(bin_counts)
    if intrinsic == 0:
        return 0.0
    h_labels = _entropy(np.bincount(y.astype(int), minlength=2))
    conditional = sum(
        count / len(x) * _entropy(np.bincount(y[bins == b].astype(int), minlength=2))
        for b, count in zip(bin_ids, bin_counts)
    )
    return min(1.0, max(0.0, (h_labels - conditional) / intrinsic))


def select_top_metrics(d: DefectDataset, fraction: float = SELECTION_FRACTION) -> list[str]:
    """Metric names ranked by gain ratio, top ceil(fraction * m) kept.

    Ties keep schema order.
    """
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    ratios = np.array([gain_ratio(d.values[:, j], d.labels) for j in range(d.values.shape[1])])
    order = np.argsort(-ratios, kind="stable")
    keep = max(1, math.ceil(fraction * len(ratios) - 1e-9))
    return [d.schema.metric_names[j] for j in order[:keep]]


def kolmogorov_sf(lam: float) -> float:
    """Survival function of the asymptotic Kolmogorov distribution."""
    if lam <= 0:
        return 1.0
    if lam < 1.18:
        # dual theta series converges fast for small arguments
        total = 0.0
        k = 1
        while True:
            term = math.exp(-((2 * k - 1) ** 2) * math.pi**2 / (8 * lam * lam))
            total += term
            if term < 1e-16 * max(total, 1e-300) or k > 100:
                break
            k += 1
        return min(1.0, max(0.0, 1.0 - math.sqrt(2 * math.pi) / lam * total))
    total = 0.0
    sign = 1.0
    for k in range(1, 101):
        term = math.exp(-2.0 * k * k * lam * lam)
        total += sign * term
        if term < 1e-16:
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def ks_statistic(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sample KS statistic: the largest ECDF gap over all sample points."""
    x = np.sort(np.asarray(a, dtype=float))
    y = np.sort(np.asarray(b, dtype=float))
    if len(x) == 0 or len(y) == 0:
        raise ValueError("both samples must be non-empty")
    points = np.concatenate([x, y])
    cdf_x = np.searchsorted(x, points, side="right") / len(x)
    cdf_y = np.searchsorted(y, points, side="right") / len(y)
    return float(np.abs(cdf_x - cdf_y).max())


def ks_pvalue(a: Sequence[float], b: Sequence[float]) -> float:
    """Asymptotic two-sample KS p-value with effective size n*m/(n+m)."""
    d = ks_statistic(a, b)
    n, m = len(a), len(b)
    effective = n * m / (n + m)
    return kolmogorov_sf(math.sqrt(effective) * d)


def max_weight_assignment(weights: np.ndarray) -> list[tuple[int, int]]:
    """Exact maximum-weight assignment (Kuhn-Munkres with potentials).

    Accepts a rectangular matrix; every row (or column, whichever side is
    smaller) is assigned. Returns (row, col) index pairs.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 2 or weights.size == 0:
        raise ValueError("weight matrix must be 2-d and non-empty")
    transposed = weights.shape[0] > weights.shape[1]
    if transposed:
        weights = weights.T
    n, m = weights.shape
    cost = -weights  # minimize negated weights
    inf = float("inf")
    u = [0.0] * (n + 1)
    v = [0.0] * (m + 1)
    match = [0] * (m + 1)  # match[j] = row assigned to column j (1-based)
    way = [0] * (m + 1)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = [inf] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = inf
            j1 = 0
            for j in range(1, m + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    pairs = [(match[j] - 1, j - 1) for j in range(1, m + 1) if match[j] != 0]
    if transposed:
        pairs = [(c, r) for r, c in pairs]
    return sorted(pairs)


def match_from_weights(
    weights: np.ndarray,
    source_names: Sequence[str],
    target_names: Sequence[str],
    cutoff: float = MATCH_CUTOFF,
) -> MetricMatch:
    """Maximum-total-weight matching over edges whose weight exceeds the cutoff.

    Edges at or below the cutoff are zeroed before the assignment is solved
    and dropped from the returned pairs; an empty matching is a valid
    result.
    """
    weights = np.asarray(weights, dtype=float)
    usable = np.where(weights > cutoff, weights, 0.0)
    if not np.any(usable > 0):
        return MetricMatch(())
    pairs = [
        (source_names[i], target_names[j], float(weights[i, j]))
        for i, j in max_weight_assignment(usable)
        if weights[i, j] > cutoff
    ]
    return MetricMatch(tuple(pairs))


def match_metrics(
    source: DefectDataset,
    target: DefectDataset,
    selected: Sequence[str],
    cutoff: float = MATCH_CUTOFF,
) -> MetricMatch:
    """Maximum-total-weight matching of selected source metrics to target
    metrics, where an edge weight is the KS p-value of the two columns.

    Edges with weight <= cutoff are removed before solving (a high p-value
    means the distributions are similar).
    """
    missing = set(selected) - set(source.schema.metric_names)
    if missing:
        raise ValueError(f"selected metrics not in source schema: {sorted(missing)}")
    target_names = target.schema.metric_names
    weights = np.zeros((len(selected), len(target_names)))
    for i, s_name in enumerate(selected):
        s_col = source.column(s_name)
        for j, t_name in enumerate(target_names):
            weights[i, j] = ks_pvalue(s_col, target.column(t_name))
    match = match_from_weights(weights, list(selected), list(target_names), cutoff)
    pairs = sorted(match.pairs, key=lambda p: source.schema.metric_index(p[0]))
    return MetricMatch(tuple(pairs))


def _bundle(target: DefectDataset, scores: np.ndarray) -> list[ScoredPrediction]:
    efforts = effort_values(target)
    return [
        ScoredPrediction(mid, float(s), bool(s > 0.5), float(e))
        for mid, s, e in zip(target.module_ids, scores, efforts)
    ]


def hdp1_predict(
    source: DefectDataset,
    target: DefectDataset,
    selection_fraction: float = SELECTION_FRACTION,
    cutoff: float = MATCH_CUTOFF,
    cfg: TrainConfig = TrainConfig(),
) -> HdpOutcome:
    """Metric selection, KS matching, then a logistic model on the matched
    columns. Fails with NoMatchedMetrics when no metric pair survives the
    cutoff; the failure is recorded, not fatal."""
    selected = select_top_metrics(source, selection_fraction)
    match = match_metrics(source, target, selected, cutoff)
    if not match.pairs:
        return HdpOutcome(failure="NoMatchedMetrics")
    source_cols = [source.schema.metric_index(s) for s, _, _ in match.pairs]
    target_cols = [target.schema.metric_index(t) for _, t, _ in match.pairs]
    model = train_logistic(source.values[:, source_cols], source.labels, cfg)
    scores = predict_proba(model, target.values[:, target_cols])
    return HdpOutcome(predictions=_bundle(target, scores))


DISTRIBUTION_STATS = (
    "mode", "median", "mean", "harmonic_mean", "minimum", "maximum", "range",
    "variation_ratio", "interquartile_range", "variance", "standard_deviation",
    "coefficient_of_variation", "skewness", "kurtosis",
)


def distribution_vector(module_row: Sequence[float]) -> np.ndarray:
    """The 14 distribution characteristics of one module's metric values.

    Degenerate cases: harmonic mean is 0 when any value is <= 0, the
    coefficient of variation is 0 at zero mean, and skewness/kurtosis are 0
    at zero standard deviation. The mode breaks frequency ties toward the
    smallest value; kurtosis is excess kurtosis.
    """
    x = np.asarray(module_row, dtype=float)
    if x.ndim != 1 or len(x) == 0:
        raise ValueError("module row must be a non-empty 1-d vector")
    n = len(x)
    values, counts = np.unique(x, return_counts=True)
    mode = float(values[np.argmax(counts)])
    mode_freq = int(counts.max())
    mean = float(x.mean())
    minimum = float(x.min())
    maximum = float(x.max())
    harmonic = n / float(np.sum(1.0 / x)) if minimum > 0 else 0.0
    variance = float(np.mean((x - mean) ** 2))
    std = math.sqrt(variance)
    cv = std / mean if mean != 0 else 0.0
    skew = float(np.mean((x - mean) ** 3)) / std**3 if std > 0 else 0.0
    kurt = float(np.mean((x - mean) ** 4)) / std**4 - 3.0 if std > 0 else 0.0
    return np.array([
        mode,
        float(np.median(x)),
        mean,
        harmonic,
        minimum,
        maximum,
        maximum - minimum,
        1.0 - mode_freq / n,
        float(np.percentile(x, 75) - np.percentile(x, 25)),
        variance,
        std,
        cv,
        skew,
        kurt,
    ])


def hdp5_predict(
    source: DefectDataset,
    target: DefectDataset,
    cfg: TrainConfig = TrainConfig(),
) -> HdpOutcome:
    """Re-represent every module by its distribution characteristics and
    train the classifier on the source vectors; always succeeds."""
    x_source = np.vstack([distribution_vector(row) for row in source.values])
    x_target = np.vstack([distribution_vector(row) for row in target.values])
    model = train_logistic(x_source, source.labels, cfg)
    scores = predict_proba(model, x_target)
    return HdpOutcome(predictions=_bundle(target, scores))


ExternalMethod = Callable[[DefectDataset, DefectDataset], HdpOutcome]

_EXTERNAL_METHODS: dict[str, ExternalMethod] = {}


def register_external_method(name: str, fn: ExternalMethod) -> str:
    """Register a pluggable heterogeneous method under a unique name.

    The callable receives (source, target) datasets and returns an
    HdpOutcome; it participates in harness runs identically to built-ins.
    """
    if name in _RESERVED_NAMES:
        raise ValueError(f"method name {name!r} is reserved")
    if name in _EXTERNAL_METHODS:
        raise ValueError(f"method {name!r} already registered")
    _EXTERNAL_METHODS[name] = fn
    return name


def unregister_external_method(name: str) -> None:
    _EXTERNAL_METHODS.pop(name, None)


def external_methods() -> dict[str, ExternalMethod]:
    return dict(_EXTERNAL_METHODS)
