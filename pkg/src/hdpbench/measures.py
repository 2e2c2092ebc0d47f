"""Evaluation measures: precision/recall/F1, AUC, and the effort-aware
ACC, PMI, Popt, and IFA.

Effort-aware measures charge inspection cost proportional to module LOC:
modules are visited in score order and the budget is a fraction of the
total effort. The module that would cross the budget is excluded, which
makes ACC and PMI consistent with each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

if TYPE_CHECKING:  # only the dataclass type; udp imports this module at runtime
    from .udp import ScoredPrediction

#: Canonical measure order; the first two exist for the satisfactory-ratio
#: analysis, the remaining six are the benchmark's headline measures.
MEASURE_IDS = ("precision", "recall", "f1", "auc", "acc", "popt", "pmi20", "ifa")
CORE_MEASURES = ("f1", "auc", "acc", "popt", "pmi20", "ifa")
HIGHER_IS_BETTER = {
    "precision": True,
    "recall": True,
    "f1": True,
    "auc": True,
    "acc": True,
    "popt": True,
    "pmi20": False,
    "ifa": False,
}


class NoDefects(ValueError):
    """Raised by effort-aware measures when the target has no defective module."""


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class EffortCurve:
    """Cumulative (effort fraction, defect fraction) pairs from (0,0) to (1,1)."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if self.points[0] != (0.0, 0.0) or self.points[-1] != (1.0, 1.0):
            raise ValueError("curve must run from (0,0) to (1,1)")
        for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]):
            if x1 < x0 or y1 < y0 or not (0 <= x1 <= 1 and 0 <= y1 <= 1):
                raise ValueError("curve coordinates must be non-decreasing in [0,1]")

    def area(self) -> float:
        xs = np.array([p[0] for p in self.points])
        ys = np.array([p[1] for p in self.points])
        return float(np.trapezoid(ys, xs))


def _truth_vector(preds: Sequence[ScoredPrediction], truth: Mapping[str, bool]) -> np.ndarray:
    if len(preds) != len(truth):
        raise ValueError(f"{len(preds)} predictions vs {len(truth)} truth labels")
    try:
        return np.array([truth[p.module_id] for p in preds], dtype=bool)
    except KeyError as exc:
        raise ValueError(f"prediction for unknown module id {exc.args[0]!r}") from None


def confusion(preds: Sequence[ScoredPrediction], truth: Mapping[str, bool]) -> ConfusionMatrix:
    """Counts with defective as the positive class, aligned by module id."""
    actual = _truth_vector(preds, truth)
    predicted = np.array([p.predicted for p in preds], dtype=bool)
    return ConfusionMatrix(
        tp=int(np.sum(predicted & actual)),
        fp=int(np.sum(predicted & ~actual)),
        tn=int(np.sum(~predicted & ~actual)),
        fn=int(np.sum(~predicted & actual)),
    )


def prf1(cm: ConfusionMatrix) -> dict[str, float]:
    """Precision, recall, and their harmonic mean; any 0/0 is defined as 0."""
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "f1": f1}


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the group average."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def auc(scores: Sequence[float], truth: Sequence[bool]) -> float | None:
    """Rank-based AUC: P(positive scored above negative), ties counted 0.5.

    Returns None when only one class is present.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(truth, dtype=bool)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = _average_ranks(scores)
    return float((ranks[labels].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def _score_order(preds: Sequence[ScoredPrediction]) -> list[int]:
    """Indices sorted by score descending, stable on the original module order."""
    return sorted(range(len(preds)), key=lambda i: -preds[i].score)


def effort_curve(
    preds: Sequence[ScoredPrediction],
    truth: Mapping[str, bool],
    ordering: str = "by_score",
) -> EffortCurve:
    """Cumulative defect-discovery curve over cumulative inspection effort.

    ``optimal`` sorts by actual defect density (label/effort) descending with
    smaller effort first on ties; ``worst`` is the ascending mirror;
    ``by_score`` follows the prediction ranking.
    """
    actual = _truth_vector(preds, truth)
    efforts = np.array([p.effort for p in preds], dtype=float)
    if np.any(efforts <= 0):
        raise ValueError("efforts must be positive")
    n_defective = int(actual.sum())
    if n_defective == 0:
        raise NoDefects("effort curve needs at least one defective module")
    density = actual / efforts
    if ordering == "by_score":
        order = _score_order(preds)
    elif ordering == "optimal":
        order = sorted(range(len(preds)), key=lambda i: (-density[i], efforts[i]))
    elif ordering == "worst":
        order = sorted(range(len(preds)), key=lambda i: (density[i], -efforts[i]))
    else:
        raise ValueError(f"unknown ordering {ordering!r}")
    total_effort = float(efforts.sum())
    points = [(0.0, 0.0)]
    cum_effort = 0.0
    cum_defects = 0
    for i in order:
        cum_effort += efforts[i]
        cum_defects += int(actual[i])
        # running float sums can overshoot 1 by an ulp before the last point
        points.append((min(1.0, cum_effort / total_effort), min(1.0, cum_defects / n_defective)))
    points[-1] = (1.0, 1.0)
    return EffortCurve(tuple(points))


def popt(preds: Sequence[ScoredPrediction], truth: Mapping[str, bool]) -> float:
    """Normalized effort-aware indicator in [0, 1].

    1 - (area(optimal) - area(method)) / (area(optimal) - area(worst)),
    with trapezoid areas; degenerate equal optimal/worst areas give 1.
    """
    area_m = effort_curve(preds, truth, "by_score").area()
    area_opt = effort_curve(preds, truth, "optimal").area()
    area_worst = effort_curve(preds, truth, "worst").area()
    denom = area_opt - area_worst
    if denom <= 0:
        return 1.0
    value = 1.0 - (area_opt - area_m) / denom
    return min(1.0, max(0.0, value))


def _inspected_prefix(preds: Sequence[ScoredPrediction], effort_fraction: float) -> list[int]:
    """Ranked indices inspectable within the budget; the module crossing it is excluded."""
    if not 0 < effort_fraction <= 1:
        raise ValueError("effort fraction must be in (0, 1]")
    efforts = np.array([p.effort for p in preds], dtype=float)
    total = float(efforts.sum())
    budget = effort_fraction * total * (1 + 1e-9)
    inspected = []
    spent = 0.0
    for i in _score_order(preds):
        if spent + efforts[i] > budget:
            break
        spent += efforts[i]
        inspected.append(i)
    return inspected


def acc_at(
    preds: Sequence[ScoredPrediction],
    truth: Mapping[str, bool],
    effort_fraction: float = 0.2,
) -> float:
    """Recall of defective modules within the given fraction of total effort."""
    actual = _truth_vector(preds, truth)
    n_defective = int(actual.sum())
    if n_defective == 0:
        raise NoDefects("ACC needs at least one defective module")
    found = sum(int(actual[i]) for i in _inspected_prefix(preds, effort_fraction))
    return found / n_defective


def pmi_at(preds: Sequence[ScoredPrediction], effort_fraction: float = 0.2) -> float:
    """Proportion of modules inspected within the given fraction of total effort."""
    return len(_inspected_prefix(preds, effort_fraction)) / len(preds)


def ifa(preds: Sequence[ScoredPrediction], truth: Mapping[str, bool]) -> int:
    """Non-defective modules ranked before the first defective one."""
    actual = _truth_vector(preds, truth)
    if not actual.any():
        raise NoDefects("IFA needs at least one defective module")
    count = 0
    for i in _score_order(preds):
        if actual[i]:
            return count
        count += 1
    return count  # unreachable: at least one defective exists


def compute_measure(
    measure: str,
    preds: Sequence[ScoredPrediction],
    truth: Mapping[str, bool],
    effort_fraction: float = 0.2,
) -> tuple[float | None, str | None]:
    """Evaluate one measure; undefined cases yield (None, reason)."""
    if measure in ("precision", "recall", "f1"):
        return prf1(confusion(preds, truth))[measure], None
    if measure == "auc":
        value = auc([p.score for p in preds], _truth_vector(preds, truth))
        return (value, None) if value is not None else (None, "SingleClassTruth")
    try:
        if measure == "acc":
            return acc_at(preds, truth, effort_fraction), None
        if measure == "popt":
            return popt(preds, truth), None
        if measure == "pmi20":
            return pmi_at(preds, effort_fraction), None
        if measure == "ifa":
            return float(ifa(preds, truth)), None
    except NoDefects:
        return None, "NoDefects"
    raise ValueError(f"unknown measure {measure!r}")
