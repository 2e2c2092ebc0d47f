"""Reproducible experiment harness.

Runs every configured method over every heterogeneous (source, target)
combination, records one row per (method, combination, measure), and turns
the rows into the benchmark's report tables: Scott-Knott rankings,
win/tie/loss matrices, McNemar diversity counts, unidentified-defective
counts, and satisfactory ratios.

Unsupervised methods ignore the source project but are evaluated once per
combination so their rows align one-for-one with the heterogeneous
methods' rows.
"""

from __future__ import annotations

import configparser
import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import hdp, measures, stats, udp
from .datasets import CombinationPlan, DefectDataset, enumerate_combinations, load_manifest_datasets
from .udp import ScoredPrediction

SCENARIOS = ("scenario1", "scenario2")
NPM_MEASURES = ("precision", "recall", "f1", "auc")

METHOD_CATEGORY = {
    "hdp1": "hdp",
    "hdp5": "hdp",
    "cla": "udp",
    "clami": "udp",
    "spectral": "udp",
    "manual": "udp",
    "bestmetric": "udp",
}

RESULT_COLUMNS = ("method", "source", "target", "measure", "value", "failure")


@dataclass(frozen=True)
class ExperimentConfig:
    manifest: str
    output_dir: str
    methods: tuple[str, ...] = hdp.BUILTIN_METHOD_NAMES
    measures: tuple[str, ...] = measures.MEASURE_IDS
    effort_fraction: float = 0.2
    scenario: str = "scenario1"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "measures", tuple(self.measures))
        if not self.methods or not self.measures:
            raise ValueError("methods and measures must be non-empty")
        if not 0 < self.effort_fraction <= 1:
            raise ValueError("effort fraction must be in (0, 1]")
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}")
        unknown = [m for m in self.measures if m not in measures.MEASURE_IDS]
        if unknown:
            raise ValueError(f"unknown measures: {unknown}")


def method_category(name: str) -> str:
    if name in METHOD_CATEGORY:
        return METHOD_CATEGORY[name]
    if name in hdp.external_methods():
        return "hdp"
    raise ValueError(f"unknown method {name!r}")


def load_config(path: str | Path) -> ExperimentConfig:
    """Read a flat key-value experiment config ([experiment] section)."""
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    with path.open() as fh:
        parser.read_file(fh)
    if "experiment" not in parser:
        raise ValueError(f"{path}: missing [experiment] section")
    section = parser["experiment"]
    if "manifest" not in section:
        raise ValueError(f"{path}: missing manifest entry")

    def _split(key: str, default: tuple[str, ...]) -> tuple[str, ...]:
        if key not in section:
            return default
        return tuple(section[key].replace(",", " ").split())

    manifest = section["manifest"]
    if not Path(manifest).is_absolute():
        manifest = str(path.parent / manifest)
    output_dir = section.get("output_dir", "results")
    if not Path(output_dir).is_absolute():
        output_dir = str(path.parent / output_dir)
    return ExperimentConfig(
        manifest=manifest,
        output_dir=output_dir,
        methods=_split("methods", hdp.BUILTIN_METHOD_NAMES),
        measures=_split("measures", measures.MEASURE_IDS),
        effort_fraction=section.getfloat("effort_fraction", 0.2),
        scenario=section.get("scenario", "scenario1"),
        seed=section.getint("seed", 0),
    )


@dataclass(frozen=True)
class ResultRow:
    method: str
    source: str
    target: str
    measure: str
    value: float | None
    failure: str | None


@dataclass
class MethodResult:
    """Per-(method, plan) outcome: measure values and predicted-label variants."""

    values: dict[str, tuple[float | None, str | None]]
    variant_labels: dict[str, str]  # variant name -> '0'/'1' string per module


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[ResultRow]
    target_groups: dict[str, str]
    target_truth: dict[str, str]  # target -> '0'/'1' truth string
    predictions: dict[tuple[str, str, str], str]  # (variant, source, target) -> labels
    n_plans_total: int = 0

    @property
    def plans(self) -> list[tuple[str, str]]:
        seen: dict[tuple[str, str], None] = {}
        for row in self.rows:
            seen.setdefault((row.source, row.target), None)
        return list(seen)


def _bits(flags: Iterable[bool]) -> str:
    return "".join("1" if f else "0" for f in flags)


def _pred_bits(preds: Sequence[ScoredPrediction]) -> str:
    return _bits(p.predicted for p in preds)


def _truth_map(d: DefectDataset) -> dict[str, bool]:
    return {mid: bool(lab) for mid, lab in zip(d.module_ids, d.labels)}


def _all_values(
    preds: Sequence[ScoredPrediction],
    truth: dict[str, bool],
    measure_ids: Sequence[str],
    effort_fraction: float,
) -> dict[str, tuple[float | None, str | None]]:
    return {
        m: measures.compute_measure(m, preds, truth, effort_fraction) for m in measure_ids
    }


def _failed(measure_ids: Sequence[str], reason: str) -> MethodResult:
    return MethodResult({m: (None, reason) for m in measure_ids}, {})


def _evaluate_udp(
    method: str, target: DefectDataset, measure_ids: Sequence[str], effort_fraction: float
) -> MethodResult:
    truth = _truth_map(target)
    if method in ("cla", "clami", "spectral"):
        fn = {"cla": udp.cla_predict, "clami": udp.clami_predict, "spectral": udp.spectral_predict}
        preds = fn[method](target)
        return MethodResult(
            _all_values(preds, truth, measure_ids, effort_fraction),
            {method: _pred_bits(preds)},
        )
    if method == "manual":
        # size ranking: larger-first for the classification measures,
        # smaller-first for the effort-aware ones
        down = udp.manual_rank(target, "down")
        up = udp.manual_rank(target, "up")
        values = {}
        for m in measure_ids:
            preds = down if m in NPM_MEASURES else up
            values[m] = measures.compute_measure(m, preds, truth, effort_fraction)
        return MethodResult(values, {"manual": _pred_bits(down)})
    if method == "bestmetric":
        oracle_cache: dict[str, udp.BestMetric] = {}

        def oracle(measure_id: str) -> udp.BestMetric:
            if measure_id not in oracle_cache:
                oracle_cache[measure_id] = udp.best_metric_oracle(target, measure_id, effort_fraction)
            return oracle_cache[measure_id]

        values = {}
        for m in measure_ids:
            # precision/recall ride on the F1-oriented metric choice
            preds = oracle("f1" if m in ("precision", "recall") else m).predictions
            values[m] = measures.compute_measure(m, preds, truth, effort_fraction)
        variants = {
            "bestmetric-auc": _pred_bits(oracle("auc").predictions),
            "bestmetric-f1": _pred_bits(oracle("f1").predictions),
        }
        return MethodResult(values, variants)
    raise ValueError(f"unknown unsupervised method {method!r}")


def _evaluate_hdp_outcome(
    method: str,
    outcome: hdp.HdpOutcome,
    target: DefectDataset,
    measure_ids: Sequence[str],
    effort_fraction: float,
) -> MethodResult:
    if not outcome.ok:
        return _failed(measure_ids, outcome.failure)
    truth = _truth_map(target)
    return MethodResult(
        _all_values(outcome.predictions, truth, measure_ids, effort_fraction),
        {method: _pred_bits(outcome.predictions)},
    )


def _run_hdp_method(
    method: str, source: DefectDataset, target: DefectDataset
) -> hdp.HdpOutcome:
    try:
        if method == "hdp1":
            return hdp.hdp1_predict(source, target)
        if method == "hdp5":
            return hdp.hdp5_predict(source, target)
        fn = hdp.external_methods()[method]
        outcome = fn(source, target)
        if outcome.ok and len(outcome.predictions) != target.n_modules:
            return hdp.HdpOutcome(failure="error: prediction count mismatch")
        return outcome
    except Exception as exc:  # a single bad plan must not abort the run
        return hdp.HdpOutcome(failure=f"error: {exc}")


def _pmap(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Evaluate every configured method on every combination in the scenario.

    Per-plan method failures are recorded in the rows; the run itself never
    aborts on a single plan. Output is deterministic for any worker count.
    """
    datasets = {d.name: d for d in load_manifest_datasets(cfg.manifest)}
    for m in cfg.methods:
        method_category(m)  # validates names
    all_plans = enumerate_combinations(list(datasets.values()))
    return _run_on_datasets(cfg, datasets, all_plans, workers)


def _run_on_datasets(
    cfg: ExperimentConfig,
    datasets: dict[str, DefectDataset],
    all_plans: list[CombinationPlan],
    workers: int,
) -> ExperimentResult:
    hdp_methods = [m for m in cfg.methods if method_category(m) == "hdp"]
    udp_methods = [m for m in cfg.methods if method_category(m) == "udp"]

    need_hdp1 = cfg.scenario == "scenario2" or "hdp1" in cfg.methods
    hdp1_outcomes: dict[tuple[str, str], hdp.HdpOutcome] = {}
    if need_hdp1:
        outs = _pmap(
            lambda p: _run_hdp_method("hdp1", datasets[p.source], datasets[p.target]),
            all_plans,
            workers,
        )
        hdp1_outcomes = {(p.source, p.target): o for p, o in zip(all_plans, outs)}

    plans = all_plans
    if cfg.scenario == "scenario2":
        plans = [p for p in all_plans if hdp1_outcomes[(p.source, p.target)].ok]

    targets = sorted({p.target for p in plans})
    udp_cache: dict[tuple[str, str], MethodResult] = {}
    for method in udp_methods:
        outs = _pmap(
            lambda t, m=method: _evaluate_udp(m, datasets[t], cfg.measures, cfg.effort_fraction),
            targets,
            workers,
        )
        for t, res in zip(targets, outs):
            udp_cache[(method, t)] = res

    cell: dict[tuple[str, str, str], MethodResult] = {}
    for method in hdp_methods:
        if method == "hdp1":
            outs = [hdp1_outcomes[(p.source, p.target)] for p in plans]
        else:
            outs = _pmap(
                lambda p, m=method: _run_hdp_method(m, datasets[p.source], datasets[p.target]),
                plans,
                workers,
            )
        for p, outcome in zip(plans, outs):
            cell[(method, p.source, p.target)] = _evaluate_hdp_outcome(
                method, outcome, datasets[p.target], cfg.measures, cfg.effort_fraction
            )
    for method in udp_methods:
        for p in plans:
            cell[(method, p.source, p.target)] = udp_cache[(method, p.target)]

    rows: list[ResultRow] = []
    predictions: dict[tuple[str, str, str], str] = {}
    for p in plans:
        for method in cfg.methods:
            res = cell[(method, p.source, p.target)]
            for measure in cfg.measures:
                value, reason = res.values[measure]
                rows.append(ResultRow(method, p.source, p.target, measure, value, reason))
            for variant, bits in res.variant_labels.items():
                predictions[(variant, p.source, p.target)] = bits

    target_groups = {t: datasets[t].schema.group_name for t in targets}
    target_truth = {t: _bits(datasets[t].labels) for t in targets}
    return ExperimentResult(
        config=cfg,
        rows=rows,
        target_groups=target_groups,
        target_truth=target_truth,
        predictions=predictions,
        n_plans_total=len(all_plans),
    )


# ---------------------------------------------------------------------------
# persistence


def _config_lines(cfg: ExperimentConfig) -> str:
    # output_dir intentionally omitted: it is implied by file location and
    # would break byte-identical outputs across runs into different dirs
    return (
        "[experiment]\n"
        f"manifest = {cfg.manifest}\n"
        f"methods = {' '.join(cfg.methods)}\n"
        f"measures = {' '.join(cfg.measures)}\n"
        f"effort_fraction = {cfg.effort_fraction!r}\n"
        f"scenario = {cfg.scenario}\n"
        f"seed = {cfg.seed}\n"
    )


def _format_value(value: float | None) -> str:
    return "" if value is None else repr(value)


def method_failures(result: ExperimentResult) -> dict[str, int]:
    """Distinct failed plans per method (every measure row shares the failure)."""
    failed: dict[str, set[tuple[str, str]]] = {}
    for row in result.rows:
        if row.failure is not None:
            failed.setdefault(row.method, set()).add((row.source, row.target))
    return {m: len(v) for m, v in sorted(failed.items())}


def _summary_text(result: ExperimentResult) -> str:
    cfg = result.config
    lines = [
        "experiment summary",
        f"scenario: {cfg.scenario}",
        f"plans_total: {result.n_plans_total}",
        f"plans_in_scenario: {len(result.plans)}",
        f"targets: {len(result.target_groups)}",
        f"methods: {' '.join(cfg.methods)}",
        f"measures: {' '.join(cfg.measures)}",
        f"rows: {len(result.rows)}",
        "failure_plans_per_method:",
    ]
    failures = method_failures(result)
    if failures:
        lines.extend(f"  {m}: {n}" for m, n in failures.items())
    else:
        lines.append("  none")
    return "\n".join(lines) + "\n"


def export_results(result: ExperimentResult, out_dir: str | Path) -> list[Path]:
    """Write the results directory: config echo, flat results file,
    prediction/truth label files, and the run summary."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    results_path = out / "results.csv"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for row in result.rows:
        writer.writerow(
            [row.method, row.source, row.target, row.measure,
             _format_value(row.value), row.failure or ""]
        )
    results_path.write_text(buffer.getvalue())

    pred_path = out / "predictions.csv"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["variant", "source", "target", "labels"])
    for (variant, source, target), bits in sorted(result.predictions.items()):
        writer.writerow([variant, source, target, bits])
    pred_path.write_text(buffer.getvalue())

    targets_path = out / "targets.csv"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["target", "group", "labels"])
    for target in sorted(result.target_truth):
        writer.writerow([target, result.target_groups[target], result.target_truth[target]])
    targets_path.write_text(buffer.getvalue())

    config_path = out / "config.ini"
    config_path.write_text(_config_lines(result.config))
    summary_path = out / "summary.txt"
    summary_path.write_text(_summary_text(result))
    return [config_path, results_path, pred_path, targets_path, summary_path]


def load_results(results_dir: str | Path) -> ExperimentResult:
    """Reconstruct an ExperimentResult from an exported results directory."""
    results_dir = Path(results_dir)
    cfg = load_config(results_dir / "config.ini")
    cfg = ExperimentConfig(
        manifest=cfg.manifest,
        output_dir=str(results_dir),
        methods=cfg.methods,
        measures=cfg.measures,
        effort_fraction=cfg.effort_fraction,
        scenario=cfg.scenario,
        seed=cfg.seed,
    )
    rows = []
    with (results_dir / "results.csv").open() as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != RESULT_COLUMNS:
            raise ValueError(f"unexpected results header {header}")
        for record in reader:
            method, source, target, measure, value, failure = record
            rows.append(
                ResultRow(method, source, target, measure,
                          float(value) if value else None, failure or None)
            )
    predictions = {}
    with (results_dir / "predictions.csv").open() as fh:
        reader = csv.reader(fh)
        next(reader)
        for variant, source, target, bits in reader:
            predictions[(variant, source, target)] = bits
    target_groups = {}
    target_truth = {}
    with (results_dir / "targets.csv").open() as fh:
        reader = csv.reader(fh)
        next(reader)
        for target, group, bits in reader:
            target_groups[target] = group
            target_truth[target] = bits
    summary = (results_dir / "summary.txt").read_text()
    n_total = 0
    for line in summary.splitlines():
        if line.startswith("plans_total:"):
            n_total = int(line.split(":")[1])
    return ExperimentResult(cfg, rows, target_groups, target_truth, predictions, n_total)


# ---------------------------------------------------------------------------
# report generation


def _variants_of(method: str) -> list[str]:
    if method == "bestmetric":
        return ["bestmetric-auc", "bestmetric-f1"]
    return [method]


def _variant_categories(methods: Sequence[str]) -> dict[str, str]:
    return {v: method_category(m) for m in methods for v in _variants_of(m)}


def _value_index(result: ExperimentResult):
    index: dict[tuple[str, str, str, str], float | None] = {}
    for row in result.rows:
        index[(row.method, row.source, row.target, row.measure)] = row.value
    return index


def _targets_sources(result: ExperimentResult) -> dict[str, list[str]]:
    by_target: dict[str, list[str]] = {}
    for source, target in result.plans:
        by_target.setdefault(target, []).append(source)
    return {t: sorted(s) for t, s in sorted(by_target.items())}


def _table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def fmt(cells):
        return " | ".join(str(c).ljust(w) for c, w in zip(cells, widths)).rstrip()
    lines = [fmt(headers), "-+-".join("-" * w for w in widths)]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines)


def _scott_knott_section(
    samples: dict[str, list[float]], title: str
) -> list[str]:
    usable = {m: v for m, v in samples.items() if len(v) >= 2}
    excluded = sorted(set(samples) - set(usable))
    lines = [f"[{title}]"]
    if not usable:
        lines.append("  no method has enough values")
        return lines
    ranking = stats.scott_knott(usable)
    for rank, group in enumerate(ranking.groups, start=1):
        members = ", ".join(f"{m} (mean {ranking.means[m]:.4f})" for m in group)
        lines.append(f"  rank {rank}: {members}")
    if excluded:
        lines.append(f"  excluded (fewer than 2 values): {', '.join(excluded)}")
    return lines


def _report_scott_knott(result: ExperimentResult, index) -> str:
    cfg = result.config
    by_target = _targets_sources(result)
    groups = sorted(set(result.target_groups.values()))
    out = [f"scott-knott rankings ({cfg.scenario})", ""]
    for measure in cfg.measures:
        out.append(f"== {measure} ==")
        samples = {
            m: [
                v
                for t, sources in by_target.items()
                for s in sources
                if (v := index[(m, s, t, measure)]) is not None
            ]
            for m in cfg.methods
        }
        out.extend(_scott_knott_section(samples, "all subjects"))
        for group in groups:
            samples = {
                m: [
                    v
                    for t, sources in by_target.items()
                    if result.target_groups[t] == group
                    for s in sources
                    if (v := index[(m, s, t, measure)]) is not None
                ]
                for m in cfg.methods
            }
            out.extend(_scott_knott_section(samples, f"group: {group}"))
        out.append("")
    return "\n".join(out) + "\n"


def wtl_matrix(
    result: ExperimentResult,
    measure: str,
    first: str,
    second: str,
    index=None,
) -> stats.WtlRecord:
    """Per-target win/tie/loss of ``first`` against ``second`` for a measure.

    For each target, the paired samples are the two methods' values over
    all sources sharing that target; raw Wilcoxon p-values are BH-corrected
    within this (measure, method pair) family. Lower-is-better measures are
    negated so 'win' always means 'performs better'.
    """
    index = index if index is not None else _value_index(result)
    orient = 1.0 if measures.HIGHER_IS_BETTER[measure] else -1.0
    by_target = _targets_sources(result)
    paired: dict[str, tuple[list[float], list[float]]] = {}
    for target, sources in by_target.items():
        xs, ys = [], []
        for s in sources:
            a = index[(first, s, target, measure)]
            b = index[(second, s, target, measure)]
            if a is not None and b is not None:
                xs.append(orient * a)
                ys.append(orient * b)
        paired[target] = (xs, ys)
    testable = [t for t, (xs, _) in paired.items() if len(xs) >= 2]
    raw = [stats.wilcoxon_signed_rank(*paired[t]) for t in testable]
    adjusted = dict(zip(testable, stats.bh_adjust(raw))) if testable else {}
    win = tie = loss = 0
    for target, (xs, ys) in paired.items():
        if target in adjusted:
            outcome = stats.compare_pair(xs, ys, adjusted_p=adjusted[target])
        else:
            outcome = "tie"
        win += outcome == "win"
        tie += outcome == "tie"
        loss += outcome == "loss"
    return stats.WtlRecord(win, tie, loss)


def _report_wtl(result: ExperimentResult, index) -> str:
    cfg = result.config
    hdp_methods = [m for m in cfg.methods if method_category(m) == "hdp"]
    udp_methods = [m for m in cfg.methods if method_category(m) == "udp"]
    out = [f"win/tie/loss per target: rows vs columns ({cfg.scenario})", ""]
    if not hdp_methods or not udp_methods:
        out.append("needs at least one heterogeneous and one unsupervised method")
        return "\n".join(out) + "\n"
    for measure in cfg.measures:
        out.append(f"== {measure} ==")
        rows = []
        for h in hdp_methods:
            cells = [str(wtl_matrix(result, measure, h, u, index)) for u in udp_methods]
            rows.append([h, *cells])
        out.append(_table(["method", *udp_methods], rows))
        out.append("")
    return "\n".join(out) + "\n"


def _contingency_from_bits(a: str, b: str, truth: str) -> stats.ContingencyTable:
    cc = cw = wc = ww = 0
    for pa, pb, t in zip(a, b, truth):
        if t != "1":
            continue
        if pa == "1" and pb == "1":
            cc += 1
        elif pa == "1":
            cw += 1
        elif pb == "1":
            wc += 1
        else:
            ww += 1
    return stats.ContingencyTable(cc, cw, wc, ww)


def _report_diversity(result: ExperimentResult) -> str:
    cfg = result.config
    variants = [v for m in cfg.methods for v in _variants_of(m)]
    category = _variant_categories(cfg.methods)
    plans = result.plans
    groups = sorted(set(result.target_groups.values()))
    sections = (
        ("hdp vs hdp", "hdp", "hdp"),
        ("udp vs udp", "udp", "udp"),
        ("hdp vs udp", "hdp", "udp"),
    )
    out = ["mcnemar diversity on defective modules: significant plans / comparable plans", ""]
    for title, cat_a, cat_b in sections:
        if cat_a == cat_b:
            side_a = [v for v in variants if category[v] == cat_a]
            pairs = [(a, b) for i, a in enumerate(side_a) for b in side_a[i + 1 :]]
        else:
            side_a = [v for v in variants if category[v] == cat_a]
            side_b = [v for v in variants if category[v] == cat_b]
            pairs = [(a, b) for a in side_a for b in side_b]
        if not pairs:
            continue
        out.append(f"== {title} ==")
        rows = []
        for a, b in pairs:
            sig = {g: 0 for g in groups}
            total = {g: 0 for g in groups}
            for source, target in plans:
                bits_a = result.predictions.get((a, source, target))
                bits_b = result.predictions.get((b, source, target))
                if bits_a is None or bits_b is None:
                    continue
                group = result.target_groups[target]
                total[group] += 1
                table = _contingency_from_bits(bits_a, bits_b, result.target_truth[target])
                if stats.mcnemar(table) < stats.ALPHA:
                    sig[group] += 1
            cells = [f"{sig[g]}/{total[g]}" for g in groups]
            cells.append(f"{sum(sig.values())}/{sum(total.values())}")
            rows.append([f"{a} vs {b}", *cells])
        out.append(_table(["comparison", *groups, "summary"], rows))
        out.append("")
    return "\n".join(out) + "\n"


def _report_unidentified(result: ExperimentResult) -> str:
    cfg = result.config
    variants = [v for m in cfg.methods for v in _variants_of(m)]
    category = _variant_categories(cfg.methods)
    hdp_vars = [v for v in variants if category[v] == "hdp"]
    udp_vars = [v for v in variants if category[v] == "udp"]
    out = [
        "defective modules no method identifies (plans where every method has predictions)",
        "",
    ]
    rows = []
    for source, target in sorted(result.plans):
        bits = {v: result.predictions.get((v, source, target)) for v in variants}
        if any(b is None for b in bits.values()):
            continue
        truth = result.target_truth[target]
        defective = [i for i, t in enumerate(truth) if t == "1"]
        if not defective:
            continue
        missed_hdp = sum(all(bits[v][i] == "0" for v in hdp_vars) for i in defective) if hdp_vars else 0
        missed_udp = sum(all(bits[v][i] == "0" for v in udp_vars) for i in defective) if udp_vars else 0
        missed_all = sum(all(bits[v][i] == "0" for v in variants) for i in defective)
        n = len(defective)
        rows.append([
            f"{source} => {target}",
            str(missed_hdp), f"{100 * missed_hdp / n:.2f}%",
            str(missed_udp), f"{100 * missed_udp / n:.2f}%",
            str(missed_all), f"{100 * missed_all / n:.2f}%",
        ])
    if rows:
        out.append(_table(
            ["source => target", "=0 by HDP", "proportion",
             "=0 by UM", "proportion", "=0 by ALL", "proportion"],
            rows,
        ))
    else:
        out.append("no plan has predictions from every configured method")
    return "\n".join(out) + "\n"


def _report_satisfactory(result: ExperimentResult, index) -> str:
    cfg = result.config
    out = ["satisfactory ratio per dataset group (SC1: precision & recall > 75%;"
           " SC2: recall > 70% & precision > 50%)", ""]
    if "precision" not in cfg.measures or "recall" not in cfg.measures:
        out.append("requires the precision and recall measures in the configuration")
        return "\n".join(out) + "\n"
    groups = sorted(set(result.target_groups.values()))
    rows = []
    for method in cfg.methods:
        cells = []
        for group in groups:
            pairs = []
            for source, target in result.plans:
                if result.target_groups[target] != group:
                    continue
                precision = index[(method, source, target, "precision")]
                recall = index[(method, source, target, "recall")]
                if precision is not None and recall is not None:
                    pairs.append((precision, recall))
            for criterion in ("SC1", "SC2"):
                if pairs:
                    cells.append(f"{stats.satisfactory_ratio(pairs, criterion):.2f}%")
                else:
                    cells.append("n/a")
        rows.append([method, *cells])
    headers = ["method"]
    for group in groups:
        headers.extend([f"{group} SC1", f"{group} SC2"])
    out.append(_table(headers, rows))
    return "\n".join(out) + "\n"


def build_report(result: ExperimentResult) -> dict[str, str]:
    """Render the report bundle: file name -> text content.

    Pure function of the exported result data; regenerating from a loaded
    results directory reproduces the bundle byte-for-byte.
    """
    methods = set(row.method for row in result.rows)
    if len(methods) < 2:
        raise ValueError("reports need results from at least two methods")
    index = _value_index(result)
    return {
        "report_scottknott.txt": _report_scott_knott(result, index),
        "report_wtl.txt": _report_wtl(result, index),
        "report_diversity.txt": _report_diversity(result),
        "report_unidentified.txt": _report_unidentified(result),
        "report_satisfactory.txt": _report_satisfactory(result, index),
    }


def write_report(report: dict[str, str], out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name in sorted(report):
        path = out / name
        path.write_text(report[name])
        paths.append(path)
    return paths
