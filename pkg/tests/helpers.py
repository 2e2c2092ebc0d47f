"""Shared test fixtures: in-memory dataset construction, the 34-project
benchmark stub schemas, and a small synthetic benchmark on disk."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from hdpbench.datasets import DefectDataset, MetricSchema

# (project, schema tag, metric count, modules, defective) for the five
# public benchmark groups; NASA splits into five metric-set variants.
BENCHMARK_PROJECTS = [
    ("EQ", "aeeem", 61, 324, 129),
    ("JDT", "aeeem", 61, 997, 206),
    ("LC", "aeeem", 61, 691, 64),
    ("ML", "aeeem", 61, 1862, 245),
    ("PDE", "aeeem", 61, 1492, 209),
    ("Apache", "relink", 26, 194, 98),
    ("Safe", "relink", 26, 56, 22),
    ("Zxing", "relink", 26, 399, 118),
    ("ant-1.3", "promise", 20, 125, 20),
    ("arc", "promise", 20, 234, 27),
    ("camel-1.0", "promise", 20, 339, 13),
    ("poi-1.5", "promise", 20, 237, 141),
    ("redaktor", "promise", 20, 176, 27),
    ("skarbonka", "promise", 20, 45, 9),
    ("tomcat", "promise", 20, 858, 77),
    ("velocity-1.4", "promise", 20, 196, 147),
    ("xalan-2.4", "promise", 20, 723, 110),
    ("xerces-1.2", "promise", 20, 440, 71),
    ("cm1", "nasa37", 37, 344, 42),
    ("mw1", "nasa37", 37, 264, 27),
    ("pc1", "nasa37", 37, 759, 61),
    ("pc3", "nasa37", 37, 1125, 140),
    ("pc4", "nasa37", 37, 1399, 178),
    ("jm1", "nasa21", 21, 9593, 1759),
    ("pc2", "nasa36", 36, 1585, 16),
    ("pc5", "nasa38", 38, 17001, 503),
    ("mc1", "nasa38", 38, 9277, 68),
    ("mc2", "nasa39", 39, 127, 44),
    ("kc3", "nasa39", 39, 200, 36),
    ("ar1", "softlab", 29, 121, 9),
    ("ar3", "softlab", 29, 63, 8),
    ("ar4", "softlab", 29, 107, 20),
    ("ar5", "softlab", 29, 36, 8),
    ("ar6", "softlab", 29, 101, 15),
]

NASA_TAGS = ("nasa37", "nasa21", "nasa36", "nasa38", "nasa39")

# distribution scale per schema tag: overlapping scales make some
# cross-group metric matches succeed while others fail
STUB_SCALES = {
    "aeeem": 0.0,
    "relink": 2.0,
    "promise": 60.0,
    "nasa37": 8.0,
    "nasa21": 8.0,
    "nasa36": 8.0,
    "nasa38": 8.0,
    "nasa39": 8.0,
    "softlab": 1000.0,
}


def make_dataset(
    name: str,
    values,
    labels,
    group: str = "test-group",
    metric_names: tuple[str, ...] | None = None,
    loc_index: int = 0,
    granularity: str = "file",
) -> DefectDataset:
    values = np.asarray(values, dtype=float)
    if metric_names is None:
        metric_names = tuple(f"{name}_m{j}" for j in range(values.shape[1]))
    schema = MetricSchema(group, metric_names, metric_names[loc_index], granularity)
    ids = tuple(f"{name}#{i}" for i in range(values.shape[0]))
    return DefectDataset(name, schema, values, np.asarray(labels, dtype=bool), ids)


def stub_metric_names(tag: str, count: int) -> tuple[str, ...]:
    return tuple(f"{tag}_m{j}" for j in range(count))


def benchmark_stub_datasets(n_modules: int = 4, seed: int = 0) -> list[DefectDataset]:
    """34 tiny datasets whose metric-name sets mirror the public benchmark."""
    rng = np.random.default_rng(seed)
    datasets = []
    for name, tag, n_metrics, _, _ in BENCHMARK_PROJECTS:
        values = rng.random((n_modules, n_metrics)) + STUB_SCALES[tag]
        labels = np.zeros(n_modules, dtype=bool)
        labels[0] = True
        datasets.append(
            make_dataset(name, values, labels, group=tag,
                         metric_names=stub_metric_names(tag, n_metrics))
        )
    return datasets


def truth_map(d: DefectDataset) -> dict[str, bool]:
    return {mid: bool(lab) for mid, lab in zip(d.module_ids, d.labels)}


def write_benchmark_stub_files(out_dir: Path, n_modules: int = 18, seed: int = 3) -> Path:
    """Write 34 stub CSVs plus a manifest; returns the manifest path.

    Values are lognormal at the group's scale with a planted defect signal,
    so metric matching succeeds within overlapping scales and fails across
    distant ones.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    tags: dict[str, list[str]] = {}
    for name, tag, n_metrics, _, defective in BENCHMARK_PROJECTS:
        labels = np.zeros(n_modules, dtype=bool)
        labels[: max(2, n_modules // 4)] = True
        values = rng.lognormal(1.0, 0.7, size=(n_modules, n_metrics)) + STUB_SCALES[tag]
        values[labels] *= 1.6
        file_name = f"{name}.csv"
        with (out_dir / file_name).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(list(stub_metric_names(tag, n_metrics)) + ["bug"])
            for row, label in zip(values, labels):
                writer.writerow([repr(float(v)) for v in row] + [int(label)])
        tags.setdefault(tag, []).append(file_name)
    lines = []
    for tag, files in tags.items():
        lines += [
            f"[{tag}]",
            f"loc_metric = {tag}_m0",
            "granularity = file",
            f"files = {' '.join(files)}",
            "",
        ]
    manifest = out_dir / "manifest.ini"
    manifest.write_text("\n".join(lines))
    return manifest


def write_synthetic_benchmark(
    out_dir: Path,
    seed: int = 11,
    measures: str = "f1 auc acc popt pmi20 ifa",
) -> Path:
    """Four heterogeneous datasets (<= 200 modules), manifest, and config.

    Returns the config path. Defect signal is planted in half the metrics
    so every method has something to rank.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    specs = [("alpha", 160, 8, 0.25), ("beta", 120, 6, 0.35),
             ("gamma", 200, 10, 0.2), ("delta", 80, 5, 0.4)]
    manifest_lines = []
    for name, n, m, rate in specs:
        labels = rng.random(n) < rate
        labels[0] = True
        labels[1] = False
        values = np.empty((n, m))
        for j in range(m):
            col = rng.lognormal(1.0 + 0.2 * j, 0.6, size=n)
            if j % 2 == 0:
                col[labels] *= 1.8
            values[:, j] = np.round(col, 4)
        values[:, 0] = np.round(rng.lognormal(3.0, 0.8, size=n)) + 1
        values[labels, 0] = np.round(values[labels, 0] * 1.5) + 1
        with (out_dir / f"{name}.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"{name}_m{j}" for j in range(m)] + ["bug"])
            for row, label in zip(values, labels):
                writer.writerow([repr(float(v)) for v in row] + [int(label)])
        manifest_lines += [
            f"[grp_{name}]",
            f"loc_metric = {name}_m0",
            "granularity = file",
            f"files = {name}.csv",
            "",
        ]
    (out_dir / "manifest.ini").write_text("\n".join(manifest_lines))
    config = out_dir / "config.ini"
    config.write_text(
        "[experiment]\n"
        "manifest = manifest.ini\n"
        "output_dir = results\n"
        "methods = hdp1 hdp5 cla clami spectral manual bestmetric\n"
        f"measures = {measures}\n"
        "effort_fraction = 0.2\n"
        "scenario = scenario1\n"
        f"seed = {seed}\n"
    )
    return config
