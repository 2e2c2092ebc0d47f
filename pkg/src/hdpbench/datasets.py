"""Defect dataset loading, validation, and source/target pair enumeration.

A dataset is a numeric metric matrix over program modules plus a binary
defect label per module. Groups of datasets that share a metric set are
homogeneous with each other; prediction pairs are only formed between
datasets whose metric-name sets differ.
"""

from __future__ import annotations

import configparser
import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

GRANULARITIES = ("class", "file", "function")

#: LOC-style metric names used by the five public benchmark groups.
KNOWN_LOC_METRICS = (
    "LOC_EXECUTABLE",      # NASA
    "executable_loc",      # SOFTLAB
    "ck_oo_numberOfLinesOfCode",  # AEEEM
    "CountLineCode",       # ReLink
    "loc",                 # PROMISE
)

LABEL_COLUMN_NAMES = frozenset({"bug", "bugs", "label", "defective", "isdefective"})

_TRUE_LABELS = frozenset({"true", "y", "yes", "buggy", "defective", "clean_buggy"})
_FALSE_LABELS = frozenset({"false", "n", "no", "clean", "non-defective", "nondefective"})


class DatasetError(ValueError):
    """Base error for malformed dataset files or schemas."""


class ZeroModules(DatasetError):
    pass


class MissingLabelColumn(DatasetError):
    pass


class NonNumericMetric(DatasetError):
    pass


class SchemaMismatch(DatasetError):
    pass


@dataclass(frozen=True)
class MetricSchema:
    """Names and layout of the metric columns for one dataset group."""

    group_name: str
    metric_names: tuple[str, ...]
    loc_metric: str
    granularity: str

    def __post_init__(self):
        object.__setattr__(self, "metric_names", tuple(self.metric_names))
        if not self.metric_names:
            raise SchemaMismatch("schema has no metrics")
        if len(set(self.metric_names)) != len(self.metric_names):
            raise SchemaMismatch(f"duplicate metric names in group {self.group_name!r}")
        if self.loc_metric not in self.metric_names:
            raise SchemaMismatch(
                f"loc metric {self.loc_metric!r} not among metrics of group {self.group_name!r}"
            )
        if self.granularity not in GRANULARITIES:
            raise SchemaMismatch(f"granularity must be one of {GRANULARITIES}")

    def metric_index(self, name: str) -> int:
        return self.metric_names.index(name)


@dataclass(frozen=True)
class DefectDataset:
    """One project's metric matrix, binary labels, and module identifiers."""

    name: str
    schema: MetricSchema
    values: np.ndarray          # shape (n_modules, n_metrics), float
    labels: np.ndarray          # shape (n_modules,), bool, True = defective
    module_ids: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        labels = np.asarray(self.labels, dtype=bool)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "module_ids", tuple(self.module_ids))
        n = values.shape[0] if values.ndim == 2 else 0
        if n == 0:
            raise ZeroModules(f"dataset {self.name!r} has no modules")
        if values.ndim != 2 or values.shape[1] != len(self.schema.metric_names):
            raise SchemaMismatch(
                f"dataset {self.name!r}: {values.shape[1] if values.ndim == 2 else '?'} "
                f"columns vs {len(self.schema.metric_names)} schema metrics"
            )
        if labels.shape != (n,) or len(self.module_ids) != n:
            raise SchemaMismatch(f"dataset {self.name!r}: row/label/id count mismatch")
        if not np.all(np.isfinite(values)):
            raise NonNumericMetric(f"dataset {self.name!r} contains non-finite metric values")
        values.setflags(write=False)
        labels.setflags(write=False)

    @property
    def n_modules(self) -> int:
        return self.values.shape[0]

    def column(self, metric: str) -> np.ndarray:
        return self.values[:, self.schema.metric_index(metric)]


@dataclass(frozen=True)
class CombinationPlan:
    """An ordered heterogeneous (source, target) prediction pair."""

    source: str
    target: str

    def __post_init__(self):
        if self.source == self.target:
            raise ValueError("source and target must differ")


def normalize_label(raw: str) -> bool:
    """Map a raw label cell to True (defective) / False (non-defective).

    Accepts 0/1, true/false, Y/N, buggy/clean, and integer bug counts
    (count > 0 means defective).
    """
    text = raw.strip().lower()
    if text in _TRUE_LABELS:
        return True
    if text in _FALSE_LABELS:
        return False
    try:
        count = float(text)
    except ValueError:
        raise DatasetError(f"unrecognized label value {raw!r}") from None
    return count > 0


def _build_dataset(
    name: str,
    header: list[str],
    rows: list[list[str]],
    schema: MetricSchema | None,
    group_name: str,
    granularity: str,
    loc_metric: str | None,
    label_index: int | None = None,
) -> DefectDataset:
    if label_index is None:
        matches = [i for i, h in enumerate(header) if h.strip().lower() in LABEL_COLUMN_NAMES]
        if not matches:
            raise MissingLabelColumn(f"{name}: no label column among {header}")
        label_index = matches[0]
    metric_names = [h.strip() for i, h in enumerate(header) if i != label_index]
    if schema is None:
        if loc_metric is None:
            loc_metric = next((m for m in KNOWN_LOC_METRICS if m in metric_names), metric_names[0])
        schema = MetricSchema(group_name, tuple(metric_names), loc_metric, granularity)
    elif tuple(metric_names) != schema.metric_names:
        if len(metric_names) != len(schema.metric_names):
            raise SchemaMismatch(
                f"{name}: {len(metric_names)} metric columns vs "
                f"{len(schema.metric_names)} in schema {schema.group_name!r}"
            )
        raise SchemaMismatch(f"{name}: metric names do not match schema {schema.group_name!r}")

    if not rows:
        raise ZeroModules(f"{name}: no data rows")
    n_cols = len(header)
    values = np.empty((len(rows), n_cols - 1), dtype=float)
    labels = np.empty(len(rows), dtype=bool)
    for r, row in enumerate(rows):
        if len(row) != n_cols:
            raise DatasetError(f"{name}: row {r + 1} has {len(row)} cells, expected {n_cols}")
        labels[r] = normalize_label(row[label_index])
        c = 0
        for i, cell in enumerate(row):
            if i == label_index:
                continue
            try:
                values[r, c] = float(cell)
            except ValueError:
                raise NonNumericMetric(
                    f"{name}: non-numeric cell {cell!r} in metric {metric_names[c]!r}, row {r + 1}"
                ) from None
            c += 1
    module_ids = tuple(f"{name}#{i}" for i in range(len(rows)))
    return DefectDataset(name, schema, values, labels, module_ids)


def _parse_arff(text: str) -> tuple[list[str], list[list[str]]]:
    """Return (attribute names, data rows) from an arff-subset document.

    Only the @attribute/@data structure is honored; the last attribute is
    the class.
    """
    header: list[str] = []
    rows: list[list[str]] = []
    in_data = False
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        lower = line.lower()
        if in_data:
            rows.append([c.strip() for c in line.split(",")])
        elif lower.startswith("@attribute"):
            rest = line[len("@attribute"):].strip()
            if rest.startswith(("'", '"')):
                quote = rest[0]
                end = rest.index(quote, 1)
                header.append(rest[1:end])
            else:
                header.append(rest.split()[0])
        elif lower.startswith("@data"):
            in_data = True
    if not header:
        raise DatasetError("arff file has no @attribute declarations")
    return header, rows


def load_dataset(
    path: str | Path,
    schema: MetricSchema | None = None,
    format: str | None = None,
    *,
    group_name: str = "unknown-group",
    granularity: str = "file",
    loc_metric: str | None = None,
) -> DefectDataset:
    """Load one dataset file (csv or arff-subset) into a validated DefectDataset.

    CSV files carry a header row and a label column named bug/bugs/label/
    defective/isDefective (case-insensitive); arff-subset files use the last
    attribute as the class. When no schema is supplied, one is derived from
    the header with ``loc_metric`` (or a known LOC name) as the LOC column.
    """
    path = Path(path)
    if format is None:
        format = "arff-subset" if path.suffix.lower() == ".arff" else "csv"
    text = path.read_text()
    name = path.stem
    if format == "csv":
        reader = csv.reader(text.splitlines())
        table = [row for row in reader if row and any(c.strip() for c in row)]
        if not table:
            raise ZeroModules(f"{name}: empty file")
        header, rows = table[0], table[1:]
        label_index = None
    elif format == "arff-subset":
        header, rows = _parse_arff(text)
        label_index = len(header) - 1
    else:
        raise ValueError(f"unknown format {format!r}")
    if schema is not None:
        group_name = schema.group_name
        granularity = schema.granularity
    return _build_dataset(name, header, rows, schema, group_name, granularity, loc_metric,
                          label_index=label_index)


def dataset_stats(d: DefectDataset) -> tuple[int, int, float]:
    """(module count, defective count, percent defective to two decimals)."""
    n = d.n_modules
    k = int(np.sum(d.labels))
    return n, k, round(100.0 * k / n, 2)


def enumerate_combinations(datasets: Sequence[DefectDataset]) -> list[CombinationPlan]:
    """Every ordered (source, target) pair whose metric-name sets differ.

    Output is sorted by target then source name so result files are
    byte-stable across runs.
    """
    if len(datasets) < 2:
        raise ValueError("need at least two datasets")
    metric_sets = {d.name: frozenset(d.schema.metric_names) for d in datasets}
    names = sorted(metric_sets)
    return [
        CombinationPlan(source=s, target=t)
        for t in names
        for s in names
        if s != t and metric_sets[s] != metric_sets[t]
    ]


def loc_values(d: DefectDataset) -> np.ndarray:
    """The column designated as LOC by the schema."""
    return d.column(d.schema.loc_metric)


def effort_values(d: DefectDataset) -> np.ndarray:
    """Per-module inspection effort: the LOC column with values <= 0 clamped to 1."""
    loc = loc_values(d).copy()
    loc[loc <= 0] = 1.0
    return loc


@dataclass(frozen=True)
class GroupSpec:
    """One section of a dataset manifest."""

    name: str
    loc_metric: str
    granularity: str
    files: tuple[Path, ...] = field(default_factory=tuple)


def read_manifest(path: str | Path) -> list[GroupSpec]:
    """Parse a group manifest: one section per group, key-value entries.

    Keys: ``loc_metric``, ``granularity``, ``files`` (whitespace- or
    comma-separated paths relative to the manifest).
    """
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    with path.open() as fh:
        parser.read_file(fh)
    groups = []
    for section in parser.sections():
        entries = parser[section]
        for key in ("loc_metric", "granularity"):
            if key not in entries:
                raise DatasetError(f"manifest group {section!r} is missing {key!r}")
        raw_files = entries.get("files", "").replace(",", " ").split()
        files = tuple(path.parent / f for f in raw_files)
        groups.append(GroupSpec(section, entries["loc_metric"], entries["granularity"], files))
    if not groups:
        raise DatasetError(f"manifest {path} declares no groups")
    return groups


def load_manifest_datasets(path: str | Path) -> list[DefectDataset]:
    """Load every dataset listed in a manifest, one schema per group per file header."""
    datasets = []
    for group in read_manifest(path):
        for file in group.files:
            datasets.append(
                load_dataset(
                    file,
                    group_name=group.name,
                    granularity=group.granularity,
                    loc_metric=group.loc_metric,
                )
            )
    seen: set[str] = set()
    for d in datasets:
        if d.name in seen:
            raise DatasetError(f"duplicate dataset name {d.name!r} in manifest")
        seen.add(d.name)
    return datasets
