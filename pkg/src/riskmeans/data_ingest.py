"""Dataset loading and preprocessing for delimited credit-risk tables.

Pipeline: :func:`load_csv` -> :func:`impute` -> :func:`encode_categories`
-> :func:`standardize`. Every fitted quantity (imputation values, category
code tables, column moments) is recorded in a :class:`PreprocessReport`;
:func:`apply_report` replays a report on raw data, which both reproduces the
processed matrix bit-identically and lets test folds reuse train-fold
statistics without refitting.

Missing cells are NaN (numeric) or None (categorical) until imputation.
Feature matrices use dtype ``object`` while categorical strings remain and
become float64 after encoding.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

NUMERIC = "numeric"
CATEGORICAL = "categorical"


class DataError(ValueError):
    """Base for malformed-input errors raised by this module."""


class SchemaError(DataError):
    pass


class RaggedRowError(DataError):
    def __init__(self, row: int, expected: int, got: int):
        super().__init__(f"row {row}: expected {expected} fields, got {got}")
        self.row = row


class CellParseError(DataError):
    def __init__(self, row: int, column: str, token: str):
        super().__init__(f"row {row}, column {column!r}: cannot parse {token!r} as a number")
        self.row = row
        self.column = column


class NonBinaryLabelError(DataError):
    pass


class EmptyDataError(DataError):
    pass


class AllMissingColumnError(DataError):
    def __init__(self, column: str):
        super().__init__(f"column {column!r} has no observed values to impute from")
        self.column = column


@dataclass(frozen=True)
class ColumnSpec:
    """Name, kind and missing-value token of one input column."""

    name: str
    kind: str
    missing_token: str = "?"

    def __post_init__(self):
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise SchemaError(f"column {self.name!r}: unknown kind {self.kind!r}")


@dataclass
class Dataset:
    """Feature matrix with 0/1 labels and the column schema that produced it.

    ``features`` has one row per sample and one column per feature; the label
    column is not part of the matrix. Instances are treated as immutable:
    preprocessing operations return new datasets.
    """

    features: np.ndarray
    labels: np.ndarray
    schema: list[ColumnSpec]
    name: str = ""

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> tuple[int, int]:
        """(positive, negative) sample counts."""
        return int(np.sum(self.labels == 1)), int(np.sum(self.labels == 0))

    def column_names(self) -> list[str]:
        return [c.name for c in self.schema]


@dataclass
class PreprocessReport:
    """Everything needed to replay preprocessing exactly on raw data."""

    imputation: dict = field(default_factory=dict)  # column -> mean (numeric) or mode (categorical)
    codes: dict = field(default_factory=dict)       # column -> categories in code order
    means: dict = field(default_factory=dict)
    stds: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "imputation": self.imputation,
                "codes": self.codes,
                "means": self.means,
                "stds": self.stds,
            },
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "PreprocessReport":
        raw = json.loads(text)
        return cls(
            imputation=raw.get("imputation", {}),
            codes=raw.get("codes", {}),
            means=raw.get("means", {}),
            stds=raw.get("stds", {}),
        )


@dataclass(frozen=True)
class SchemaFile:
    """Parsed schema config: all file columns, which one is the label, and
    which raw token counts as the positive class."""

    columns: list[ColumnSpec]
    label_column: str
    positive_label: str | None = None
    declared_dimension: int | None = None

    def feature_specs(self) -> list[ColumnSpec]:
        return [c for c in self.columns if c.name != self.label_column]


def read_schema(path) -> SchemaFile:
    """Parse the plain-text schema grammar.

    Lines: ``column <name> <numeric|categorical> [missing=<token>]``,
    ``label <name> [positive=<token>]``, optional ``dimension <int>``.
    ``#`` starts a comment; blank lines are ignored.
    """
    columns: list[ColumnSpec] = []
    label_column = None
    positive_label = None
    declared_dimension = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            kw = parts[0]
            if kw == "column":
                if len(parts) < 3:
                    raise SchemaError(f"{path}:{lineno}: column line needs a name and a kind")
                missing = "?"
                for extra in parts[3:]:
                    if extra.startswith("missing="):
                        missing = extra[len("missing="):]
                    else:
                        raise SchemaError(f"{path}:{lineno}: unknown option {extra!r}")
                columns.append(ColumnSpec(name=parts[1], kind=parts[2], missing_token=missing))
            elif kw == "label":
                if len(parts) < 2:
                    raise SchemaError(f"{path}:{lineno}: label line needs a column name")
                label_column = parts[1]
                for extra in parts[2:]:
                    if extra.startswith("positive="):
                        positive_label = extra[len("positive="):]
                    else:
                        raise SchemaError(f"{path}:{lineno}: unknown option {extra!r}")
            elif kw == "dimension":
                declared_dimension = int(parts[1])
            else:
                raise SchemaError(f"{path}:{lineno}: unknown directive {kw!r}")
    if label_column is None:
        raise SchemaError(f"{path}: schema declares no label column")
    names = [c.name for c in columns]
    if len(set(names)) != len(names):
        raise SchemaError(f"{path}: duplicate column names")
    if label_column not in names:
        raise SchemaError(f"{path}: label column {label_column!r} not among declared columns")
    return SchemaFile(
        columns=columns,
        label_column=label_column,
        positive_label=positive_label,
        declared_dimension=declared_dimension,
    )


def _split_line(line: str, delimiter: str | None) -> list[str]:
    if delimiter == ",":
        return next(csv.reader([line]))
    return line.split()


def load_csv(path, schema: list[ColumnSpec], label_column: str,
             positive_label: str | None = None, name: str = "",
             declared_dimension: int | None = None) -> Dataset:
    """Load a delimited text file (comma or whitespace separated, one header row).

    Missing markers are retained (NaN / None); no imputation happens here.
    When ``positive_label`` is given, that raw token maps to 1 and every other
    token to 0; otherwise the label column must already contain 0/1.
    """
    try:
        fh = open(path, "r", encoding="utf-8")
    except FileNotFoundError:
        raise FileNotFoundError(f"data file not found: {path}") from None
    with fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip() != ""]
    if not lines:
        raise EmptyDataError("no data rows")
    delimiter = "," if "," in lines[0] else None

    header = _split_line(lines[0], delimiter)
    expected = [c.name for c in schema]
    if header != expected:
        raise SchemaError(f"header mismatch: file has {header}, schema declares {expected}")
    if label_column not in expected:
        raise SchemaError(f"label column {label_column!r} not in schema")
    if len(lines) == 1:
        raise EmptyDataError("no data rows")
    if declared_dimension is not None and len(schema) != declared_dimension:
        # Declared dimension counts feature columns plus the label column.
        raise SchemaError(
            f"declared dimension {declared_dimension} implies {declared_dimension - 1} features, "
            f"schema has {len(schema) - 1}"
        )

    label_idx = expected.index(label_column)
    feature_specs = [c for i, c in enumerate(schema) if i != label_idx]
    n_cols = len(schema)

    raw_labels: list[str] = []
    cells: list[list] = []
    for row_no, line in enumerate(lines[1:], start=1):
        fields = _split_line(line, delimiter)
        if len(fields) != n_cols:
            raise RaggedRowError(row=row_no, expected=n_cols, got=len(fields))
        raw_labels.append(fields[label_idx].strip())
        row = []
        for spec, tok in zip(feature_specs, (f for i, f in enumerate(fields) if i != label_idx)):
            tok = tok.strip()
            if tok == spec.missing_token:
                row.append(np.nan if spec.kind == NUMERIC else None)
            elif spec.kind == NUMERIC:
                try:
                    row.append(float(tok))
                except ValueError:
                    raise CellParseError(row=row_no, column=spec.name, token=tok) from None
            else:
                row.append(tok)
        cells.append(row)

    distinct = sorted(set(raw_labels))
    if positive_label is not None:
        if positive_label not in distinct:
            raise NonBinaryLabelError(
                f"positive label {positive_label!r} never occurs; column values: {distinct}"
            )
        if len(distinct) != 2:
            raise NonBinaryLabelError(
                f"label column must take exactly two values, found {distinct}"
            )
        labels = np.array([1 if t == positive_label else 0 for t in raw_labels], dtype=int)
    else:
        if not set(distinct) <= {"0", "1"}:
            raise NonBinaryLabelError(
                f"label column must be 0/1 (or declare positive=<token>), found {distinct}"
            )
        labels = np.array([int(t) for t in raw_labels], dtype=int)

    features = np.empty((len(cells), len(feature_specs)), dtype=object)
    for i, row in enumerate(cells):
        features[i, :] = row
    return Dataset(features=features, labels=labels, schema=feature_specs,
                   name=name or str(path))


def load_with_schema(data_path, schema_path, name: str = "") -> Dataset:
    """Convenience wrapper: read a schema file, then the data file it describes."""
    sf = read_schema(schema_path)
    return load_csv(
        data_path,
        schema=sf.columns,
        label_column=sf.label_column,
        positive_label=sf.positive_label,
        name=name,
        declared_dimension=sf.declared_dimension,
    )


def _is_missing(value) -> bool:
    return value is None or (isinstance(value, float) and np.isnan(value))


def impute(ds: Dataset, report: PreprocessReport | None = None) -> tuple[Dataset, PreprocessReport]:
    """Fill numeric gaps with the column mean, categorical gaps with the mode.

    Mode ties break to the lexicographically smallest category. Imputation
    values are recorded per column even when nothing was missing, so replays
    stay independent of which cells happened to be observed.
    """
    report = report or PreprocessReport()
    out = ds.features.copy()
    for j, spec in enumerate(ds.schema):
        col = out[:, j]
        observed = [v for v in col if not _is_missing(v)]
        if not observed:
            raise AllMissingColumnError(spec.name)
        if spec.kind == NUMERIC:
            fill = float(np.mean(np.array(observed, dtype=float)))
        else:
            counts = Counter(observed)
            top = max(counts.values())
            fill = min(c for c, k in counts.items() if k == top)
        report.imputation[spec.name] = fill
        for i in range(out.shape[0]):
            if _is_missing(out[i, j]):
                out[i, j] = fill
    return replace(ds, features=out), report


def encode_categories(ds: Dataset, report: PreprocessReport | None = None) -> tuple[Dataset, PreprocessReport]:
    """Map each categorical column to integer codes 0,1,2,... by first appearance.

    Expects imputation to have run (no missing cells). The resulting matrix is
    float64; code tables go into the report.
    """
    report = report or PreprocessReport()
    out = np.empty(ds.features.shape, dtype=float)
    for j, spec in enumerate(ds.schema):
        col = ds.features[:, j]
        if spec.kind == NUMERIC:
            out[:, j] = col.astype(float)
            continue
        table: dict[str, int] = {}
        for v in col:
            if _is_missing(v):
                raise DataError(f"column {spec.name!r} still has missing cells; impute first")
            if v not in table:
                table[v] = len(table)
        report.codes[spec.name] = list(table.keys())
        out[:, j] = [table[v] for v in col]
    return replace(ds, features=out), report


def standardize(ds: Dataset, report: PreprocessReport | None = None) -> tuple[Dataset, PreprocessReport]:
    """Center and scale every column to mean 0, population std 1.

    Constant columns map to all-zeros. Recorded means and stds let test folds
    reuse the train fold's transform.
    """
    report = report or PreprocessReport()
    X = np.asarray(ds.features, dtype=float)
    if not np.all(np.isfinite(X)):
        raise DataError("standardize requires a fully numeric, finite matrix")
    out = np.empty_like(X)
    for j, spec in enumerate(ds.schema):
        mu = float(np.mean(X[:, j]))
        sigma = float(np.std(X[:, j]))  # population std
        report.means[spec.name] = mu
        report.stds[spec.name] = sigma
        out[:, j] = 0.0 if sigma == 0.0 else (X[:, j] - mu) / sigma
    return replace(ds, features=out), report


def preprocess(ds: Dataset, scale: bool = True) -> tuple[Dataset, PreprocessReport]:
    """impute -> encode -> (optionally) standardize, sharing one report."""
    out, report = impute(ds)
    out, report = encode_categories(out, report)
    if scale:
        out, report = standardize(out, report)
    return out, report


def apply_report(ds: Dataset, report: PreprocessReport, scale: bool = True) -> Dataset:
    """Replay recorded preprocessing on raw data without refitting anything.

    Categories unseen when the code table was built share a single overflow
    code equal to the table length.
    """
    out = np.empty(ds.features.shape, dtype=float)
    for j, spec in enumerate(ds.schema):
        col = ds.features[:, j]
        if spec.kind == NUMERIC:
            fill = report.imputation.get(spec.name)
            vals = np.array(
                [fill if _is_missing(v) else float(v) for v in col], dtype=float
            )
        else:
            fill = report.imputation.get(spec.name)
            table = {c: i for i, c in enumerate(report.codes.get(spec.name, []))}
            overflow = len(table)
            vals = np.array(
                [table.get(fill if _is_missing(v) else v, overflow) for v in col],
                dtype=float,
            )
        if scale:
            mu = report.means[spec.name]
            sigma = report.stds[spec.name]
            vals = np.zeros_like(vals) if sigma == 0.0 else (vals - mu) / sigma
        out[:, j] = vals
    return replace(ds, features=out)


def balanced_subsample(ds: Dataset, per_class: int, seed: int) -> Dataset:
    """Draw ``per_class`` rows per class uniformly without replacement, shuffled."""
    rng = np.random.default_rng(seed)
    picks = []
    for cls in (1, 0):
        idx = np.flatnonzero(ds.labels == cls)
        if idx.size < per_class:
            raise DataError(
                f"class {cls} has {idx.size} samples, cannot draw {per_class}"
            )
        picks.append(rng.choice(idx, size=per_class, replace=False))
    order = np.concatenate(picks)
    rng.shuffle(order)
    return replace(ds, features=ds.features[order], labels=ds.labels[order])


def write_processed(ds: Dataset, path, label_name: str = "label") -> None:
    """Dump a processed (numeric) matrix plus labels as comma-separated text."""
    X = np.asarray(ds.features, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(ds.column_names() + [label_name]) + "\n")
        for i in range(ds.n):
            cells = [repr(float(v)) for v in X[i]] + [str(int(ds.labels[i]))]
            fh.write(",".join(cells) + "\n")
