"""CSV ingestion, feature-type detection, schema alignment, and data profiling."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .config import RunConfig
from .errors import IngestError, SchemaError

logger = logging.getLogger(__name__)

Cell = Union[float, str, None]


class FeatureKind(str, Enum):
    CONTINUOUS = "continuous"
    ORDINAL = "ordinal"
    BINARY = "binary_categorical"
    MULTI = "multi_categorical"
    TEXT = "text"

    @property
    def is_numeric(self) -> bool:
        return self in (FeatureKind.CONTINUOUS, FeatureKind.ORDINAL)

    @property
    def is_categorical(self) -> bool:
        return self in (FeatureKind.BINARY, FeatureKind.MULTI)


@dataclass
class DataTable:
    """Column-major table; cells are floats, strings, or None (missing)."""

    names: list[str]
    columns: dict[str, list[Cell]]
    n_rows: int

    def column(self, name: str) -> list[Cell]:
        return self.columns[name]

    def restricted(self, names: list[str]) -> "DataTable":
        return DataTable(
            names=list(names),
            columns={n: self.columns[n] for n in names},
            n_rows=self.n_rows,
        )


@dataclass
class ColumnSchema:
    name: str
    kind: FeatureKind
    unique_count: int
    numeric_range: Optional[tuple[float, float]] = None
    categories: Optional[list[str]] = None
    flags: list[str] = field(default_factory=list)


FeatureSchema = dict[str, ColumnSchema]


@dataclass
class AlignedPair:
    """Schema-harmonized real/synthetic tables over the common feature set."""

    real: DataTable
    synthetic: DataTable
    schema: FeatureSchema
    dropped: list[tuple[str, str]]


@dataclass
class QualityProfile:
    total_missing: int
    completeness_pct: float
    outlier_pct: dict[str, float] = field(default_factory=dict)


def _parse_cell(text: str) -> Cell:
    if text == "":
        return None
    try:
        value = float(text)
    except ValueError:
        return text
    # "nan"/"inf" spellings are not decimal literals; keep them as strings.
    if not math.isfinite(value):
        return text
    return value


def load_csv(path) -> DataTable:
    """Load an RFC-4180 style CSV (UTF-8, header row required).

    Cells that parse as finite decimal literals become numbers, empty cells
    become missing, everything else stays a string.
    """
    path = Path(path)
    try:
        handle = path.open("r", encoding="utf-8-sig", newline="")
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            raise IngestError(f"{path}: duplicate column names in header")
        columns: dict[str, list[Cell]] = {name: [] for name in header}
        n_rows = 0
        for row_index, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(header):
                raise IngestError(
                    f"{path}: row {row_index} has {len(row)} fields, "
                    f"expected {len(header)}"
                )
            for name, text in zip(header, row):
                columns[name].append(_parse_cell(text))
            n_rows += 1
    return DataTable(names=header, columns=columns, n_rows=n_rows)


def format_category(value: Cell) -> str:
    """Canonical string label for a categorical cell (merges 1 and 1.0)."""
    if isinstance(value, str):
        return value
    if value is None:
        raise ValueError("missing cell has no category label")
    if float(value).is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(float(value))


def numeric_values(column: list[Cell]) -> np.ndarray:
    """Non-missing cells as a float array (numeric columns only)."""
    return np.array([c for c in column if c is not None], dtype=float)


def category_values(column: list[Cell]) -> list[str]:
    """Non-missing cells as canonical category labels."""
    return [format_category(c) for c in column if c is not None]


def _classify_column(column: list[Cell], n_rows: int, cfg: RunConfig) -> ColumnSchema:
    non_missing = [c for c in column if c is not None]
    if not non_missing:
        return ColumnSchema(
            name="", kind=FeatureKind.TEXT, unique_count=0,
            flags=["all-missing"],
        )

    has_string = any(isinstance(c, str) for c in non_missing)
    if has_string:
        labels = [format_category(c) for c in non_missing]
        uniques = sorted(set(labels))
        if len(uniques) == 2:
            kind = FeatureKind.BINARY
        elif len(uniques) > 0.5 * n_rows:
            return ColumnSchema(name="", kind=FeatureKind.TEXT,
                                unique_count=len(uniques))
        else:
            kind = FeatureKind.MULTI
        return ColumnSchema(name="", kind=kind, unique_count=len(uniques),
                            categories=uniques)

    values = [float(c) for c in non_missing]
    uniques = sorted(set(values))
    all_integers = all(v.is_integer() for v in values)
    if len(uniques) == 2:
        kind = FeatureKind.BINARY
    elif all_integers and len(uniques) <= cfg.categorical_unique_max:
        kind = FeatureKind.MULTI
    elif all_integers and len(uniques) <= cfg.ordinal_unique_max:
        kind = FeatureKind.ORDINAL
    else:
        kind = FeatureKind.CONTINUOUS

    schema = ColumnSchema(name="", kind=kind, unique_count=len(uniques))
    if kind.is_numeric:
        schema.numeric_range = (min(values), max(values))
    else:
        schema.categories = sorted(format_category(v) for v in uniques)
    return schema


def detect_types(table: DataTable, cfg: RunConfig | None = None) -> FeatureSchema:
    """Classify every column as continuous/ordinal/binary/multi/text.

    Rule ladder: any non-numeric cell makes the column categorical (binary
    on exactly two uniques, text when uniques exceed half the rows, multi
    otherwise); numeric columns are binary on two uniques, multi-categorical
    for small integer domains, ordinal for medium integer domains, and
    continuous otherwise.  Invariant under row permutation.
    """
    cfg = cfg or RunConfig("", "", "", "")
    schema: FeatureSchema = {}
    for name in table.names:
        col_schema = _classify_column(table.column(name), table.n_rows, cfg)
        col_schema.name = name
        if "all-missing" in col_schema.flags:
            logger.warning("column %s has no observed values; treated as text", name)
        schema[name] = col_schema
    return schema


def align(real: DataTable, synthetic: DataTable, cfg: RunConfig | None = None) -> AlignedPair:
    """Restrict both tables to the common features with matching kinds.

    Feature order follows the real table.  Real features missing from the
    synthetic table are dropped with reason "missing-in-synthetic"; features
    whose detected kind differs are dropped with reason "kind-mismatch".
    """
    real_schema = detect_types(real, cfg)
    synth_schema = detect_types(synthetic, cfg)

    kept: list[str] = []
    dropped: list[tuple[str, str]] = []
    for name in real.names:
        if name not in synth_schema:
            dropped.append((name, "missing-in-synthetic"))
        elif real_schema[name].kind != synth_schema[name].kind:
            dropped.append((name, "kind-mismatch"))
        else:
            kept.append(name)

    if not kept:
        raise SchemaError("no common features with matching kinds")

    return AlignedPair(
        real=real.restricted(kept),
        synthetic=synthetic.restricted(kept),
        schema={name: real_schema[name] for name in kept},
        dropped=dropped,
    )


def iqr_outlier_pct(values) -> float:
    """Percentage of values outside the Tukey fences Q1-1.5*IQR, Q3+1.5*IQR.

    Quartiles use linear-interpolation quantiles.  Fewer than four values
    cannot support the fences, so the result is 0 (flagged in the log).
    Rounded to two decimals.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size < 4:
        logger.warning("fewer than 4 values; outlier percentage reported as 0")
        return 0.0
    q1, q3 = np.percentile(arr, [25.0, 75.0])
    iqr = q3 - q1
    lo = q1 - 1.5 * iqr
    hi = q3 + 1.5 * iqr
    outside = int(np.count_nonzero((arr < lo) | (arr > hi)))
    return round(100.0 * outside / arr.size, 2)


def completeness(table: DataTable) -> QualityProfile:
    """Global missingness profile: 100 * (1 - missing / (rows * cols))."""
    total_cells = table.n_rows * len(table.names)
    total_missing = sum(
        1 for name in table.names for c in table.column(name) if c is None
    )
    pct = 100.0 if total_cells == 0 else 100.0 * (1.0 - total_missing / total_cells)
    return QualityProfile(total_missing=total_missing, completeness_pct=pct)


def quality_profile(table: DataTable, schema: FeatureSchema) -> QualityProfile:
    """Completeness plus per-feature IQR outlier percentages.

    Outliers are computed on the real table's numeric features only.
    """
    profile = completeness(table)
    for name, col_schema in schema.items():
        if not col_schema.kind.is_numeric or name not in table.columns:
            continue
        values = numeric_values(table.column(name))
        profile.outlier_pct[name] = iqr_outlier_pct(values)
    return profile
