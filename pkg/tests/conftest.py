"""Shared fixtures: random mixed-type table builders and CSV helpers."""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sdbench.ingest import DataTable


def make_table(columns: dict[str, list]) -> DataTable:
    names = list(columns)
    n_rows = len(next(iter(columns.values())))
    return DataTable(names=names, columns={k: list(v) for k, v in columns.items()},
                     n_rows=n_rows)


def random_mixed_columns(rng: np.random.Generator, n_rows: int,
                         n_continuous: int = 0, n_ordinal: int = 0,
                         n_multi: int = 0, n_binary: int = 0,
                         perturb: float = 0.0) -> dict[str, list]:
    """Columns that detect as the requested kinds under the default config.

    ``perturb`` adds noise/resampling so the column differs from a twin
    generated with the same layout but another rng state.
    """
    columns: dict[str, list] = {}
    for i in range(n_continuous):
        base = rng.normal(loc=rng.uniform(-5, 5), scale=rng.uniform(0.5, 3.0),
                          size=n_rows)
        if perturb:
            base = base + rng.normal(scale=perturb, size=n_rows)
        columns[f"num{i}"] = [float(v) for v in base]
    for i in range(n_ordinal):
        # 16..25 distinct integers: ordinal under the default thresholds
        # (falls back to multi-categorical when n_rows cannot carry 16 uniques)
        k_uniq = min(n_rows, 25)
        values = rng.integers(0, k_uniq, size=n_rows)
        values[:k_uniq] = np.arange(k_uniq)
        rng.shuffle(values)
        columns[f"ord{i}"] = [float(v) for v in values]
    for i in range(n_multi):
        labels = [f"c{j}" for j in range(rng.integers(3, 8))]
        columns[f"cat{i}"] = [labels[j] for j in rng.integers(0, len(labels),
                                                              size=n_rows)]
    for i in range(n_binary):
        columns[f"bin{i}"] = [float(v) for v in rng.integers(0, 2, size=n_rows)]
        columns[f"bin{i}"][0] = 0.0
        columns[f"bin{i}"][1] = 1.0
    return columns


def write_csv(path: Path, columns: dict[str, list]) -> Path:
    names = list(columns)
    n_rows = len(next(iter(columns.values())))
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(names)
        for row in range(n_rows):
            writer.writerow(
                ["" if columns[name][row] is None else columns[name][row]
                 for name in names]
            )
    return path


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240911)


def pytest_runtest_logreport(report):
    """Print one PASS/FAIL line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    label = report.nodeid.split("::")[-1].replace("test_", "", 1)
    status = "PASS" if report.passed else "FAIL"
    print(f"\nACCEPTANCE {status}: {label}", flush=True)
