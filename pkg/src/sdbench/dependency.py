"""Multivariate dependency-preservation metrics.

Covariance and correlation structure is compared over the numeric features
(continuous + ordinal); mutual information is compared over the discrete
(binary/multi-categorical) features using plug-in estimates on category
counts with natural logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import MetricError
from .ingest import AlignedPair, DataTable, format_category


@dataclass
class MatrixStats:
    """Covariance and correlation matrices for both tables, numeric features only."""

    cov_real: np.ndarray
    cov_synth: np.ndarray
    corr_pearson_real: np.ndarray
    corr_pearson_synth: np.ndarray
    corr_spearman_real: np.ndarray
    corr_spearman_synth: np.ndarray
    feature_order: list[str]


@dataclass
class MiMatrices:
    """Pairwise plug-in mutual information; the diagonal holds feature entropies."""

    mi_real: np.ndarray
    mi_synth: np.ndarray
    feature_order: list[str]


def average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks starting at 1 with ties assigned their average rank."""
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    n = len(values)
    boundaries = np.flatnonzero(
        np.r_[True, sorted_vals[1:] != sorted_vals[:-1], True]
    )
    ranks_sorted = np.empty(n, dtype=float)
    for start, stop in zip(boundaries[:-1], boundaries[1:]):
        ranks_sorted[start:stop] = 0.5 * (start + stop - 1) + 1.0
    ranks = np.empty(n, dtype=float)
    ranks[order] = ranks_sorted
    return ranks


def pearson_matrix(data: np.ndarray) -> np.ndarray:
    """Pearson correlation matrix; zero-variance columns correlate 0 off-diagonal."""
    centered = data - data.mean(axis=0)
    norms = np.sqrt((centered ** 2).sum(axis=0))
    denom = np.outer(norms, norms)
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = (centered.T @ centered) / denom
    corr[~np.isfinite(corr)] = 0.0
    np.fill_diagonal(corr, 1.0)
    return np.clip(corr, -1.0, 1.0)


def spearman_matrix(data: np.ndarray) -> np.ndarray:
    ranked = np.column_stack([average_ranks(data[:, j]) for j in range(data.shape[1])])
    return pearson_matrix(ranked)


def _numeric_matrix(table: DataTable, names: list[str]) -> np.ndarray:
    """Rows x features matrix over complete cases (rows with no missing cell).

    Complete-case deletion keeps the covariance matrices positive
    semidefinite, which pairwise deletion would not guarantee.
    """
    columns = []
    masks = []
    for name in names:
        cells = table.column(name)
        masks.append(np.array([c is not None for c in cells], dtype=bool))
        columns.append(np.array([c if c is not None else np.nan for c in cells],
                                dtype=float))
    keep = np.logical_and.reduce(masks)
    return np.column_stack(columns)[keep]


def matrix_stats(pair: AlignedPair) -> Optional[MatrixStats]:
    """Build MatrixStats over the aligned numeric features; None when degenerate."""
    names = [n for n, s in pair.schema.items() if s.kind.is_numeric]
    if not names:
        return None
    real = _numeric_matrix(pair.real, names)
    synth = _numeric_matrix(pair.synthetic, names)
    if real.shape[0] < 2 or synth.shape[0] < 2:
        return None
    return MatrixStats(
        cov_real=np.cov(real, rowvar=False, ddof=1).reshape(len(names), len(names)),
        cov_synth=np.cov(synth, rowvar=False, ddof=1).reshape(len(names), len(names)),
        corr_pearson_real=pearson_matrix(real),
        corr_pearson_synth=pearson_matrix(synth),
        corr_spearman_real=spearman_matrix(real),
        corr_spearman_synth=spearman_matrix(synth),
        feature_order=names,
    )


def cov_frobenius(cov_real: np.ndarray, cov_synth: np.ndarray) -> float:
    """Frobenius norm of the covariance difference."""
    if cov_real.shape != cov_synth.shape:
        raise MetricError("covariance matrices must share a shape")
    return float(np.linalg.norm(cov_real - cov_synth, ord="fro"))


def corr_matrix_distance(corr_real: np.ndarray, corr_synth: np.ndarray) -> float:
    """Frobenius distance between correlation matrices, normalized by the real norm."""
    if corr_real.shape != corr_synth.shape:
        raise MetricError("correlation matrices must share a shape")
    return float(
        np.linalg.norm(corr_real - corr_synth, ord="fro")
        / np.linalg.norm(corr_real, ord="fro")
    )


def correlation_difference(kind: str, stats: MatrixStats) -> Optional[float]:
    """Mean absolute correlation gap over the strict upper triangle.

    kind is "pearson" or "spearman"; None when fewer than two numeric
    features exist.
    """
    if kind == "pearson":
        a, b = stats.corr_pearson_real, stats.corr_pearson_synth
    elif kind == "spearman":
        a, b = stats.corr_spearman_real, stats.corr_spearman_synth
    else:
        raise MetricError(f"unknown correlation kind: {kind}")
    d = a.shape[0]
    if d < 2:
        return None
    iu = np.triu_indices(d, k=1)
    return float(np.mean(np.abs(a[iu] - b[iu])))


def plugin_mutual_information(labels_a: list[str], labels_b: list[str]) -> float:
    """Plug-in MI of two label sequences, natural log, non-negative."""
    n = len(labels_a)
    if n == 0 or n != len(labels_b):
        raise MetricError("mutual information requires equal-length samples")
    joint: dict[tuple[str, str], int] = {}
    marg_a: dict[str, int] = {}
    marg_b: dict[str, int] = {}
    for a, b in zip(labels_a, labels_b):
        joint[(a, b)] = joint.get((a, b), 0) + 1
        marg_a[a] = marg_a.get(a, 0) + 1
        marg_b[b] = marg_b.get(b, 0) + 1
    mi = 0.0
    for (a, b), count in joint.items():
        p_ab = count / n
        mi += p_ab * math.log(p_ab * n * n / (marg_a[a] * marg_b[b]))
    return max(mi, 0.0)


def plugin_entropy(labels: list[str]) -> float:
    """Plug-in Shannon entropy of a label sequence, natural log."""
    n = len(labels)
    if n == 0:
        raise MetricError("entropy requires a non-empty sample")
    counts: dict[str, int] = {}
    for label in labels:
        counts[label] = counts.get(label, 0) + 1
    return -sum((c / n) * math.log(c / n) for c in counts.values())


def _paired_labels(table: DataTable, name_a: str, name_b: str) -> tuple[list[str], list[str]]:
    """Label pairs over rows where both features are observed."""
    col_a = table.column(name_a)
    col_b = table.column(name_b)
    labels_a, labels_b = [], []
    for a, b in zip(col_a, col_b):
        if a is None or b is None:
            continue
        labels_a.append(format_category(a))
        labels_b.append(format_category(b))
    return labels_a, labels_b


def mi_matrices(pair: AlignedPair) -> Optional[MiMatrices]:
    """Pairwise MI matrices over the discrete features; None when fewer than two."""
    names = [n for n, s in pair.schema.items() if s.kind.is_categorical]
    if len(names) < 2:
        return None
    d = len(names)
    mi_real = np.zeros((d, d))
    mi_synth = np.zeros((d, d))
    for table, matrix in ((pair.real, mi_real), (pair.synthetic, mi_synth)):
        for i in range(d):
            only = [format_category(c) for c in table.column(names[i]) if c is not None]
            matrix[i, i] = plugin_entropy(only)
            for j in range(i + 1, d):
                a, b = _paired_labels(table, names[i], names[j])
                value = plugin_mutual_information(a, b) if a else 0.0
                matrix[i, j] = matrix[j, i] = value
    return MiMatrices(mi_real=mi_real, mi_synth=mi_synth, feature_order=names)


def mutual_information_difference(pair: AlignedPair) -> Optional[float]:
    """Mean absolute MI gap over discrete feature pairs; None below two features."""
    matrices = mi_matrices(pair)
    if matrices is None:
        return None
    iu = np.triu_indices(len(matrices.feature_order), k=1)
    return float(np.mean(np.abs(matrices.mi_real[iu] - matrices.mi_synth[iu])))


def dependency_metrics(pair: AlignedPair) -> dict[str, Optional[float]]:
    """The five global dependency scalars keyed by report name."""
    stats = matrix_stats(pair)
    if stats is None:
        cms = cmd = cdp = cds = None
    else:
        cms = cov_frobenius(stats.cov_real, stats.cov_synth)
        cmd = corr_matrix_distance(stats.corr_pearson_real, stats.corr_pearson_synth)
        cdp = correlation_difference("pearson", stats)
        cds = correlation_difference("spearman", stats)
    return {
        "Covariance_Matrix_Similarity_Frobenius": cms,
        "Correlation_Matrix_Distance": cmd,
        "Correlation_Difference_Pearson": cdp,
        "Correlation_Difference_Spearman": cds,
        "Mutual_Information_Difference": mutual_information_difference(pair),
    }
