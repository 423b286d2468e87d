"""Latent embeddings of the aligned pair plus embedding-level similarity metrics.

Numeric features are z-scored with the real table's statistics, categorical
features are frequency-encoded with the real table's category frequencies,
and the concatenated blocks are projected through a PCA basis fitted on the
real matrix only.  Rows of both projections are L2-normalized.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .distribution import wasserstein_1d
from .errors import MetricError
from .ingest import AlignedPair, DataTable, format_category

logger = logging.getLogger(__name__)


@dataclass
class EmbeddingPair:
    """Row-normalized latent matrices for both tables in a shared basis."""

    z_real: np.ndarray
    z_synth: np.ndarray
    k: int
    pca_basis: np.ndarray  # columns are the principal directions (d x k)
    column_mean: np.ndarray
    dropped_columns: list[str] = field(default_factory=list)
    zero_rows_real: int = 0
    zero_rows_synth: int = 0


def _numeric_column(table: DataTable, name: str, mu: float, sd: float) -> np.ndarray:
    cells = table.column(name)
    out = np.empty(len(cells))
    for i, c in enumerate(cells):
        # Missing cells sit at the real mean, i.e. 0 after standardization.
        out[i] = 0.0 if c is None else (float(c) - mu) / sd
    return out


def _frequency_column(table: DataTable, name: str, freq: dict[str, float]) -> np.ndarray:
    cells = table.column(name)
    out = np.empty(len(cells))
    for i, c in enumerate(cells):
        # Unseen synthetic categories and missing cells carry zero frequency.
        out[i] = 0.0 if c is None else freq.get(format_category(c), 0.0)
    return out


def _preprocess(pair: AlignedPair) -> tuple[np.ndarray, np.ndarray, list[str]]:
    real_cols: list[np.ndarray] = []
    synth_cols: list[np.ndarray] = []
    dropped: list[str] = []
    for name, schema in pair.schema.items():
        if schema.kind.is_numeric:
            values = np.array(
                [c for c in pair.real.column(name) if c is not None], dtype=float
            )
            mu = float(values.mean())
            sd = float(values.std(ddof=0))
            if sd == 0.0:
                dropped.append(name)
                continue
            real_cols.append(_numeric_column(pair.real, name, mu, sd))
            synth_cols.append(_numeric_column(pair.synthetic, name, mu, sd))
        elif schema.kind.is_categorical:
            labels = [
                format_category(c) for c in pair.real.column(name) if c is not None
            ]
            total = len(labels)
            freq: dict[str, float] = {}
            for label in labels:
                freq[label] = freq.get(label, 0.0) + 1.0 / total
            real_cols.append(_frequency_column(pair.real, name, freq))
            synth_cols.append(_frequency_column(pair.synthetic, name, freq))
        # Text features carry no usable encoding and are skipped.
    if not real_cols:
        raise MetricError("no usable features for the embedding block")
    return np.column_stack(real_cols), np.column_stack(synth_cols), dropped


def _fit_pca(real: np.ndarray, pca_dims: int) -> tuple[np.ndarray, np.ndarray, int]:
    """PCA basis from the covariance eigendecomposition of the real block.

    Principal directions are ordered by descending eigenvalue; each
    direction's sign is fixed so its largest-magnitude component is
    positive, making the projection reproducible.
    """
    mean = real.mean(axis=0)
    centered = real - mean
    cov = np.cov(centered, rowvar=False, ddof=1).reshape(real.shape[1], real.shape[1])
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    tol = max(float(eigvals[0]), 0.0) * 1e-12
    rank = max(int(np.count_nonzero(eigvals > tol)), 1)
    k = min(pca_dims, rank)
    basis = eigvecs[:, :k].copy()
    for j in range(k):
        pivot = np.argmax(np.abs(basis[:, j]))
        if basis[pivot, j] < 0:
            basis[:, j] = -basis[:, j]
    return mean, basis, k


def _normalize_rows(z: np.ndarray) -> tuple[np.ndarray, int]:
    norms = np.linalg.norm(z, axis=1)
    zero = norms == 0.0
    safe = np.where(zero, 1.0, norms)
    return z / safe[:, None], int(zero.sum())


def build_embeddings(pair: AlignedPair, cfg: RunConfig) -> EmbeddingPair:
    """Project both tables into the shared latent space and L2-normalize rows."""
    real, synth, dropped = _preprocess(pair)
    if dropped:
        logger.warning("zero-variance columns excluded from embeddings: %s", dropped)
    mean, basis, k = _fit_pca(real, cfg.pca_dims)
    z_real = (real - mean) @ basis
    z_synth = (synth - mean) @ basis
    z_real, zeros_real = _normalize_rows(z_real)
    z_synth, zeros_synth = _normalize_rows(z_synth)
    if zeros_real or zeros_synth:
        logger.warning(
            "all-zero embedding rows left unnormalized (real=%d, synthetic=%d)",
            zeros_real, zeros_synth,
        )
    return EmbeddingPair(
        z_real=z_real,
        z_synth=z_synth,
        k=k,
        pca_basis=basis,
        column_mean=mean,
        dropped_columns=dropped,
        zero_rows_real=zeros_real,
        zero_rows_synth=zeros_synth,
    )


def cka(z_real: np.ndarray, z_synth: np.ndarray) -> float:
    """Linear centered-kernel-style alignment between the two embeddings.

    ||Zx' Zy||_F^2 / (||Zx' Zx||_F * ||Zy' Zy||_F) over row-paired samples;
    the cross-product lives in the shared k-dimensional space, so callers
    with differently sized tables must pair rows first (the pipeline uses
    the graph-stage subsample for this).  Invariant under a common
    orthogonal rotation of both inputs.
    """
    if z_real.shape[1] != z_synth.shape[1]:
        raise MetricError("embeddings must share the latent dimension")
    if z_real.shape[0] != z_synth.shape[0]:
        raise MetricError("CKA requires row-paired embeddings of equal size")
    if not z_real.any() or not z_synth.any():
        raise MetricError("CKA undefined for an all-zero embedding")
    num = np.linalg.norm(z_real.T @ z_synth, ord="fro") ** 2
    den = (
        np.linalg.norm(z_real.T @ z_real, ord="fro")
        * np.linalg.norm(z_synth.T @ z_synth, ord="fro")
    )
    return float(min(max(num / den, 0.0), 1.0))


def awed(z_real: np.ndarray, z_synth: np.ndarray) -> float:
    """Mean per-dimension 1-D Wasserstein distance between the embeddings."""
    if z_real.shape[1] != z_synth.shape[1]:
        raise MetricError("embeddings must share the latent dimension")
    k = z_real.shape[1]
    return float(
        sum(wasserstein_1d(z_real[:, j], z_synth[:, j]) for j in range(k)) / k
    )
