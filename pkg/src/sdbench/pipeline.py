"""End-to-end orchestration: ingest, metrics, sidecars, and the report file."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Optional

import numpy as np

from .config import RunConfig, new_run_id
from .dependency import dependency_metrics, matrix_stats
from .distribution import (
    LocalMetrics,
    PmfPair,
    categorical_local_metrics,
    numeric_local_metrics,
)
from .embedding import EmbeddingPair, awed, build_embeddings, cka
from .errors import IngestError
from .graph import KnnGraphPair, build_knn_pair, gsfs, neighborhood_overlap, spectral_distance
from .ingest import (
    AlignedPair,
    FeatureKind,
    QualityProfile,
    align,
    category_values,
    load_csv,
    numeric_values,
    quality_profile,
)
from .report import FidelityReport, ReportMetadata, assemble, serialize

logger = logging.getLogger(__name__)


@dataclass
class MetricsBundle:
    """Raw (unrounded) metric values plus the intermediates that feed sidecars."""

    quality: QualityProfile
    local_metrics: list[tuple[str, FeatureKind, LocalMetrics]]
    pmf_pairs: dict[str, PmfPair]
    dependency: dict[str, Optional[float]]
    structural: Optional[dict[str, Optional[float]]]
    structural_skip_reason: Optional[str]
    embedding: Optional[EmbeddingPair]
    graph: Optional[KnnGraphPair]
    corr_real: Optional[np.ndarray]
    corr_synth: Optional[np.ndarray]
    corr_features: list[str]


def compute_metrics(aligned: AlignedPair, cfg: RunConfig) -> MetricsBundle:
    """Every metric the report needs, computed over an aligned pair."""
    local_metrics: list[tuple[str, FeatureKind, LocalMetrics]] = []
    pmf_pairs: dict[str, PmfPair] = {}
    for name, schema in aligned.schema.items():
        if schema.kind.is_numeric:
            x = numeric_values(aligned.real.column(name))
            y = numeric_values(aligned.synthetic.column(name))
            metrics, pair = numeric_local_metrics(x, y, bins=cfg.bins)
            pmf_pairs[name] = pair
        elif schema.kind.is_categorical:
            x_labels = category_values(aligned.real.column(name))
            y_labels = category_values(aligned.synthetic.column(name))
            metrics, pair = categorical_local_metrics(x_labels, y_labels)
            pmf_pairs[name] = pair
        else:
            metrics = LocalMetrics()
        local_metrics.append((name, schema.kind, metrics))

    stats = matrix_stats(aligned)
    corr_real = stats.corr_pearson_real if stats else None
    corr_synth = stats.corr_pearson_synth if stats else None
    corr_features = stats.feature_order if stats else []

    structural: Optional[dict[str, Optional[float]]] = None
    skip_reason: Optional[str] = None
    embedding: Optional[EmbeddingPair] = None
    graph: Optional[KnnGraphPair] = None

    n, m = aligned.real.n_rows, aligned.synthetic.n_rows
    if not cfg.enable_structural:
        skip_reason = "disabled in configuration"
    elif max(n, m) > cfg.graph_sample_cap and not cfg.structural_forced:
        skip_reason = (
            f"table size {max(n, m)} exceeds graph_sample_cap "
            f"{cfg.graph_sample_cap}; set enable_structural explicitly to force"
        )
    else:
        embedding = build_embeddings(aligned, cfg)
        graph = build_knn_pair(embedding, cfg)
        if graph is None:
            skip_reason = f"fewer than knn_k+1={cfg.knn_k + 1} rows"
            embedding = None
        else:
            structural = {
                # CKA pairs rows, so it runs on the graph-stage subsample;
                # AWED compares per-dimension distributions and uses all rows.
                "CKA": cka(
                    embedding.z_real[graph.sample_real],
                    embedding.z_synth[graph.sample_synth],
                ),
                "Neighborhood_Overlap": neighborhood_overlap(graph),
                "Spectral_Distance": spectral_distance(graph),
                "Avg_Wasserstein_Embedding": awed(embedding.z_real, embedding.z_synth),
                "GSFS": gsfs(graph, cfg.seed),
            }
    if skip_reason:
        logger.info("structural block skipped: %s", skip_reason)

    return MetricsBundle(
        quality=quality_profile(aligned.real, aligned.schema),
        local_metrics=local_metrics,
        pmf_pairs=pmf_pairs,
        dependency=dependency_metrics(aligned),
        structural=structural,
        structural_skip_reason=skip_reason,
        embedding=embedding,
        graph=graph,
        corr_real=corr_real,
        corr_synth=corr_synth,
        corr_features=corr_features,
    )


def _file_digest(path: str) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc


def _count_kinds(aligned: AlignedPair) -> tuple[int, int, int, int]:
    numerical = binary = multi = text = 0
    for schema in aligned.schema.values():
        if schema.kind.is_numeric:
            numerical += 1
        elif schema.kind == FeatureKind.BINARY:
            binary += 1
        elif schema.kind == FeatureKind.MULTI:
            multi += 1
        else:
            text += 1
    return numerical, binary, multi, text


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(
        json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )


def _two_coords(z: np.ndarray) -> list[list[float]]:
    coords = z[:, : min(2, z.shape[1])]
    if coords.shape[1] == 1:
        coords = np.column_stack([coords[:, 0], np.zeros(coords.shape[0])])
    return [[float(a), float(b)] for a, b in coords]


def _edge_list(adj: np.ndarray) -> list[list[int]]:
    rows, cols = np.nonzero(np.triu(adj, k=1))
    return [[int(i), int(j)] for i, j in zip(rows, cols)]


def write_sidecars(run_dir: Path, bundle: MetricsBundle, run_id: str, seed: int) -> list[dict]:
    """Write the plot-data JSON files and return the manifest entries."""
    run_dir.mkdir(parents=True, exist_ok=True)
    entries: list[dict] = []

    histograms = {}
    bars = {}
    for name, kind, _ in bundle.local_metrics:
        pair = bundle.pmf_pairs.get(name)
        if pair is None:
            continue
        if pair.source_kind == "binned":
            histograms[name] = {
                "edges": [float(e) for e in pair.edges],
                "real_counts": pair.counts_real.tolist(),
                "synthetic_counts": pair.counts_synth.tolist(),
            }
        else:
            bars[name] = {
                "categories": list(pair.support),
                "real_counts": pair.counts_real.tolist(),
                "synthetic_counts": pair.counts_synth.tolist(),
            }
    if histograms:
        _write_json(run_dir / "histograms.json", {"features": histograms})
        entries.append({"kind": "histograms", "path": "histograms.json"})
    if bars:
        _write_json(run_dir / "categorical_bars.json", {"features": bars})
        entries.append({"kind": "categorical_bars", "path": "categorical_bars.json"})

    if bundle.corr_real is not None:
        _write_json(
            run_dir / "corr_matrices.json",
            {
                "features": bundle.corr_features,
                "real": [[float(v) for v in row] for row in bundle.corr_real],
                "synthetic": [[float(v) for v in row] for row in bundle.corr_synth],
            },
        )
        entries.append({"kind": "corr_matrices", "path": "corr_matrices.json"})

    if bundle.embedding is not None:
        _write_json(
            run_dir / "embedding_pca.json",
            {
                "real": _two_coords(bundle.embedding.z_real),
                "synthetic": _two_coords(bundle.embedding.z_synth),
            },
        )
        entries.append({"kind": "embedding_pca", "path": "embedding_pca.json"})

    if bundle.graph is not None and bundle.embedding is not None:
        graph = bundle.graph
        _write_json(
            run_dir / "knn_graph.json",
            {
                "real": {
                    "coords": _two_coords(bundle.embedding.z_real[graph.sample_real]),
                    "edges": _edge_list(graph.adj_real),
                },
                "synthetic": {
                    "coords": _two_coords(bundle.embedding.z_synth[graph.sample_synth]),
                    "edges": _edge_list(graph.adj_synth),
                },
            },
        )
        entries.append({"kind": "knn_graph", "path": "knn_graph.json"})

    _write_json(
        run_dir / "manifest.json",
        {"run_id": run_id, "seed": seed, "sidecars": entries},
    )
    return entries


def _write_atomic(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def run_pipeline(cfg: RunConfig) -> FidelityReport:
    """Run the full evaluation and write the report plus plot sidecars.

    The report is written atomically (temp file + rename) after every
    metric and sidecar succeeded, so a failed run never leaves a partial
    report behind.
    """
    run_id = new_run_id(
        cfg.seed, _file_digest(cfg.real_path) + _file_digest(cfg.synthetic_path)
    )
    timestamp = datetime.now().strftime("%Y-%m-%dT%H:%M:%S.%f")

    real = load_csv(cfg.real_path)
    synthetic = load_csv(cfg.synthetic_path)
    aligned = align(real, synthetic, cfg)
    if aligned.dropped:
        logger.warning("dropped features during alignment: %s", aligned.dropped)

    bundle = compute_metrics(aligned, cfg)
    numerical, binary, multi, text = _count_kinds(aligned)
    meta = ReportMetadata(
        run_id=run_id,
        timestamp=timestamp,
        real_dataset_path=cfg.real_path,
        synthetic_dataset_path=cfg.synthetic_path,
        n_samples_real=real.n_rows,
        n_samples_synth=synthetic.n_rows,
        numerical_features=numerical,
        binary_features=binary,
        multi_features=multi,
        text_features=text,
        dropped_features=dict(aligned.dropped) if aligned.dropped else None,
        structural_skipped=bundle.structural_skip_reason,
    )
    report = assemble(
        meta=meta,
        quality=bundle.quality,
        local_metrics=bundle.local_metrics,
        global_metrics=bundle.dependency,
        structural_metrics=bundle.structural,
    )

    run_dir = Path(cfg.plots_dir) / run_id
    write_sidecars(run_dir, bundle, run_id, cfg.seed)
    _write_atomic(Path(cfg.report_path), serialize(report))
    logger.info("report written to %s (run %s)", cfg.report_path, run_id)
    return report
