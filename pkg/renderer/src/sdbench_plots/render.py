"""Batch-render PNG diagnostics from an evaluation run's sidecar files.

The renderer consumes only the JSON sidecars written by the evaluator
(histograms, categorical bars, correlation matrices, PCA coordinates, kNN
graphs) and never recomputes metrics.  Output is deterministic: fixed
figure geometry, fixed 150 dpi, and a force-directed graph layout seeded
from the run seed recorded in the manifest.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import networkx as nx
import numpy as np
from scipy.stats import gaussian_kde

logger = logging.getLogger(__name__)

DPI = 150
FIGSIZE = (6.4, 4.8)
REAL_COLOR = "#6c6f73"
SYNTH_COLOR = "#2a9d8f"


class SidecarError(Exception):
    """A sidecar file is missing or not valid JSON."""


@dataclass
class PlotManifest:
    run_id: str
    seed: int
    run_dir: Path
    sidecars: dict[str, dict] = field(default_factory=dict)


def load_manifest(plots_dir: Path, run_id: str) -> PlotManifest:
    """Load manifest.json and every sidecar it references."""
    run_dir = Path(plots_dir) / run_id
    manifest_path = run_dir / "manifest.json"
    try:
        raw = json.loads(manifest_path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise SidecarError(f"manifest not found: {manifest_path}") from exc
    except json.JSONDecodeError as exc:
        raise SidecarError(f"corrupt sidecar JSON: {manifest_path}") from exc

    manifest = PlotManifest(
        run_id=raw.get("run_id", run_id),
        seed=int(raw.get("seed", 42)),
        run_dir=run_dir,
    )
    for entry in raw.get("sidecars", []):
        path = run_dir / entry["path"]
        try:
            manifest.sidecars[entry["kind"]] = json.loads(
                path.read_text(encoding="utf-8")
            )
        except FileNotFoundError as exc:
            raise SidecarError(f"sidecar not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise SidecarError(f"corrupt sidecar JSON: {path}") from exc
    return manifest


def _safe_name(feature: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", feature)


def _save(fig, out_dir: Path, filename: str) -> Path:
    out_path = out_dir / filename
    fig.savefig(out_path, dpi=DPI)
    plt.close(fig)
    return out_path


def _kde_curve(edges: np.ndarray, counts: np.ndarray):
    """Gaussian KDE (Scott's rule) fitted on bin centers weighted by counts."""
    centers = 0.5 * (edges[:-1] + edges[1:])
    total = counts.sum()
    if total == 0 or np.count_nonzero(counts) < 2:
        return None
    try:
        kde = gaussian_kde(centers, weights=counts / total)
    except (np.linalg.LinAlgError, ValueError):
        return None
    grid = np.linspace(edges[0], edges[-1], 200)
    return grid, kde(grid)


def render_histograms(payload: dict, out_dir: Path) -> list[Path]:
    written = []
    for feature, spec in payload.get("features", {}).items():
        edges = np.asarray(spec["edges"], dtype=float)
        real = np.asarray(spec["real_counts"], dtype=float)
        synth = np.asarray(spec["synthetic_counts"], dtype=float)
        widths = np.diff(edges)
        fig, ax = plt.subplots(figsize=FIGSIZE)
        ax.bar(edges[:-1], real, width=widths, align="edge", alpha=0.45,
               color=REAL_COLOR, label="real")
        ax.bar(edges[:-1], synth, width=widths, align="edge", alpha=0.45,
               color=SYNTH_COLOR, label="synthetic")
        for counts, color in ((real, REAL_COLOR), (synth, SYNTH_COLOR)):
            curve = _kde_curve(edges, counts)
            if curve is not None:
                grid, density = curve
                span = edges[-1] - edges[0]
                scale = counts.sum() * span / max(len(counts), 1)
                ax.plot(grid, density * scale, color=color, linewidth=1.5)
        ax.set_title(feature)
        ax.set_ylabel("count")
        ax.legend()
        fig.tight_layout()
        written.append(_save(fig, out_dir, f"hist_{_safe_name(feature)}.png"))
    return written


def render_categorical_bars(payload: dict, out_dir: Path) -> list[Path]:
    written = []
    for feature, spec in payload.get("features", {}).items():
        categories = [str(c) for c in spec["categories"]]
        real = np.asarray(spec["real_counts"], dtype=float)
        synth = np.asarray(spec["synthetic_counts"], dtype=float)
        positions = np.arange(len(categories))
        width = 0.4
        fig, ax = plt.subplots(figsize=FIGSIZE)
        ax.bar(positions - width / 2, real, width, color=REAL_COLOR, label="real")
        ax.bar(positions + width / 2, synth, width, color=SYNTH_COLOR,
               label="synthetic")
        ax.set_xticks(positions)
        ax.set_xticklabels(categories, rotation=45, ha="right")
        ax.set_title(feature)
        ax.set_ylabel("count")
        ax.legend()
        fig.tight_layout()
        written.append(_save(fig, out_dir, f"bars_{_safe_name(feature)}.png"))
    return written


def render_corr_heatmaps(payload: dict, out_dir: Path) -> list[Path]:
    features = payload["features"]
    written = []
    for side in ("real", "synthetic"):
        matrix = np.asarray(payload[side], dtype=float)
        fig, ax = plt.subplots(figsize=(6.4, 5.6))
        image = ax.imshow(matrix, vmin=-1.0, vmax=1.0, cmap="coolwarm")
        ax.set_xticks(range(len(features)))
        ax.set_yticks(range(len(features)))
        ax.set_xticklabels(features, rotation=90, fontsize=7)
        ax.set_yticklabels(features, fontsize=7)
        ax.set_title(f"Pearson correlation ({side})")
        fig.colorbar(image, ax=ax, shrink=0.85)
        fig.tight_layout()
        written.append(_save(fig, out_dir, f"corr_heatmap_{side}.png"))
    return written


def render_pca_scatter(payload: dict, out_dir: Path) -> list[Path]:
    real = np.asarray(payload["real"], dtype=float)
    synth = np.asarray(payload["synthetic"], dtype=float)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.scatter(real[:, 0], real[:, 1], s=6, alpha=0.5, color=REAL_COLOR,
               label="real")
    ax.scatter(synth[:, 0], synth[:, 1], s=6, alpha=0.5, color=SYNTH_COLOR,
               label="synthetic")
    ax.set_xlabel("component 1")
    ax.set_ylabel("component 2")
    ax.set_title("PCA projection")
    ax.legend()
    fig.tight_layout()
    return [_save(fig, out_dir, "pca_scatter.png")]


def render_knn_graphs(payload: dict, out_dir: Path, seed: int) -> list[Path]:
    written = []
    for side in ("real", "synthetic"):
        spec = payload[side]
        coords = np.asarray(spec["coords"], dtype=float)
        graph = nx.Graph()
        graph.add_nodes_from(range(len(coords)))
        graph.add_edges_from((int(i), int(j)) for i, j in spec["edges"])
        initial = {i: coords[i] for i in range(len(coords))}
        positions = nx.spring_layout(graph, pos=initial, seed=seed, iterations=30)
        fig, ax = plt.subplots(figsize=(6.4, 6.4))
        color = REAL_COLOR if side == "real" else SYNTH_COLOR
        nx.draw_networkx_edges(graph, positions, ax=ax, width=0.3, alpha=0.4)
        nx.draw_networkx_nodes(graph, positions, ax=ax, node_size=10,
                               node_color=color)
        ax.set_title(f"kNN graph ({side})")
        ax.set_axis_off()
        fig.tight_layout()
        written.append(_save(fig, out_dir, f"knn_graph_{side}.png"))
    return written


def render_all(manifest: PlotManifest, out_dir: Path | None = None) -> list[Path]:
    """Render every plot family present in the manifest; skip absent ones.

    Returns the list of written image paths.  Missing sidecar kinds only
    log a warning so a structural-skip run still renders its statistical
    plots.
    """
    out_dir = Path(out_dir) if out_dir else manifest.run_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    families = (
        ("histograms", lambda data: render_histograms(data, out_dir)),
        ("categorical_bars", lambda data: render_categorical_bars(data, out_dir)),
        ("corr_matrices", lambda data: render_corr_heatmaps(data, out_dir)),
        ("embedding_pca", lambda data: render_pca_scatter(data, out_dir)),
        ("knn_graph", lambda data: render_knn_graphs(data, out_dir,
                                                     manifest.seed)),
    )
    for kind, renderer in families:
        if kind not in manifest.sidecars:
            logger.warning("sidecar kind %s absent; plot family skipped", kind)
            continue
        written.extend(renderer(manifest.sidecars[kind]))
    if not written:
        logger.warning("manifest for run %s produced no plots", manifest.run_id)
    return written
