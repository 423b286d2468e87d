"""kNN-graph construction over the embedding pair and topological fidelity metrics."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .embedding import EmbeddingPair

logger = logging.getLogger(__name__)

MAX_BFS_SOURCES = 200


@dataclass
class KnnGraphPair:
    """Directed neighbor sets and symmetrized adjacency for both embeddings."""

    n_nodes: int
    neighbors_real: np.ndarray  # (s, k) int indices, self excluded
    neighbors_synth: np.ndarray
    adj_real: np.ndarray  # symmetrized binary adjacency
    adj_synth: np.ndarray
    degrees_real: np.ndarray
    degrees_synth: np.ndarray
    eigs_real: np.ndarray  # ascending normalized-Laplacian eigenvalues
    eigs_synth: np.ndarray
    sample_real: np.ndarray  # original row indices kept after subsampling
    sample_synth: np.ndarray


@dataclass
class GraphStats:
    degrees: np.ndarray  # sorted descending
    clustering: np.ndarray  # sorted descending
    path_lengths: np.ndarray  # sorted ascending, finite distances only


def _pairwise_sq_distances(points: np.ndarray, block: int = 256) -> np.ndarray:
    """Exact squared Euclidean distances, computed blockwise from differences.

    Differences (rather than the Gram-matrix expansion) keep mathematically
    tied distances bitwise tied, which the index-based tie-break relies on.
    """
    s = points.shape[0]
    out = np.empty((s, s))
    for start in range(0, s, block):
        stop = min(start + block, s)
        diff = points[start:stop, None, :] - points[None, :, :]
        out[start:stop] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def _knn_neighbors(points: np.ndarray, k: int) -> np.ndarray:
    d2 = _pairwise_sq_distances(points)
    np.fill_diagonal(d2, np.inf)
    order = np.argsort(d2, axis=1, kind="stable")
    return order[:, :k]


def _symmetrized_adjacency(neighbors: np.ndarray, s: int) -> np.ndarray:
    adj = np.zeros((s, s), dtype=np.uint8)
    rows = np.repeat(np.arange(s), neighbors.shape[1])
    adj[rows, neighbors.ravel()] = 1
    return np.maximum(adj, adj.T)


def normalized_laplacian(adj: np.ndarray) -> np.ndarray:
    """I - D^(-1/2) A D^(-1/2); isolated nodes keep an identity row."""
    degrees = adj.sum(axis=1).astype(float)
    inv_sqrt = np.where(degrees > 0, 1.0 / np.sqrt(np.where(degrees > 0, degrees, 1.0)), 0.0)
    lap = -inv_sqrt[:, None] * adj.astype(float) * inv_sqrt[None, :]
    np.fill_diagonal(lap, 1.0)
    return lap


def laplacian_spectrum(adj: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of the normalized Laplacian."""
    return np.sort(np.linalg.eigvalsh(normalized_laplacian(adj)))


def build_knn_pair(emb: EmbeddingPair, cfg: RunConfig) -> KnnGraphPair | None:
    """Build index-paired kNN graphs for both embeddings.

    When the row counts differ, or exceed graph_sample_cap, both sides are
    subsampled without replacement to a common size with the same seeded
    generator per side (identical inputs therefore keep identical graphs).
    Returns None when either side is too small for k neighbors.
    """
    n, m = emb.z_real.shape[0], emb.z_synth.shape[0]
    k = cfg.knn_k
    if min(n, m) < k + 1:
        logger.warning("structural block skipped: need at least knn_k+1 rows")
        return None
    s = min(n, m, cfg.graph_sample_cap)
    if n != m or max(n, m) > cfg.graph_sample_cap:
        idx_real = np.sort(np.random.default_rng(cfg.seed).choice(n, size=s, replace=False))
        idx_synth = np.sort(np.random.default_rng(cfg.seed).choice(m, size=s, replace=False))
    else:
        idx_real = np.arange(n)
        idx_synth = np.arange(m)

    points_real = emb.z_real[idx_real]
    points_synth = emb.z_synth[idx_synth]
    neighbors_real = _knn_neighbors(points_real, k)
    neighbors_synth = _knn_neighbors(points_synth, k)
    adj_real = _symmetrized_adjacency(neighbors_real, s)
    adj_synth = _symmetrized_adjacency(neighbors_synth, s)
    return KnnGraphPair(
        n_nodes=s,
        neighbors_real=neighbors_real,
        neighbors_synth=neighbors_synth,
        adj_real=adj_real,
        adj_synth=adj_synth,
        degrees_real=adj_real.sum(axis=1).astype(int),
        degrees_synth=adj_synth.sum(axis=1).astype(int),
        eigs_real=laplacian_spectrum(adj_real),
        eigs_synth=laplacian_spectrum(adj_synth),
        sample_real=idx_real,
        sample_synth=idx_synth,
    )


def neighborhood_overlap(g: KnnGraphPair) -> float:
    """Mean Jaccard similarity between index-paired directed neighbor sets."""
    total = 0.0
    for i in range(g.n_nodes):
        a = set(g.neighbors_real[i].tolist())
        b = set(g.neighbors_synth[i].tolist())
        total += len(a & b) / len(a | b)
    return total / g.n_nodes


def spectral_distance(g: KnnGraphPair) -> float:
    """L2 distance between the ascending normalized-Laplacian spectra."""
    return float(np.linalg.norm(g.eigs_real - g.eigs_synth))


def local_clustering(adj: np.ndarray) -> np.ndarray:
    """Triangle-based local clustering coefficient; 0 below degree 2."""
    s = adj.shape[0]
    coeffs = np.zeros(s)
    for i in range(s):
        nbrs = np.flatnonzero(adj[i])
        deg = len(nbrs)
        if deg < 2:
            continue
        links = adj[np.ix_(nbrs, nbrs)].sum() / 2
        coeffs[i] = 2.0 * links / (deg * (deg - 1))
    return coeffs


def _bfs_distances(adj_bool: np.ndarray, source: int) -> list[int]:
    """Multiset of finite shortest-path lengths (>= 1) from one source node."""
    visited = np.zeros(adj_bool.shape[0], dtype=bool)
    visited[source] = True
    frontier = visited.copy()
    depth = 0
    out: list[int] = []
    while frontier.any():
        depth += 1
        reached = adj_bool[frontier].any(axis=0) & ~visited
        out.extend([depth] * int(reached.sum()))
        visited |= reached
        frontier = reached
    return out


def graph_stats(adj: np.ndarray, seed: int) -> GraphStats:
    """Degree, clustering, and sampled shortest-path distributions.

    Shortest paths come from exact BFS out of min(s, 200) seeded source
    nodes; unreachable pairs are excluded.
    """
    s = adj.shape[0]
    degrees = np.sort(adj.sum(axis=1).astype(float))[::-1]
    clustering = np.sort(local_clustering(adj))[::-1]
    n_sources = min(s, MAX_BFS_SOURCES)
    sources = np.sort(np.random.default_rng(seed).choice(s, size=n_sources, replace=False))
    adj_bool = adj.astype(bool)
    paths: list[int] = []
    for source in sources:
        paths.extend(_bfs_distances(adj_bool, int(source)))
    return GraphStats(
        degrees=degrees,
        clustering=clustering,
        path_lengths=np.sort(np.array(paths, dtype=float)),
    )


def _vector_similarity(v_real: np.ndarray, v_synth: np.ndarray) -> float:
    """1 - ||vx - vy|| / ||vx||, clamped to [0, 1]; zero-norm reference is
    fully similar only to another zero vector."""
    length = max(len(v_real), len(v_synth))
    a = np.zeros(length)
    b = np.zeros(length)
    a[: len(v_real)] = v_real
    b[: len(v_synth)] = v_synth
    norm = np.linalg.norm(a)
    if norm == 0.0:
        return 1.0 if np.linalg.norm(b) == 0.0 else 0.0
    return float(min(max(1.0 - np.linalg.norm(a - b) / norm, 0.0), 1.0))


def gsfs(g: KnnGraphPair, seed: int) -> float:
    """Equal-weight blend of degree, clustering, and path-length similarity."""
    stats_real = graph_stats(g.adj_real, seed)
    stats_synth = graph_stats(g.adj_synth, seed)
    cut = min(len(stats_real.path_lengths), len(stats_synth.path_lengths))
    s_deg = _vector_similarity(stats_real.degrees, stats_synth.degrees)
    s_clu = _vector_similarity(stats_real.clustering, stats_synth.clustering)
    s_path = _vector_similarity(
        stats_real.path_lengths[:cut], stats_synth.path_lengths[:cut]
    )
    return (s_deg + s_clu + s_path) / 3.0
