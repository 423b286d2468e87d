"""Fidelity evaluation of synthetic tabular data against a real reference.

The package compares the two datasets along four axes: data quality,
per-feature distributional similarity, multivariate dependency
preservation, and structural/topological alignment of latent embeddings.
Results are emitted as a reproducible JSON report plus plot-data sidecars.
"""

from .config import RunConfig, new_run_id, parse_config
from .dependency import (
    corr_matrix_distance,
    correlation_difference,
    cov_frobenius,
    dependency_metrics,
    mutual_information_difference,
)
from .distribution import (
    Ecdf,
    LocalMetrics,
    PmfPair,
    build_pmf_pair,
    category_coverage,
    chi_square,
    cramers_v,
    hellinger,
    js_divergence,
    kl_divergence,
    ks_statistic,
    range_coverage,
    total_variation,
    wasserstein_1d,
)
from .embedding import EmbeddingPair, awed, build_embeddings, cka
from .errors import (
    ConfigError,
    IngestError,
    MetricError,
    ReportError,
    SchemaError,
    SdbenchError,
)
from .graph import (
    KnnGraphPair,
    build_knn_pair,
    gsfs,
    neighborhood_overlap,
    spectral_distance,
)
from .ingest import (
    AlignedPair,
    DataTable,
    FeatureKind,
    QualityProfile,
    align,
    completeness,
    detect_types,
    iqr_outlier_pct,
    load_csv,
)
from .pipeline import compute_metrics, run_pipeline
from .report import FidelityReport, assemble, load_report_schema, serialize

__version__ = "0.1.0"
