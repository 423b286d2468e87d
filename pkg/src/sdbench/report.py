"""Assembly and serialization of the fidelity report JSON document."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from .distribution import LocalMetrics
from .errors import ReportError
from .ingest import FeatureKind, QualityProfile

METRIC_DEFINITIONS = {
    "Kolmogorov–Smirnov (KS) Statistic": (
        "Measures the maximum distance between the empirical cumulative "
        "distributions of real and synthetic data for a numeric feature."
    ),
    "Kullback-Leibler Divergence (KLD)": (
        "Quantifies how much information is lost when approximating the real "
        "data distribution with the synthetic one. Asymmetric measure."
    ),
    "Jensen–Shannon (JS) Divergence (JSD)": (
        "Symmetric measure of similarity between two probability distributions "
        "derived from real and synthetic data. Lower values indicate higher "
        "similarity."
    ),
    "Wasserstein Distance (WD)": (
        "Quantifies the minimum 'work' required to transform one probability "
        "distribution into another, reflecting both shape and distance "
        "differences."
    ),
    "Hellinger Distance (HD)": (
        "Measures the distance between two probability distributions; bounded "
        "between 0 (identical) and 1 (completely dissimilar)."
    ),
    "Total Variation Distance (TVD)": (
        "Measures the maximum absolute difference between two probability "
        "distributions. Values range from 0 (identical) to 1 (completely "
        "disjoint). Supports both numeric and categorical data."
    ),
    "Range Coverage (RC)": (
        "Fraction of the real data's numeric range that is covered by the "
        "synthetic data. Values close to 1 indicate the synthetic data spans "
        "the same domain as the real data."
    ),
    "Chi-Square Statistic (CSS)": (
        "Tests whether the observed category frequencies in the synthetic data "
        "differ significantly from those in the real data."
    ),
    "Category Coverage (CC)": (
        "Proportion of unique categories in the real data that also appear in "
        "the synthetic data; detects missing or underrepresented categories."
    ),
    "Contingency Table Similarity (CV)": (
        "Measures the strength of association between two categorical variables "
        "in real vs. synthetic datasets; used to compare inter-feature "
        "dependencies."
    ),
    "Covariance Matrix Similarity (CMS)": (
        "Quantifies deviation between real and synthetic covariance matrices; "
        "smaller Frobenius norm indicates closer similarity."
    ),
    "Correlation Matrix Distance (CMD)": (
        "Computes normalized Frobenius norm of the difference between "
        "correlation matrices; used as an overall measure of structural "
        "fidelity."
    ),
    "Correlation Difference (Pearson) (CDP)": (
        "Measures how much the linear (Pearson) correlations between features "
        "differ between real and synthetic datasets."
    ),
    "Correlation Difference (Spearman) (CDS)": (
        "Measures how much the rank (Spearman) correlations between features "
        "differ between real and synthetic datasets."
    ),
    "Mutual Information Difference (MID)": (
        "Captures how well nonlinear dependencies between variables are "
        "preserved; compares mutual information matrices between real and "
        "synthetic data."
    ),
    "Centered Kernel Alignment (CKA)": (
        "Measures similarity between real and synthetic feature representations "
        "in embedding space. Values range from 0 (no similarity) to 1 "
        "(identical representation)."
    ),
    "Average Wasserstein Embedding Distance (AWED)": (
        "Average Wasserstein distance between real and synthetic points in "
        "embedding space. Lower values indicate better alignment of sample "
        "distributions."
    ),
    "Neighbor Overlap (Jaccard Similarity)": (
        "Measures how similar each sample's nearest-neighbor set is between "
        "real and synthetic data. Calculated using Jaccard index between the "
        "kNN lists of real and synthetic embeddings."
    ),
    "Spectral Distance (SD)": (
        "Distance between the eigenvalue spectra of real and synthetic kNN "
        "graphs. Lower values indicate better preservation of global graph "
        "structure."
    ),
    "Graph Structural Fidelity Score (GSFS)": (
        "Measures global structural preservation of the kNN graph by comparing "
        "degree distributions, clustering coefficients, and shortest-path "
        "distances. Values range from 0 to 1, with higher values indicating "
        "better global topology preservation."
    ),
}

DEPENDENCY_GLOBAL_KEYS = (
    "Covariance_Matrix_Similarity_Frobenius",
    "Correlation_Matrix_Distance",
    "Correlation_Difference_Pearson",
    "Correlation_Difference_Spearman",
    "Mutual_Information_Difference",
)

STRUCTURAL_GLOBAL_KEYS = (
    "CKA",
    "Neighborhood_Overlap",
    "Spectral_Distance",
    "Avg_Wasserstein_Embedding",
    "GSFS",
)

# Canonical key orders inside a local-metrics object, one per feature kind.
NUMERIC_LOCAL_KEY_ORDER = (
    "KS_Statistic",
    "JS_Divergence",
    "KL_Divergence",
    "Wasserstein_Distance",
    "Hellinger_Distance",
    "Total_Variation_Distance",
    "Range_Coverage",
    "Chi_Square_Statistic",
    "Contingency_CramerV",
    "Category_Coverage",
)
CATEGORICAL_LOCAL_KEY_ORDER = (
    "KS_Statistic",
    "JS_Divergence",
    "KL_Divergence",
    "Hellinger_Distance",
    "Total_Variation_Distance",
    "Wasserstein_Distance",
    "Chi_Square_Statistic",
    "Contingency_CramerV",
    "Category_Coverage",
    "Range_Coverage",
)

_FIELD_BY_KEY = {
    "KS_Statistic": "ks",
    "JS_Divergence": "jsd",
    "KL_Divergence": "kld",
    "Wasserstein_Distance": "wd",
    "Hellinger_Distance": "hd",
    "Total_Variation_Distance": "tvd",
    "Range_Coverage": "rc",
    "Chi_Square_Statistic": "css",
    "Contingency_CramerV": "cv",
    "Category_Coverage": "cc",
}


@dataclass
class ReportMetadata:
    run_id: str
    timestamp: str
    real_dataset_path: str
    synthetic_dataset_path: str
    n_samples_real: int
    n_samples_synth: int
    numerical_features: int
    binary_features: int
    multi_features: int
    text_features: int = 0
    dropped_features: Optional[dict[str, str]] = None
    structural_skipped: Optional[str] = None

    @property
    def total_features(self) -> int:
        return (
            self.numerical_features
            + self.binary_features
            + self.multi_features
            + self.text_features
        )


@dataclass
class FidelityReport:
    metadata: dict
    metric_definitions: dict
    global_metrics: dict
    local_metrics: dict

    def to_dict(self) -> dict:
        return {
            "metadata": self.metadata,
            "metric_definitions": self.metric_definitions,
            "global_metrics": self.global_metrics,
            "local_metrics": self.local_metrics,
        }


def round_metric(value: Optional[float]) -> Optional[float]:
    """Five-decimal rounding; normalizes -0.0 and rejects non-finite values."""
    if value is None:
        return None
    out = round(float(value), 5) + 0.0
    if out != out or out in (float("inf"), float("-inf")):
        raise ReportError("metric values must be finite or null")
    return out


def round_pct(value: float) -> float:
    return round(float(value), 2) + 0.0


def _local_metrics_object(kind: FeatureKind, metrics: LocalMetrics) -> dict:
    order = (
        CATEGORICAL_LOCAL_KEY_ORDER
        if kind.is_categorical
        else NUMERIC_LOCAL_KEY_ORDER
    )
    return {
        key: round_metric(getattr(metrics, _FIELD_BY_KEY[key])) for key in order
    }


def assemble(
    meta: ReportMetadata,
    quality: QualityProfile,
    local_metrics: list[tuple[str, FeatureKind, LocalMetrics]],
    global_metrics: dict[str, Optional[float]],
    structural_metrics: Optional[dict[str, Optional[float]]],
) -> FidelityReport:
    """Build the report document; key names and orders match the wire format.

    ``structural_metrics`` is None when the structural block was skipped, in
    which case global_metrics carries only the five dependency entries.
    """
    names = [name for name, _, _ in local_metrics]
    if len(set(names)) != len(names):
        raise ReportError("duplicate feature names in local metrics")

    metadata = {
        "run_id": meta.run_id,
        "timestamp": meta.timestamp,
        "real_dataset_path": meta.real_dataset_path,
        "synthetic_dataset_path": meta.synthetic_dataset_path,
        "number_of_samples_real": meta.n_samples_real,
        "number_of_samples_synthetic": meta.n_samples_synth,
        "total_features": meta.total_features,
        "numerical_features": meta.numerical_features,
        "binary_categorical_features": meta.binary_features,
        "multi_categorical_features": meta.multi_features,
        "total_missing_values": quality.total_missing,
        "data_completeness (%)": round_pct(quality.completeness_pct),
        "outliers (%)": {
            name: round_pct(pct) for name, pct in quality.outlier_pct.items()
        },
    }
    if meta.dropped_features:
        metadata["dropped_features"] = dict(meta.dropped_features)
    if meta.structural_skipped:
        metadata["structural_skipped"] = meta.structural_skipped

    globals_block = {
        key: round_metric(global_metrics.get(key)) for key in DEPENDENCY_GLOBAL_KEYS
    }
    if structural_metrics is not None:
        for key in STRUCTURAL_GLOBAL_KEYS:
            globals_block[key] = round_metric(structural_metrics.get(key))

    locals_block = {
        name: _local_metrics_object(kind, metrics)
        for name, kind, metrics in local_metrics
    }

    return FidelityReport(
        metadata=metadata,
        metric_definitions=dict(METRIC_DEFINITIONS),
        global_metrics=globals_block,
        local_metrics=locals_block,
    )


def serialize(report: FidelityReport) -> bytes:
    """UTF-8 JSON with two-space indentation and stable key order."""
    text = json.dumps(report.to_dict(), indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def load_report_schema() -> dict:
    """The versioned JSON Schema the emitted report validates against."""
    data = resources.files("sdbench").joinpath("schema/report_schema.json")
    return json.loads(data.read_text(encoding="utf-8"))
