"""Per-feature divergence and coverage metrics between real and synthetic samples.

Numeric features are compared through their raw samples (KS, Wasserstein,
range coverage) and through empirical PMFs over shared equal-width bins
(KL, JS, Hellinger, total variation).  Categorical features are compared
through PMFs over the union of observed categories plus count-based
statistics (chi-square, category coverage, Cramer's V).  All divergences
use natural logarithms.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import MetricError

KL_EPSILON = 1e-10


@dataclass(frozen=True)
class Ecdf:
    """Empirical CDF: right-continuous step function over sorted samples."""

    sorted_values: np.ndarray

    @classmethod
    def from_samples(cls, values) -> "Ecdf":
        arr = np.sort(np.asarray(values, dtype=float))
        if arr.size == 0:
            raise MetricError("ECDF requires at least one sample")
        return cls(sorted_values=arr)

    def evaluate(self, t):
        """Fraction of samples <= t (scalar or array)."""
        counts = np.searchsorted(self.sorted_values, t, side="right")
        return counts / self.sorted_values.size


@dataclass(frozen=True)
class PmfPair:
    """Aligned empirical probability vectors over a shared support.

    ``support`` is category labels for categorical features and bin indices
    for binned numeric features (``edges`` then holds the K+1 bin edges).
    Raw counts are kept for the chi-square statistic and plot sidecars.
    """

    support: tuple
    p: np.ndarray
    q: np.ndarray
    counts_real: np.ndarray
    counts_synth: np.ndarray
    source_kind: str  # "binned" | "categorical"
    edges: Optional[np.ndarray] = None

    def __post_init__(self):
        for vec in (self.p, self.q):
            if abs(float(vec.sum()) - 1.0) > 1e-12 or np.any(vec < 0):
                raise MetricError("PMF vectors must be non-negative and sum to 1")
        if not (len(self.p) == len(self.q) == len(self.support)):
            raise MetricError("PMF vectors and support must share one length")


def shared_bin_edges(x: np.ndarray, y: np.ndarray, bins: int) -> np.ndarray:
    """Equal-width bin edges over the combined range of both samples.

    A degenerate combined range (all values equal) collapses to a single
    unit-width bin around the constant.
    """
    lo = min(float(x.min()), float(y.min()))
    hi = max(float(x.max()), float(y.max()))
    if hi == lo:
        return np.array([lo - 0.5, lo + 0.5])
    return lo + (hi - lo) * np.arange(bins + 1) / bins


def bin_counts(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Histogram counts with left-closed bins and a right-inclusive last bin."""
    idx = np.searchsorted(edges, values, side="right") - 1
    idx = np.clip(idx, 0, len(edges) - 2)
    return np.bincount(idx, minlength=len(edges) - 1).astype(np.int64)


def build_pmf_pair(x, y, kind: str, bins: int = 20) -> PmfPair:
    """Construct the PMF pair for one feature.

    kind="categorical": x and y are label sequences; the support is the
    union of categories ordered by real-data frequency, ties broken
    lexicographically.  kind="numeric": x and y are samples binned into
    ``bins`` shared equal-width bins.
    """
    if kind == "categorical":
        real_counts = Counter(x)
        synth_counts = Counter(y)
        if not real_counts or not synth_counts:
            raise MetricError("cannot build a PMF from an empty sample")
        support = sorted(
            set(real_counts) | set(synth_counts),
            key=lambda label: (-real_counts.get(label, 0), label),
        )
        cr = np.array([real_counts.get(label, 0) for label in support], dtype=np.int64)
        cs = np.array([synth_counts.get(label, 0) for label in support], dtype=np.int64)
        return PmfPair(
            support=tuple(support),
            p=cr / cr.sum(),
            q=cs / cs.sum(),
            counts_real=cr,
            counts_synth=cs,
            source_kind="categorical",
        )

    if kind == "numeric":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.size == 0 or y.size == 0:
            raise MetricError("cannot build a PMF from an empty sample")
        edges = shared_bin_edges(x, y, bins)
        cr = bin_counts(x, edges)
        cs = bin_counts(y, edges)
        return PmfPair(
            support=tuple(range(len(edges) - 1)),
            p=cr / cr.sum(),
            q=cs / cs.sum(),
            counts_real=cr,
            counts_synth=cs,
            source_kind="binned",
            edges=edges,
        )

    raise MetricError(f"unknown PMF kind: {kind}")


def ks_statistic(x, y) -> float:
    """Largest absolute gap between the two ECDFs, evaluated at pooled points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0 or y.size == 0:
        raise MetricError("KS statistic requires non-empty samples")
    pooled = np.concatenate([x, y])
    fx = Ecdf.from_samples(x).evaluate(pooled)
    fy = Ecdf.from_samples(y).evaluate(pooled)
    return float(np.max(np.abs(fx - fy)))


def kl_divergence(pair: PmfPair) -> float:
    """Sum of p_i * ln(p_i / q_i); terms with p_i = 0 contribute nothing.

    When some q_i is zero against p_i > 0 the raw sum diverges, so the
    synthetic vector gets additive smoothing (q_i + eps) / (1 + K * eps)
    before evaluation.  Tiny negative results from smoothing round-off are
    clamped to zero.
    """
    p = pair.p
    q = pair.q
    if np.any((p > 0) & (q == 0)):
        k = len(q)
        q = (q + KL_EPSILON) / (1.0 + k * KL_EPSILON)
    mask = p > 0
    value = float(np.sum(p[mask] * np.log(p[mask] / q[mask])))
    return max(value, 0.0)


def js_divergence(pair: PmfPair) -> float:
    """Half the KL of each vector against their midpoint; range [0, ln 2]."""
    p = pair.p
    q = pair.q
    m = 0.5 * (p + q)

    def _kl(a: np.ndarray) -> float:
        mask = a > 0
        return float(np.sum(a[mask] * np.log(a[mask] / m[mask])))

    return max(0.5 * _kl(p) + 0.5 * _kl(q), 0.0)


def wasserstein_1d(x, y) -> float:
    """Exact area between the two step ECDFs (1-D earth mover's distance)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0 or y.size == 0:
        raise MetricError("Wasserstein distance requires non-empty samples")
    breakpoints = np.sort(np.concatenate([x, y]))
    widths = np.diff(breakpoints)
    if widths.size == 0:
        return 0.0
    fx = Ecdf.from_samples(x).evaluate(breakpoints[:-1])
    fy = Ecdf.from_samples(y).evaluate(breakpoints[:-1])
    return float(np.sum(np.abs(fx - fy) * widths))


def hellinger(pair: PmfPair) -> float:
    """Euclidean distance between the root-probability vectors, over sqrt(2)."""
    value = float(
        np.sqrt(np.sum((np.sqrt(pair.p) - np.sqrt(pair.q)) ** 2)) / math.sqrt(2.0)
    )
    return min(value, 1.0)


def total_variation(pair: PmfPair) -> float:
    """Half the L1 distance between the probability vectors; range [0, 1]."""
    return min(0.5 * float(np.sum(np.abs(pair.p - pair.q))), 1.0)


def range_coverage(x, y) -> float:
    """Fraction of the real value span overlapped by the synthetic span.

    A constant real feature has no span: coverage is 1 when the synthetic
    range contains the constant, else 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0 or y.size == 0:
        raise MetricError("range coverage requires non-empty samples")
    min_x, max_x = float(x.min()), float(x.max())
    min_y, max_y = float(y.min()), float(y.max())
    if max_x == min_x:
        return 1.0 if min_y <= min_x <= max_y else 0.0
    overlap = min(max_x, max_y) - max(min_x, min_y)
    return min(max(overlap, 0.0) / (max_x - min_x), 1.0)


def chi_square(pair: PmfPair) -> float:
    """Pearson chi-square of synthetic (observed) vs real (expected) counts.

    Observed counts are rescaled so both totals match when sample sizes
    differ.  Categories absent from the real data carry no expectation and
    are excluded.
    """
    expected = pair.counts_real.astype(float)
    observed = pair.counts_synth.astype(float)
    n = expected.sum()
    m = observed.sum()
    if m > 0:
        observed = observed * (n / m)
    mask = expected > 0
    if not np.any(mask):
        raise MetricError("chi-square undefined: no expected counts")
    return float(np.sum((observed[mask] - expected[mask]) ** 2 / expected[mask]))


def category_coverage(real_cats, synth_cats) -> float:
    """Fraction of real categories that appear at least once in the synthetic data."""
    real_cats = set(real_cats)
    synth_cats = set(synth_cats)
    if not real_cats:
        raise MetricError("category coverage requires real categories")
    return len(real_cats & synth_cats) / len(real_cats)


def cramers_v(chi2: float, n: int, k: int) -> Optional[float]:
    """sqrt(chi2 / (n * (K - 1))); None for the degenerate single-category case."""
    if k <= 1:
        return None
    if n < 1:
        raise MetricError("Cramer's V requires a positive sample size")
    return math.sqrt(chi2 / (n * (k - 1)))


@dataclass(frozen=True)
class LocalMetrics:
    """Per-feature metric values; None marks a metric that does not apply."""

    ks: Optional[float] = None
    jsd: Optional[float] = None
    kld: Optional[float] = None
    wd: Optional[float] = None
    hd: Optional[float] = None
    tvd: Optional[float] = None
    rc: Optional[float] = None
    css: Optional[float] = None
    cv: Optional[float] = None
    cc: Optional[float] = None


def numeric_local_metrics(x, y, bins: int = 20) -> tuple[LocalMetrics, PmfPair]:
    """All metrics applicable to a numeric feature, plus the binned PMF pair."""
    pair = build_pmf_pair(x, y, kind="numeric", bins=bins)
    metrics = LocalMetrics(
        ks=ks_statistic(x, y),
        jsd=js_divergence(pair),
        kld=kl_divergence(pair),
        wd=wasserstein_1d(x, y),
        hd=hellinger(pair),
        tvd=total_variation(pair),
        rc=range_coverage(x, y),
    )
    return metrics, pair


def categorical_local_metrics(
    x_labels: Sequence[str], y_labels: Sequence[str]
) -> tuple[LocalMetrics, PmfPair]:
    """All metrics applicable to a categorical feature, plus the PMF pair."""
    pair = build_pmf_pair(x_labels, y_labels, kind="categorical")
    css = chi_square(pair)
    metrics = LocalMetrics(
        jsd=js_divergence(pair),
        kld=kl_divergence(pair),
        hd=hellinger(pair),
        tvd=total_variation(pair),
        css=css,
        cv=cramers_v(css, n=len(x_labels), k=len(pair.support)),
        cc=category_coverage(set(x_labels), set(y_labels)),
    )
    return metrics, pair
