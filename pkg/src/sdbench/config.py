"""Run configuration parsing and run-identifier derivation."""

from __future__ import annotations

import hashlib
import logging
import numbers
import re
from dataclasses import dataclass, field, replace
from datetime import datetime

import yaml

from .errors import ConfigError

logger = logging.getLogger(__name__)

MANDATORY_KEYS = (
    "real_dataset_path",
    "synthetic_dataset_path",
    "output_report",
    "plots_dir",
)

OPTIONAL_INT_KEYS = (
    "bins",
    "knn_k",
    "pca_dims",
    "graph_sample_cap",
    "categorical_unique_max",
    "ordinal_unique_max",
    "seed",
)

RUN_ID_PATTERN = re.compile(r"^sdb_[0-9a-f]{12}$")


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved evaluation run: dataset paths, outputs, and knobs.

    ``structural_forced`` records that ``enable_structural`` was set
    explicitly (config file or CLI) rather than defaulted, which is what
    allows the structural block to run on tables larger than
    ``graph_sample_cap``.
    """

    real_path: str
    synthetic_path: str
    report_path: str
    plots_dir: str
    bins: int = 20
    knn_k: int = 10
    pca_dims: int = 8
    graph_sample_cap: int = 2000
    categorical_unique_max: int = 15
    ordinal_unique_max: int = 25
    seed: int = 42
    enable_structural: bool = True
    structural_forced: bool = False
    # Divergences use natural log throughout; kept as a field so the report
    # can state it, but it is not configurable.
    log_base: str = field(default="natural", init=False)

    def validated(self) -> "RunConfig":
        _check_knobs(
            bins=self.bins,
            knn_k=self.knn_k,
            pca_dims=self.pca_dims,
            graph_sample_cap=self.graph_sample_cap,
            categorical_unique_max=self.categorical_unique_max,
            ordinal_unique_max=self.ordinal_unique_max,
            seed=self.seed,
        )
        return self

    def with_overrides(self, **kwargs) -> "RunConfig":
        return replace(self, **kwargs).validated()


def _check_knobs(**knobs: int) -> None:
    for key, value in knobs.items():
        if isinstance(value, bool) or not isinstance(value, numbers.Integral):
            raise ConfigError(f"{key} must be an integer, got {value!r}")
    if knobs["bins"] < 2:
        raise ConfigError("bins must be >= 2")
    for key in ("knn_k", "pca_dims", "graph_sample_cap",
                "categorical_unique_max", "ordinal_unique_max"):
        if knobs[key] < 1:
            raise ConfigError(f"{key} must be positive")
    if knobs["graph_sample_cap"] < knobs["knn_k"] + 1:
        raise ConfigError("graph_sample_cap must be >= knn_k + 1")
    if not 0 <= knobs["seed"] < 2 ** 64:
        raise ConfigError("seed must fit in an unsigned 64-bit integer")


def parse_config(yaml_text: str) -> RunConfig:
    """Parse a YAML configuration document into a validated RunConfig.

    Mandatory keys: real_dataset_path, synthetic_dataset_path,
    output_report, plots_dir.  Optional integer knobs fall back to the
    documented defaults.  Unknown keys are ignored with a warning.
    """
    try:
        raw = yaml.safe_load(yaml_text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a YAML mapping")

    for key in MANDATORY_KEYS:
        if key not in raw or raw[key] in (None, ""):
            raise ConfigError(f"missing mandatory key: {key}")

    kwargs = {
        "real_path": str(raw["real_dataset_path"]),
        "synthetic_path": str(raw["synthetic_dataset_path"]),
        "report_path": str(raw["output_report"]),
        "plots_dir": str(raw["plots_dir"]),
    }
    for key in OPTIONAL_INT_KEYS:
        if key in raw:
            kwargs[key] = raw[key]

    if "enable_structural" in raw:
        value = raw["enable_structural"]
        if not isinstance(value, bool):
            raise ConfigError("enable_structural must be a boolean")
        kwargs["enable_structural"] = value
        kwargs["structural_forced"] = value

    known = set(MANDATORY_KEYS) | set(OPTIONAL_INT_KEYS) | {"enable_structural"}
    for key in raw:
        if key not in known:
            logger.warning("ignoring unknown configuration key: %s", key)

    return RunConfig(**kwargs).validated()


def new_run_id(seed: int, stamp) -> str:
    """Derive a run identifier of the form ``sdb_`` + 12 lowercase hex chars.

    Deterministic for a fixed (seed, stamp) pair.  ``stamp`` is any
    hashable run fingerprint: the pipeline passes the concatenated SHA-256
    digests of the two input files so reruns on identical data share an id.
    """
    if isinstance(stamp, datetime):
        stamp = stamp.isoformat()
    digest = hashlib.sha256(f"{seed}|{stamp}".encode("utf-8")).hexdigest()
    return f"sdb_{digest[:12]}"


def is_run_id(value: str) -> bool:
    return bool(RUN_ID_PATTERN.match(value))
