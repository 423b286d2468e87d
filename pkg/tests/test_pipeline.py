import json
import re
from pathlib import Path

import numpy as np
import pytest

from conftest import random_mixed_columns, write_csv
from sdbench.cli import main as cli_main
from sdbench.config import RunConfig, parse_config
from sdbench.pipeline import run_pipeline


def make_config(tmp_path, real_cols, synth_cols, **knobs) -> RunConfig:
    real = write_csv(tmp_path / "real.csv", real_cols)
    synth = write_csv(tmp_path / "synth.csv", synth_cols)
    cfg = RunConfig(
        real_path=str(real),
        synthetic_path=str(synth),
        report_path=str(tmp_path / "report.json"),
        plots_dir=str(tmp_path / "plots"),
    )
    return cfg.with_overrides(**knobs) if knobs else cfg


def small_mixed(seed=1, n=60, perturb=0.0):
    return random_mixed_columns(np.random.default_rng(seed), n,
                                n_continuous=3, n_ordinal=1, n_multi=1,
                                n_binary=1, perturb=perturb)


def test_identity_run_quick(tmp_path):
    cols = small_mixed()
    cfg = make_config(tmp_path, cols, cols, knn_k=5)
    report = run_pipeline(cfg)
    meta = report.metadata
    assert re.fullmatch(r"sdb_[0-9a-f]{12}", meta["run_id"])
    assert meta["number_of_samples_real"] == 60
    assert meta["total_features"] == 6
    for entry in report.local_metrics.values():
        for key in ("JS_Divergence", "KL_Divergence", "Hellinger_Distance",
                    "Total_Variation_Distance"):
            assert entry[key] == 0.0
    gm = report.global_metrics
    assert gm["Covariance_Matrix_Similarity_Frobenius"] == 0.0
    assert gm["CKA"] == 1.0
    assert gm["Neighborhood_Overlap"] == 1.0
    assert gm["Spectral_Distance"] == 0.0
    assert gm["Avg_Wasserstein_Embedding"] == 0.0
    assert gm["GSFS"] == 1.0
    assert Path(cfg.report_path).exists()


def test_restriction_to_common_features_logged_in_metadata(tmp_path):
    real = {
        "a": [0.5, 1.7, 2.9, 3.1, 4.8],
        "b": [1.1, 2.3, 3.5, 4.1, 5.9],
        "c": ["x", "y", "x", "y", "x"],
    }
    synth = {
        "a": [0.6, 1.9, 2.7, 3.3, 4.1],
        "c": ["x", "x", "y", "y", "x"],
    }
    cfg = make_config(tmp_path, real, synth, knn_k=2)
    report = run_pipeline(cfg)
    assert report.metadata["total_features"] == 2
    assert list(report.local_metrics) == ["a", "c"]
    assert report.metadata["dropped_features"] == {"b": "missing-in-synthetic"}


def test_reports_byte_identical_except_timestamp(tmp_path):
    cols = small_mixed()
    other = small_mixed(seed=2, perturb=0.1)
    cfg = make_config(tmp_path, cols, other, knn_k=5)
    run_pipeline(cfg)
    doc_a = json.loads(Path(cfg.report_path).read_text())
    run_pipeline(cfg)
    doc_b = json.loads(Path(cfg.report_path).read_text())
    assert doc_a["metadata"].pop("timestamp") != ""
    assert doc_b["metadata"].pop("timestamp") != ""
    assert doc_a == doc_b  # identical including run_id (content + seed hash)


def test_run_id_changes_with_seed_and_content(tmp_path):
    cols = small_mixed()
    cfg = make_config(tmp_path, cols, cols, knn_k=5)
    id_a = run_pipeline(cfg).metadata["run_id"]
    id_b = run_pipeline(cfg.with_overrides(seed=7)).metadata["run_id"]
    assert id_a != id_b
    (tmp_path / "v2").mkdir()
    other = small_mixed(seed=9, perturb=0.2)
    cfg2 = make_config(tmp_path / "v2", cols, other, knn_k=5)
    id_c = run_pipeline(cfg2).metadata["run_id"]
    assert id_c != id_a


def test_no_report_written_on_failure(tmp_path):
    cols = small_mixed()
    real = write_csv(tmp_path / "real.csv", cols)
    cfg = RunConfig(
        real_path=str(real),
        synthetic_path=str(tmp_path / "missing.csv"),
        report_path=str(tmp_path / "report.json"),
        plots_dir=str(tmp_path / "plots"),
    )
    from sdbench.errors import IngestError
    with pytest.raises(IngestError):
        run_pipeline(cfg)
    assert not Path(cfg.report_path).exists()
    assert not list(tmp_path.glob("*.tmp"))


def test_structural_autoskip_over_cap_and_forced_override(tmp_path):
    cols = small_mixed(n=40)
    cfg = make_config(tmp_path, cols, cols, knn_k=3, graph_sample_cap=12)
    report = run_pipeline(cfg)
    assert len(report.global_metrics) == 5
    assert "structural_skipped" in report.metadata
    forced = cfg.with_overrides(structural_forced=True)
    report = run_pipeline(forced)
    assert len(report.global_metrics) == 10
    assert "structural_skipped" not in report.metadata


def test_structural_skipped_when_too_few_rows(tmp_path):
    cols = {name: values[:8] for name, values in small_mixed(n=40).items()}
    cfg = make_config(tmp_path, cols, cols, knn_k=10)
    report = run_pipeline(cfg)
    assert len(report.global_metrics) == 5
    assert "structural_skipped" in report.metadata


def test_sidecars_written_with_manifest(tmp_path):
    cols = small_mixed()
    cfg = make_config(tmp_path, cols, cols, knn_k=5)
    report = run_pipeline(cfg)
    run_dir = Path(cfg.plots_dir) / report.metadata["run_id"]
    manifest = json.loads((run_dir / "manifest.json").read_text())
    kinds = {entry["kind"] for entry in manifest["sidecars"]}
    assert kinds == {"histograms", "categorical_bars", "corr_matrices",
                     "embedding_pca", "knn_graph"}
    assert manifest["run_id"] == report.metadata["run_id"]
    assert manifest["seed"] == cfg.seed
    for entry in manifest["sidecars"]:
        payload = json.loads((run_dir / entry["path"]).read_text())
        assert payload
    hist = json.loads((run_dir / "histograms.json").read_text())
    assert set(hist["features"]) == {"num0", "num1", "num2", "ord0"}
    bars = json.loads((run_dir / "categorical_bars.json").read_text())
    assert set(bars["features"]) == {"cat0", "bin0"}


def test_sidecars_skip_structural_files_when_block_skipped(tmp_path):
    cols = small_mixed()
    cfg = make_config(tmp_path, cols, cols, knn_k=5, enable_structural=False)
    report = run_pipeline(cfg)
    run_dir = Path(cfg.plots_dir) / report.metadata["run_id"]
    manifest = json.loads((run_dir / "manifest.json").read_text())
    kinds = {entry["kind"] for entry in manifest["sidecars"]}
    assert kinds == {"histograms", "categorical_bars", "corr_matrices"}


def test_cli_evaluate_and_exit_codes(tmp_path, capsys):
    cols = small_mixed()
    real = write_csv(tmp_path / "real.csv", cols)
    synth = write_csv(tmp_path / "synth.csv", cols)
    config_path = tmp_path / "config.yaml"
    config_path.write_text(
        f"real_dataset_path: {real}\n"
        f"synthetic_dataset_path: {synth}\n"
        f"output_report: {tmp_path / 'report.json'}\n"
        f"plots_dir: {tmp_path / 'plots'}\n"
        "knn_k: 5\n",
        encoding="utf-8",
    )
    assert cli_main(["evaluate", "--config", str(config_path)]) == 0
    out = capsys.readouterr().out
    assert re.search(r"sdb_[0-9a-f]{12}", out)

    report = json.loads((tmp_path / "report.json").read_text())
    assert len(report["global_metrics"]) == 10

    assert cli_main(["evaluate", "--config", str(config_path),
                     "--no-structural"]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert len(report["global_metrics"]) == 5

    bad_config = tmp_path / "bad.yaml"
    bad_config.write_text("real_dataset_path: x\n", encoding="utf-8")
    assert cli_main(["evaluate", "--config", str(bad_config)]) == 1
    assert cli_main(["evaluate", "--config", str(tmp_path / "nope.yaml")]) == 1

    missing_data = tmp_path / "missing_data.yaml"
    missing_data.write_text(
        f"real_dataset_path: {tmp_path / 'ghost.csv'}\n"
        f"synthetic_dataset_path: {synth}\n"
        f"output_report: {tmp_path / 'r.json'}\n"
        f"plots_dir: {tmp_path / 'plots'}\n",
        encoding="utf-8",
    )
    assert cli_main(["evaluate", "--config", str(missing_data)]) == 2


def test_cli_metric_error_exit_code(tmp_path):
    # text-only tables align but leave nothing to embed: MetricError -> 3
    text_cols = {"notes": [f"row {i} free text" for i in range(30)]}
    real = write_csv(tmp_path / "real.csv", text_cols)
    synth = write_csv(tmp_path / "synth.csv", text_cols)
    config_path = tmp_path / "config.yaml"
    config_path.write_text(
        f"real_dataset_path: {real}\n"
        f"synthetic_dataset_path: {synth}\n"
        f"output_report: {tmp_path / 'report.json'}\n"
        f"plots_dir: {tmp_path / 'plots'}\n"
        "knn_k: 5\n",
        encoding="utf-8",
    )
    assert cli_main(["evaluate", "--config", str(config_path)]) == 3
    assert not (tmp_path / "report.json").exists()


def test_cli_seed_override_changes_run_id(tmp_path, capsys):
    cols = small_mixed()
    real = write_csv(tmp_path / "real.csv", cols)
    synth = write_csv(tmp_path / "synth.csv", cols)
    config_path = tmp_path / "config.yaml"
    config_path.write_text(
        f"real_dataset_path: {real}\n"
        f"synthetic_dataset_path: {synth}\n"
        f"output_report: {tmp_path / 'report.json'}\n"
        f"plots_dir: {tmp_path / 'plots'}\n"
        "knn_k: 5\n",
        encoding="utf-8",
    )
    assert cli_main(["evaluate", "--config", str(config_path)]) == 0
    first = capsys.readouterr().out.strip().splitlines()[-1]
    assert cli_main(["evaluate", "--config", str(config_path),
                     "--seed", "99"]) == 0
    second = capsys.readouterr().out.strip().splitlines()[-1]
    assert first != second


def test_cli_schema_prints_valid_json(capsys):
    assert cli_main(["schema"]) == 0
    schema = json.loads(capsys.readouterr().out)
    assert schema["title"].startswith("Synthetic data fidelity report")


def test_yaml_config_round_trip(tmp_path):
    cols = small_mixed()
    real = write_csv(tmp_path / "real.csv", cols)
    synth = write_csv(tmp_path / "synth.csv", cols)
    cfg = parse_config(
        f"real_dataset_path: {real}\n"
        f"synthetic_dataset_path: {synth}\n"
        f"output_report: {tmp_path / 'report.json'}\n"
        f"plots_dir: {tmp_path / 'plots'}\n"
        "seed: 123\nbins: 10\nknn_k: 5\n"
    )
    report = run_pipeline(cfg)
    assert report.metadata["number_of_samples_real"] == 60
