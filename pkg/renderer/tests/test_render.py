"""Renderer acceptance: screening-shaped sidecars in, deterministic PNGs out.

Sidecars are produced by driving the evaluator through its CLI, which is
the only interface the renderer shares with it.
"""

import csv
import hashlib
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from sdbench_plots.cli import main as render_main
from sdbench_plots.render import SidecarError, load_manifest, render_all


def _screening_shaped_csv(path: Path, seed: int, n_rows: int = 250) -> Path:
    """Nine columns: one integer count, seven continuous, one binary outcome."""
    rng = np.random.default_rng(seed)
    pregnancies = rng.integers(0, 17, size=n_rows).astype(float)
    pregnancies[:17] = np.arange(17)
    outcome = rng.integers(0, 2, size=n_rows).astype(float)
    outcome[:2] = [0.0, 1.0]
    columns = {
        "Pregnancies": pregnancies,
        "Glucose": rng.normal(120, 30, n_rows),
        "BloodPressure": rng.normal(70, 12, n_rows),
        "SkinThickness": rng.gamma(2.0, 10.0, n_rows),
        "Insulin": rng.gamma(1.5, 50.0, n_rows),
        "BMI": rng.normal(32, 7, n_rows),
        "DiabetesPedigreeFunction": rng.gamma(2.0, 0.2, n_rows),
        "Age": rng.normal(33, 11, n_rows),
        "Outcome": outcome,
    }
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns.keys())
        for i in range(n_rows):
            writer.writerow([float(columns[name][i]) for name in columns])
    return path


@pytest.fixture(scope="module")
def screening_run(tmp_path_factory):
    """Evaluator output (report + sidecars) for a screening-shaped pair."""
    tmp = tmp_path_factory.mktemp("screening")
    real = _screening_shaped_csv(tmp / "real.csv", seed=10)
    synth = _screening_shaped_csv(tmp / "synth.csv", seed=20)
    config = tmp / "config.yaml"
    config.write_text(
        f"real_dataset_path: {real}\n"
        f"synthetic_dataset_path: {synth}\n"
        f"output_report: {tmp / 'report.json'}\n"
        f"plots_dir: {tmp / 'plots'}\n",
        encoding="utf-8",
    )
    result = subprocess.run(
        [sys.executable, "-m", "sdbench.cli", "evaluate", "--config", str(config)],
        capture_output=True, text=True, check=True,
    )
    run_id = result.stdout.strip().splitlines()[-1]
    return tmp / "plots", run_id


def _render_to(screening_run, out_dir: Path) -> list[Path]:
    plots_dir, run_id = screening_run
    manifest = load_manifest(plots_dir, run_id)
    return render_all(manifest, out_dir)


def test_screening_plot_suite_counts(screening_run, tmp_path):
    written = _render_to(screening_run, tmp_path / "out")
    names = sorted(p.name for p in written)
    histograms = [n for n in names if n.startswith("hist_")]
    bars = [n for n in names if n.startswith("bars_")]
    heatmaps = [n for n in names if n.startswith("corr_heatmap_")]
    scatters = [n for n in names if n == "pca_scatter.png"]
    graphs = [n for n in names if n.startswith("knn_graph_")]
    assert len(histograms) >= 8
    assert len(bars) == 1
    assert bars[0] == "bars_Outcome.png"
    assert len(heatmaps) == 2
    assert len(scatters) == 1
    assert len(graphs) == 2
    for path in written:
        assert path.stat().st_size > 0


def test_rendering_is_byte_stable(screening_run, tmp_path):
    first = _render_to(screening_run, tmp_path / "a")
    second = _render_to(screening_run, tmp_path / "b")
    digests_a = {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in first}
    digests_b = {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in second}
    assert digests_a == digests_b


def test_cli_renders_and_exits_zero(screening_run, tmp_path, capsys):
    plots_dir, run_id = screening_run
    code = render_main([
        "--plots-dir", str(plots_dir), "--run-id", run_id,
        "--out", str(tmp_path / "cli_out"),
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "pca_scatter.png" in out


def test_empty_manifest_produces_no_files(tmp_path, caplog):
    run_dir = tmp_path / "plots" / "sdb_000000000000"
    run_dir.mkdir(parents=True)
    (run_dir / "manifest.json").write_text(
        json.dumps({"run_id": "sdb_000000000000", "seed": 1, "sidecars": []}),
        encoding="utf-8",
    )
    code = render_main([
        "--plots-dir", str(tmp_path / "plots"), "--run-id", "sdb_000000000000",
        "--out", str(tmp_path / "out"),
    ])
    assert code == 0
    assert not list((tmp_path / "out").glob("*.png"))


def test_missing_sidecar_kind_skips_family(screening_run, tmp_path):
    plots_dir, run_id = screening_run
    manifest = load_manifest(plots_dir, run_id)
    manifest.sidecars.pop("knn_graph")
    written = render_all(manifest, tmp_path / "out")
    assert not [p for p in written if p.name.startswith("knn_graph_")]
    assert [p for p in written if p.name.startswith("hist_")]


def test_corrupt_sidecar_fails_naming_file(screening_run, tmp_path, capsys):
    plots_dir, run_id = screening_run
    broken_dir = tmp_path / "plots" / run_id
    broken_dir.mkdir(parents=True)
    source = plots_dir / run_id
    for path in source.iterdir():
        (broken_dir / path.name).write_bytes(path.read_bytes())
    (broken_dir / "histograms.json").write_text("{not json", encoding="utf-8")
    code = render_main([
        "--plots-dir", str(tmp_path / "plots"), "--run-id", run_id,
    ])
    assert code != 0
    err = capsys.readouterr().err
    assert "histograms.json" in err


def test_missing_manifest_is_an_error(tmp_path):
    with pytest.raises(SidecarError):
        load_manifest(tmp_path, "sdb_ffffffffffff")
