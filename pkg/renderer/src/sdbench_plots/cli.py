"""CLI: render the plot suite for one evaluation run's sidecar directory."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .render import SidecarError, load_manifest, render_all


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    parser = argparse.ArgumentParser(
        prog="sdbench-render",
        description="Render PNG diagnostics from an evaluation run's "
        "plot-data sidecars.",
    )
    parser.add_argument("--plots-dir", required=True,
                        help="directory holding per-run sidecar folders")
    parser.add_argument("--run-id", required=True,
                        help="run identifier (sidecar folder name)")
    parser.add_argument("--out", default=None,
                        help="output directory (defaults to the run folder)")
    args = parser.parse_args(argv)

    try:
        manifest = load_manifest(Path(args.plots_dir), args.run_id)
        written = render_all(manifest, Path(args.out) if args.out else None)
    except SidecarError as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
