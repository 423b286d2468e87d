"""Command-line entry point: ``sdbench evaluate`` and ``sdbench schema``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import parse_config
from .errors import ConfigError, IngestError, MetricError, SchemaError
from .pipeline import run_pipeline
from .report import load_report_schema

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INGEST = 2
EXIT_METRIC = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdbench",
        description="Evaluate the fidelity of a synthetic tabular dataset "
        "against a real one.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    evaluate = sub.add_parser("evaluate", help="run a full evaluation")
    evaluate.add_argument("--config", required=True, help="YAML configuration file")
    evaluate.add_argument("--seed", type=int, default=None,
                          help="override the configured seed")
    evaluate.add_argument("--no-structural", action="store_true",
                          help="skip the embedding/graph metric block")

    sub.add_parser("schema", help="print the JSON schema of the report")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)

    if args.command == "schema":
        json.dump(load_report_schema(), sys.stdout, indent=2, ensure_ascii=False)
        sys.stdout.write("\n")
        return EXIT_OK

    try:
        config_path = Path(args.config)
        try:
            yaml_text = config_path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {config_path}: {exc}") from exc
        cfg = parse_config(yaml_text)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.no_structural:
            overrides["enable_structural"] = False
            overrides["structural_forced"] = False
        if overrides:
            cfg = cfg.with_overrides(**overrides)
        report = run_pipeline(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IngestError, SchemaError) as exc:
        print(f"ingestion error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except MetricError as exc:
        print(f"metric error: {exc}", file=sys.stderr)
        return EXIT_METRIC

    print(report.metadata["run_id"])
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
