"""
Run Command - executes a fuzzing campaign and writes its log, manifest and reports
"""
import logging
from pathlib import Path

from app.config import load_campaign_config, settings
from app.models import ExitStatus, ScenarioType
from app.services.fuzzer import run_campaign
from app.services.report import categorize_ics, export, export_categories, success_rates
from app.services.result_store import ResultStore

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser("run", help="Run a fuzzing campaign from a config file")
    parser.add_argument("--config", required=True, help="Campaign config JSON file")
    parser.add_argument("--out", default=None, help="Output directory (default: OUTPUT_DIR setting)")
    parser.add_argument("--workers", type=int, default=None, help="Worker processes (default: WORKERS setting)")
    parser.set_defaults(handler=cmd_run)


def cmd_run(args) -> int:
    config, raw = load_campaign_config(args.config)
    out_dir = Path(args.out or settings.output_dir)

    result = run_campaign(config, raw, workers=args.workers)

    store = ResultStore(out_dir)
    store.write_records(result.records)
    store.write_manifest(result.manifest)
    export(success_rates(result.records), "csv", out_dir / "sr_report.csv")
    export_categories(categorize_ics(result.records), out_dir / "categories.csv")

    manifest = result.manifest
    for kind in config.seed_kinds:
        totals = manifest.totals_by_kind[kind.value]
        executions = sum(totals.values())
        first = manifest.first_ics_clock[kind.value]
        first_text = "-" if first is None else f"{first:.2f}s"
        print(
            f"{kind.value}: executions={executions} "
            + " ".join(f"{t.value}={totals[t.value]}" for t in ScenarioType)
            + f" first_ics_clock={first_text}"
        )
    return ExitStatus.SUCCESS
