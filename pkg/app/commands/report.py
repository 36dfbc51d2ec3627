"""
Report Command - SR report of an existing result log
"""
from pathlib import Path

from app.models import ExitStatus
from app.services.report import export, success_rates
from app.services.result_store import load_records


def register(subparsers):
    parser = subparsers.add_parser("report", help="Build the SR report of a result log")
    parser.add_argument("--log", required=True, help="records.jsonl written by run")
    parser.add_argument("--format", choices=["csv", "svg"], default="csv")
    parser.add_argument("--out", default=None, help="Output path (default: sr_report.<format> next to the log)")
    parser.set_defaults(handler=cmd_report)


def cmd_report(args) -> int:
    log_path = Path(args.log)
    records = load_records(log_path)
    out = Path(args.out) if args.out else log_path.parent / f"sr_report.{args.format}"
    report = success_rates(records)
    export(report, args.format, out)
    summary = report.summary
    proportion = "-" if summary.proportion is None else f"{summary.proportion * 100:.2f}%"
    print(f"{summary.executions} executions, {summary.ics} ICS ({proportion}), report {out}")
    return ExitStatus.SUCCESS
