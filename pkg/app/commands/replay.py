"""
Replay Command - re-simulates one logged execution and checks its verdict
"""
import logging
from pathlib import Path

from app.exceptions import InvariantViolation, ResultIOError
from app.models import DefectModel, ExitStatus
from app.seed_pool import seed_pool
from app.services.detector import CollisionDetector
from app.services.oracle import check_ic
from app.services.result_store import ResultStore, load_records
from app.services.simulator import simulate

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser("replay", help="Replay one execution of a result log")
    parser.add_argument("--log", required=True, help="records.jsonl written by run")
    parser.add_argument("--ordinal", type=int, required=True, help="Execution ordinal to replay")
    parser.add_argument("--out", default=None, help="Directory for the trace (default: next to the log)")
    parser.add_argument(
        "--perfect-detector", action="store_true",
        help="Judge the replay with a defect-free built-in detector instead of the logged one",
    )
    parser.set_defaults(handler=cmd_replay)


def cmd_replay(args) -> int:
    log_path = Path(args.log)
    records = load_records(log_path)
    if not 0 <= args.ordinal < len(records):
        raise ResultIOError(f"ordinal {args.ordinal} out of range: {log_path} holds {len(records)} records")
    record = records[args.ordinal]

    manifest = ResultStore(log_path.parent).load_manifest()
    config = manifest.config
    defect = DefectModel.perfect() if args.perfect_detector else config.defect

    spec, _ = seed_pool.get_seed(record.kind, config.scenarios.get(record.kind))
    trace = simulate(spec, record.params, config.sim)
    verdict = check_ic(trace, defect, config.oracle)
    detection = CollisionDetector(defect).check(trace)

    out_store = ResultStore(args.out or log_path.parent)
    out_store.write_trace(trace, f"replay_{args.ordinal}.jsonl")
    print(f"ordinal {args.ordinal} ({record.kind.value}): logged {record.scenario_type.value}, replayed {verdict.value}")
    contact_time = detection["ground_truth_time"]
    contact_text = "-" if contact_time is None else f"{contact_time:.2f}s"
    print(f"  {detection['summary']} (first contact {contact_text})")

    if not args.perfect_detector and verdict != record.scenario_type:
        raise InvariantViolation(
            f"replay of ordinal {args.ordinal} gave {verdict.value}, log says {record.scenario_type.value}"
        )
    return ExitStatus.SUCCESS
