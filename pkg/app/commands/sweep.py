"""
Sweep Commands - step-size and oracle-threshold sweeps
"""
import csv
import logging
from pathlib import Path
from typing import List, Optional

from app.config import load_campaign_config, settings
from app.exceptions import ConfigError, ResultIOError
from app.models import CampaignConfig, ExitStatus, ScenarioKind
from app.seed_pool import seed_pool
from app.services.fuzzer import SWEEP_AXES, step_size_sweep
from app.services.oracle import label_traces, probe_traces, recall_sweep

logger = logging.getLogger(__name__)


def parse_float_list(text: str, name: str) -> List[float]:
    """Comma-separated numbers; an empty list is a config error"""
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            values.append(float(part))
        except ValueError as e:
            raise ConfigError(f"{name}: {part!r} is not a number") from e
    if not values:
        raise ConfigError(f"{name}: list must not be empty")
    return values


def _load_optional_config(path: Optional[str]) -> Optional[CampaignConfig]:
    if path is None:
        return None
    config, _ = load_campaign_config(path)
    return config


def _write_csv(path: Path, columns: List[str], rows: List[dict]) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=columns, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
    except OSError as e:
        raise ResultIOError(f"Cannot write {path}: {e}") from e
    logger.info(f"Sweep written to {path}")
    return path


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6f}"


def register(subparsers):
    step = subparsers.add_parser("sweep-step", help="ICS count against mutation step size")
    step.add_argument("--kind", required=True, choices=[k.value for k in seed_pool.get_all_kinds()])
    step.add_argument("--axis", required=True, choices=list(SWEEP_AXES))
    step.add_argument("--steps", required=True, help="Comma-separated step sizes")
    step.add_argument("--trials", type=int, default=10)
    step.add_argument("--rng-seed", type=int, default=0)
    step.add_argument("--config", default=None, help="Campaign config supplying defect, oracle and sim settings")
    step.add_argument("--out", default=None, help="CSV path")
    step.set_defaults(handler=cmd_sweep_step)

    threshold = subparsers.add_parser("sweep-threshold", help="Oracle precision and recall against T_bbox")
    threshold.add_argument("--thresholds", required=True, help="Comma-separated IoU thresholds in [0, 1)")
    threshold.add_argument("--config", default=None, help="Campaign config supplying defect and sim settings")
    threshold.add_argument("--out", default=None, help="CSV path")
    threshold.set_defaults(handler=cmd_sweep_threshold)


def cmd_sweep_step(args) -> int:
    steps = parse_float_list(args.steps, "--steps")
    kind = ScenarioKind(args.kind)
    config = _load_optional_config(args.config)
    results = step_size_sweep(kind, args.axis, steps, args.trials, rng_seed=args.rng_seed, config=config)

    out = Path(args.out or Path(settings.output_dir) / f"step_sweep_{kind.value}_{args.axis}.csv")
    rows = [
        {
            "step": result.step,
            "mean_ics": f"{result.mean_ics:.4f}",
            "trial_counts": " ".join(str(c) for c in result.trial_counts),
        }
        for result in results
    ]
    _write_csv(out, ["step", "mean_ics", "trial_counts"], rows)
    for row in rows:
        print(f"step {row['step']}: mean ICS {row['mean_ics']}")
    return ExitStatus.SUCCESS


def cmd_sweep_threshold(args) -> int:
    thresholds = parse_float_list(args.thresholds, "--thresholds")
    config = _load_optional_config(args.config) or CampaignConfig()
    labeled = label_traces(probe_traces(config.sim), config.defect)
    results = recall_sweep(labeled, thresholds, config.defect)

    out = Path(args.out or Path(settings.output_dir) / "threshold_sweep.csv")
    rows = [
        {
            "threshold": r.threshold,
            "tp": r.tp,
            "fp": r.fp,
            "fn": r.fn,
            "precision": _fmt(r.precision),
            "recall": _fmt(r.recall),
        }
        for r in results
    ]
    _write_csv(out, ["threshold", "tp", "fp", "fn", "precision", "recall"], rows)
    for row in rows:
        print(f"T_bbox {row['threshold']}: precision {row['precision'] or '-'} recall {row['recall'] or '-'}")
    return ExitStatus.SUCCESS
