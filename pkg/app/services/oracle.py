"""
Ignored Collision Checker - classifies an executed scenario from ground truth and the built-in verdict
"""
import logging
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

from app.exceptions import ConfigError
from app.models import (
    ControlParameters,
    DefectModel,
    OracleConfig,
    ScenarioKind,
    ScenarioType,
    SimConfig,
    ThresholdResult,
)
from app.services.detector import builtin_cd, ground_truth
from app.services.scenario import build_spec
from app.services.simulator import Trace, simulate

logger = logging.getLogger(__name__)

_VERDICTS = {
    (True, False): ScenarioType.IC,
    (False, False): ScenarioType.NC,
    (True, True): ScenarioType.DC,
    (False, True): ScenarioType.FP,
}


def overlap_condition(trace: Trace, cfg: OracleConfig) -> bool:
    if cfg.t_bbox == 0.0:
        return ground_truth(trace) is not None
    return max((frame.iou for frame in trace.frames), default=0.0) >= cfg.t_bbox


def classify(cond1: bool, cond2: bool) -> ScenarioType:
    return _VERDICTS[(cond1, cond2)]


def check_ic(trace: Trace, defect: DefectModel, cfg: OracleConfig) -> ScenarioType:
    return classify(overlap_condition(trace, cfg), builtin_cd(trace, defect))


def label_traces(traces: Iterable[Trace], defect: DefectModel) -> List[Tuple[Trace, bool]]:
    """Attach the ignored-collision label: ground contact the built-in detector missed"""
    return [(trace, ground_truth(trace) is not None and not builtin_cd(trace, defect)) for trace in traces]


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den > 0 else None


def recall_sweep(
    labeled_traces: Sequence[Tuple[Trace, bool]],
    thresholds: Sequence[float],
    defect: DefectModel,
) -> List[ThresholdResult]:
    if not labeled_traces:
        raise ConfigError("recall sweep needs at least one labeled trace")
    if not thresholds:
        raise ConfigError("recall sweep needs at least one threshold")

    results = []
    for threshold in thresholds:
        try:
            cfg = OracleConfig(t_bbox=threshold)
        except ValueError as e:
            raise ConfigError(f"invalid threshold {threshold}: must be in [0, 1)") from e
        tp = fp = fn = 0
        for trace, is_ics in labeled_traces:
            predicted = check_ic(trace, defect, cfg) == ScenarioType.IC
            if predicted and is_ics:
                tp += 1
            elif predicted:
                fp += 1
            elif is_ics:
                fn += 1
        results.append(ThresholdResult(
            threshold=threshold, tp=tp, fp=fp, fn=fn,
            precision=_ratio(tp, tp + fp), recall=_ratio(tp, tp + fn),
        ))
        logger.debug(f"threshold {threshold}: tp={tp} fp={fp} fn={fn}")
    return results


class ProbeCell(NamedTuple):
    kind: ScenarioKind
    d: float
    v_hat: float
    theta_long: float


# Cells swept over the lateral angle component for the threshold study
PROBE_CELLS = (
    ProbeCell(ScenarioKind.FLB, 3.0, 2.0, 0.02),
    ProbeCell(ScenarioKind.LC, 5.0, 30.0, 0.02),
    ProbeCell(ScenarioKind.PSF, 2.0, 4.0, 1e-6),
)
PROBE_LAT_STEP = 0.02


def probe_traces(sim: Optional[SimConfig] = None) -> List[Trace]:
    sim = sim or SimConfig()
    traces = []
    steps = int(round(1.0 / PROBE_LAT_STEP))
    for cell in PROBE_CELLS:
        spec = build_spec(cell.kind)
        for i in range(steps + 1):
            params = ControlParameters(
                d=cell.d, v_hat=cell.v_hat, theta_long=cell.theta_long, theta_lat=round(i * PROBE_LAT_STEP, 9)
            )
            traces.append(simulate(spec, params, sim))
    return traces
