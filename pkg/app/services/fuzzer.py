"""
Fuzzer - guided step-wise campaigns from determined collision seeds, plus the Random and NC-start baselines
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.exceptions import ConfigError, InvalidSeedError, SweepExhausted
from app.models import (
    AngleMode,
    CampaignConfig,
    CampaignManifest,
    ControlParameters,
    MutationAxis,
    MutatorKind,
    OutcomeRecord,
    RANGE_TOL,
    ScenarioKind,
    ScenarioSpec,
    ScenarioType,
    SearchPlan,
    StepSweepResult,
)
from app.seed_pool import seed_pool
from app.services.oracle import check_ic
from app.services.report import bucket, category_of
from app.services.scenario import validate_seed
from app.services.simulator import Trace, simulate
from app.utils.hash_utils import config_digest

logger = logging.getLogger(__name__)

# Step sizes per kind: angle_long, angle_lat, distance, speed
DEFAULT_STEPS: Dict[ScenarioKind, Tuple[float, float, float, float]] = {
    ScenarioKind.FLB: (0.04, 0.03, 1.0, 1.0),
    ScenarioKind.FLV: (0.04, 0.03, 1.0, 1.0),
    ScenarioKind.LC: (0.05, 0.04, 1.0, 1.0),
    ScenarioKind.INC: (0.05, 0.02, 4.0, 1.0),
    ScenarioKind.PSF: (0.03, 0.03, 1.0, 1.0),
    ScenarioKind.PCF: (0.03, 0.03, 1.0, 1.0),
}

SWEEP_AXES = ("distance", "speed", "angle", "angle_lat", "angle_long")

Seed = Tuple[ScenarioSpec, ControlParameters]


def default_plan(kind: ScenarioKind) -> SearchPlan:
    angle_long, angle_lat, distance, speed = DEFAULT_STEPS[kind]
    return SearchPlan(angle_step_long=angle_long, angle_step_lat=angle_lat, distance_step=distance, speed_step=speed)


def plan_for(config: CampaignConfig, kind: ScenarioKind) -> SearchPlan:
    """Per-kind defaults with the fields the config sets explicitly laid over them"""
    plan = config.plans.get(kind)
    if plan is None:
        return default_plan(kind)
    values = default_plan(kind).model_dump(exclude={"distance_schedule", "speed_schedule"})
    values.update({name: getattr(plan, name) for name in plan.model_fields_set})
    return SearchPlan(**values)


def mutate_step(params: ControlParameters, axis: MutationAxis, plan: SearchPlan) -> ControlParameters:
    """Move one parameter by one plan step; SweepExhausted when that passes a range bound"""
    if axis == MutationAxis.DISTANCE:
        value = round(params.d + plan.distance_step, 9)
        if value > plan.distance_range[1] + RANGE_TOL:
            raise SweepExhausted(f"distance {value} beyond {plan.distance_range[1]}")
        return params.replace(d=value)

    if axis == MutationAxis.SPEED:
        value = round(params.v_hat + plan.speed_step, 9)
        if value > plan.speed_range[1] + RANGE_TOL:
            raise SweepExhausted(f"speed {value} beyond {plan.speed_range[1]}")
        return params.replace(v_hat=value)

    if axis == MutationAxis.ANGLE_LONG:
        value = round(params.theta_long - plan.angle_step_long, 9)
        if value <= 0.0:
            raise SweepExhausted(f"theta_long {value} not positive")
        return params.replace(theta_long=value)

    sign = 1.0 if axis == MutationAxis.ANGLE_POS else -1.0
    if plan.angle_mode == AngleMode.SCALAR:
        value = round(params.a + sign * plan.angle_step_lat, 9)
        if abs(value) > 1.0 + RANGE_TOL:
            raise SweepExhausted(f"angle {value} beyond +-1")
        return ControlParameters.from_angle(params.d, params.v_hat, value)

    value = round(params.theta_lat + sign * plan.angle_step_lat, 9)
    if abs(value) > 1.0 + RANGE_TOL:
        raise SweepExhausted(f"theta_lat {value} beyond +-1")
    return params.replace(theta_lat=value)


def execute(spec: ScenarioSpec, params: ControlParameters, config: CampaignConfig) -> Tuple[ScenarioType, Trace]:
    trace = simulate(spec, params, config.sim)
    return check_ic(trace, config.defect, config.oracle), trace


class _BudgetSpent(Exception):
    pass


class _Stream:
    """Records of one kind in execution order, with the kind's simulated clock"""

    def __init__(self, spec: ScenarioSpec, config: CampaignConfig, mutator: MutatorKind, limit: Optional[int]):
        self.spec = spec
        self.config = config
        self.mutator = mutator
        self.limit = limit
        self.clock = 0.0
        self.records: List[OutcomeRecord] = []

    def check_budget(self):
        if self.limit is not None and len(self.records) >= self.limit:
            raise _BudgetSpent()

    def run(self, params: ControlParameters, branch: str) -> ScenarioType:
        self.check_budget()
        scenario_type, trace = execute(self.spec, params, self.config)
        self.accept(params, branch, scenario_type, trace)
        return scenario_type

    def accept(self, params: ControlParameters, branch: str, scenario_type: ScenarioType, trace: Trace):
        self.add(params, branch, scenario_type, trace.first_contact_time, trace.trigger_time, trace.duration)

    def add(self, params, branch, scenario_type, first_contact_time, trigger_time, duration):
        self.clock = round(self.clock + duration, 9)
        self.records.append(OutcomeRecord(
            ordinal=len(self.records),
            kind=self.spec.kind,
            mutator=self.mutator,
            branch=branch,
            params=params,
            scenario_type=scenario_type,
            first_contact_time=None if first_contact_time is None else round(first_contact_time, 9),
            trigger_time=None if trigger_time is None else round(trigger_time, 9),
            clock=self.clock,
            buckets=bucket(params),
            category=category_of(params),
        ))
        logger.debug(f"{self.spec.kind.value} {branch} d={params.d} v_hat={params.v_hat} a={params.a}: {scenario_type.value}")


def _cell_name(d: float, v_hat: float) -> str:
    return f"d={d:g},v={v_hat:g}"


def _sweep_branch(
    stream: _Stream, base: ControlParameters, axes: Sequence[MutationAxis], plan: SearchPlan, branch: str
):
    """Step along each axis in turn up to its bound; k_nc consecutive NC ends the whole branch"""
    current = base
    nc_run = 0
    for axis in axes:
        while nc_run < plan.k_nc:
            try:
                current = mutate_step(current, axis, plan)
            except SweepExhausted:
                break
            if stream.run(current, branch) == ScenarioType.NC:
                nc_run += 1
            else:
                nc_run = 0


def _angle_branches(plan: SearchPlan) -> List[Tuple[str, Tuple[MutationAxis, ...]]]:
    if plan.angle_mode == AngleMode.PER_AXIS:
        # lateral component to its bound, then the longitudinal one down toward zero
        return [
            (MutationAxis.ANGLE_POS.value, (MutationAxis.ANGLE_POS, MutationAxis.ANGLE_LONG)),
            (MutationAxis.ANGLE_NEG.value, (MutationAxis.ANGLE_NEG, MutationAxis.ANGLE_LONG)),
        ]
    return [
        (MutationAxis.ANGLE_POS.value, (MutationAxis.ANGLE_POS,)),
        (MutationAxis.ANGLE_NEG.value, (MutationAxis.ANGLE_NEG,)),
    ]


def _check_seed(seed: Seed, config: CampaignConfig):
    spec, params = seed
    if not validate_seed(spec, params, config.sim):
        raise InvalidSeedError(
            f"{spec.kind.value}: seed d={params.d}, v_hat={params.v_hat}, a={params.a} does not collide"
        )


def run_round(seed: Seed, config: CampaignConfig, limit: Optional[int] = None) -> List[OutcomeRecord]:
    """
    One guided round: distance outermost, speed in the middle, and for every
    (d, v_hat) cell the angle swept outward from the seed angle, first upward
    then downward. A branch ends after k_nc consecutive NC verdicts or at the
    range bound; an IC does not end it. In per-axis mode a branch steps
    theta_lat to its bound and then theta_long down toward zero.
    """
    _check_seed(seed, config)
    spec, seed_params = seed
    plan = plan_for(config, spec.kind)
    stream = _Stream(spec, config, MutatorKind.GUIDED, limit)
    try:
        for d in plan.distances:
            for v_hat in plan.speeds:
                base = seed_params.replace(d=d, v_hat=v_hat)
                cell = _cell_name(d, v_hat)
                stream.run(base, f"{cell}:seed")
                for name, axes in _angle_branches(plan):
                    _sweep_branch(stream, base, axes, plan, f"{cell}:{name}")
    except _BudgetSpent:
        logger.info(f"{spec.kind.value}: guided round stopped at its budget of {limit}")
    return stream.records


def run_nc_start_round(seed: Seed, config: CampaignConfig, limit: Optional[int] = None) -> List[OutcomeRecord]:
    """
    Guided stepping started from non-collision points: every (d, v_hat) cell is
    walked from the +1 angle bound down toward the seed angle, then from -1 up
    toward it. A bound that collides is not a valid start and its branch is
    skipped; that check is not logged as an execution. A branch ends after k_nc
    consecutive NC verdicts (the start included) or at the seed angle.
    """
    _check_seed(seed, config)
    spec, seed_params = seed
    plan = plan_for(config, spec.kind).model_copy(update={"angle_mode": AngleMode.SCALAR})
    seed_angle = seed_params.a
    stream = _Stream(spec, config, MutatorKind.NC_START, limit)
    skipped = 0
    try:
        for d in plan.distances:
            for v_hat in plan.speeds:
                cell = _cell_name(d, v_hat)
                for bound, axis in ((1.0, MutationAxis.ANGLE_NEG), (-1.0, MutationAxis.ANGLE_POS)):
                    branch = f"{cell}:from{bound:+g}"
                    current = ControlParameters.from_angle(d, v_hat, bound)
                    stream.check_budget()
                    start_type, trace = execute(spec, current, config)
                    if start_type != ScenarioType.NC:
                        skipped += 1
                        logger.debug(f"{spec.kind.value} {cell}: start point a={bound:+g} collides, branch skipped")
                        continue
                    stream.accept(current, branch, start_type, trace)
                    nc_run = 1
                    while nc_run < plan.k_nc:
                        try:
                            current = mutate_step(current, axis, plan)
                        except SweepExhausted:
                            break
                        if axis == MutationAxis.ANGLE_NEG and current.a < seed_angle - RANGE_TOL:
                            break
                        if axis == MutationAxis.ANGLE_POS and current.a > seed_angle + RANGE_TOL:
                            break
                        if stream.run(current, branch) == ScenarioType.NC:
                            nc_run += 1
                        else:
                            nc_run = 0
    except _BudgetSpent:
        logger.info(f"{spec.kind.value}: nc-start round stopped at its budget of {limit}")
    if skipped:
        logger.info(f"{spec.kind.value}: {skipped} nc-start branches skipped at colliding bounds")
    return stream.records


def _draw_random(config: CampaignConfig, total: int) -> List[Tuple[ScenarioKind, ControlParameters]]:
    rng = np.random.default_rng(config.rng_seed)
    kinds = config.seed_kinds
    plans = {kind: plan_for(config, kind) for kind in kinds}
    draws = []
    for i in range(total):
        kind = kinds[i % len(kinds)]
        plan = plans[kind]
        d = float(rng.uniform(*plan.distance_range))
        v_hat = float(rng.uniform(*plan.speed_range))
        a = float(rng.uniform(-1.0, 1.0))
        draws.append((kind, ControlParameters.from_angle(round(d, 4), round(v_hat, 4), round(a, 4))))
    return draws


def _random_task(args) -> Tuple[ScenarioType, Optional[float], Optional[float], float]:
    spec, params, config = args
    scenario_type, trace = execute(spec, params, config)
    return scenario_type, trace.first_contact_time, trace.trigger_time, trace.duration


def _round_task(args) -> List[OutcomeRecord]:
    mutator, seed, config, limit = args
    if mutator == MutatorKind.NC_START:
        return run_nc_start_round(seed, config, limit)
    return run_round(seed, config, limit)


def split_budget(budget: int, parts: int) -> List[int]:
    return [budget // parts + (1 if i < budget % parts else 0) for i in range(parts)]


@dataclass
class CampaignResult:
    records: List[OutcomeRecord] = field(default_factory=list)
    manifest: Optional[CampaignManifest] = None


def _tally(records: Sequence[OutcomeRecord]) -> Dict[str, int]:
    totals = {t.value: 0 for t in ScenarioType}
    for record in records:
        totals[record.scenario_type.value] += 1
    return totals


def build_manifest(
    config: CampaignConfig, records: Sequence[OutcomeRecord], raw_config: Optional[bytes], wall_clock: float
) -> CampaignManifest:
    first_ics: Dict[str, Optional[float]] = {}
    by_kind: Dict[str, Dict[str, int]] = {}
    for kind in config.seed_kinds:
        kind_records = [r for r in records if r.kind == kind]
        by_kind[kind.value] = _tally(kind_records)
        first_ics[kind.value] = next((r.clock for r in kind_records if r.scenario_type == ScenarioType.IC), None)
    return CampaignManifest(
        app_version=settings.app_version,
        config_digest=config_digest(raw_config if raw_config is not None else config),
        config=config,
        mutator=config.mutator,
        budget=config.budget,
        budget_used=len(records),
        totals=_tally(records),
        totals_by_kind=by_kind,
        first_ics_clock=first_ics,
        created_at=datetime.now().isoformat(),
        wall_clock_seconds=round(wall_clock, 3),
    )


def run_campaign(
    config: CampaignConfig, raw_config: Optional[bytes] = None, workers: Optional[int] = None
) -> CampaignResult:
    workers = workers if workers is not None else settings.workers
    started = time.perf_counter()
    seeds = {kind: seed_pool.get_seed(kind, config.scenarios.get(kind)) for kind in config.seed_kinds}
    logger.info(
        f"Campaign start: mutator={config.mutator.value} budget={config.budget} "
        f"kinds={','.join(k.value for k in config.seed_kinds)} workers={workers}"
    )

    records: List[OutcomeRecord] = []
    if config.budget > 0 and config.mutator == MutatorKind.RANDOM:
        draws = _draw_random(config, config.budget)
        tasks = [(seeds[kind][0], params, config) for kind, params in draws]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(_random_task, tasks, chunksize=64))
        else:
            outcomes = [_random_task(task) for task in tasks]
        streams = {kind: _Stream(seeds[kind][0], config, MutatorKind.RANDOM, None) for kind in config.seed_kinds}
        for (kind, params), outcome in zip(draws, outcomes):
            streams[kind].add(params, "random", *outcome)
            records.append(streams[kind].records[-1])
    elif config.budget > 0:
        shares = split_budget(config.budget, len(config.seed_kinds))
        tasks = [
            (config.mutator, seeds[kind], config, share)
            for kind, share in zip(config.seed_kinds, shares)
            if share > 0
        ]
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
                rounds = list(pool.map(_round_task, tasks))
        else:
            rounds = [_round_task(task) for task in tasks]
        for (_, seed, _, _), kind_records in zip(tasks, rounds):
            ics = sum(1 for r in kind_records if r.scenario_type == ScenarioType.IC)
            logger.info(f"{seed[0].kind.value}: {len(kind_records)} executions, {ics} ICS")
            records.extend(kind_records)

    records = [record.model_copy(update={"ordinal": i}) for i, record in enumerate(records)]
    wall_clock = time.perf_counter() - started
    manifest = build_manifest(config, records, raw_config, wall_clock)
    logger.info(f"Campaign end: {len(records)} executions, totals {manifest.totals}, {wall_clock:.1f}s")
    return CampaignResult(records=records, manifest=manifest)


def _sweep_points(start: float, lo: float, hi: float, step: float) -> List[float]:
    """start, then outward by step in both directions up to the bounds"""
    points = [start]
    k = 1
    while start + k * step <= hi + RANGE_TOL:
        points.append(round(start + k * step, 9))
        k += 1
    k = 1
    while start - k * step >= lo - RANGE_TOL:
        points.append(round(start - k * step, 9))
        k += 1
    return points


def _axis_span(axis: str, plan: SearchPlan) -> Tuple[float, float]:
    if axis == "distance":
        return plan.distance_range
    if axis == "speed":
        return plan.speed_range
    if axis == "angle_long":
        return 0.0, 1.0
    return -1.0, 1.0


def step_size_sweep(
    kind: ScenarioKind,
    axis: str,
    step_values: Sequence[float],
    trials: int,
    rng_seed: int = 0,
    config: Optional[CampaignConfig] = None,
) -> List[StepSweepResult]:
    """
    ICS count of a full single-axis sweep for each step size, with the other
    parameters drawn per trial and averaged over trials.
    """
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {', '.join(SWEEP_AXES)}")
    if not step_values:
        raise ConfigError("step list must not be empty")
    if trials < 1:
        raise ConfigError(f"trials must be at least 1, got {trials}")

    config = config or CampaignConfig(seed_kinds=[kind])
    spec, seed_params = seed_pool.get_seed(kind, config.scenarios.get(kind))
    plan = plan_for(config, kind)
    lo, hi = _axis_span(axis, plan)
    for step in step_values:
        if not (0.0 < step <= (hi - lo) + RANGE_TOL):
            raise ConfigError(f"step {step} must be positive and within the {axis} span {hi - lo:g}")

    results = []
    for step in step_values:
        counts = []
        for trial in range(trials):
            rng = np.random.default_rng([rng_seed, trial])
            d = round(float(rng.uniform(*plan.distance_range)), 4)
            v_hat = round(float(rng.uniform(*plan.speed_range)), 4)
            a = round(float(rng.uniform(-1.0, 1.0)), 4)
            theta_lat = round(float(rng.uniform(-1.0, 1.0)), 4)

            if axis == "distance":
                points = [ControlParameters.from_angle(x, v_hat, a) for x in _sweep_points(lo, lo, hi, step)]
            elif axis == "speed":
                points = [ControlParameters.from_angle(d, x, a) for x in _sweep_points(lo, lo, hi, step)]
            elif axis == "angle":
                points = [
                    ControlParameters.from_angle(d, v_hat, x)
                    for x in _sweep_points(seed_params.a, lo, hi, step)
                ]
            elif axis == "angle_lat":
                points = [
                    ControlParameters(d=d, v_hat=v_hat, theta_long=1.0, theta_lat=x)
                    for x in _sweep_points(0.0, lo, hi, step)
                ]
            else:
                values = [round(1.0 - k * step, 9) for k in range(int((1.0 + RANGE_TOL) / step) + 1)]
                points = [
                    ControlParameters(d=d, v_hat=v_hat, theta_long=x, theta_lat=theta_lat)
                    for x in values
                    if x > 0.0
                ]

            ics = sum(1 for params in points if execute(spec, params, config)[0] == ScenarioType.IC)
            counts.append(ics)
        results.append(StepSweepResult(step=step, mean_ics=float(np.mean(counts)), trial_counts=counts))
        logger.info(f"{kind.value} {axis} step {step}: mean ICS {results[-1].mean_ics:.2f} over {trials} trials")
    return results
