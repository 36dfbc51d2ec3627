"""
Scenario catalogue - the six seed collision scenarios and their determined-collision parameters
"""
import logging
import math
from typing import Dict, NamedTuple, Optional, Tuple

from pydantic import ValidationError

from app.exceptions import InvalidSeedError
from app.models import (
    ActorRole,
    ActorSpec,
    Behavior,
    BehaviorKind,
    ControlParameters,
    Pose,
    ScenarioKind,
    ScenarioOverride,
    ScenarioSpec,
    SimConfig,
)
from app.services.simulator import simulate

logger = logging.getLogger(__name__)

LANE_WIDTH = 3.5
INITIAL_GAP = 30.0
EV_SPEED = 20.0

# Footprint half extents (length, width) in meters
CAR = (2.3, 0.95)
BICYCLE = (0.9, 0.3)
PEDESTRIAN = (0.25, 0.25)

WALKING_SPEED = 1.4


class SeedTemplate(NamedTuple):
    footprint: Tuple[float, float]
    y: float
    yaw: float
    behavior: BehaviorKind
    speed: float
    direction: Optional[float]
    d: float
    v_hat: float
    angle: float


SEED_TEMPLATES: Dict[ScenarioKind, SeedTemplate] = {
    # same lane, slower lead car
    ScenarioKind.FLV: SeedTemplate(CAR, 0.0, 0.0, BehaviorKind.CRUISE, 10.0, None, 2.0, 20.0, 0.0),
    # cyclist riding near the right edge of the lane
    ScenarioKind.FLB: SeedTemplate(BICYCLE, -0.4, 0.0, BehaviorKind.CRUISE, 5.0, None, 2.0, 20.0, 0.0),
    # car in the left lane of the highway; the EV cuts over into it
    ScenarioKind.LC: SeedTemplate(CAR, LANE_WIDTH, 0.0, BehaviorKind.CRUISE, 10.0, None, 5.0, 20.0, 0.25),
    # crossing car arrives at the junction together with the EV
    ScenarioKind.INC: SeedTemplate(CAR, -15.0, math.pi / 2, BehaviorKind.CROSSING, 10.0, math.pi / 2, 2.0, 20.0, 0.0),
    # pedestrian standing in the lane
    ScenarioKind.PSF: SeedTemplate(PEDESTRIAN, -0.3, 0.0, BehaviorKind.STATIC, 0.0, None, 2.0, 20.0, 0.0),
    # pedestrian walking across from the right curb
    ScenarioKind.PCF: SeedTemplate(PEDESTRIAN, -2.2, math.pi / 2, BehaviorKind.CROSSING, WALKING_SPEED, math.pi / 2, 2.0, 20.0, 0.0),
}


def build_spec(kind: ScenarioKind, override: Optional[ScenarioOverride] = None) -> ScenarioSpec:
    """Scenario template for a kind with config overrides applied"""
    template = SEED_TEMPLATES[kind]
    override = override or ScenarioOverride()

    ev_speed = override.ev_speed if override.ev_speed is not None else EV_SPEED
    half_length, half_width = template.footprint
    if override.npc_half_length is not None:
        half_length = override.npc_half_length
    if override.npc_half_width is not None:
        half_width = override.npc_half_width

    npc_speed = template.speed
    if override.npc_speed is not None:
        if template.behavior == BehaviorKind.STATIC and override.npc_speed != 0.0:
            raise InvalidSeedError(f"{kind.value}: static NPC cannot take npc_speed={override.npc_speed}")
        npc_speed = override.npc_speed
    npc_y = override.npc_offset if override.npc_offset is not None else template.y

    try:
        return ScenarioSpec(
            kind=kind,
            ev=ActorSpec(
                role=ActorRole.EV,
                half_length=CAR[0],
                half_width=CAR[1],
                pose=Pose(x=0.0, y=0.0, yaw=0.0),
                behavior=Behavior(kind=BehaviorKind.CRUISE, speed=ev_speed),
            ),
            npc=ActorSpec(
                role=ActorRole.NPC,
                half_length=half_length,
                half_width=half_width,
                pose=Pose(x=INITIAL_GAP, y=npc_y, yaw=template.yaw),
                behavior=Behavior(kind=template.behavior, speed=npc_speed, direction=template.direction),
            ),
            lane_width=LANE_WIDTH,
            initial_gap=INITIAL_GAP,
        )
    except ValidationError as e:
        raise InvalidSeedError(f"{kind.value}: invalid scenario override: {e}") from e


def seed_parameters(kind: ScenarioKind, override: Optional[ScenarioOverride] = None) -> ControlParameters:
    template = SEED_TEMPLATES[kind]
    override = override or ScenarioOverride()
    return ControlParameters.from_angle(
        d=override.d if override.d is not None else template.d,
        v_hat=override.v_hat if override.v_hat is not None else template.v_hat,
        a=override.angle if override.angle is not None else template.angle,
    )


def make_seed(
    kind: ScenarioKind, override: Optional[ScenarioOverride] = None
) -> Tuple[ScenarioSpec, ControlParameters]:
    """Seed scenario of a kind: the ScenarioSpec plus parameters that produce a determined collision"""
    return build_spec(kind, override), seed_parameters(kind, override)


def validate_seed(spec: ScenarioSpec, params: ControlParameters, sim: Optional[SimConfig] = None) -> bool:
    """True when the pair collides in ground truth within the horizon"""
    trace = simulate(spec, params, sim or SimConfig())
    valid = trace.first_contact is not None
    if not valid:
        logger.debug(f"{spec.kind.value}: no contact within horizon for d={params.d}, v_hat={params.v_hat}, a={params.a}")
    return valid
