import math
from enum import Enum, IntEnum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, computed_field, field_validator, model_validator

from app.services.geometry import OrientedBox, make_box, overlaps

# Collision distance and speed ranges of the control parameters
D_MIN = 2.0
D_MAX = 7.0
V_MAX = 50.0
RANGE_TOL = 1e-9


class ExitStatus(IntEnum):
    SUCCESS = 0
    CONFIG_ERROR = 1
    IO_ERROR = 2
    INTERNAL_ERROR = 3


class ScenarioKind(str, Enum):
    FLB = "FLB"
    FLV = "FLV"
    LC = "LC"
    INC = "InC"
    PSF = "PSF"
    PCF = "PCF"


class ActorRole(str, Enum):
    EV = "EV"
    NPC = "NPC"


class BehaviorKind(str, Enum):
    CRUISE = "cruise"
    CROSSING = "crossing"
    STATIC = "static"


class ScenarioType(str, Enum):
    IC = "IC"
    DC = "DC"
    NC = "NC"
    FP = "FP"


class MutatorKind(str, Enum):
    GUIDED = "guided"
    RANDOM = "random"
    NC_START = "nc_start"


class AngleMode(str, Enum):
    SCALAR = "scalar"
    PER_AXIS = "per_axis"


class MutationAxis(str, Enum):
    DISTANCE = "distance"
    SPEED = "speed"
    ANGLE_POS = "angle+"
    ANGLE_NEG = "angle-"
    ANGLE_LONG = "angle_long"


def check_distance(value: float) -> float:
    if not (D_MIN - RANGE_TOL <= value <= D_MAX + RANGE_TOL):
        raise ValueError(f"collision distance {value} outside range 2..7")
    return value


def check_speed(value: float) -> float:
    if not (0.0 < value <= V_MAX + RANGE_TOL):
        raise ValueError(f"collision speed {value} outside range (0, 50]")
    return value


def check_angle(value: float) -> float:
    if not (-1.0 - RANGE_TOL <= value <= 1.0 + RANGE_TOL):
        raise ValueError(f"collision angle {value} outside range -1..1")
    return value


# ---------------------------------------------------------------------------
# Scenario description
# ---------------------------------------------------------------------------

class Pose(BaseModel):
    x: float
    y: float
    yaw: float = 0.0

    class Config:
        frozen = True


class Behavior(BaseModel):
    kind: BehaviorKind
    speed: float = Field(0.0, ge=0.0)
    # heading of travel in radians; only used by crossing actors
    direction: Optional[float] = None

    class Config:
        frozen = True

    @model_validator(mode="after")
    def crossing_needs_direction(self):
        if self.kind == BehaviorKind.CROSSING and self.direction is None:
            raise ValueError("crossing behavior needs a direction")
        if self.kind == BehaviorKind.STATIC and self.speed != 0.0:
            raise ValueError("static behavior cannot have a speed")
        return self

    def heading(self, yaw: float) -> float:
        if self.kind == BehaviorKind.CROSSING:
            return self.direction
        return yaw


class ActorSpec(BaseModel):
    role: ActorRole
    half_length: float = Field(..., gt=0.0)
    half_width: float = Field(..., gt=0.0)
    pose: Pose
    behavior: Behavior

    class Config:
        frozen = True

    def box(self) -> OrientedBox:
        return make_box(self.pose.x, self.pose.y, self.half_length, self.half_width, self.pose.yaw)


class ScenarioSpec(BaseModel):
    kind: ScenarioKind
    ev: ActorSpec
    npc: ActorSpec
    lane_width: float = Field(3.5, gt=0.0)
    # center-to-center along the EV travel axis
    initial_gap: float

    class Config:
        frozen = True
        json_schema_extra = {
            "example": {
                "kind": "FLV",
                "ev": {
                    "role": "EV", "half_length": 2.3, "half_width": 0.95,
                    "pose": {"x": 0.0, "y": 0.0, "yaw": 0.0},
                    "behavior": {"kind": "cruise", "speed": 20.0},
                },
                "npc": {
                    "role": "NPC", "half_length": 2.3, "half_width": 0.95,
                    "pose": {"x": 30.0, "y": 0.0, "yaw": 0.0},
                    "behavior": {"kind": "cruise", "speed": 10.0},
                },
                "lane_width": 3.5,
                "initial_gap": 30.0,
            }
        }

    @model_validator(mode="after")
    def check_actors(self):
        if self.ev.role != ActorRole.EV or self.npc.role != ActorRole.NPC:
            raise ValueError("scenario needs one EV and one NPC")
        if self.ev.behavior.kind != BehaviorKind.CRUISE:
            raise ValueError("EV behavior must be cruise")
        if self.initial_gap <= D_MAX:
            raise ValueError(f"initial gap {self.initial_gap} must exceed the 7 m trigger range")
        if overlaps(self.ev.box(), self.npc.box()):
            raise ValueError("EV and NPC overlap at t=0")
        return self


class ScenarioOverride(BaseModel):
    """Per-kind adjustments accepted from the campaign config"""
    ev_speed: Optional[float] = Field(None, gt=0.0, le=V_MAX)
    npc_speed: Optional[float] = Field(None, ge=0.0)
    npc_offset: Optional[float] = None
    npc_half_length: Optional[float] = Field(None, gt=0.0)
    npc_half_width: Optional[float] = Field(None, gt=0.0)
    d: Optional[float] = None
    v_hat: Optional[float] = None
    angle: Optional[float] = None

    @field_validator("d")
    @classmethod
    def distance_in_range(cls, v):
        return v if v is None else check_distance(v)

    @field_validator("v_hat")
    @classmethod
    def speed_in_range(cls, v):
        return v if v is None else check_speed(v)

    @field_validator("angle")
    @classmethod
    def angle_in_range(cls, v):
        return v if v is None else check_angle(v)


class ControlParameters(BaseModel):
    """The mutated triple: collision distance, collision speed and collision angle"""
    d: float
    v_hat: float
    theta_long: float = 1.0
    theta_lat: float = 0.0

    class Config:
        frozen = True
        json_schema_extra = {
            "example": {"d": 2.0, "v_hat": 20.0, "theta_long": 1.0, "theta_lat": 0.0}
        }

    @field_validator("d")
    @classmethod
    def distance_in_range(cls, v):
        return check_distance(v)

    @field_validator("v_hat")
    @classmethod
    def speed_in_range(cls, v):
        return check_speed(v)

    @field_validator("theta_long")
    @classmethod
    def long_component_positive(cls, v):
        if not (0.0 < v <= 1.0 + RANGE_TOL):
            raise ValueError(f"theta_long {v} outside range (0, 1]")
        return v

    @field_validator("theta_lat")
    @classmethod
    def lat_component_in_range(cls, v):
        if not (-1.0 - RANGE_TOL <= v <= 1.0 + RANGE_TOL):
            raise ValueError(f"theta_lat {v} outside range -1..1")
        return v

    @computed_field
    @property
    def a(self) -> float:
        value = math.atan2(self.theta_lat, self.theta_long) / (math.pi / 2.0)
        return round(max(-1.0, min(1.0, value)), 12)

    @property
    def heading_offset(self) -> float:
        """EV heading change applied at the trigger, in radians"""
        return math.atan2(self.theta_lat, self.theta_long)

    @classmethod
    def from_angle(cls, d: float, v_hat: float, a: float) -> "ControlParameters":
        a = check_angle(a)
        a = max(-1.0, min(1.0, a))
        half_turn = a * math.pi / 2.0
        return cls(d=d, v_hat=v_hat, theta_long=math.cos(half_turn), theta_lat=math.sin(half_turn))

    def replace(self, **changes) -> "ControlParameters":
        values = self.model_dump(exclude={"a"})
        values.update(changes)
        return ControlParameters(**values)


# ---------------------------------------------------------------------------
# Simulation, detection and oracle configuration
# ---------------------------------------------------------------------------

class SimConfig(BaseModel):
    dt: float = Field(0.01, gt=0.0)
    horizon: float = Field(15.0, gt=0.0)
    settle_frames: int = Field(20, ge=0)

    class Config:
        frozen = True

    @model_validator(mode="after")
    def horizon_covers_steps(self):
        if self.horizon < 10 * self.dt:
            raise ValueError(f"horizon {self.horizon} shorter than 10 steps of dt={self.dt}")
        return self

    @property
    def max_frames(self) -> int:
        return int(round(self.horizon / self.dt))


class DefectModel(BaseModel):
    """Injected imperfections of the built-in collision detector"""
    sample_period: int = Field(5, ge=1)
    min_penetration: float = Field(0.05, ge=0.0)
    min_impact_speed: float = Field(0.5, ge=0.0)

    class Config:
        frozen = True

    @classmethod
    def perfect(cls) -> "DefectModel":
        return cls(sample_period=1, min_penetration=0.0, min_impact_speed=0.0)

    @classmethod
    def tunneling(cls) -> "DefectModel":
        return cls(sample_period=10, min_penetration=0.0, min_impact_speed=0.0)

    @classmethod
    def graze(cls) -> "DefectModel":
        return cls(sample_period=1, min_penetration=0.05, min_impact_speed=0.5)


class OracleConfig(BaseModel):
    # 0 means strictly positive overlap area
    t_bbox: float = Field(0.0, ge=0.0, lt=1.0)

    class Config:
        frozen = True


# ---------------------------------------------------------------------------
# Fuzzing campaign
# ---------------------------------------------------------------------------

def grid(lo: float, hi: float, step: float) -> List[float]:
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 9) for i in range(count)]


class SearchPlan(BaseModel):
    distance_step: float = Field(1.0, gt=0.0)
    speed_step: float = Field(1.0, gt=0.0)
    distance_schedule: Optional[List[float]] = None
    speed_schedule: Optional[List[float]] = None
    speed_floor: float = Field(2.0, gt=0.0, le=V_MAX)
    angle_step_long: float = Field(0.04, gt=0.0)
    angle_step_lat: float = Field(0.03, gt=0.0)
    angle_mode: AngleMode = AngleMode.SCALAR
    k_nc: int = Field(3, ge=1)

    @model_validator(mode="after")
    def check_schedules(self):
        for name, schedule, check in (
            ("distance_schedule", self.distance_schedule, check_distance),
            ("speed_schedule", self.speed_schedule, check_speed),
        ):
            if schedule is None:
                continue
            if not schedule:
                raise ValueError(f"{name} must not be empty")
            for value in schedule:
                check(value)
            if any(b <= a for a, b in zip(schedule, schedule[1:])):
                raise ValueError(f"{name} must be strictly ascending")
        return self

    @property
    def distances(self) -> List[float]:
        if self.distance_schedule is not None:
            return list(self.distance_schedule)
        return grid(D_MIN, D_MAX, self.distance_step)

    @property
    def speeds(self) -> List[float]:
        if self.speed_schedule is not None:
            return list(self.speed_schedule)
        return grid(self.speed_floor, V_MAX, self.speed_step)

    @property
    def distance_range(self) -> tuple:
        distances = self.distances
        return distances[0], distances[-1]

    @property
    def speed_range(self) -> tuple:
        speeds = self.speeds
        return speeds[0], speeds[-1]


class CampaignConfig(BaseModel):
    seed_kinds: List[ScenarioKind] = Field(default_factory=lambda: list(ScenarioKind))
    mutator: MutatorKind = MutatorKind.GUIDED
    budget: int = Field(1000, ge=0)
    # only Random and NCStart draw from it
    rng_seed: int = Field(0, ge=0, lt=2 ** 64)
    plans: Dict[ScenarioKind, SearchPlan] = Field(default_factory=dict)
    scenarios: Dict[ScenarioKind, ScenarioOverride] = Field(default_factory=dict)
    defect: DefectModel = Field(default_factory=DefectModel)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    sim: SimConfig = Field(default_factory=SimConfig)

    class Config:
        json_schema_extra = {
            "example": {
                "seed_kinds": ["FLV", "PSF"],
                "mutator": "guided",
                "budget": 500,
                "plans": {"FLV": {"distance_schedule": [5, 6, 7]}},
                "defect": {"sample_period": 5, "min_penetration": 0.05, "min_impact_speed": 0.5},
            }
        }

    @field_validator("seed_kinds")
    @classmethod
    def kinds_unique(cls, v):
        if not v:
            raise ValueError("seed_kinds must not be empty")
        if len(set(v)) != len(v):
            raise ValueError("seed_kinds must not repeat")
        return v


# ---------------------------------------------------------------------------
# Records and reports
# ---------------------------------------------------------------------------

class BucketLabels(BaseModel):
    distance: str
    speed: str
    angle: str

    class Config:
        frozen = True


class CategoryLabel(BaseModel):
    distance: str
    speed: str
    angle: str

    class Config:
        frozen = True


class OutcomeRecord(BaseModel):
    ordinal: int
    kind: ScenarioKind
    mutator: MutatorKind
    branch: str
    params: ControlParameters
    scenario_type: ScenarioType
    first_contact_time: Optional[float] = None
    trigger_time: Optional[float] = None
    # cumulative simulated seconds of this kind's stream, this execution included
    clock: float
    buckets: BucketLabels
    category: CategoryLabel

    class Config:
        frozen = True


class CampaignManifest(BaseModel):
    app_version: str
    config_digest: str
    config: CampaignConfig
    mutator: MutatorKind
    budget: int
    budget_used: int
    totals: Dict[str, int]
    totals_by_kind: Dict[str, Dict[str, int]]
    first_ics_clock: Dict[str, Optional[float]]
    created_at: str
    wall_clock_seconds: float


class BucketStat(BaseModel):
    axis: str
    bucket: str
    executions: int = 0
    ics: int = 0
    dc: int = 0
    nc: int = 0
    fp: int = 0

    @computed_field
    @property
    def collisions(self) -> int:
        return self.ics + self.dc

    @computed_field
    @property
    def sr(self) -> Optional[float]:
        if self.collisions == 0:
            return None
        return self.ics / self.collisions


class CrossCell(BucketStat):
    row: str
    col: str


class CrossMatrix(BaseModel):
    row_axis: str
    col_axis: str
    cells: List[CrossCell]


class CategoryRow(BaseModel):
    kind: ScenarioKind
    distance: str
    speed: str
    angle: str
    count: int
    first_clock: float
    mean_clock: float


class CampaignSummary(BaseModel):
    executions: int
    ics: int
    dc: int
    nc: int
    fp: int
    proportion: Optional[float] = None
    mean_time_to_ics: Dict[str, float] = Field(default_factory=dict)


class SRReport(BaseModel):
    axes: Dict[str, List[BucketStat]]
    cross: List[CrossMatrix]
    summary: CampaignSummary


class ThresholdResult(BaseModel):
    threshold: float
    tp: int
    fp: int
    fn: int
    precision: Optional[float] = None
    recall: Optional[float] = None


class StepSweepResult(BaseModel):
    step: float
    mean_ics: float
    trial_counts: List[int]
