"""
Simulator - fixed-step kinematic execution of one scenario
"""
import json
import math
from dataclasses import dataclass, field
from typing import Iterator, List, NamedTuple, Optional

from app.exceptions import SimulationError
from app.models import ControlParameters, ScenarioSpec, SimConfig
from app.services.geometry import (
    OrientedBox,
    center_distance,
    intersection_area,
    iou,
    make_box,
    overlaps,
    penetration_depth,
)


class Frame(NamedTuple):
    t: float
    ev_box: OrientedBox
    npc_box: OrientedBox
    gt_overlap: bool
    penetration: float
    # relative speed along the center line, 0 when receding
    closing_speed: float
    triggered: bool
    overlap_area: float
    iou: float


@dataclass(frozen=True)
class Trace:
    frames: List[Frame] = field(default_factory=list)
    first_contact: Optional[int] = None
    trigger_frame: Optional[int] = None
    dt: float = 0.01

    @property
    def first_contact_time(self) -> Optional[float]:
        if self.first_contact is None:
            return None
        return self.frames[self.first_contact].t

    @property
    def trigger_time(self) -> Optional[float]:
        if self.trigger_frame is None:
            return None
        return self.frames[self.trigger_frame].t

    @property
    def duration(self) -> float:
        """Simulated seconds covered by the trace"""
        if not self.frames:
            return 0.0
        return self.frames[-1].t + self.dt


class _Body:
    __slots__ = ("x", "y", "yaw", "heading", "speed", "half_length", "half_width")

    def __init__(self, x, y, yaw, heading, speed, half_length, half_width):
        self.x = x
        self.y = y
        self.yaw = yaw
        self.heading = heading
        self.speed = speed
        self.half_length = half_length
        self.half_width = half_width

    def box(self) -> OrientedBox:
        return make_box(self.x, self.y, self.half_length, self.half_width, self.yaw)

    def velocity(self):
        return self.speed * math.cos(self.heading), self.speed * math.sin(self.heading)

    def advance(self, dt: float):
        vx, vy = self.velocity()
        self.x += vx * dt
        self.y += vy * dt
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise SimulationError(f"non-finite actor position ({self.x}, {self.y})")


def _closing_speed(ev: _Body, npc: _Body) -> float:
    dx, dy = npc.x - ev.x, npc.y - ev.y
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        return 0.0
    (evx, evy), (nvx, nvy) = ev.velocity(), npc.velocity()
    return max(0.0, ((evx - nvx) * dx + (evy - nvy) * dy) / dist)


def simulate(spec: ScenarioSpec, params: ControlParameters, cfg: SimConfig) -> Trace:
    """
    Run one execution: the EV cruises until the center distance drops to d,
    then switches to v_hat and turns by the collision angle; the NPC follows
    its behavior throughout. Stops settle_frames after first contact or at the horizon.
    """
    ev_spec, npc_spec = spec.ev, spec.npc
    ev = _Body(
        ev_spec.pose.x, ev_spec.pose.y, ev_spec.pose.yaw, ev_spec.pose.yaw,
        ev_spec.behavior.speed, ev_spec.half_length, ev_spec.half_width,
    )
    npc = _Body(
        npc_spec.pose.x, npc_spec.pose.y, npc_spec.pose.yaw,
        npc_spec.behavior.heading(npc_spec.pose.yaw),
        npc_spec.behavior.speed, npc_spec.half_length, npc_spec.half_width,
    )
    if not all(math.isfinite(v) for v in (ev.speed, npc.speed, params.d, params.v_hat, params.heading_offset)):
        raise SimulationError("non-finite simulation input")

    frames: List[Frame] = []
    first_contact: Optional[int] = None
    trigger_frame: Optional[int] = None
    last_frame = cfg.max_frames

    for n in range(cfg.max_frames + 1):
        ev_box, npc_box = ev.box(), npc.box()
        if trigger_frame is None and center_distance(ev_box, npc_box) <= params.d:
            trigger_frame = n
            ev.speed = params.v_hat
            ev.yaw = ev_spec.pose.yaw + params.heading_offset
            ev.heading = ev.yaw
            ev_box = ev.box()

        contact = overlaps(ev_box, npc_box)
        frames.append(Frame(
            t=n * cfg.dt,
            ev_box=ev_box,
            npc_box=npc_box,
            gt_overlap=contact,
            penetration=penetration_depth(ev_box, npc_box) if contact else 0.0,
            closing_speed=_closing_speed(ev, npc),
            triggered=trigger_frame is not None,
            overlap_area=intersection_area(ev_box, npc_box) if contact else 0.0,
            iou=iou(ev_box, npc_box) if contact else 0.0,
        ))

        if contact and first_contact is None:
            first_contact = n
            last_frame = min(cfg.max_frames, n + cfg.settle_frames)
        if n >= last_frame:
            break

        ev.advance(cfg.dt)
        npc.advance(cfg.dt)

    return Trace(frames=frames, first_contact=first_contact, trigger_frame=trigger_frame, dt=cfg.dt)


def frame_to_dict(index: int, frame: Frame) -> dict:
    def box_dict(box: OrientedBox) -> dict:
        return {
            "x": box.center.x,
            "y": box.center.y,
            "half_length": box.half_length,
            "half_width": box.half_width,
            "yaw": box.yaw,
        }

    return {
        "index": index,
        "t": round(frame.t, 9),
        "ev_box": box_dict(frame.ev_box),
        "npc_box": box_dict(frame.npc_box),
        "gt_overlap": frame.gt_overlap,
        "penetration": frame.penetration,
        "closing_speed": frame.closing_speed,
        "triggered": frame.triggered,
        "overlap_area": frame.overlap_area,
        "iou": frame.iou,
    }


def iter_trace_jsonl(trace: Trace) -> Iterator[str]:
    """One JSON line per frame"""
    for index, frame in enumerate(trace.frames):
        yield json.dumps(frame_to_dict(index, frame), sort_keys=True)
