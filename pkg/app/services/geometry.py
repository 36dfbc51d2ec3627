"""
Geometry - oriented bounding box primitives for contact checks
"""
import math
from typing import List, NamedTuple, Tuple

# Overlap area below this counts as no contact
EPS_AREA = 1e-9


class Point2(NamedTuple):
    x: float
    y: float


class OrientedBox(NamedTuple):
    center: Point2
    half_length: float
    half_width: float
    yaw: float

    @property
    def area(self) -> float:
        return 4.0 * self.half_length * self.half_width


def normalize_yaw(yaw: float) -> float:
    """Wrap an angle into [-pi, pi)"""
    wrapped = math.fmod(yaw + math.pi, 2.0 * math.pi)
    if wrapped < 0.0:
        wrapped += 2.0 * math.pi
    wrapped -= math.pi
    if wrapped >= math.pi:
        wrapped = -math.pi
    return wrapped


def make_box(x: float, y: float, half_length: float, half_width: float, yaw: float = 0.0) -> OrientedBox:
    if not all(math.isfinite(v) for v in (x, y, half_length, half_width, yaw)):
        raise ValueError(f"non-finite box value: ({x}, {y}, {half_length}, {half_width}, {yaw})")
    if half_length <= 0.0 or half_width <= 0.0:
        raise ValueError(f"box half extents must be positive, got {half_length} x {half_width}")
    return OrientedBox(Point2(x, y), half_length, half_width, normalize_yaw(yaw))


def corners(box: OrientedBox) -> List[Point2]:
    """Box corners in counter-clockwise order"""
    c, s = math.cos(box.yaw), math.sin(box.yaw)
    cx, cy = box.center
    local = (
        (box.half_length, -box.half_width),
        (box.half_length, box.half_width),
        (-box.half_length, box.half_width),
        (-box.half_length, -box.half_width),
    )
    return [Point2(cx + lx * c - ly * s, cy + lx * s + ly * c) for lx, ly in local]


def _axes(box: OrientedBox) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    c, s = math.cos(box.yaw), math.sin(box.yaw)
    return (c, s), (-s, c)


def _project(points: List[Point2], axis: Tuple[float, float]) -> Tuple[float, float]:
    dots = [p.x * axis[0] + p.y * axis[1] for p in points]
    return min(dots), max(dots)


def _axis_intervals(a: OrientedBox, b: OrientedBox) -> List[Tuple[float, float, float, float]]:
    """Projections (lo_a, hi_a, lo_b, hi_b) on each of the four face normals"""
    pa, pb = corners(a), corners(b)
    return [_project(pa, axis) + _project(pb, axis) for axis in _axes(a) + _axes(b)]


def _axis_overlaps(a: OrientedBox, b: OrientedBox) -> List[float]:
    """Projection overlap length per axis (negative when separated)"""
    return [min(hi_a, hi_b) - max(lo_a, lo_b) for lo_a, hi_a, lo_b, hi_b in _axis_intervals(a, b)]


def _axis_pushouts(a: OrientedBox, b: OrientedBox) -> List[float]:
    """Shortest push along each axis that separates the projections, either direction"""
    return [min(hi_a - lo_b, hi_b - lo_a) for lo_a, hi_a, lo_b, hi_b in _axis_intervals(a, b)]


def _far_apart(a: OrientedBox, b: OrientedBox) -> bool:
    reach = math.hypot(a.half_length, a.half_width) + math.hypot(b.half_length, b.half_width)
    return center_distance(a, b) > reach


def _inside(p: Point2, edge_start: Point2, edge_end: Point2) -> bool:
    cross = (edge_end.x - edge_start.x) * (p.y - edge_start.y) - (edge_end.y - edge_start.y) * (p.x - edge_start.x)
    return cross >= 0.0


def _intersect(s: Point2, e: Point2, cp1: Point2, cp2: Point2) -> Point2:
    dx, dy = e.x - s.x, e.y - s.y
    ex, ey = cp2.x - cp1.x, cp2.y - cp1.y
    denom = dx * ey - dy * ex
    if denom == 0.0:
        return e
    t = ((cp1.x - s.x) * ey - (cp1.y - s.y) * ex) / denom
    return Point2(s.x + t * dx, s.y + t * dy)


def clip_polygon(subject: List[Point2], clipper: List[Point2]) -> List[Point2]:
    """Sutherland-Hodgman clipping of a polygon against a convex CCW clipper"""
    output = list(subject)
    cp1 = clipper[-1]
    for cp2 in clipper:
        candidates = output
        output = []
        if not candidates:
            break
        s = candidates[-1]
        for e in candidates:
            if _inside(e, cp1, cp2):
                if not _inside(s, cp1, cp2):
                    output.append(_intersect(s, e, cp1, cp2))
                output.append(e)
            elif _inside(s, cp1, cp2):
                output.append(_intersect(s, e, cp1, cp2))
            s = e
        cp1 = cp2
    return output


def polygon_area(polygon: List[Point2]) -> float:
    total = 0.0
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return abs(total) / 2.0


def intersection_area(a: OrientedBox, b: OrientedBox) -> float:
    if _far_apart(a, b):
        return 0.0
    # fixed argument order keeps the result exactly symmetric
    if b < a:
        a, b = b, a
    clipped = clip_polygon(corners(a), corners(b))
    if len(clipped) < 3:
        return 0.0
    return min(polygon_area(clipped), a.area, b.area)


def overlaps(a: OrientedBox, b: OrientedBox) -> bool:
    """Separating-axis test confirmed by a positive intersection area; touching boxes do not overlap"""
    if _far_apart(a, b):
        return False
    if any(length <= 0.0 for length in _axis_overlaps(a, b)):
        return False
    return intersection_area(a, b) > EPS_AREA


def penetration_depth(a: OrientedBox, b: OrientedBox) -> float:
    if not overlaps(a, b):
        return 0.0
    return min(_axis_pushouts(a, b))


def iou(a: OrientedBox, b: OrientedBox) -> float:
    inter = intersection_area(a, b)
    if inter <= 0.0:
        return 0.0
    union = a.area + b.area - inter
    return max(0.0, min(1.0, inter / union))


def center_distance(a: OrientedBox, b: OrientedBox) -> float:
    return math.hypot(b.center.x - a.center.x, b.center.y - a.center.y)
