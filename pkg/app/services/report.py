"""
Report - success rates per parameter bucket, cross-factor matrices and ICS categories
"""
import csv
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from jinja2 import Environment, FileSystemLoader
from pydantic import BaseModel

from app.exceptions import ResultIOError
from app.models import (
    BucketLabels,
    BucketStat,
    CampaignSummary,
    CategoryLabel,
    CategoryRow,
    ControlParameters,
    CrossCell,
    CrossMatrix,
    OutcomeRecord,
    ScenarioKind,
    ScenarioType,
    SRReport,
)

logger = logging.getLogger(__name__)

TEMPLATE_DIR = Path(__file__).resolve().parent.parent / "templates"
CSV_COLUMNS = ["axis", "bucket", "executions", "collisions", "ics", "sr_percent"]
CATEGORY_COLUMNS = ["kind", "distance", "speed", "angle", "count", "first_clock", "mean_clock"]
AXES = ("distance", "speed", "angle")
CROSS_PAIRS = (("distance", "speed"), ("speed", "angle"), ("distance", "angle"))

# |a| at or below this is a straight-on collision
ANGLE_NEUTRAL = 0.05
BOUNDARY_TOL = 1e-9


class BucketScheme(BaseModel):
    """Upper bucket edges per axis; a value on an edge belongs to the lower bucket"""
    distance_edges: List[Tuple[float, str]] = [(3.0, "2-3"), (5.0, "4-5"), (7.0, "6-7")]
    speed_edges: List[Tuple[float, str]] = [
        (10.0, "0-10"), (20.0, "10-20"), (30.0, "20-30"), (40.0, "30-40"), (50.0, "40-50"),
    ]
    angle_centers: List[float] = [-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0]

    class Config:
        frozen = True

    def labels(self, axis: str) -> List[str]:
        if axis == "distance":
            return [label for _, label in self.distance_edges]
        if axis == "speed":
            return [label for _, label in self.speed_edges]
        return [angle_label(c) for c in self.angle_centers]


DEFAULT_SCHEME = BucketScheme()


def angle_label(center: float) -> str:
    return f"{center:g}"


def _edge_bucket(value: float, edges: Sequence[Tuple[float, str]]) -> str:
    for upper, label in edges:
        if value <= upper + BOUNDARY_TOL:
            return label
    return edges[-1][1]


def bucket(params: ControlParameters, scheme: BucketScheme = DEFAULT_SCHEME) -> BucketLabels:
    nearest = scheme.angle_centers[0]
    for center in scheme.angle_centers[1:]:
        # strict comparison sends ties to the lower center
        if abs(params.a - center) < abs(params.a - nearest):
            nearest = center
    return BucketLabels(
        distance=_edge_bucket(params.d, scheme.distance_edges),
        speed=_edge_bucket(params.v_hat, scheme.speed_edges),
        angle=angle_label(nearest),
    )


def category_of(params: ControlParameters) -> CategoryLabel:
    if params.d <= 3.0 + BOUNDARY_TOL:
        distance = "L"
    elif params.d <= 5.0 + BOUNDARY_TOL:
        distance = "M"
    else:
        distance = "F"

    if params.v_hat <= 20.0 + BOUNDARY_TOL:
        speed = "L"
    elif params.v_hat <= 40.0 + BOUNDARY_TOL:
        speed = "M"
    else:
        speed = "H"

    if params.a < -ANGLE_NEUTRAL:
        angle = "N"
    elif params.a > ANGLE_NEUTRAL:
        angle = "P"
    else:
        angle = "0"
    return CategoryLabel(distance=distance, speed=speed, angle=angle)


def _count(stat: BucketStat, scenario_type: ScenarioType):
    stat.executions += 1
    if scenario_type == ScenarioType.IC:
        stat.ics += 1
    elif scenario_type == ScenarioType.DC:
        stat.dc += 1
    elif scenario_type == ScenarioType.NC:
        stat.nc += 1
    else:
        stat.fp += 1


def success_rates(records: Sequence[OutcomeRecord], scheme: BucketScheme = DEFAULT_SCHEME) -> SRReport:
    axes: Dict[str, Dict[str, BucketStat]] = {
        axis: {label: BucketStat(axis=axis, bucket=label) for label in scheme.labels(axis)} for axis in AXES
    }
    cross: Dict[Tuple[str, str], Dict[Tuple[str, str], CrossCell]] = {}
    for row_axis, col_axis in CROSS_PAIRS:
        cross[(row_axis, col_axis)] = {
            (r, c): CrossCell(axis=f"{row_axis}x{col_axis}", bucket=f"{r}|{c}", row=r, col=c)
            for r in scheme.labels(row_axis)
            for c in scheme.labels(col_axis)
        }

    for record in records:
        labels = bucket(record.params, scheme).model_dump()
        for axis in AXES:
            _count(axes[axis][labels[axis]], record.scenario_type)
        for pair, cells in cross.items():
            _count(cells[(labels[pair[0]], labels[pair[1]])], record.scenario_type)

    return SRReport(
        axes={axis: list(stats.values()) for axis, stats in axes.items()},
        cross=[
            CrossMatrix(row_axis=pair[0], col_axis=pair[1], cells=list(cells.values()))
            for pair, cells in cross.items()
        ],
        summary=summarize(records),
    )


def category_key(kind: ScenarioKind, label: CategoryLabel) -> str:
    return f"{kind.value}:{label.distance}{label.speed}{label.angle}"


def summarize(records: Sequence[OutcomeRecord]) -> CampaignSummary:
    counts = {t: 0 for t in ScenarioType}
    for record in records:
        counts[record.scenario_type] += 1
    executions = len(records)
    rows = categorize_ics(records)
    return CampaignSummary(
        executions=executions,
        ics=counts[ScenarioType.IC],
        dc=counts[ScenarioType.DC],
        nc=counts[ScenarioType.NC],
        fp=counts[ScenarioType.FP],
        proportion=counts[ScenarioType.IC] / executions if executions else None,
        mean_time_to_ics={
            category_key(row.kind, CategoryLabel(distance=row.distance, speed=row.speed, angle=row.angle)): row.mean_clock
            for row in rows
        },
    )


_ORDER = {
    "distance": ["L", "M", "F"],
    "speed": ["L", "M", "H"],
    "angle": ["N", "0", "P"],
}


def categorize_ics(records: Iterable[OutcomeRecord]) -> List[CategoryRow]:
    """Distinct (kind, distance, speed, angle) classes of the ignored collisions"""
    groups: Dict[Tuple[ScenarioKind, str, str, str], List[float]] = {}
    for record in records:
        if record.scenario_type != ScenarioType.IC:
            continue
        label = category_of(record.params)
        groups.setdefault((record.kind, label.distance, label.speed, label.angle), []).append(record.clock)

    kinds = list(ScenarioKind)
    ordered = sorted(
        groups,
        key=lambda k: (
            kinds.index(k[0]), _ORDER["distance"].index(k[1]), _ORDER["speed"].index(k[2]), _ORDER["angle"].index(k[3]),
        ),
    )
    return [
        CategoryRow(
            kind=key[0], distance=key[1], speed=key[2], angle=key[3],
            count=len(groups[key]),
            first_clock=min(groups[key]),
            mean_clock=round(sum(groups[key]) / len(groups[key]), 9),
        )
        for key in ordered
    ]


def _sr_percent(stat: BucketStat) -> str:
    return "" if stat.sr is None else f"{stat.sr * 100:.2f}"


def report_rows(report: SRReport) -> List[Dict]:
    rows = []
    for axis in AXES:
        for stat in report.axes.get(axis, []):
            if stat.executions == 0:
                continue
            rows.append({
                "axis": axis,
                "bucket": stat.bucket,
                "executions": stat.executions,
                "collisions": stat.collisions,
                "ics": stat.ics,
                "sr_percent": _sr_percent(stat),
            })
    return rows


def _chart(report: SRReport) -> List[Dict]:
    """Bar layout per axis for the SVG template"""
    panels = []
    for index, axis in enumerate(AXES):
        stats = report.axes.get(axis, [])
        bars = []
        for position, stat in enumerate(stats):
            height = 0.0 if stat.sr is None else round(stat.sr * 160.0, 3)
            bars.append({
                "x": 60 + position * 40,
                "y": round(200.0 - height, 3),
                "height": height,
                "label": stat.bucket,
                "value": "n/a" if stat.sr is None else f"{stat.sr * 100:.1f}%",
            })
        panels.append({"axis": axis, "offset": index * 260, "bars": bars})
    return panels


def export(report: SRReport, fmt: str, out_path: Union[str, Path]) -> Path:
    path = Path(out_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            with open(path, "w", newline="") as f:
                writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, lineterminator="\n")
                writer.writeheader()
                writer.writerows(report_rows(report))
        elif fmt == "svg":
            env = Environment(loader=FileSystemLoader(str(TEMPLATE_DIR)), autoescape=True)
            template = env.get_template("sr_chart.svg.j2")
            panels = _chart(report)
            height = 260 * len(panels) + 40
            path.write_text(template.render(panels=panels, height=height, summary=report.summary))
        else:
            raise ValueError(f"unknown report format: {fmt}")
    except OSError as e:
        raise ResultIOError(f"Cannot write report {path}: {e}") from e
    logger.info(f"Report written to {path}")
    return path


def export_categories(rows: Sequence[CategoryRow], out_path: Union[str, Path]) -> Path:
    path = Path(out_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=CATEGORY_COLUMNS, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                values = row.model_dump()
                values["kind"] = row.kind.value
                writer.writerow(values)
    except OSError as e:
        raise ResultIOError(f"Cannot write categories {path}: {e}") from e
    return path
