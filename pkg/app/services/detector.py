"""
Collision Detector - exact ground truth and the defect-injected built-in detector
"""
from typing import Dict, Optional

from app.models import DefectModel
from app.services.geometry import EPS_AREA
from app.services.simulator import Trace


def ground_truth(trace: Trace) -> Optional[int]:
    """Index of the first frame with positive overlap area"""
    for index, frame in enumerate(trace.frames):
        if frame.overlap_area > EPS_AREA:
            return index
    return None


def builtin_cd(trace: Trace, defect: DefectModel) -> bool:
    """
    Built-in detector verdict. Only every k-th frame is inspected, and a
    contact counts only when it is deep enough and closing fast enough.
    """
    k = defect.sample_period
    for index in range(0, len(trace.frames), k):
        frame = trace.frames[index]
        if not frame.gt_overlap:
            continue
        if frame.penetration >= defect.min_penetration and frame.closing_speed >= defect.min_impact_speed:
            return True
    return False


class CollisionDetector:
    def __init__(self, defect: Optional[DefectModel] = None):
        self.defect = defect or DefectModel()

    def check(self, trace: Trace) -> Dict:
        """Both verdicts for one trace"""
        contact = ground_truth(trace)
        reported = builtin_cd(trace, self.defect)
        report = {
            "ground_truth_frame": contact,
            "ground_truth_time": trace.frames[contact].t if contact is not None else None,
            "builtin_reported": reported,
            "defect": self.defect.model_dump(),
            "summary": "No contact",
        }
        if contact is not None:
            report["summary"] = "Contact reported" if reported else "Contact ignored by built-in detector"
        elif reported:
            report["summary"] = "Phantom report"
        return report
