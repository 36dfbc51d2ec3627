"""
Unit tests for the fixed-step simulator.
"""
import json
import unittest

from app.models import ControlParameters, ScenarioKind, ScenarioOverride, SimConfig
from app.services.geometry import center_distance, overlaps, penetration_depth
from app.services.scenario import build_spec, make_seed
from app.services.simulator import iter_trace_jsonl, simulate


class TestSimulate(unittest.TestCase):
    def test_follow_leading_vehicle_contact_time(self):
        spec, params = make_seed(ScenarioKind.FLV)
        trace = simulate(spec, params, SimConfig())
        # (30 - 4.6) / 10 closing speed; touching frames do not count
        self.assertEqual(trace.first_contact, 255)
        self.assertAlmostEqual(trace.first_contact_time, 2.54, delta=0.01 + 1e-9)

    def test_stops_after_settle_frames(self):
        spec, params = make_seed(ScenarioKind.FLV)
        trace = simulate(spec, params, SimConfig(settle_frames=7))
        self.assertEqual(len(trace.frames), trace.first_contact + 8)

    def test_deterministic(self):
        for kind in ScenarioKind:
            spec, params = make_seed(kind)
            first = list(iter_trace_jsonl(simulate(spec, params, SimConfig())))
            second = list(iter_trace_jsonl(simulate(spec, params, SimConfig())))
            self.assertEqual(first, second)

    def test_dt_refinement_stability(self):
        for kind in ScenarioKind:
            with self.subTest(kind=kind):
                spec, params = make_seed(kind)
                coarse = simulate(spec, params, SimConfig(dt=0.01))
                fine = simulate(spec, params, SimConfig(dt=0.005))
                self.assertIsNotNone(coarse.first_contact_time)
                self.assertIsNotNone(fine.first_contact_time)
                self.assertLessEqual(abs(coarse.first_contact_time - fine.first_contact_time), 2 * 0.01 + 1e-9)

    def test_full_veer_past_static_pedestrian(self):
        spec, _ = make_seed(ScenarioKind.PSF)
        trace = simulate(spec, ControlParameters.from_angle(7.0, 20.0, 1.0), SimConfig())
        self.assertIsNotNone(trace.trigger_frame)
        self.assertIsNone(trace.first_contact)

    def test_unreachable_npc_never_triggers(self):
        spec = build_spec(ScenarioKind.PSF, ScenarioOverride(npc_offset=500.0))
        _, params = make_seed(ScenarioKind.PSF)
        trace = simulate(spec, params, SimConfig())
        self.assertIsNone(trace.trigger_frame)
        self.assertIsNone(trace.first_contact)
        self.assertEqual(len(trace.frames), SimConfig().max_frames + 1)

    def test_trigger_monotone_in_distance(self):
        for kind in (ScenarioKind.FLV, ScenarioKind.PSF, ScenarioKind.LC):
            spec, seed = make_seed(kind)
            previous = None
            for d in (2.0, 3.0, 4.0, 5.0, 6.0, 7.0):
                trace = simulate(spec, seed.replace(d=d), SimConfig())
                if previous is not None:
                    self.assertIsNotNone(trace.trigger_frame)
                    self.assertLessEqual(trace.trigger_frame, previous)
                if trace.trigger_frame is not None:
                    previous = trace.trigger_frame

    def test_trigger_applies_speed_and_heading(self):
        spec, _ = make_seed(ScenarioKind.PSF)
        params = ControlParameters.from_angle(7.0, 30.0, 0.5)
        trace = simulate(spec, params, SimConfig())
        n = trace.trigger_frame
        frame = trace.frames[n]
        self.assertLessEqual(center_distance(frame.ev_box, frame.npc_box), 7.0)
        self.assertGreater(center_distance(trace.frames[n - 1].ev_box, trace.frames[n - 1].npc_box), 7.0)
        self.assertAlmostEqual(frame.ev_box.yaw, params.heading_offset, places=12)
        step = trace.frames[n + 1].ev_box.center.x - frame.ev_box.center.x
        self.assertAlmostEqual(step, 30.0 * 0.01 * 0.7071067811865476, places=9)

    def test_frame_invariants(self):
        for kind in ScenarioKind:
            spec, params = make_seed(kind)
            trace = simulate(spec, params, SimConfig())
            for frame in trace.frames[::7] + trace.frames[trace.first_contact:]:
                self.assertEqual(frame.gt_overlap, overlaps(frame.ev_box, frame.npc_box))
                self.assertEqual(frame.penetration, penetration_depth(frame.ev_box, frame.npc_box))
                self.assertGreaterEqual(frame.closing_speed, 0.0)
            self.assertTrue(trace.frames[trace.first_contact].gt_overlap)
            self.assertFalse(any(f.gt_overlap for f in trace.frames[:trace.first_contact]))

    def test_trace_export_one_frame_per_line(self):
        spec, params = make_seed(ScenarioKind.PCF)
        trace = simulate(spec, params, SimConfig())
        lines = list(iter_trace_jsonl(trace))
        self.assertEqual(len(lines), len(trace.frames))
        row = json.loads(lines[trace.first_contact])
        self.assertTrue(row["gt_overlap"])
        self.assertEqual(row["index"], trace.first_contact)


if __name__ == "__main__":
    unittest.main()
