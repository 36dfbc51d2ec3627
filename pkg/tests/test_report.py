"""
Unit tests for bucketing, success rates, categories and report export.
"""
import csv
import os
import tempfile
import unittest
import xml.etree.ElementTree as ET

from app.models import (
    CampaignConfig,
    ControlParameters,
    DefectModel,
    MutatorKind,
    OutcomeRecord,
    ScenarioKind,
    ScenarioType,
)
from app.services.fuzzer import run_campaign
from app.services.report import (
    CSV_COLUMNS,
    bucket,
    categorize_ics,
    category_of,
    export,
    export_categories,
    report_rows,
    success_rates,
)


def make_record(ordinal, scenario_type, d=2.0, v_hat=20.0, a=0.0, kind=ScenarioKind.FLV, clock=None):
    params = ControlParameters.from_angle(d, v_hat, a)
    return OutcomeRecord(
        ordinal=ordinal,
        kind=kind,
        mutator=MutatorKind.GUIDED,
        branch="test",
        params=params,
        scenario_type=scenario_type,
        clock=float(ordinal + 1) if clock is None else clock,
        buckets=bucket(params),
        category=category_of(params),
    )


class TestBuckets(unittest.TestCase):
    def test_edges(self):
        labels = bucket(ControlParameters.from_angle(3.0, 17.0, 0.6))
        self.assertEqual((labels.distance, labels.speed, labels.angle), ("2-3", "10-20", "0.5"))

    def test_boundary_goes_to_lower_bucket(self):
        self.assertEqual(bucket(ControlParameters.from_angle(5.0, 20.0, 0.0)).speed, "10-20")
        self.assertEqual(bucket(ControlParameters.from_angle(5.0, 20.0, 0.0)).distance, "4-5")
        self.assertEqual(bucket(ControlParameters.from_angle(4.0, 20.000001, 0.0)).speed, "20-30")

    def test_angle_tie_goes_to_lower_center(self):
        self.assertEqual(bucket(ControlParameters.from_angle(2.0, 20.0, 0.125)).angle, "0")
        self.assertEqual(bucket(ControlParameters.from_angle(2.0, 20.0, -0.125)).angle, "-0.25")
        self.assertEqual(bucket(ControlParameters.from_angle(2.0, 20.0, -1.0)).angle, "-1")

    def test_category(self):
        label = category_of(ControlParameters.from_angle(6.0, 25.0, 0.8))
        self.assertEqual((label.distance, label.speed, label.angle), ("F", "M", "P"))
        label = category_of(ControlParameters.from_angle(3.0, 45.0, -0.3))
        self.assertEqual((label.distance, label.speed, label.angle), ("L", "H", "N"))
        self.assertEqual(category_of(ControlParameters.from_angle(4.0, 20.0, 0.05)).angle, "0")


class TestSuccessRates(unittest.TestCase):
    def test_single_bucket_rate(self):
        records = [make_record(i, ScenarioType.IC) for i in range(3)]
        records += [make_record(3 + i, ScenarioType.DC) for i in range(9)]
        records += [make_record(12 + i, ScenarioType.NC) for i in range(4)]
        report = success_rates(records)
        stat = next(s for s in report.axes["speed"] if s.bucket == "10-20")
        self.assertEqual((stat.executions, stat.collisions, stat.ics), (16, 12, 3))
        self.assertAlmostEqual(stat.sr, 0.25)
        self.assertAlmostEqual(report.summary.proportion, 3 / 16)

    def test_no_collisions_gives_undefined_rate(self):
        report = success_rates([make_record(i, ScenarioType.NC, v_hat=5.0 + i) for i in range(10)])
        for stats in report.axes.values():
            self.assertTrue(all(s.sr is None for s in stats))
        rows = report_rows(report)
        self.assertTrue(rows)
        self.assertTrue(all(row["sr_percent"] == "" for row in rows))

    def test_perfect_detector_has_zero_rate(self):
        config = CampaignConfig(
            seed_kinds=[ScenarioKind.FLV, ScenarioKind.PSF], budget=40, defect=DefectModel.perfect()
        )
        report = success_rates(run_campaign(config, workers=1).records)
        self.assertEqual(report.summary.ics, 0)
        for stats in report.axes.values():
            self.assertTrue(all(s.sr in (None, 0.0) for s in stats))

    def test_counts_are_conserved(self):
        types = [ScenarioType.IC, ScenarioType.DC, ScenarioType.NC]
        records = [
            make_record(i, types[i % 3], d=2.0 + (i % 6), v_hat=3.0 + 4.0 * (i % 12), a=-1.0 + 0.1 * (i % 21))
            for i in range(60)
        ]
        report = success_rates(records)
        for stats in report.axes.values():
            self.assertEqual(sum(s.executions for s in stats), 60)
            self.assertEqual(sum(s.ics for s in stats), 20)
        for matrix in report.cross:
            self.assertEqual(sum(c.executions for c in matrix.cells), 60)
            for row_stat in report.axes[matrix.row_axis]:
                row_cells = [c for c in matrix.cells if c.row == row_stat.bucket]
                self.assertEqual(sum(c.executions for c in row_cells), row_stat.executions)
                self.assertEqual(sum(c.ics for c in row_cells), row_stat.ics)

    def test_logged_buckets_recompute(self):
        for record in run_campaign(CampaignConfig(seed_kinds=[ScenarioKind.LC], budget=15), workers=1).records:
            self.assertEqual(record.buckets, bucket(record.params))
            self.assertEqual(record.category, category_of(record.params))


class TestCategories(unittest.TestCase):
    def test_empty(self):
        self.assertEqual(categorize_ics([]), [])
        self.assertEqual(categorize_ics([make_record(0, ScenarioType.DC)]), [])

    def test_grouping_and_order(self):
        records = [
            make_record(0, ScenarioType.IC, kind=ScenarioKind.PSF, d=6.0, v_hat=25.0, a=0.8, clock=4.0),
            make_record(1, ScenarioType.IC, kind=ScenarioKind.PSF, d=7.0, v_hat=30.0, a=0.9, clock=8.0),
            make_record(2, ScenarioType.IC, kind=ScenarioKind.FLB, d=2.0, v_hat=10.0, a=0.0, clock=1.0),
            make_record(3, ScenarioType.DC, kind=ScenarioKind.FLB, d=2.0, v_hat=45.0, a=0.0, clock=2.0),
        ]
        rows = categorize_ics(records)
        self.assertEqual([(r.kind, r.distance, r.speed, r.angle) for r in rows], [
            (ScenarioKind.FLB, "L", "L", "0"),
            (ScenarioKind.PSF, "F", "M", "P"),
        ])
        self.assertEqual(rows[1].count, 2)
        self.assertEqual(rows[1].first_clock, 4.0)
        self.assertEqual(rows[1].mean_clock, 6.0)


class TestExport(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def records(self):
        return [
            make_record(0, ScenarioType.IC, v_hat=35.0, a=0.8),
            make_record(1, ScenarioType.DC, v_hat=35.0, a=0.0),
            make_record(2, ScenarioType.NC, d=7.0, v_hat=48.0, a=-1.0),
        ]

    def test_empty_csv_has_header_only(self):
        export(success_rates([]), "csv", self.path("empty.csv"))
        with open(self.path("empty.csv")) as f:
            self.assertEqual(f.read(), ",".join(CSV_COLUMNS) + "\n")

    def test_csv_rows(self):
        export(success_rates(self.records()), "csv", self.path("sr.csv"))
        with open(self.path("sr.csv"), newline="") as f:
            rows = list(csv.DictReader(f))
        speed = [r for r in rows if r["axis"] == "speed" and r["bucket"] == "30-40"]
        self.assertEqual(speed[0]["sr_percent"], "50.00")
        self.assertEqual(speed[0]["collisions"], "2")

    def test_csv_is_deterministic(self):
        export(success_rates(self.records()), "csv", self.path("a.csv"))
        export(success_rates(self.records()), "csv", self.path("b.csv"))
        with open(self.path("a.csv"), "rb") as a, open(self.path("b.csv"), "rb") as b:
            self.assertEqual(a.read(), b.read())

    def test_svg_is_well_formed(self):
        export(success_rates(self.records()), "svg", self.path("sr.svg"))
        root = ET.parse(self.path("sr.svg")).getroot()
        self.assertTrue(root.tag.endswith("svg"))
        self.assertTrue(root.findall(".//{http://www.w3.org/2000/svg}rect"))

    def test_unknown_format(self):
        with self.assertRaises(ValueError):
            export(success_rates([]), "pdf", self.path("sr.pdf"))

    def test_categories_csv(self):
        rows = categorize_ics(self.records())
        export_categories(rows, self.path("categories.csv"))
        with open(self.path("categories.csv"), newline="") as f:
            written = list(csv.DictReader(f))
        self.assertEqual(len(written), 1)
        self.assertEqual(written[0]["kind"], "FLV")
        self.assertEqual(written[0]["count"], "1")


if __name__ == "__main__":
    unittest.main()
