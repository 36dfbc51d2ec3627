"""
End-to-end tests of the command-line entry point.
"""
import contextlib
import csv
import hashlib
import io
import json
import os
import tempfile
import unittest

from app.main import main

SMALL_CAMPAIGN = {
    "seed_kinds": ["FLV", "PSF"],
    "mutator": "guided",
    "budget": 50,
    "rng_seed": 7,
    "plans": {"FLV": {"distance_schedule": [5.0], "speed_schedule": [20.0, 35.0]}},
}

REPLAY_SUMMARIES = {
    "IC": "Contact ignored by built-in detector",
    "DC": "Contact reported",
    "NC": "No contact",
}


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, *parts):
        return os.path.join(self.tmp.name, *parts)

    def write_config(self, document, name="campaign.json"):
        with open(self.path(name), "w") as f:
            json.dump(document, f)
        return self.path(name)

    def invoke(self, *argv):
        stdout, stderr = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            status = main(list(argv))
        self.last_stderr = stderr.getvalue()
        return status, stdout.getvalue()

    def run_campaign(self, out="out", document=None):
        config = self.write_config(document or SMALL_CAMPAIGN)
        return self.invoke("run", "--config", config, "--out", self.path(out), "--workers", "1")

    def read_lines(self, *parts):
        with open(self.path(*parts)) as f:
            return f.read().splitlines()


class TestRun(CliTestCase):
    def test_run_writes_results(self):
        status, output = self.run_campaign()
        self.assertEqual(status, 0)
        self.assertEqual(len(self.read_lines("out", "records.jsonl")), 50)
        for name in ("manifest.json", "sr_report.csv", "categories.csv"):
            self.assertTrue(os.path.exists(self.path("out", name)), name)
        with open(self.path("out", "manifest.json")) as f:
            manifest = json.load(f)
        self.assertEqual(manifest["budget_used"], 50)
        self.assertIn("FLV: executions=", output)
        self.assertIn("PSF: executions=", output)

    def test_rerun_is_byte_identical(self):
        self.run_campaign("first")
        self.run_campaign("second")
        with open(self.path("first", "records.jsonl"), "rb") as a, open(self.path("second", "records.jsonl"), "rb") as b:
            self.assertEqual(a.read(), b.read())

    def test_config_digest_follows_config_bytes(self):
        text = json.dumps(dict(SMALL_CAMPAIGN, budget=5))
        digests = {}
        for name, content in (("same_a", text), ("same_b", text), ("spaced", text + " ")):
            with open(self.path(f"{name}.json"), "w") as f:
                f.write(content)
            status, _ = self.invoke("run", "--config", self.path(f"{name}.json"), "--out", self.path(name))
            self.assertEqual(status, 0)
            with open(self.path(name, "manifest.json")) as f:
                digests[name] = json.load(f)["config_digest"]
        self.assertEqual(digests["same_a"], digests["same_b"])
        self.assertNotEqual(digests["same_a"], digests["spaced"])
        self.assertEqual(digests["same_a"], hashlib.sha256(text.encode("utf-8")).hexdigest())

    def test_out_of_range_parameter(self):
        config = self.write_config({"scenarios": {"FLV": {"d": 9}}})
        with self.assertLogs("app.main", "ERROR") as logs:
            status, _ = self.invoke("run", "--config", config, "--out", self.path("out"))
        self.assertEqual(status, 1)
        self.assertIn("2..7", "\n".join(logs.output))

    def test_malformed_json(self):
        with open(self.path("broken.json"), "w") as f:
            f.write('{"budget": 10,')
        with self.assertLogs("app.main", "ERROR"):
            status, _ = self.invoke("run", "--config", self.path("broken.json"), "--out", self.path("out"))
        self.assertEqual(status, 1)
        self.assertIn("error:", self.last_stderr)
        self.assertIn("broken.json:1:", self.last_stderr)

    def test_missing_config(self):
        with self.assertLogs("app.main", "ERROR"):
            status, _ = self.invoke("run", "--config", self.path("absent.json"), "--out", self.path("out"))
        self.assertEqual(status, 2)
        self.assertIn("error:", self.last_stderr)

    def test_unknown_subcommand(self):
        with self.assertLogs("app.main", "ERROR"):
            status, _ = self.invoke("fly")
        self.assertEqual(status, 1)


class TestReplay(CliTestCase):
    def setUp(self):
        super().setUp()
        self.run_campaign()
        self.log = self.path("out", "records.jsonl")

    def test_replay_matches_log(self):
        for ordinal in (0, 17, 49):
            status, output = self.invoke("replay", "--log", self.log, "--ordinal", str(ordinal))
            self.assertEqual(status, 0)
            verdict_line, detection_line = output.strip().splitlines()
            logged, replayed = verdict_line.split(": logged ")[1].split(", replayed ")
            self.assertEqual(logged, replayed)
            self.assertIn(REPLAY_SUMMARIES[replayed], detection_line)
            self.assertTrue(os.path.exists(self.path("out", f"replay_{ordinal}.jsonl")))

    def test_perfect_detector_never_ignores(self):
        for ordinal in range(0, 50, 5):
            status, output = self.invoke(
                "replay", "--log", self.log, "--ordinal", str(ordinal), "--perfect-detector",
                "--out", self.path("perfect"),
            )
            self.assertEqual(status, 0)
            self.assertNotIn("replayed IC", output)

    def test_ordinal_out_of_range(self):
        with self.assertLogs("app.main", "ERROR"):
            status, _ = self.invoke("replay", "--log", self.log, "--ordinal", "50")
        self.assertEqual(status, 2)

    def test_missing_log(self):
        with self.assertLogs("app.main", "ERROR"):
            status, _ = self.invoke("replay", "--log", self.path("none.jsonl"), "--ordinal", "0")
        self.assertEqual(status, 2)


class TestReport(CliTestCase):
    def test_csv_and_svg(self):
        self.run_campaign()
        log = self.path("out", "records.jsonl")
        status, _ = self.invoke("report", "--log", log, "--format", "csv", "--out", self.path("sr.csv"))
        self.assertEqual(status, 0)
        self.assertEqual(self.read_lines("sr.csv")[0], "axis,bucket,executions,collisions,ics,sr_percent")
        status, _ = self.invoke("report", "--log", log, "--format", "svg")
        self.assertEqual(status, 0)
        self.assertTrue(os.path.exists(self.path("out", "sr_report.svg")))


class TestSweeps(CliTestCase):
    def test_threshold_sweep(self):
        out = self.path("thresholds.csv")
        status, _ = self.invoke("sweep-threshold", "--thresholds", "0,0.05,0.1,0.2,0.4", "--out", out)
        self.assertEqual(status, 0)
        with open(out, newline="") as f:
            rows = list(csv.DictReader(f))
        self.assertEqual([float(r["threshold"]) for r in rows], [0.0, 0.05, 0.1, 0.2, 0.4])

    def test_empty_threshold_list(self):
        with self.assertLogs("app.main", "ERROR"):
            status, _ = self.invoke("sweep-threshold", "--thresholds", " , ", "--out", self.path("t.csv"))
        self.assertEqual(status, 1)

    def test_step_sweep_single_step(self):
        out = self.path("steps.csv")
        status, _ = self.invoke(
            "sweep-step", "--kind", "PSF", "--axis", "angle", "--steps", "0.5", "--trials", "2", "--out", out,
        )
        self.assertEqual(status, 0)
        with open(out, newline="") as f:
            rows = list(csv.DictReader(f))
        self.assertEqual(len(rows), 1)
        self.assertEqual(len(rows[0]["trial_counts"].split()), 2)


if __name__ == "__main__":
    unittest.main()
