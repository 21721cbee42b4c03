import json
import os
import shutil
import tempfile
import unittest

import utils
from mvqa_core.cli import EXIT_EXTERNAL, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, main

CONFIGS = utils.get_config_root_path()
MANIFEST = os.path.join(CONFIGS, "assets", "demo_manifest.json")
OSD_FIXTURE = os.path.join(CONFIGS, "mock", "osd_tag.json")


class TestCli(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def _out(self, *parts):
        return os.path.join(self.tmp, *parts)

    def test_assets_validate(self):
        self.assertEqual(main(["assets", "validate", "--out", self.tmp]), EXIT_OK)
        self.assertTrue(os.path.isfile(self._out("tag_violations.json")))
        self.assertTrue(os.path.isfile(self._out("assets_validate.config.yaml")))
        self.assertTrue(os.path.isfile(self._out("assets_validate.log.txt")))

    def test_assets_tag(self):
        rc = main(["assets", "tag", MANIFEST, "--mock", OSD_FIXTURE, "--category", "chair",
                   "--out", self.tmp])
        self.assertEqual(rc, EXIT_OK)
        for name in ("chair_transcript.json", "drafts.json", "repaired.json", "manifest.json"):
            self.assertTrue(os.path.isfile(self._out(name)), name)
        with open(self._out("repaired.json")) as f:
            repaired = json.load(f)
        self.assertEqual(repaired[0]["category"], "chair")
        self.assertTrue(repaired[0]["repair_notes"])

    def test_assets_tag_stage_failure(self):
        rc = main(["assets", "tag", MANIFEST, "--mock", OSD_FIXTURE, "--category", "cup",
                   "--out", self.tmp])
        self.assertEqual(rc, EXIT_EXTERNAL)
        with open(self._out("cup_transcript.json")) as f:
            saved = json.load(f)
        self.assertEqual(saved["stage"], "stage3")
        self.assertEqual(len(saved["transcript"]), 4)

    def test_usage_errors(self):
        with self.assertRaises(SystemExit) as ctx:
            main(["render", "--out", self.tmp])
        self.assertEqual(ctx.exception.code, 2)
        with self.assertRaises(SystemExit):
            main(["stats", "x.jsonl", "--out", self._out("s.json"), "--no-such-flag"])
        self.assertEqual(main(["assets", "validate", "--config-file", self._out("missing.yaml"),
                               "--out", self.tmp]), EXIT_USAGE)
        self.assertEqual(main(["assets", "validate", MANIFEST, "--out", self.tmp, "SEED"]),
                         EXIT_USAGE)
        self.assertEqual(main(["assets", "validate", MANIFEST, "--out", self.tmp,
                               "NO_SUCH.KEY", "1"]), EXIT_USAGE)
        self.assertEqual(main(["stats", self._out("missing.jsonl"), "--out", self._out("s.json")]),
                         EXIT_USAGE)

    def test_overrides_land_in_snapshot(self):
        main(["assets", "validate", "--seed", "5", "--out", self.tmp, "JOBS", "2"])
        with open(self._out("assets_validate.config.yaml")) as f:
            text = f.read()
        self.assertIn("SEED: 5", text)
        self.assertIn("JOBS: 2", text)

    def test_train_split_against_its_own_render(self):
        quick = os.path.join(CONFIGS, "quick.yaml")
        scenes, render = self._out("scenes"), self._out("render")
        self.assertEqual(main(["scene", "gen", "--config-file", quick, "--count", "1",
                               "--split", "train", "--out", scenes]), EXIT_OK)
        names = sorted(n for n in os.listdir(scenes) if n.endswith(".json"))
        self.assertEqual(names, ["train_cafe_0000.json", "train_park_0000.json",
                                 "train_parking_lot_0000.json"])
        with open(os.path.join(scenes, "scene_gen.config.yaml")) as f:
            self.assertIn("SPLIT: train", f.read())
        self.assertEqual(main(["render", "--config-file", quick, "--scenes", scenes,
                               "--out", render]), EXIT_OK)
        rc = main(["qa", "gen", "--config-file", quick, "--scenes", render,
                   "--disjoint-from", render, "--out", self._out("qa", "data.jsonl")])
        self.assertEqual(rc, EXIT_VALIDATION)
        self.assertFalse(os.path.exists(self._out("qa", "data.jsonl")))
        self.assertEqual(main(["scene", "gen", "--count", "1", "--split", "Bad-Name",
                               "--out", self._out("bad")]), EXIT_USAGE)

    def test_quick_demo(self):
        targets = self._out("targets.json")
        with open(targets, "w") as f:
            json.dump({"counts": {"MCQ": 4, "Counting": 2, "Detection": 2}, "rounds": 4}, f)
        out = self._out("demo")
        rc = main(["demo", "--config-file", os.path.join(CONFIGS, "quick.yaml"), "--count", "1",
                   "--out", out, "PATHS.TARGETS", targets])
        self.assertIn(rc, (0, 1))
        for name in ("data.jsonl", "preds.jsonl", "preds_transcript.jsonl", "report.json",
                     "baseline_chance.json", "baseline_frequency.json", "stats.json",
                     "demo.config.yaml"):
            self.assertTrue(os.path.isfile(os.path.join(out, name)), name)
        self.assertTrue(os.listdir(os.path.join(out, "scenes")))
        self.assertTrue(os.listdir(os.path.join(out, "render")))

        report = os.path.join(self.tmp, "rescored", "report.json")
        rc = main(["eval", "score", os.path.join(out, "data.jsonl"), os.path.join(out, "preds.jsonl"),
                   "--curves", "reasoning", "--out", report])
        self.assertEqual(rc, EXIT_OK)
        with open(report) as f:
            rescored = json.load(f)
        with open(os.path.join(out, "report.json")) as f:
            original = json.load(f)
        for key in ("mcq", "counting", "detection"):
            self.assertEqual(rescored[key], original[key])


if __name__ == "__main__":
    unittest.main()
