import dataclasses
import math
import os
import shutil
import tempfile
import unittest

import utils
from mvqa_core.data import load_asset_library, load_themes
from mvqa_core.data.themes import ThemeError, parse_theme
from mvqa_core.engine import check_disjoint_renders, load_rendered_scenes, render_scene
from mvqa_core.modeling.relations import object_centric_relation
from mvqa_core.modeling.scene import (
    EVAL_SPLIT,
    ConstraintUnsatisfiable,
    SceneParams,
    SplitOverlapError,
    anchor_relation_satisfied,
    check_disjoint,
    generate_scenes,
    sample_scene,
    scene_overlaps,
    validate_scene,
)
from mvqa_core.modeling.scene.validate import ANCHOR_VIOLATED, COLLISION, OUT_OF_FLOOR

CONFIGS = utils.get_config_root_path()


def _library():
    return load_asset_library(os.path.join(CONFIGS, "assets", "demo_manifest.json"))


def _theme(specs, extent=(8.0, 8.0), theme_id="unit"):
    return parse_theme({"theme_id": theme_id, "floor": {"extent": list(extent)},
                        "object_specs": specs})


class TestThemeParsing(unittest.TestCase):
    def test_bundled_themes(self):
        themes = load_themes(os.path.join(CONFIGS, "themes"))
        self.assertEqual([t.theme_id for t in themes], ["cafe", "park", "parking_lot"])
        lot = themes[2]
        self.assertEqual(lot.object_specs[0].count, (8, 8))

    def test_anchor_must_come_earlier(self):
        with self.assertRaises(ThemeError):
            _theme([
                {"category": "chair", "anchor_relations": [
                    {"relation_label": None, "target_category": "table", "distance_range": [1, 2]}]},
                {"category": "table"},
            ])

    def test_bad_specs(self):
        with self.assertRaises(ThemeError):
            _theme([{"category": "table", "count": [3, 1]}])
        with self.assertRaises(ThemeError):
            _theme([{"category": "table", "placement": {"kind": "spiral"}}])
        with self.assertRaises(ThemeError):
            _theme([{"category": "sofa"}, {"category": "plant", "anchor_relations": [
                {"relation_label": "Above", "target_category": "sofa"}]}])


class TestSampler(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.lib = _library()

    def test_deterministic(self):
        theme = _theme([{"category": "table", "count": [2, 3]},
                        {"category": "chair", "count": 3, "facing": "target", "anchor_relations": [
                            {"relation_label": None, "target_category": "table",
                             "distance_range": [0.9, 1.5]}]}])
        a = sample_scene(theme, self.lib, 11)
        b = sample_scene(theme, self.lib, 11)
        self.assertEqual(a.to_dict(), b.to_dict())
        c = sample_scene(theme, self.lib, 12)
        self.assertNotEqual(a.to_dict(), c.to_dict())

    def test_instance_ids_and_validity(self):
        theme = _theme([{"category": "table", "count": 2},
                        {"category": "cup", "count": 2, "anchor_relations": [
                            {"relation_label": "On", "target_category": "table"}]}])
        scene = sample_scene(theme, self.lib, 3)
        self.assertEqual(scene.instance_ids(), ["table_01", "table_02", "cup_01", "cup_02"])
        self.assertEqual(validate_scene(scene, self.lib, theme), [])
        for cup in scene.objects[2:]:
            target = scene.get(cup.anchors[0]["target"])
            self.assertAlmostEqual(cup.bottom_z, target.top_z)

    def test_horizontal_anchor(self):
        theme = _theme([{"category": "sofa", "placement": {
            "kind": "grid", "rows": 1, "cols": 1, "spacing": [1.0, 1.0]}},
                        {"category": "plant", "count": 1, "anchor_relations": [
                            {"relation_label": "Front", "target_category": "sofa",
                             "distance_range": [1.0, 2.5]}]}], extent=(12.0, 12.0))
        scene = sample_scene(theme, self.lib, 5)
        sofa, plant = scene.get("sofa_01"), scene.get("plant_01")
        self.assertEqual(object_centric_relation(sofa, plant), "Front")
        self.assertTrue(anchor_relation_satisfied(sofa, plant, plant.anchors[0]))

    def test_grid(self):
        theme = _theme([{"category": "car", "placement": {
            "kind": "grid", "rows": 1, "cols": 3, "spacing": [3.0, 0.0], "yaw": math.pi / 2}}],
            extent=(20.0, 20.0))
        scene = sample_scene(theme, self.lib, 0)
        xs = [round(float(o.pose.position[0]), 6) for o in scene.objects]
        self.assertEqual(xs, [-3.0, 0.0, 3.0])
        self.assertTrue(all(abs(o.pose.yaw - math.pi / 2) < 1e-9 for o in scene.objects))

    def test_unsatisfiable(self):
        theme = _theme([{"category": "tree", "count": 40}], extent=(6.0, 6.0))
        with self.assertRaises(ConstraintUnsatisfiable):
            sample_scene(theme, self.lib, 0, SceneParams(max_attempts=50))

    def test_generate_is_independent_of_jobs(self):
        themes = [_theme([{"category": "table", "count": [1, 3]}], theme_id="t1"),
                  _theme([{"category": "bench", "count": [1, 2]}], theme_id="t2")]
        serial = generate_scenes(themes, self.lib, 3, seed=4, jobs=1)
        parallel = generate_scenes(themes, self.lib, 3, seed=4, jobs=4)
        self.assertEqual([s.scene_id for s in serial],
                         ["t1_0000", "t1_0001", "t1_0002", "t2_0000", "t2_0001", "t2_0002"])
        self.assertEqual([s.to_dict() for s in serial], [s.to_dict() for s in parallel])

    def test_bundled_themes_sample(self):
        themes = load_themes(os.path.join(CONFIGS, "themes"))
        for theme in themes:
            for seed in range(3):
                scene = sample_scene(theme, self.lib, seed)
                self.assertEqual(validate_scene(scene, self.lib, theme), [], theme.theme_id)


class TestValidation(unittest.TestCase):
    def test_collision_and_floor(self):
        scene = utils.make_scene([
            utils.make_object("a", "crate", 0.0, 0.0),
            utils.make_object("b", "crate", 0.5, 0.0),
            utils.make_object("c", "crate", 9.8, 0.0),
        ])
        kinds = sorted(v.kind for v in validate_scene(scene))
        self.assertEqual(kinds, [COLLISION, OUT_OF_FLOOR])

    def test_stacked_objects_do_not_collide(self):
        scene = utils.make_scene([
            utils.make_object("a", "crate", 0.0, 0.0),
            utils.make_object("b", "crate", 0.0, 0.0, z=1.0),
        ])
        self.assertEqual(validate_scene(scene), [])

    def test_anchor_violation(self):
        a = utils.make_object("a", "sofa", 0.0, 0.0)
        b = utils.make_object("b", "plant", -3.0, 0.0)
        b.anchors = ({"target": "a", "relation_label": "Front", "distance_range": [1.0, 4.0]},)
        violations = validate_scene(utils.make_scene([a, b]))
        self.assertEqual([v.kind for v in violations], [ANCHOR_VIOLATED])


class TestSplits(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.lib = _library()
        cls.themes = [_theme([{"category": "table", "count": [1, 3]}], theme_id="t1"),
                      _theme([{"category": "bench", "count": [1, 2]}], theme_id="t2")]

    def test_train_scenes_are_disjoint_from_eval(self):
        evals = generate_scenes(self.themes, self.lib, 3, seed=4)
        train = generate_scenes(self.themes, self.lib, 3, seed=4, split="train")
        self.assertEqual(train[0].scene_id, "train_t1_0000")
        self.assertEqual(evals[0].scene_id, "t1_0000")
        self.assertFalse({s.seed for s in train} & {s.seed for s in evals})
        self.assertEqual(scene_overlaps(train, evals), [])
        check_disjoint(train, evals)
        self.assertEqual(generate_scenes(self.themes, self.lib, 3, seed=4, split=EVAL_SPLIT)[0]
                         .to_dict(), evals[0].to_dict())

    def test_overlap_is_rejected(self):
        evals = generate_scenes(self.themes, self.lib, 2, seed=4)
        with self.assertRaises(SplitOverlapError) as ctx:
            check_disjoint(evals[:1], evals)
        self.assertEqual(ctx.exception.overlaps, ["t1_0000"])
        # same draw under another id
        copy = dataclasses.replace(evals[1], scene_id="renamed")
        self.assertEqual(scene_overlaps([copy], evals),
                         ["renamed (seed {})".format(evals[1].seed)])

    def test_render_dirs_are_checked(self):
        evals = generate_scenes(self.themes, self.lib, 1, seed=4)
        train = generate_scenes(self.themes, self.lib, 1, seed=4, split="train")
        tmp = tempfile.mkdtemp()
        try:
            eval_dir, train_dir = os.path.join(tmp, "eval"), os.path.join(tmp, "train")
            eval_bundles = [render_scene(s, "Drone:1,Egocentric:1", eval_dir, 4, n_rays=8,
                                         image_size=(32, 24), write_maps=False) for s in evals]
            train_bundles = [render_scene(s, "Drone:1,Egocentric:1", train_dir, 4, n_rays=8,
                                          image_size=(32, 24), write_maps=False) for s in train]
            self.assertEqual([s.scene_id for s in load_rendered_scenes(eval_dir)],
                             ["t1_0000", "t2_0000"])
            check_disjoint_renders(train_bundles, [eval_dir])
            with self.assertRaises(SplitOverlapError):
                check_disjoint_renders(eval_bundles, [train_dir, eval_dir])
        finally:
            shutil.rmtree(tmp)

    def test_bad_split_name(self):
        for bad in ("", "Train", "train-1", "1st"):
            with self.assertRaises(ValueError):
                generate_scenes(self.themes, self.lib, 1, seed=4, split=bad)


if __name__ == "__main__":
    unittest.main()
