import json
import os
import tempfile
import unittest

import utils
from mvqa_core.data.asset_library import (
    EMPTY_TAG_LEVEL,
    MISSING_COMPARISON_KEYS,
    ORPHAN_TAG,
    UNKNOWN_TAG_ASSIGNED,
    UNTAGGED_ASSET,
    ManifestError,
    UnknownTagError,
    load_asset_library,
    parse_manifest,
    query_assets_by_tags,
    verify_tag_library,
    write_asset_manifest,
)

DEMO_MANIFEST = os.path.join(utils.get_config_root_path(), "assets", "demo_manifest.json")


def _manifest(categories, assets):
    return json.dumps({"categories": categories, "assets": assets})


CHAIRS = {
    "name": "chair",
    "comparison_keys": ["material"],
    "tags": [
        {"id": "chair.wooden", "level": 1, "text": "wooden"},
        {"id": "chair.metal", "level": 1, "text": "metal"},
        {"id": "chair.armless", "level": 2, "text": "armless"},
    ],
}


def _chair(asset_id, tags, **kw):
    d = {"asset_id": asset_id, "category": "chair", "dims": [0.5, 0.5, 0.9],
         "has_front": True, "tags": tags}
    d.update(kw)
    return d


class TestManifest(unittest.TestCase):
    def test_demo_manifest(self):
        lib = load_asset_library(DEMO_MANIFEST)
        self.assertGreater(len(lib), 20)
        errors = [v for v in verify_tag_library(lib) if v.severity == "error"]
        self.assertEqual(errors, [])
        self.assertTrue(os.path.isfile(lib.mesh_path(lib.get("traffic_cone"))))

    def test_assets_sorted_by_id(self):
        lib = parse_manifest(_manifest([CHAIRS], [_chair("b", ["chair.metal"]),
                                                  _chair("a", ["chair.wooden"])]))
        self.assertEqual(list(lib.assets), ["a", "b"])
        self.assertEqual(lib.census(), {"chair": 2})

    def test_structural_errors(self):
        with self.assertRaises(ManifestError):
            parse_manifest("{not json")
        with self.assertRaises(ManifestError):
            parse_manifest(_manifest([CHAIRS], [_chair("a", [], dims=[0.5, 0.0, 1.0])]))
        with self.assertRaises(ManifestError):
            parse_manifest(_manifest([CHAIRS], [_chair("a", []), _chair("a", [])]))
        with self.assertRaises(ManifestError):
            parse_manifest(_manifest([CHAIRS], [dict(_chair("a", []), category="sofa")]))
        with self.assertRaises(ManifestError):
            parse_manifest(_manifest([CHAIRS], [_chair("a", [], shape={"kind": "mesh"})]))

    def test_empty_manifest(self):
        lib = parse_manifest("")
        self.assertEqual(len(lib), 0)
        self.assertEqual(verify_tag_library(lib), [])


class TestTagVerification(unittest.TestCase):
    def kinds(self, lib):
        return sorted((v.kind, v.subject) for v in verify_tag_library(lib))

    def test_clean_library(self):
        lib = parse_manifest(_manifest([CHAIRS], [
            _chair("a", ["chair.wooden", "chair.armless"]), _chair("b", ["chair.metal"])]))
        self.assertEqual(verify_tag_library(lib), [])

    def test_violations(self):
        categories = [
            dict(CHAIRS, comparison_keys=[]),
            {"name": "sofa", "comparison_keys": ["color"],
             "tags": [{"id": "sofa.green", "level": 2, "text": "green"}]},
        ]
        assets = [
            _chair("a", ["chair.armless"]),
            _chair("b", ["chair.metal", "chair.plastic"]),
            {"asset_id": "s", "category": "sofa", "dims": [2, 1, 1], "tags": ["sofa.green"]},
        ]
        kinds = self.kinds(parse_manifest(_manifest(categories, assets)))
        self.assertIn((MISSING_COMPARISON_KEYS, "chair"), kinds)
        self.assertIn((UNTAGGED_ASSET, "a"), kinds)
        self.assertIn((UNKNOWN_TAG_ASSIGNED, "b"), kinds)
        self.assertIn((ORPHAN_TAG, "chair.wooden"), kinds)
        self.assertIn((EMPTY_TAG_LEVEL, "sofa"), kinds)
        self.assertIn((UNTAGGED_ASSET, "s"), kinds)

    def test_orphans_are_warnings(self):
        lib = parse_manifest(_manifest([CHAIRS], [_chair("a", ["chair.wooden"])]))
        violations = verify_tag_library(lib)
        self.assertEqual({v.kind for v in violations}, {ORPHAN_TAG})
        self.assertTrue(all(v.severity == "warning" for v in violations))


class TestQuery(unittest.TestCase):
    def setUp(self):
        self.lib = parse_manifest(_manifest([CHAIRS], [
            _chair("a", ["chair.wooden", "chair.armless"]),
            _chair("b", ["chair.wooden"]),
            _chair("c", ["chair.metal"]),
        ]))

    def test_query(self):
        self.assertEqual(query_assets_by_tags(self.lib, ["chair.wooden"]), ["a", "b"])
        self.assertEqual(query_assets_by_tags(self.lib, ["chair.wooden", "chair.armless"]), ["a"])
        self.assertEqual(query_assets_by_tags(self.lib, [], category="chair"), ["a", "b", "c"])

    def test_unknown_tag(self):
        with self.assertRaises(UnknownTagError):
            query_assets_by_tags(self.lib, ["chair.velvet"])


class TestWriteManifest(unittest.TestCase):
    def test_mesh_paths_rebased(self):
        lib = load_asset_library(DEMO_MANIFEST)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "nested", "manifest.json")
            os.makedirs(os.path.dirname(path))
            write_asset_manifest(lib, path)
            back = load_asset_library(path)
            cone = back.get("traffic_cone")
            self.assertEqual(os.path.realpath(back.mesh_path(cone)),
                             os.path.realpath(lib.mesh_path(lib.get("traffic_cone"))))
            self.assertEqual(len(back), len(lib))


if __name__ == "__main__":
    unittest.main()
