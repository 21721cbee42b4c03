import os
import tempfile
import unittest

import numpy as np

import utils
from mvqa_core.data.obj_io import (
    ObjParseError,
    load_obj_mesh,
    normalize_to_unit_footprint,
    parse_obj,
    write_obj_mesh,
)
from mvqa_core.structures.primitives import TriMesh

QUAD = ["v 0 0 0", "v 1 0 0", "v 1 1 0", "v 0 1 0"]


class TestObjIO(unittest.TestCase):
    def test_fan_triangulation(self):
        mesh = parse_obj(QUAD + ["f 1 2 3 4"])
        self.assertEqual(mesh.triangles.tolist(), [[0, 1, 2], [0, 2, 3]])
        self.assertAlmostEqual(mesh.surface_area(), 1.0)

    def test_reference_forms(self):
        mesh = parse_obj(QUAD + ["# comment", "vn 0 0 1", "f 1/1/1 2//1 3/2", "f -4 -2 -1"])
        self.assertEqual(mesh.triangles.tolist(), [[0, 1, 2], [0, 2, 3]])

    def test_errors_carry_line_numbers(self):
        with self.assertRaises(ObjParseError) as ctx:
            parse_obj(QUAD + ["f 1 2 9"], "bad.obj")
        self.assertEqual(ctx.exception.lineno, 5)
        with self.assertRaises(ObjParseError):
            parse_obj(QUAD + ["f 0 1 2"])
        with self.assertRaises(ObjParseError):
            parse_obj(QUAD)
        with self.assertRaises(ObjParseError) as ctx:
            parse_obj(["v 0 0 0", "v 1 0 0", "v 2 0 0", "f 1 2 3"])
        self.assertEqual(ctx.exception.lineno, 4)

    def test_write_then_load(self):
        mesh = parse_obj(QUAD + ["f 1 2 3 4"])
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "quad.obj")
            write_obj_mesh(mesh, path)
            back = load_obj_mesh(path)
        np.testing.assert_array_equal(back.vertices, mesh.vertices)
        np.testing.assert_array_equal(back.triangles, mesh.triangles)

    def test_normalize(self):
        mesh = TriMesh([[2, 2, 1], [6, 2, 1], [2, 4, 1], [2, 2, 3]],
                       [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
        unit = normalize_to_unit_footprint(mesh)
        lo, hi = unit.bounds()
        np.testing.assert_allclose(lo, [-0.5, -0.5, 0.0])
        np.testing.assert_allclose(hi, [0.5, 0.5, 1.0])
        flat = parse_obj(QUAD + ["f 1 2 3 4"])
        with self.assertRaises(ValueError):
            normalize_to_unit_footprint(flat)

    def test_bundled_cone(self):
        mesh = load_obj_mesh(os.path.join(utils.get_config_root_path(), "assets", "meshes",
                                          "traffic_cone.obj"))
        lo, hi = mesh.bounds()
        np.testing.assert_allclose(lo, [-0.5, -0.5, 0.0])
        np.testing.assert_allclose(hi, [0.5, 0.5, 1.0])
        self.assertEqual(len(mesh.triangles), 6 * 2 + 8)


if __name__ == "__main__":
    unittest.main()
