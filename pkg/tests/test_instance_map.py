import math
import os
import tempfile
import unittest

import numpy as np

import utils
from mvqa_core.modeling.render import (
    read_depth_map,
    read_instance_map,
    render_instance_map,
    write_depth_map,
    write_instance_map,
)
from mvqa_core.modeling.render.instance_map import decode_ppm_ids, encode_ppm_ids
from mvqa_core.structures.camera import CameraModel
from mvqa_core.structures.views import ViewRecord


def _view(width=40, height=30):
    camera = CameraModel((-5.0, 0.0, 0.5), 0.0, 0.0, math.radians(90.0), width, height)
    return ViewRecord("v0", "Egocentric", camera)


class TestInstanceMap(unittest.TestCase):
    def test_nearest_object_wins(self):
        scene = utils.make_scene([
            utils.make_object("far", "crate", 3.0, 0.0, dims=(1.0, 6.0, 3.0)),
            utils.make_object("near", "crate", 0.0, 0.0),
        ])
        ids, depth = render_instance_map(scene, _view(), with_depth=True)
        self.assertEqual(ids.shape, (30, 40))
        # pixel (row 15, col 20) looks straight at the near crate
        self.assertEqual(int(ids[15, 20]), scene.instance_number("near"))
        self.assertAlmostEqual(float(depth[15, 20]), 4.5, places=2)
        # further out the far crate shows around it
        self.assertEqual(int(ids[15, 26]), scene.instance_number("far"))
        self.assertEqual(int(ids[0, 0]), 0)
        self.assertTrue(math.isinf(depth[0, 0]))

    def test_empty_view(self):
        scene = utils.make_scene([utils.make_object("a", "crate", -9.0, 0.0)])
        ids = render_instance_map(scene, _view())
        self.assertEqual(int(ids.max()), 0)

    def test_ppm_codec(self):
        ids = np.array([[0, 1, 255], [256, 70000, (1 << 24) - 1]], dtype=np.uint32)
        back = decode_ppm_ids(encode_ppm_ids(ids))
        np.testing.assert_array_equal(back, ids)
        self.assertTrue(encode_ppm_ids(ids).startswith(b"P6\n3 2\n255\n"))

    def test_files(self):
        scene = utils.make_scene([utils.make_object("near", "crate", 0.0, 0.0)])
        ids, depth = render_instance_map(scene, _view(), with_depth=True)
        with tempfile.TemporaryDirectory() as tmp:
            write_instance_map(os.path.join(tmp, "v0.ppm"), ids)
            write_depth_map(os.path.join(tmp, "v0_depth.pgm"), depth)
            np.testing.assert_array_equal(read_instance_map(os.path.join(tmp, "v0.ppm")), ids)
            back = read_depth_map(os.path.join(tmp, "v0_depth.pgm"))
        hit = np.isfinite(depth)
        np.testing.assert_array_equal(np.isfinite(back), hit)
        np.testing.assert_allclose(back[hit], depth[hit], atol=5e-4)


if __name__ == "__main__":
    unittest.main()
