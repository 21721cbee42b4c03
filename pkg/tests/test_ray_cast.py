import math
import os
import unittest

import numpy as np
import torch

import utils
from mvqa_core.layers import ray_box_distances, ray_triangle_distances, segment_min
from mvqa_core.modeling.render.geometry import SceneGeometry, object_distances, surface_patches
from mvqa_core.structures.primitives import (
    OrientedBox,
    Ray,
    ray_intersect_box,
    ray_intersect_triangle,
)

CONE = os.path.join(utils.get_config_root_path(), "assets", "meshes", "traffic_cone.obj")


def _random_rays(rng, n):
    origins = rng.uniform(-6.0, 6.0, size=(n, 3))
    targets = rng.uniform(-1.5, 1.5, size=(n, 3))
    d = targets - origins
    return origins, d / np.linalg.norm(d, axis=1, keepdims=True)


class TestRayCast(unittest.TestCase):
    def test_boxes_match_scalar(self):
        rng = np.random.default_rng(0)
        origins, dirs = _random_rays(rng, 200)
        boxes = [OrientedBox((0.0, 0.0, 0.0), (1.0, 0.5, 0.7), 0.4),
                 OrientedBox((1.0, -1.0, 0.5), (0.3, 0.3, 0.3), -1.2)]
        rows = [list(b.center) + list(b.half_extents) + [b.yaw] for b in boxes]
        t = ray_box_distances(origins, dirs, rows).numpy()
        self.assertEqual(t.shape, (200, 2))
        for i in range(200):
            ray = Ray(origins[i], dirs[i])
            for k, box in enumerate(boxes):
                expected = ray_intersect_box(ray, box)
                if expected is None:
                    self.assertTrue(math.isinf(t[i, k]))
                else:
                    self.assertAlmostEqual(t[i, k], expected, places=9)

    def test_triangles_match_scalar(self):
        rng = np.random.default_rng(1)
        origins, dirs = _random_rays(rng, 100)
        tris = np.array([[[-1, -1, 0], [1, -1, 0], [0, 1, 0]],
                         [[0, 0, -1], [0, 1, 1], [0, -1, 1]]], dtype=np.float64)
        t = ray_triangle_distances(origins, dirs, tris).numpy()
        for i in range(100):
            ray = Ray(origins[i], dirs[i])
            for k in range(2):
                expected = ray_intersect_triangle(ray, *tris[k])
                if expected is None:
                    self.assertTrue(math.isinf(t[i, k]))
                else:
                    self.assertAlmostEqual(t[i, k], expected, places=9)

    def test_empty_primitives(self):
        t = ray_box_distances(np.zeros((3, 3)), np.tile([1.0, 0.0, 0.0], (3, 1)), np.zeros((0, 7)))
        self.assertEqual(tuple(t.shape), (3, 0))

    def test_segment_min(self):
        inf = float("inf")
        d = torch.tensor([[1.0, 2.0, inf], [inf, inf, 3.0]], dtype=torch.float64)
        out = segment_min(d, [0, 0, 1], 3)
        self.assertEqual(out.tolist(), [[1.0, inf, inf], [inf, 3.0, inf]])


class TestSceneGeometry(unittest.TestCase):
    def test_first_hit(self):
        scene = utils.make_scene([
            utils.make_object("a", "crate", 0.0, 0.0),
            utils.make_object("b", "crate", 3.0, 0.0),
        ])
        geometry = SceneGeometry(scene)
        origins = [[-10.0, 0.0, 0.5], [-10.0, 0.0, 5.0]]
        dirs = [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
        d = geometry.distances(origins, dirs)
        self.assertAlmostEqual(float(d[0, 0]), 9.5)
        self.assertAlmostEqual(float(d[0, 1]), 12.5)
        t, idx = geometry.first_hit(origins, dirs)
        self.assertEqual(idx.tolist(), [0, -1])
        self.assertAlmostEqual(float(t[0]), 9.5)
        self.assertTrue(math.isinf(float(t[1])))

    def test_mesh_object(self):
        cone = utils.make_object("cone", "traffic_cone", 0.0, 0.0, dims=(0.4, 0.4, 0.7),
                                 has_front=False)
        cone.shape = {"kind": "mesh", "path": CONE}
        down = torch.tensor([[0.0, 0.0, -1.0], [0.0, 0.0, -1.0]], dtype=torch.float64)
        origins = torch.tensor([[0.0, 0.0, 5.0], [0.19, 0.19, 5.0]], dtype=torch.float64)
        t = object_distances(cone, origins, down)
        # apex, then the top of the base plate outside the cone
        self.assertAlmostEqual(float(t[0]), 5.0 - 0.7, places=9)
        self.assertAlmostEqual(float(t[1]), 5.0 - 0.05 * 0.7, places=9)

    def test_surface_patches(self):
        box = utils.make_object("a", "crate", 0.0, 0.0, dims=(2.0, 1.0, 1.0))
        patches = surface_patches(box)
        self.assertEqual(len(patches), 6)
        self.assertAlmostEqual(sum(p[4] for p in patches), 2 * (2.0 + 2.0 + 1.0))


if __name__ == "__main__":
    unittest.main()
