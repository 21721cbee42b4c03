import math
import unittest

import utils
from mvqa_core.modeling.relations import (
    RelationParams,
    build_object_centric_graph,
    build_relation_graphs,
    camera_centric_relations,
    contact_relation,
    direction_label,
    object_centric_relation,
    relation_graphs_to_dict,
)
from mvqa_core.modeling.render import extract_scene_metadata
from mvqa_core.structures.camera import CameraModel
from mvqa_core.structures.relation_graph import OBJECT_CENTRIC, RelationGraph
from mvqa_core.structures.views import ViewRecord


def _view():
    camera = CameraModel((-10.0, 0.0, 0.5), 0.0, 0.0, math.radians(90.0), 320, 240)
    return ViewRecord("v0", "Egocentric", camera)


class TestObjectCentric(unittest.TestCase):
    def test_direction_label(self):
        self.assertEqual(direction_label(1.0, 0.0, 0.1), "Front")
        self.assertEqual(direction_label(0.05, 1.0, 0.1), "Right")
        self.assertEqual(direction_label(-0.7, -0.7, 0.1), "BackLeft")
        self.assertEqual(direction_label(0.7, 0.7, 0.1), "FrontRight")
        self.assertIsNone(direction_label(0.05, -0.05, 0.1))

    def test_reference_frame(self):
        ref = utils.make_object("ref", "sofa", 0.0, 0.0)
        cases = {(2.0, 0.0): "Front", (-2.0, 0.0): "Back", (0.0, 2.0): "Left",
                 (0.0, -2.0): "Right", (2.0, 2.0): "FrontLeft", (-2.0, -2.0): "BackRight"}
        for (x, y), label in cases.items():
            other = utils.make_object("o", "plant", x, y)
            self.assertEqual(object_centric_relation(ref, other), label, (x, y))

    def test_rotated_reference(self):
        ref = utils.make_object("ref", "sofa", 1.0, 1.0, yaw=math.pi / 2)
        self.assertEqual(object_centric_relation(ref, utils.make_object("o", "plant", 1.0, 3.0)),
                         "Front")
        self.assertEqual(object_centric_relation(ref, utils.make_object("o", "plant", 3.0, 1.0)),
                         "Right")

    def test_epsilon_snaps_near_axis(self):
        ref = utils.make_object("ref", "sofa", 0.0, 0.0)
        other = utils.make_object("o", "plant", 10.0, 0.5)
        self.assertEqual(object_centric_relation(ref, other), "Front")
        self.assertEqual(object_centric_relation(ref, other, RelationParams(epsilon=0.01)),
                         "FrontLeft")

    def test_errors(self):
        ref = utils.make_object("ref", "table", 0.0, 0.0, has_front=False)
        with self.assertRaises(ValueError):
            object_centric_relation(ref, utils.make_object("o", "plant", 1.0, 0.0))
        sofa = utils.make_object("ref", "sofa", 0.0, 0.0)
        self.assertIsNone(object_centric_relation(sofa, utils.make_object("o", "plant", 0.0, 0.0)))


class TestContact(unittest.TestCase):
    def setUp(self):
        self.table = utils.make_object("table", "table", 0.0, 0.0, dims=(1.0, 1.0, 0.75),
                                       has_front=False)

    def cup(self, x, z):
        return utils.make_object("cup", "cup", x, 0.0, z=z, dims=(0.2, 0.2, 0.1), has_front=False)

    def test_on_and_under(self):
        cup = self.cup(0.0, 0.75)
        self.assertEqual(contact_relation(cup, self.table), "On")
        self.assertEqual(contact_relation(self.table, cup), "Under")

    def test_gap_and_overhang(self):
        self.assertIsNone(contact_relation(self.cup(0.0, 0.8), self.table))
        self.assertEqual(contact_relation(self.cup(0.0, 0.755), self.table), "On")
        # only a tenth of the footprint on the table
        self.assertIsNone(contact_relation(self.cup(0.58, 0.75), self.table))


class TestCameraCentric(unittest.TestCase):
    def test_left_right_and_depth(self):
        a = utils.make_object("a", "crate", 0.0, 2.0)
        b = utils.make_object("b", "crate", 0.0, -2.0)
        c = utils.make_object("c", "crate", 4.0, 2.0)
        self.assertEqual(camera_centric_relations(_view(), a, b),
                         {("CamLeft", "a", "b"), ("CamRight", "b", "a")})
        rel = camera_centric_relations(_view(), a, c)
        self.assertIn(("CamCloser", "a", "c"), rel)
        self.assertIn(("CamFarther", "c", "a"), rel)

    def test_deadzone(self):
        a = utils.make_object("a", "crate", 0.0, 0.0)
        b = utils.make_object("b", "crate", 0.0, 0.001)
        self.assertEqual(camera_centric_relations(_view(), a, b), set())

    def test_image_rows_mode(self):
        params = RelationParams(camera_front_mode="image_rows")
        low = utils.make_object("low", "crate", 0.0, 0.0, dims=(1.0, 1.0, 0.2))
        high = utils.make_object("high", "crate", 0.0, 3.0, z=2.0)
        rel = camera_centric_relations(_view(), low, high, params)
        self.assertIn(("CamCloser", "low", "high"), rel)

    def test_outside_frustum(self):
        a = utils.make_object("a", "crate", 0.0, 0.0)
        behind = utils.make_object("b", "crate", -15.0, 0.0)
        with self.assertRaises(ValueError):
            camera_centric_relations(_view(), a, behind)


class TestGraphs(unittest.TestCase):
    def test_graph_api(self):
        g = RelationGraph(OBJECT_CENTRIC, ["a", "b", "c"])
        g.add_edge("b", "a", "Front")
        g.add_edge("c", "b", "Left")
        g.add_edge("c", "b", "Left")
        self.assertEqual(len(g), 2)
        self.assertEqual(g.hop_distance("a", "c"), 2)
        self.assertIsNone(g.hop_distance("c", "a"))
        self.assertEqual(g.hop_distance("a", "a"), 0)
        self.assertEqual(g.successors("a"), ["b"])
        with self.assertRaises(ValueError):
            g.add_edge("a", "a", "Front")
        with self.assertRaises(ValueError):
            g.add_edge("a", "b", "Above")
        with self.assertRaises(KeyError):
            g.add_edge("a", "z", "Front")
        with self.assertRaises(ValueError):
            RelationGraph("camera_centric", ["a"])
        back = RelationGraph.from_dict(g.to_dict())
        self.assertEqual(back.edges, g.edges)

    def test_object_centric_graph(self):
        scene = utils.make_scene([
            utils.make_object("table", "table", 0.0, 0.0, dims=(1.0, 1.0, 0.75), has_front=False),
            utils.make_object("chair", "chair", -1.5, 0.0),
            utils.make_object("cup", "cup", 0.0, 0.0, z=0.75, dims=(0.1, 0.1, 0.1),
                              has_front=False),
        ])
        graph = build_object_centric_graph(scene)
        self.assertTrue(graph.has_edge("table", "chair", "Front"))
        self.assertTrue(graph.has_edge("cup", "chair", "Front"))
        self.assertTrue(graph.has_edge("cup", "table", "On"))
        self.assertTrue(graph.has_edge("table", "cup", "Under"))
        # objects without a front are never references
        self.assertEqual(graph.labels("chair", "table"), [])

    def test_relation_graphs(self):
        scene = utils.make_scene([
            utils.make_object("a", "crate", 0.0, 2.0),
            utils.make_object("b", "crate", 0.0, -2.0),
            utils.make_object("hidden", "crate", -15.0, 0.0),
        ])
        views = [_view()]
        metadata = extract_scene_metadata(scene, views, n_rays=16)
        graphs = build_relation_graphs(scene, views, metadata)
        cam = graphs["camera"]["v0"]
        self.assertTrue(cam.has_edge("a", "b", "CamLeft"))
        self.assertFalse(any("hidden" in e[:2] for e in cam.edges))
        d = relation_graphs_to_dict(graphs)
        self.assertEqual(sorted(d["camera"]), ["v0"])
        self.assertEqual(d["camera"]["v0"]["view_id"], "v0")


if __name__ == "__main__":
    unittest.main()
