import math
import unittest

import numpy as np

from mvqa_core.modeling.qa import DifficultyError, count_hops, reasoning_difficulty
from mvqa_core.structures.relation_graph import (
    CAMERA_CENTRIC,
    HORIZONTAL_LABELS,
    OBJECT_CENTRIC,
    RelationGraph,
)


def _floyd_warshall(nodes, edges):
    n = len(nodes)
    index = {v: i for i, v in enumerate(nodes)}
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for subject, obj, _ in edges:
        dist[index[obj], index[subject]] = 1.0
    for k in range(n):
        dist = np.minimum(dist, dist[:, k:k + 1] + dist[k:k + 1, :])
    return dist


def _chain():
    g = RelationGraph(OBJECT_CENTRIC, ["a", "b", "c", "d"])
    g.add_edge("b", "a", "Front")
    g.add_edge("c", "b", "Left")
    g.add_edge("d", "a", "Back")
    return g


class TestHopDistance(unittest.TestCase):
    def test_matches_floyd_warshall(self):
        rng = np.random.default_rng(0)
        for trial in range(20):
            n = int(rng.integers(2, 9))
            nodes = ["o{}".format(i) for i in range(n)]
            g = RelationGraph(OBJECT_CENTRIC, nodes)
            for _ in range(int(rng.integers(0, 2 * n))):
                s, o = rng.choice(n, size=2, replace=False)
                g.add_edge(nodes[s], nodes[o], HORIZONTAL_LABELS[int(rng.integers(8))])
            dist = _floyd_warshall(nodes, g.edges)
            for i, a in enumerate(nodes):
                for j, b in enumerate(nodes):
                    d = g.hop_distance(a, b)
                    if math.isinf(dist[i, j]):
                        self.assertIsNone(d)
                    else:
                        self.assertEqual(d, int(dist[i, j]))

    def test_unknown_nodes(self):
        self.assertIsNone(_chain().hop_distance("a", "zz"))


class TestReasoningDifficulty(unittest.TestCase):
    def setUp(self):
        cam = RelationGraph(CAMERA_CENTRIC, ["a", "b", "c", "d"], view_id="v1")
        cam.add_edge("c", "a", "CamLeft")
        self.graphs = {"object_centric": _chain(), "camera": {"v1": cam}}

    def test_ground_and_hop(self):
        plan = [{"kind": "Ground", "slot": "ref"},
                {"kind": "Hop", "from": "ref", "to": "target", "frame": "object_centric"}]
        bindings = {"ref": "a", "target": "c"}
        self.assertEqual(count_hops(plan, self.graphs, bindings), 3)
        self.assertAlmostEqual(reasoning_difficulty(plan, self.graphs, bindings, 2), 4.0)
        self.assertAlmostEqual(reasoning_difficulty(plan, self.graphs, bindings, 3, log_scale=0.5),
                               3.0 + 0.5 * math.log2(3))

    def test_set_valued_endpoint_takes_longest(self):
        plan = [{"kind": "Hop", "from": "ref", "to": "members", "frame": "object_centric"}]
        self.assertEqual(count_hops(plan, self.graphs, {"ref": "a", "members": ["b", "c", "d"]}), 2)
        self.assertEqual(count_hops(plan, self.graphs, {"ref": "a", "members": []}), 1)

    def test_camera_frame_uses_bound_view(self):
        plan = [{"kind": "Hop", "from": "ref", "to": "target", "frame": "camera", "view": "view"}]
        self.assertEqual(count_hops(plan, self.graphs, {"ref": "a", "target": "c", "view": "v1"}), 1)

    def test_aggregate_and_localize_are_free(self):
        plan = [{"kind": "Ground", "slot": "members"}, {"kind": "Aggregate", "slot": "members"},
                {"kind": "Localize", "slot": "members"}]
        self.assertEqual(count_hops(plan, self.graphs, {"members": ["b"]}), 1)
        self.assertAlmostEqual(reasoning_difficulty(plan, self.graphs, {"members": ["b"]}, 0), 1.0)

    def test_unreachable(self):
        plan = [{"kind": "Hop", "from": "ref", "to": "target", "frame": "object_centric"}]
        with self.assertRaises(DifficultyError):
            count_hops(plan, self.graphs, {"ref": "c", "target": "a"})


if __name__ == "__main__":
    unittest.main()
