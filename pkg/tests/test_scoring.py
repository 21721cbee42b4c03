import csv
import json
import os
import shutil
import tempfile
import unittest

from mvqa_core.data.datasets import QADataset
from mvqa_core.data.datasets.evaluation import (
    dataset_stats,
    difficulty_curves,
    evaluate,
    index_predictions,
    parse_boxes,
    parse_count,
    parse_mcq,
    score_counting,
    score_detection,
    score_mcq,
    score_question,
)
from mvqa_core.structures.bounding_box import Bbox2
from mvqa_core.structures.question import QuestionInstance

OPTIONS = ["front", "back", "left", "right"]


def mcq(qid, gt, k=4, reasoning=3.0, visibility=0.1, text="Which way?"):
    return QuestionInstance(qid, "s0", "t_mcq", "object_direction", "MCQ", text, ["v0", "v1"], gt,
                            reasoning, visibility, ["a", "b"], options=OPTIONS[:k])


def count(qid, gt, reasoning=2.0, visibility=0.1):
    return QuestionInstance(qid, "s0", "t_count", "count_category", "Counting", "How many?",
                            ["v0", "v1"], gt, reasoning, visibility, ["a"])


def detection(qid, boxes, size=(10, 10), reasoning=2.0, visibility=0.1):
    gt = [(v, Bbox2(*b)) for v, b in boxes]
    return QuestionInstance(qid, "s0", "t_det", "locate_unique", "Detection", "Box it.",
                            ["v0", "v1"], gt, reasoning, visibility, ["a"], image_size=size)


class TestParsing(unittest.TestCase):
    def test_mcq(self):
        self.assertEqual(parse_mcq("ANSWER: B", OPTIONS), 1)
        self.assertEqual(parse_mcq("I compared both images. Answer: d", OPTIONS), 3)
        self.assertEqual(parse_mcq("2", OPTIONS), 2)
        self.assertEqual(parse_mcq(3, OPTIONS), 3)
        self.assertEqual(parse_mcq("Left", OPTIONS), 2)
        self.assertEqual(parse_mcq("(A)", OPTIONS), 0)
        self.assertIsNone(parse_mcq(4, OPTIONS))
        self.assertIsNone(parse_mcq("C", OPTIONS[:2]))
        self.assertIsNone(parse_mcq(True, OPTIONS))
        self.assertIsNone(parse_mcq(None, OPTIONS))
        self.assertIsNone(parse_mcq("no idea", OPTIONS))

    def test_count(self):
        self.assertEqual(parse_count("there are 4 chairs"), 4)
        self.assertEqual(parse_count("I see 2 rows of cars. ANSWER: 7"), 7)
        self.assertEqual(parse_count(0), 0)
        self.assertIsNone(parse_count("five"))
        self.assertIsNone(parse_count("-3"))
        self.assertIsNone(parse_count("2.5"))
        self.assertIsNone(parse_count(-1))
        self.assertIsNone(parse_count(False))

    def test_boxes(self):
        boxes, error = parse_boxes([{"view_id": "v0", "box": [0, 0, 2, 2]}], ["v0"])
        self.assertIsNone(error)
        self.assertEqual([(v, b.as_list()) for v, b in boxes], [("v0", [0.0, 0.0, 2.0, 2.0])])

        boxes, _ = parse_boxes("BOXES: v0 1 1 3 3; v1 0, 0, 5, 5", ["v0", "v1"])
        self.assertEqual([v for v, _ in boxes], ["v0", "v1"])

        boxes, _ = parse_boxes("The lamp is at v1: 10, 20, 30, 40 in the second image.", ["v0", "v1"])
        self.assertEqual([(v, b.as_list()) for v, b in boxes], [("v1", [10.0, 20.0, 30.0, 40.0])])

        self.assertEqual(parse_boxes(None, ["v0"]), ([], None))
        self.assertEqual(parse_boxes("nothing here", ["v0"]), ([], None))

    def test_box_errors(self):
        boxes, error = parse_boxes([{"view_id": "v0", "box": [5, 0, 1, 2]}], ["v0"])
        self.assertEqual(boxes, [])
        self.assertIn("inverted box", error)
        _, error = parse_boxes([{"box": [0, 0, 1, 1]}], ["v0"])
        self.assertIn("malformed box payload", error)


class TestScoring(unittest.TestCase):
    def test_mcq_fixture(self):
        dataset = QADataset([mcq("q{}".format(i), 0) for i in range(8)])
        predictions = [{"qid": "q{}".format(i), "answer": "A"} for i in range(5)]
        predictions += [{"qid": "q5", "answer": "B"}, {"qid": "q6", "answer": 1}]
        self.assertAlmostEqual(score_mcq(dataset, predictions), 62.5)
        self.assertEqual(score_mcq(dataset, []), 0.0)

    def test_counting_fixture(self):
        dataset = QADataset([count("c0", 2), count("c1", 3)])
        scores = score_counting(dataset, [{"qid": "c0", "answer": 2},
                                          {"qid": "c1", "answer": "five"}])
        self.assertAlmostEqual(scores["acc"], 50.0)
        self.assertAlmostEqual(scores["mae"], 1.5)
        row = score_question(count("c2", 4), "there are 4 chairs")
        self.assertTrue(row["correct"])
        self.assertEqual(row["abs_err"], 0)
        row = score_question(count("c3", 3), "five")
        self.assertEqual((row["answered"], row["correct"], row["abs_err"]), (False, False, 3))

    def test_detection_fixture(self):
        dataset = QADataset([detection("d0", [("v0", [0, 0, 2, 2])])])
        scores = score_detection(dataset, [{"qid": "d0", "answer": [{"view_id": "v0",
                                                                       "box": [1, 1, 3, 3]}]}])
        self.assertAlmostEqual(scores["miou"], 100.0 / 7.0, places=9)
        self.assertEqual(scores["f1"], 0.0)

        exact = score_detection(dataset, [{"qid": "d0", "answer": "BOXES: v0 0 0 2 2"}])
        self.assertAlmostEqual(exact["miou"], 100.0)
        self.assertAlmostEqual(exact["f1"], 100.0)
        self.assertEqual(score_detection(dataset, []), {"miou": 0.0, "f1": 0.0})

    def test_detection_matches_within_view(self):
        q = detection("d0", [("v0", [0, 0, 2, 2]), ("v1", [4, 4, 8, 8])])
        row = score_question(q, [{"view_id": "v1", "box": [0, 0, 2, 2]},
                                 {"view_id": "v1", "box": [4, 4, 8, 8]}])
        self.assertAlmostEqual(row["iou"], 0.5)
        # one TP out of two predictions and two gt boxes
        self.assertAlmostEqual(row["f1"], 0.5)

    def test_f1_threshold_is_strict(self):
        q = detection("d0", [("v0", [0, 0, 10, 10])])
        at = score_question(q, [{"view_id": "v0", "box": [0, 0, 10, 5]}])
        above = score_question(q, [{"view_id": "v0", "box": [0, 0, 10, 5.1]}])
        self.assertAlmostEqual(at["iou"], 0.5)
        self.assertEqual(at["f1"], 0.0)
        self.assertAlmostEqual(above["f1"], 1.0)

    def test_inverted_box_is_a_record_error(self):
        row = score_question(detection("d0", [("v0", [0, 0, 2, 2])]),
                             [{"view_id": "v0", "box": [3, 0, 1, 2]}])
        self.assertEqual((row["iou"], row["f1"], row["answered"]), (0.0, 0.0, False))
        self.assertIn("error", row)

    def test_index_predictions(self):
        dataset = QADataset([mcq("q0", 0), mcq("q1", 1)])
        index, unmatched = index_predictions(dataset, [
            {"qid": "q0", "answer": "A"},
            {"qid": "q0", "answer": "B"},
            {"qid": "q1", "answer": "B", "missing": True},
            {"qid": "zz", "answer": "C"},
        ])
        self.assertEqual(dict(index), {"q0": "A", "q1": None})
        self.assertEqual(unmatched, ["zz"])


class TestEvaluate(unittest.TestCase):
    def setUp(self):
        self.output_dir = tempfile.mkdtemp()
        self.dataset = QADataset([
            mcq("q0", 0, reasoning=3.0), mcq("q1", 1, reasoning=5.0), mcq("q2", 2, reasoning=9.0),
            count("q3", 2, visibility=0.7),
            detection("q4", [("v0", [0, 0, 2, 2])]),
        ])
        self.predictions = [
            {"qid": "q0", "answer": "A"}, {"qid": "q1", "answer": "A"}, {"qid": "q2", "answer": "C"},
            {"qid": "q3", "answer": "2"},
            {"qid": "q4", "answer": [{"view_id": "v0", "box": [2, 0, 0, 2]}]},
            {"qid": "q9", "answer": "A"},
        ]

    def tearDown(self):
        shutil.rmtree(self.output_dir)

    def test_report_and_files(self):
        report = evaluate(self.dataset, self.predictions, self.output_dir, curves=("reasoning",),
                          bins={"reasoning": [0.0, 4.0, 8.0]})
        self.assertAlmostEqual(report.mcq["acc"], 200.0 / 3.0)
        self.assertEqual(report.counting, {"acc": 100.0, "mae": 0.0, "n": 1})
        self.assertEqual(report.detection["miou"], 0.0)
        self.assertEqual(report.unmatched, ["q9"])
        self.assertEqual([e["qid"] for e in report.record_errors], ["q4"])
        self.assertEqual(report.coverage["Detection"], {"answered": 0, "total": 1})
        self.assertIn("MCQ ACC", report.result_str())

        with open(os.path.join(self.output_dir, "report.json")) as f:
            saved = json.load(f)
        self.assertEqual(saved["unmatched"], ["q9"])
        self.assertTrue(os.path.isfile(os.path.join(self.output_dir, "report.txt")))
        with open(os.path.join(self.output_dir, "curves_reasoning_MCQ.csv")) as f:
            rows = list(csv.reader(f))
        # q2 (difficulty 9) joins the last bin; q3 fails the visibility filter
        self.assertEqual(rows, [["bin_lo", "bin_hi", "count", "metric"],
                                ["0", "4", "1", "100.000000"], ["4", "8", "2", "50.000000"]])
        self.assertFalse(os.path.exists(os.path.join(self.output_dir,
                                                     "curves_reasoning_Counting.csv")))

    def test_deterministic(self):
        a = evaluate(self.dataset, self.predictions).to_dict()
        b = evaluate(self.dataset, self.predictions).to_dict()
        self.assertEqual(a, b)


class TestCurves(unittest.TestCase):
    def setUp(self):
        self.dataset = QADataset([
            mcq("q0", 0, reasoning=2.0, visibility=0.1),
            mcq("q1", 0, reasoning=2.5, visibility=0.8),
            mcq("q2", 0, reasoning=7.0, visibility=0.3),
            count("q3", 3, reasoning=4.0, visibility=0.95),
        ])
        self.rows = {q.qid: score_question(q, "A" if q.task == "MCQ" else "1") for q in self.dataset}

    def test_visibility_axis_with_reasoning_filter(self):
        curves = difficulty_curves(self.dataset, self.rows, "visibility", [0.0, 0.5, 1.0],
                                   {"max_reasoning": 6.0})
        self.assertEqual([r["count"] for r in curves["MCQ"]], [1, 1])
        self.assertEqual([r["count"] for r in curves["Counting"]], [0, 1])
        self.assertIsNone(curves["Counting"][0]["metric"])
        self.assertEqual(curves["Counting"][1]["metric"], 0.0)

    def test_single_bin_reproduces_aggregate(self):
        curves = difficulty_curves(self.dataset, self.rows, "reasoning", [0.0, 10.0])
        self.assertEqual(curves["MCQ"][0]["count"], 3)
        self.assertEqual(curves["MCQ"][0]["metric"], 100.0)

    def test_partition(self):
        curves = difficulty_curves(self.dataset, self.rows, "reasoning", [0.0, 2.5, 5.0, 10.0],
                                   {"max_visibility": 0.5})
        kept = [q for q in self.dataset if q.visibility_difficulty < 0.5]
        self.assertEqual(sum(r["count"] for rows in curves.values() for r in rows), len(kept))

    def test_out_of_range_joins_edge_bins(self):
        dataset = QADataset(list(self.dataset) + [mcq("q4", 0, reasoning=15.0), mcq("q5", 0, reasoning=-1.0)])
        rows = dict(self.rows)
        rows["q4"] = score_question(dataset.get("q4"), "B")
        rows["q5"] = score_question(dataset.get("q5"), "A")
        curves = difficulty_curves(dataset, rows, "reasoning", [0.0, 5.0, 14.0], {"max_visibility": 0.5})
        kept = [q for q in dataset if q.visibility_difficulty < 0.5]
        self.assertEqual(sum(r["count"] for rows in curves.values() for r in rows), len(kept))
        self.assertEqual([r["count"] for r in curves["MCQ"]], [2, 2])
        self.assertEqual(curves["MCQ"][1]["metric"], 50.0)
        self.assertEqual(curves["MCQ"][1]["bin_hi"], 14.0)

    def test_bad_arguments(self):
        with self.assertRaises(ValueError):
            difficulty_curves(self.dataset, self.rows, "reasoning", [1.0, 1.0])
        with self.assertRaises(ValueError):
            difficulty_curves(self.dataset, self.rows, "reasoning", [1.0])
        with self.assertRaises(ValueError):
            difficulty_curves(self.dataset, self.rows, "novelty", [0.0, 1.0])


class TestStats(unittest.TestCase):
    def test_empty(self):
        stats = dataset_stats(QADataset([]))
        self.assertEqual(stats["counts"], {})
        self.assertEqual(stats["answers"], {})
        self.assertEqual(stats["mcq_positions"], {})
        self.assertEqual(stats["detection_heatmap"], [])
        self.assertEqual(stats["vocabulary"], {})

    def test_distributions(self):
        dataset = QADataset([
            mcq("q0", 0, text="Which way is the chair?"), mcq("q1", 1), mcq("q2", 1, k=2),
            count("q3", 2), count("q4", 2),
            detection("q5", [("v0", [40, 40, 60, 60])], size=(100, 100)),
        ])
        stats = dataset_stats(dataset)
        self.assertEqual(stats["counts"], {"Counting": 2, "Detection": 1, "MCQ": 3})
        self.assertEqual(stats["answers"]["Counting"], {"2": 2})
        self.assertEqual(stats["mcq_positions"], {"2": [0, 1], "4": [1, 1, 0, 0]})
        self.assertAlmostEqual(stats["mcq_position_deviation"]["4"], 25.0)
        heat = stats["detection_heatmap"]
        self.assertAlmostEqual(sum(map(sum, heat)), 1.0)
        self.assertGreater(heat[16][16], 0.0)
        self.assertEqual(heat[0][0], 0.0)
        self.assertEqual(stats["vocabulary"]["which"], 3)
        self.assertEqual(stats["vocabulary"]["chair"], 1)


if __name__ == "__main__":
    unittest.main()
