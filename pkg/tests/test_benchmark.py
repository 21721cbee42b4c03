import os
import shutil
import tempfile
import unittest

from mvqa_core.client import (
    EndpointAuthError,
    MockProvider,
    ModelEndpoint,
)
from mvqa_core.client.prompts import check_mode, prompt_digest, question_prompt
from mvqa_core.data.datasets import QADataset
from mvqa_core.data.datasets.evaluation import evaluate
from mvqa_core.engine.benchmark import backoff_delay, run_benchmark
from mvqa_core.utils.logger import register_secret
from mvqa_core.utils.serialization import read_jsonl

from test_scoring import count, detection, mcq


def _questions():
    return [mcq("q0", 2), count("q1", 3), detection("q2", [("v0", [1.25, 2, 6.5, 7])]), mcq("q3", 0)]


def _endpoint(**kwargs):
    kwargs.setdefault("max_retries", 2)
    kwargs.setdefault("max_concurrency", 3)
    return ModelEndpoint("mock", provider="mock", **kwargs)


class TestPrompts(unittest.TestCase):
    def test_question_prompt(self):
        text = question_prompt(mcq("q0", 1), "thinking")
        self.assertIn("A. front\nB. back\nC. left\nD. right", text)
        self.assertTrue(text.endswith("'ANSWER: <letter>'."))
        direct = question_prompt(detection("q1", [("v0", [0, 0, 1, 1])]), "direct")
        self.assertIn("reply with the answer line only", direct)
        self.assertIn("v0, v1", direct)

    def test_mode(self):
        self.assertEqual(check_mode("Thinking"), "thinking")
        with self.assertRaises(ValueError):
            check_mode("verbose")

    def test_digest_covers_images(self):
        self.assertEqual(prompt_digest("q", ["a.ppm"]), prompt_digest("q", ["a.ppm"]))
        self.assertNotEqual(prompt_digest("q", ["a.ppm"]), prompt_digest("q", ["b.ppm"]))


class TestBenchmark(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.sleeps = []

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def run_mock(self, fixture, endpoint=None, transcript=None, questions=None):
        provider = MockProvider(fixture=fixture)
        result = run_benchmark(questions or _questions(), endpoint or _endpoint(), "direct", 0,
                               transcript_path=transcript, provider=provider,
                               sleep=self.sleeps.append)
        return result, provider

    def test_echo_scores_perfectly(self):
        result, _ = self.run_mock({"mode": "echo"})
        self.assertEqual([p["qid"] for p in result.predictions], ["q0", "q1", "q2", "q3"])
        self.assertEqual(result.missing, [])
        report = evaluate(QADataset(_questions()), result.predictions)
        self.assertEqual(report.mcq["acc"], 100.0)
        self.assertEqual(report.counting["acc"], 100.0)
        self.assertAlmostEqual(report.detection["miou"], 100.0)

    def test_transient_faults_are_retried(self):
        result, provider = self.run_mock({"mode": "echo", "faults": {"q1": [429, 503]}})
        record = result.transcript[1]
        self.assertEqual(record["attempts"], 3)
        self.assertEqual(provider.calls["q1"], 3)
        self.assertEqual(result.missing, [])
        self.assertEqual(len(self.sleeps), 2)
        self.assertEqual(self.sleeps, [backoff_delay(0, "q1", 0), backoff_delay(0, "q1", 1)])
        self.assertTrue(1.0 <= self.sleeps[0] <= 1.25)
        self.assertTrue(2.0 <= self.sleeps[1] <= 2.25)

    def test_exhausted_retries_give_missing_prediction(self):
        result, _ = self.run_mock({"mode": "echo", "faults": {"q0": [429, 429, 429]}})
        self.assertEqual(result.missing, ["q0"])
        self.assertIn("HTTP 429", result.predictions[0]["error"])
        self.assertEqual(result.transcript[0]["attempts"], 3)
        report = evaluate(QADataset(_questions()), result.predictions)
        self.assertEqual(report.mcq["acc"], 50.0)

    def test_permanent_error_is_not_retried(self):
        result, provider = self.run_mock({"mode": "echo", "faults": {"q3": [400]}})
        self.assertEqual(result.missing, ["q3"])
        self.assertEqual(provider.calls["q3"], 1)
        self.assertEqual(self.sleeps, [])

    def test_auth_failure_aborts(self):
        with self.assertRaises(EndpointAuthError):
            self.run_mock({"mode": "echo", "auth_fail": True})

    def test_transcript_resume(self):
        path = os.path.join(self.tmp, "transcript.jsonl")
        self.run_mock({"mode": "echo"}, transcript=path)
        records = read_jsonl(path)
        self.assertEqual([r["qid"] for r in records], ["q0", "q1", "q2", "q3"])
        with open(path, "a") as f:
            f.write('{"qid": "q9", "raw_resp')

        result, provider = self.run_mock({"mode": "table", "answers": {}}, transcript=path)
        self.assertEqual(provider.calls, {})
        self.assertEqual([t["raw_response"] for t in result.transcript],
                         [r["raw_response"] for r in records])

    def test_garbage_never_crashes(self):
        questions = [mcq("q{:02d}".format(i), i % 4) for i in range(12)]
        result, _ = self.run_mock({"mode": "garbage"}, questions=questions)
        report = evaluate(QADataset(questions), result.predictions)
        self.assertLessEqual(report.mcq["acc"], 100.0)
        self.assertEqual(len(result.predictions), 12)

    def test_secrets_are_redacted(self):
        register_secret("sk-unit-test-0451")
        result, _ = self.run_mock({"mode": "table", "answers": {"q0": "key sk-unit-test-0451"}})
        self.assertEqual(result.transcript[0]["raw_response"], "key ***")

    def test_endpoint_validation(self):
        with self.assertRaises(ValueError):
            _endpoint(max_concurrency=0)
        with self.assertRaises(ValueError):
            _endpoint(max_retries=-1)
        saved = _endpoint(api_key_env="MVQA_API_KEY").to_dict()
        self.assertEqual(saved["api_key_env"], "MVQA_API_KEY")
        self.assertNotIn("api_key", saved)


if __name__ == "__main__":
    unittest.main()
