import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor, as_completed

from tqdm import tqdm

from mvqa_core.client.endpoint import EndpointAuthError, EndpointError, TransientEndpointError
from mvqa_core.client.images import image_bytes_to_data_uri, view_image_png
from mvqa_core.client.prompts import build_messages, check_mode, prompt_digest, question_prompt
from mvqa_core.client.providers import ChatRequest, build_provider
from mvqa_core.utils.logger import redact
from mvqa_core.utils.metric_logger import MetricLogger
from mvqa_core.utils.seeding import make_rng
from mvqa_core.utils.serialization import append_jsonl
from mvqa_core.utils.timer import Timer, get_time_str

BACKOFF_BASE = 1.0
BACKOFF_FACTOR = 2.0
BACKOFF_JITTER = 0.25


def backoff_delay(seed, key, attempt):
    """Seconds to wait after failed attempt ``attempt`` (0-based)."""
    jitter = make_rng(seed, "backoff", key, attempt).uniform(0.0, BACKOFF_JITTER)
    return BACKOFF_BASE * BACKOFF_FACTOR ** attempt + float(jitter)


def call_with_retries(provider, request, endpoint, seed, sleep=time.sleep):
    """(raw_response, attempts, latency_ms, error). Transient failures are
    retried up to ``endpoint.max_retries`` times; auth failures propagate."""
    logger = logging.getLogger("mvqa_core.bench")
    latency = 0.0
    for attempt in range(endpoint.max_retries + 1):
        start = time.perf_counter()
        try:
            raw = provider.complete(request)
            latency = 1000.0 * (time.perf_counter() - start)
            return raw, attempt + 1, latency, None
        except EndpointAuthError:
            raise
        except TransientEndpointError as e:
            latency = 1000.0 * (time.perf_counter() - start)
            if attempt == endpoint.max_retries:
                return None, attempt + 1, latency, redact(str(e))
            delay = backoff_delay(seed, request.key, attempt)
            logger.info("{}: {}; retrying in {:.2f}s".format(request.key, redact(str(e)), delay))
            sleep(delay)
        except EndpointError as e:
            latency = 1000.0 * (time.perf_counter() - start)
            return None, attempt + 1, latency, redact(str(e))
    return None, endpoint.max_retries + 1, latency, "retries exhausted"


def question_request(q, mode, image_root, with_images=True):
    text = question_prompt(q, mode)
    paths = [os.path.join(image_root, p) for p in q.images]
    uris = [image_bytes_to_data_uri(view_image_png(p)) for p in paths] if with_images else []
    return ChatRequest(q.qid, build_messages(text, uris), question=q), prompt_digest(text, q.images)


def _load_transcript(path, qids):
    """Completed records of an earlier run; a torn last line is ignored."""
    done = {}
    if not path or not os.path.exists(path):
        return done
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except ValueError:
                continue
            if record.get("qid") in qids and record.get("raw_response") is not None:
                done[record["qid"]] = record
    return done


class BenchmarkResult(object):
    def __init__(self, predictions, transcript, meters):
        self.predictions = predictions
        self.transcript = transcript
        self.meters = meters

    @property
    def missing(self):
        return [p["qid"] for p in self.predictions if p.get("missing")]


def run_benchmark(questions, endpoint, mode, seed, image_root=".", transcript_path=None,
                  provider=None, sleep=time.sleep, show_progress=False):
    """Ask the endpoint every question; predictions come back in qid order.

    Up to ``endpoint.max_concurrency`` requests are in flight. Finished
    records go through one writer that appends them to the transcript in qid
    order, so an interrupted run resumes by skipping the qids already there.
    """
    logger = logging.getLogger("mvqa_core.bench")
    mode = check_mode(mode)
    provider = provider or build_provider(endpoint)
    with_images = getattr(provider, "needs_images", True)
    questions = sorted(questions, key=lambda q: q.qid)
    done = _load_transcript(transcript_path, {q.qid for q in questions})
    todo = [q for q in questions if q.qid not in done]
    if done:
        logger.info("Resuming: {} of {} questions already answered".format(len(done), len(questions)))
    logger.info("Benchmarking {} questions on endpoint '{}' ({} mode, {} in flight)".format(
        len(todo), endpoint.name, mode, endpoint.max_concurrency))

    meters = MetricLogger(delimiter="  ")
    records = dict(done)

    def ask(q):
        request, digest = question_request(q, mode, image_root, with_images)
        raw, attempts, latency, error = call_with_retries(provider, request, endpoint, seed, sleep)
        record = {
            "qid": q.qid,
            "prompt_digest": digest,
            "raw_response": redact(raw) if raw is not None else None,
            "latency_ms": int(round(latency)),
            "attempts": attempts,
        }
        if error is not None:
            record["error"] = error
        return record

    timer = Timer()
    timer.tic()
    pending = {}
    next_index = 0
    with ThreadPoolExecutor(max_workers=endpoint.max_concurrency) as pool:
        futures = {pool.submit(ask, q): i for i, q in enumerate(todo)}
        try:
            for future in tqdm(as_completed(futures), total=len(futures), disable=not show_progress):
                record = future.result()
                pending[futures[future]] = record
                meters.update(latency_ms=record["latency_ms"], attempts=record["attempts"])
                while next_index in pending:
                    r = pending.pop(next_index)
                    records[r["qid"]] = r
                    if transcript_path:
                        append_jsonl(transcript_path, r)
                    next_index += 1
        except EndpointAuthError as e:
            for f in futures:
                f.cancel()
            logger.error("Endpoint '{}' rejected the credentials: {}".format(endpoint.name, e))
            raise EndpointAuthError("endpoint '{}': {}".format(endpoint.name, e))
    timer.toc()

    predictions = []
    for q in questions:
        r = records[q.qid]
        if r.get("raw_response") is None:
            predictions.append({"qid": q.qid, "answer": None, "missing": True,
                                "error": r.get("error", "")})
        else:
            predictions.append({"qid": q.qid, "answer": r["raw_response"]})
    transcript = [records[q.qid] for q in questions]
    logger.info("Finished in {}: {}".format(get_time_str(timer.total_time), str(meters)))
    missing = sum(1 for p in predictions if p.get("missing"))
    if missing:
        logger.warning("{} questions have no prediction".format(missing))
    return BenchmarkResult(predictions, transcript, meters)
