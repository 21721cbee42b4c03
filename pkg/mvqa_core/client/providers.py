import json
import threading
from dataclasses import dataclass

import requests

from mvqa_core.modeling.registry import ENDPOINT_PROVIDERS
from mvqa_core.utils.seeding import make_rng

from .endpoint import EndpointAuthError, EndpointError, TransientEndpointError

TRANSIENT_STATUS = (408, 409, 425, 429)


@dataclass(eq=False)
class ChatRequest:
    """One chat turn. ``key`` names the request in transcripts and mock
    fixtures: a qid, or ``osd/<category>/<stage>[/<asset_id>]``."""

    key: str
    messages: list
    question: object = None
    stage: str = None
    category: str = None
    asset_id: str = None


def _status_error(name, status, body):
    message = "{}: HTTP {}: {}".format(name, status, body[:200])
    if status in (401, 403):
        return EndpointAuthError(message)
    if status in TRANSIENT_STATUS or status >= 500:
        return TransientEndpointError(message, status)
    return EndpointError(message)


@ENDPOINT_PROVIDERS.register("http")
class HttpProvider(object):
    """OpenAI-style ``/chat/completions`` over HTTP with images inlined as
    base64 data URIs."""

    needs_images = True

    def __init__(self, endpoint):
        if not endpoint.base_url:
            raise ValueError("{}: http endpoints need a base_url".format(endpoint.name))
        self.endpoint = endpoint
        self.url = endpoint.base_url.rstrip("/") + "/chat/completions"

    def complete(self, request):
        e = self.endpoint
        headers = {"Content-Type": "application/json"}
        key = e.api_key()
        if key:
            headers["Authorization"] = "Bearer " + key
        payload = {
            "model": e.model_name,
            "messages": request.messages,
            "max_tokens": e.max_tokens,
            "temperature": 0,
            "stream": False,
        }
        try:
            response = requests.post(self.url, json=payload, headers=headers, timeout=e.timeout)
        except (requests.Timeout, requests.ConnectionError) as ex:
            raise TransientEndpointError("{}: {}".format(e.name, type(ex).__name__))
        except requests.RequestException as ex:
            raise EndpointError("{}: {}".format(e.name, type(ex).__name__))
        if response.status_code != 200:
            raise _status_error(e.name, response.status_code, response.text)
        try:
            content = response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError):
            raise EndpointError("{}: response is not a chat completion".format(e.name))
        if isinstance(content, list):
            content = "".join(part.get("text", "") for part in content if isinstance(part, dict))
        return content or ""


GARBAGE = (
    "",
    "I am not sure.",
    "ANSWER: Z",
    "ANSWER: maybe",
    "There are several of them.",
    "ANSWER: -3",
    "BOXES: nonsense",
    "BOXES: v0 40 40 10 10",
    "The second one, probably.",
)


def echo_answer(q):
    if q.task == "MCQ":
        return "ANSWER: {}".format(q.answer_text())
    if q.task == "Counting":
        return "ANSWER: {}".format(q.gt_answer)
    # full precision so echoed boxes score IoU 1
    return "BOXES: " + "; ".join(
        " ".join([v] + [repr(float(x)) for x in b.as_list()]) for v, b in q.gt_answer)


@ENDPOINT_PROVIDERS.register("mock")
class MockProvider(object):
    """Offline provider driven by a JSON fixture::

        {"mode": "echo" | "garbage" | "table",
         "answers": {"q000003": "ANSWER: B"},
         "faults": {"q000001": [429]},
         "auth_fail": false,
         "osd_tag": {"chair": {"stage1": "...", "stage2": "...",
                               "stage3": {"chair_a": "..."}}}}

    ``faults`` lists HTTP statuses raised on the first attempts of a request
    key before it succeeds.
    """

    needs_images = False

    def __init__(self, endpoint=None, fixture=None):
        if fixture is None:
            with open(endpoint.fixture, "r", encoding="utf-8") as f:
                fixture = json.load(f)
        self.name = endpoint.name if endpoint is not None else "mock"
        self.mode = fixture.get("mode", "echo")
        if self.mode not in ("echo", "garbage", "table"):
            raise ValueError("unknown mock mode '{}'".format(self.mode))
        self.answers = dict(fixture.get("answers", {}))
        self.faults = {k: list(v) for k, v in fixture.get("faults", {}).items()}
        self.auth_fail = bool(fixture.get("auth_fail", False))
        self.osd_tag = fixture.get("osd_tag", {})
        self.calls = {}
        self._lock = threading.Lock()

    def _next_fault(self, key):
        with self._lock:
            self.calls[key] = self.calls.get(key, 0) + 1
            pending = self.faults.get(key)
            if pending:
                return pending.pop(0)
        return None

    def complete(self, request):
        if self.auth_fail:
            raise EndpointAuthError("{}: HTTP 401: invalid credentials".format(self.name))
        status = self._next_fault(request.key)
        if status is not None:
            raise _status_error(self.name, status, "injected fault")
        if request.stage is not None:
            script = self.osd_tag.get(request.category, {})
            reply = script.get(request.stage, "")
            if request.stage == "stage3" and isinstance(reply, dict):
                reply = reply.get(request.asset_id, "")
            return reply if isinstance(reply, str) else json.dumps(reply)
        if self.mode == "table":
            return self.answers.get(request.key, "")
        if self.mode == "garbage":
            return GARBAGE[int(make_rng("garbage", request.key).integers(len(GARBAGE)))]
        return echo_answer(request.question)


def build_provider(endpoint):
    return ENDPOINT_PROVIDERS[endpoint.provider](endpoint)
