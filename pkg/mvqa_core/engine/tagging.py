"""Three-stage tagging of one asset category by a vision-language model.

1. The category overview (a montage of every asset's preview) is sent and
   the model names the category and the keys that tell its assets apart.
2. Given those keys, the model drafts a multi-level tag library.
3. Every asset's preview is matched against the complete library and the
   model lists all tags that apply.

Replies must contain one JSON object. An unparseable reply raises
:class:`OsdTagStageError` carrying the transcript so far for manual repair.
"""
import dataclasses
import json
import logging
import math
import os
import time
from dataclasses import dataclass, field

import cv2
import numpy as np
import torch

from mvqa_core.client.images import encode_png, image_bytes_to_data_uri, make_montage
from mvqa_core.client.prompts import build_messages
from mvqa_core.client.providers import ChatRequest
from mvqa_core.data.asset_library import AssetLibrary, CategoryRecord, TagEntry, TagLibrary
from mvqa_core.modeling.render.geometry import object_distances
from mvqa_core.structures.camera import CameraModel, pixel_directions
from mvqa_core.structures.primitives import Pose3
from mvqa_core.structures.scene import PlacedObject

from .benchmark import call_with_retries

STAGES = ("stage1", "stage2", "stage3")
PREVIEW_SIZE = 192


class OsdTagStageError(RuntimeError):
    def __init__(self, stage, category, message, transcript):
        super(OsdTagStageError, self).__init__("{} {}: {}".format(category, stage, message))
        self.stage = stage
        self.category = category
        self.transcript = list(transcript)


@dataclass(eq=False)
class TaggingDraft:
    category: str
    comparison_keys: list
    tags: list  # [{"id", "level", "text"}]
    assignments: dict  # asset_id -> [tag ids]
    transcript: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    def to_dict(self):
        return {
            "category": self.category,
            "comparison_keys": list(self.comparison_keys),
            "tags": [dict(t) for t in self.tags],
            "assignments": {k: list(v) for k, v in sorted(self.assignments.items())},
            "flags": list(self.flags),
        }


def render_asset_preview(lib, asset, size=PREVIEW_SIZE):
    """Gray-shaded depth image of the asset from a fixed three-quarter view."""
    shape = dict(asset.shape)
    if shape.get("kind") == "mesh":
        shape["path"] = lib.mesh_path(asset)
    obj = PlacedObject(asset.asset_id, asset.asset_id, asset.category, Pose3((0.0, 0.0, 0.0), 0.0),
                       1.0, asset.dims, asset.has_front, tuple(asset.tags), shape)
    elevation, azimuth = math.radians(30.0), math.radians(-45.0)
    distance = 2.2 * float(np.linalg.norm(obj.size))
    direction = np.array([math.cos(elevation) * math.cos(azimuth),
                          math.cos(elevation) * math.sin(azimuth), math.sin(elevation)])
    position = obj.center + distance * direction
    camera = CameraModel(position, azimuth + math.pi, -elevation, math.radians(40.0), size, size)
    jj, ii = np.meshgrid(np.arange(size), np.arange(size))
    dirs = torch.as_tensor(pixel_directions(camera, jj.ravel() + 0.5, ii.ravel() + 0.5))
    origins = torch.as_tensor(camera.position).expand(len(dirs), 3)
    t = object_distances(obj, origins, dirs).numpy().reshape(size, size)
    image = np.full((size, size), 255, dtype=np.uint8)
    hit = np.isfinite(t)
    if hit.any():
        lo, hi = t[hit].min(), t[hit].max()
        shade = 1.0 - 0.7 * (t[hit] - lo) / max(hi - lo, 1e-9)
        image[hit] = np.round(40 + 160 * shade).astype(np.uint8)
    return image


def asset_preview(lib, asset):
    if asset.preview:
        image = cv2.imread(os.path.join(lib.manifest_dir, asset.preview), cv2.IMREAD_COLOR)
        if image is not None:
            return image
        logging.getLogger("mvqa_core.tagging").warning(
            "{}: preview {} unreadable, rendering one".format(asset.asset_id, asset.preview))
    return render_asset_preview(lib, asset)


def category_overview(lib, category):
    """Deterministic montage of all previews of a category, in asset_id order."""
    assets = lib.by_category(category)
    return make_montage([asset_preview(lib, a) for a in assets],
                        labels=[a.asset_id for a in assets])


def parse_json_reply(text):
    start, end = text.find("{"), text.rfind("}")
    if start < 0 or end <= start:
        raise ValueError("no JSON object in reply")
    value = json.loads(text[start:end + 1])
    if not isinstance(value, dict):
        raise ValueError("reply is not a JSON object")
    return value


STAGE1_PROMPT = (
    "The image shows every asset of the category '{category}' ({n} assets), each "
    "labeled with its id. Name the category and list the visual or functional "
    "properties that distinguish these assets from each other. Reply with JSON: "
    '{{"category": "<name>", "comparison_keys": ["<property>", ...]}}'
)
STAGE2_PROMPT = (
    "Build a hierarchical tag library for the category '{category}' using the "
    "comparison keys: {keys}. Level-1 tags are coarse and every asset must receive "
    "at least one; higher levels refine lower ones. Reply with JSON: "
    '{{"tags": [{{"id": "<id>", "level": <int>, "text": "<short phrase>"}}, ...]}}'
)
STAGE3_PROMPT = (
    "This is asset '{asset_id}' of the category '{category}'. Compare it against the "
    "complete tag library below and list every tag that applies.\n{library}\n"
    'Reply with JSON: {{"tags": ["<id>", ...]}}'
)


def _tag_id(category, raw_id):
    raw_id = str(raw_id).strip()
    return raw_id if raw_id.startswith(category + ".") else "{}.{}".format(category, raw_id)


class _Session(object):
    def __init__(self, category, provider, endpoint, seed, sleep):
        self.category = category
        self.provider = provider
        self.endpoint = endpoint
        self.seed = seed
        self.sleep = sleep
        self.transcript = []

    def ask(self, stage, text, images, asset_id=None):
        uris = [image_bytes_to_data_uri(encode_png(i)) for i in images] \
            if getattr(self.provider, "needs_images", True) else []
        key = "osd/{}/{}".format(self.category, stage) + ("/" + asset_id if asset_id else "")
        request = ChatRequest(key, build_messages(text, uris), stage=stage,
                              category=self.category, asset_id=asset_id)
        raw, attempts, _, error = call_with_retries(self.provider, request, self.endpoint,
                                                   self.seed, self.sleep)
        self.transcript.append({"stage": stage, "key": key, "prompt": text,
                                "raw_response": raw, "attempts": attempts})
        if raw is None:
            raise OsdTagStageError(stage, self.category, error, self.transcript)
        try:
            return parse_json_reply(raw)
        except ValueError as e:
            raise OsdTagStageError(stage, self.category, str(e), self.transcript)


def osd_tag_category(lib, category, provider, endpoint, seed=0, sleep=time.sleep):
    logger = logging.getLogger("mvqa_core.tagging")
    assets = lib.by_category(category)
    if not assets:
        raise ValueError("category '{}' has no assets".format(category))
    session = _Session(category, provider, endpoint, seed, sleep)
    overview = category_overview(lib, category)
    flags = []

    reply = session.ask("stage1", STAGE1_PROMPT.format(category=category, n=len(assets)), [overview])
    keys = reply.get("comparison_keys")
    if not isinstance(keys, list) or not all(isinstance(k, str) for k in keys):
        raise OsdTagStageError("stage1", category, "comparison_keys must be a list of strings",
                               session.transcript)
    keys = [k.strip() for k in keys if k.strip()]
    if not keys:
        flags.append("stage1 returned no comparison keys")
        logger.warning("{}: no comparison keys proposed".format(category))

    reply = session.ask("stage2", STAGE2_PROMPT.format(category=category, keys=", ".join(keys) or "none"),
                        [overview])
    tags = []
    try:
        for t in reply["tags"]:
            level = int(t["level"])
            tags.append({"id": _tag_id(category, t["id"]), "level": level,
                         "text": str(t.get("text", t["id"]))})
    except (KeyError, TypeError, ValueError) as e:
        raise OsdTagStageError("stage2", category, "malformed tag list ({})".format(e),
                               session.transcript)

    library = "\n".join("- {} (level {}): {}".format(t["id"], t["level"], t["text"]) for t in tags)
    assignments = {}
    for asset in assets:
        reply = session.ask(
            "stage3",
            STAGE3_PROMPT.format(asset_id=asset.asset_id, category=category, library=library),
            [asset_preview(lib, asset)], asset_id=asset.asset_id)
        ids = reply.get("tags")
        if not isinstance(ids, list):
            raise OsdTagStageError("stage3", category, "tags must be a list", session.transcript)
        assignments[asset.asset_id] = sorted({_tag_id(category, i) for i in ids})

    logger.info("{}: {} keys, {} tags, {} assets tagged".format(
        category, len(keys), len(tags), len(assignments)))
    return TaggingDraft(category, keys, tags, assignments, session.transcript, flags)


def auto_repair(draft):
    """Make a draft structurally valid; returns (repaired draft, notes)."""
    notes = []
    category = draft.category
    keys = list(draft.comparison_keys)
    if not keys:
        keys = [category.replace("_", " ")]
        notes.append("comparison keys filled with the category name")

    levels = sorted({t["level"] for t in draft.tags})
    renumber = {old: new for new, old in enumerate(levels, 1)}
    if any(old != new for old, new in renumber.items()):
        notes.append("tag levels {} closed up to 1..{}".format(levels, len(levels)))
    tags = [dict(t, level=renumber[t["level"]]) for t in draft.tags]
    known = {t["id"] for t in tags}

    generic = "{}.generic".format(category)
    assignments = {}
    for asset_id, ids in sorted(draft.assignments.items()):
        kept = [i for i in ids if i in known]
        if len(kept) != len(ids):
            notes.append("{}: dropped unknown tags {}".format(
                asset_id, sorted(set(ids) - set(kept))))
        if not any(t["level"] == 1 for t in tags if t["id"] in kept):
            if generic not in known:
                tags.append({"id": generic, "level": 1, "text": category.replace("_", " ")})
                known.add(generic)
            kept.append(generic)
            notes.append("{}: given the generic level-1 tag".format(asset_id))
        assignments[asset_id] = sorted(kept)

    repaired = TaggingDraft(category, keys, tags, assignments, draft.transcript, list(draft.flags))
    return repaired, notes


def apply_drafts(lib, drafts):
    """A new library with each drafted category's keys, tags and assignments."""
    by_category = {d.category: d for d in drafts}
    categories = []
    for name, c in lib.tag_library.categories.items():
        d = by_category.get(name)
        if d is None:
            categories.append(c)
            continue
        entries = tuple(TagEntry(t["id"], t["level"], t["text"], name) for t in d.tags)
        categories.append(CategoryRecord(name, tuple(d.comparison_keys), entries))
    assets = []
    for a in lib.assets.values():
        d = by_category.get(a.category)
        if d is not None and a.asset_id in d.assignments:
            a = dataclasses.replace(a, tags=frozenset(d.assignments[a.asset_id]))
        assets.append(a)
    return AssetLibrary(TagLibrary(categories), assets, lib.manifest_dir)
