"""Asset manifest loading, tag-library verification and tag queries.

Manifest schema (JSON)::

    {
      "categories": [
        {"name": "chair", "comparison_keys": ["backrest shape"],
         "tags": [{"id": "chair.wooden", "level": 1, "text": "wooden"}]}
      ],
      "assets": [
        {"asset_id": "chair_a", "category": "chair", "display_name": "Oak chair",
         "dims": [0.5, 0.5, 0.9], "has_front": true,
         "shape": {"kind": "box"}, "tags": ["chair.wooden"]}
      ]
    }

Loading aborts on structural errors (bad JSON, missing fields, non-positive
dims, duplicate ids, unknown categories). Tag consistency is reported by
:func:`verify_tag_library` instead, so partially tagged drafts still load.
"""
import json
import logging
import os
from collections import OrderedDict
from dataclasses import dataclass, field

from mvqa_core.utils.serialization import write_json

MAX_TAG_LEVEL = 4

MISSING_COMPARISON_KEYS = "MissingComparisonKeys"
EMPTY_TAG_LEVEL = "EmptyTagLevel"
UNKNOWN_TAG_ASSIGNED = "UnknownTagAssigned"
UNTAGGED_ASSET = "UntaggedAsset"
ORPHAN_TAG = "OrphanTag"

SEVERITY = {
    MISSING_COMPARISON_KEYS: "error",
    EMPTY_TAG_LEVEL: "error",
    UNKNOWN_TAG_ASSIGNED: "error",
    UNTAGGED_ASSET: "error",
    ORPHAN_TAG: "warning",
}


class ManifestError(ValueError):
    pass


class UnknownTagError(KeyError):
    pass


@dataclass(frozen=True)
class TagEntry:
    tag_id: str
    level: int
    text: str
    category: str


@dataclass(frozen=True)
class CategoryRecord:
    name: str
    comparison_keys: tuple = ()
    tags: tuple = ()

    def levels(self):
        out = {}
        for t in self.tags:
            out.setdefault(t.level, []).append(t)
        return out


@dataclass(frozen=True)
class AssetRecord:
    asset_id: str
    category: str
    display_name: str
    dims: tuple
    has_front: bool
    shape: dict = field(default_factory=lambda: {"kind": "box"})
    tags: frozenset = frozenset()
    preview: str = None


@dataclass(frozen=True)
class TagViolation:
    kind: str
    subject: str
    detail: str

    @property
    def severity(self):
        return SEVERITY[self.kind]

    def __str__(self):
        return "[{}] {} {}: {}".format(self.severity, self.kind, self.subject, self.detail)


class TagLibrary(object):
    def __init__(self, categories):
        self.categories = OrderedDict((c.name, c) for c in categories)
        self.tags = {}
        for c in self.categories.values():
            for t in c.tags:
                if t.tag_id in self.tags:
                    raise ManifestError("duplicate tag id '{}'".format(t.tag_id))
                self.tags[t.tag_id] = t

    def __contains__(self, tag_id):
        return tag_id in self.tags

    def comparison_keys(self, category):
        return self.categories[category].comparison_keys


class AssetLibrary(object):
    """Immutable after construction; safe for concurrent readers."""

    def __init__(self, tag_library, assets, manifest_dir="."):
        self.tag_library = tag_library
        self.manifest_dir = manifest_dir
        self.assets = OrderedDict()
        for a in sorted(assets, key=lambda a: a.asset_id):
            if a.asset_id in self.assets:
                raise ManifestError("duplicate asset_id '{}'".format(a.asset_id))
            self.assets[a.asset_id] = a

    def __len__(self):
        return len(self.assets)

    def __contains__(self, asset_id):
        return asset_id in self.assets

    def get(self, asset_id):
        try:
            return self.assets[asset_id]
        except KeyError:
            raise KeyError("unknown asset '{}'".format(asset_id))

    def by_category(self, category):
        return [a for a in self.assets.values() if a.category == category]

    def census(self):
        counts = OrderedDict((name, 0) for name in self.tag_library.categories)
        for a in self.assets.values():
            counts[a.category] += 1
        return dict(counts)

    def mesh_path(self, asset):
        if asset.shape.get("kind") != "mesh":
            return None
        return os.path.normpath(os.path.join(self.manifest_dir, asset.shape["path"]))

    def to_dict(self):
        return {
            "categories": [
                {
                    "name": c.name,
                    "comparison_keys": list(c.comparison_keys),
                    "tags": [{"id": t.tag_id, "level": t.level, "text": t.text} for t in c.tags],
                }
                for c in self.tag_library.categories.values()
            ],
            "assets": [
                dict(
                    {
                        "asset_id": a.asset_id,
                        "category": a.category,
                        "display_name": a.display_name,
                        "dims": list(a.dims),
                        "has_front": a.has_front,
                        "shape": dict(a.shape),
                        "tags": sorted(a.tags),
                    },
                    **({"preview": a.preview} if a.preview else {})
                )
                for a in self.assets.values()
            ],
        }


def _require(d, key, where, kind=None):
    if not isinstance(d, dict) or key not in d:
        raise ManifestError("{}: missing field '{}'".format(where, key))
    value = d[key]
    if kind is not None and not isinstance(value, kind):
        raise ManifestError("{}.{}: expected {}, got {}".format(
            where, key, getattr(kind, "__name__", kind), type(value).__name__))
    return value


def _parse_category(raw, i, logger):
    where = "categories[{}]".format(i)
    name = _require(raw, "name", where, str)
    keys = raw.get("comparison_keys", [])
    if not isinstance(keys, list):
        raise ManifestError("{}.comparison_keys: expected a list".format(where))
    for k, key in enumerate(keys):
        if not isinstance(key, str) or not key.strip():
            raise ManifestError("{}.comparison_keys[{}]: keys must be non-empty strings".format(
                where, k))
    tags = []
    for j, t in enumerate(raw.get("tags", [])):
        twhere = "{}.tags[{}]".format(where, j)
        tag_id = _require(t, "id", twhere, str)
        level = _require(t, "level", twhere, int)
        if isinstance(level, bool) or level < 1:
            raise ManifestError("{}: tag '{}' has level {}, levels start at 1".format(
                twhere, tag_id, level))
        if level > MAX_TAG_LEVEL:
            logger.warning("{}: tag '{}' uses level {} above {}".format(
                twhere, tag_id, level, MAX_TAG_LEVEL))
        tags.append(TagEntry(tag_id, level, t.get("text", tag_id), name))
    return CategoryRecord(name, tuple(keys), tuple(tags))


def _parse_asset(raw, i, categories):
    where = "assets[{}]".format(i)
    asset_id = _require(raw, "asset_id", where, str)
    where = "{} ({})".format(where, asset_id)
    category = _require(raw, "category", where, str)
    if category not in categories:
        raise ManifestError("{}: unknown category '{}'".format(where, category))
    dims = _require(raw, "dims", where, list)
    if len(dims) != 3 or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                 for v in dims):
        raise ManifestError("{}.dims: expected [width, depth, height]".format(where))
    if min(dims) <= 0:
        raise ManifestError("asset '{}': dims must be strictly positive, got {}".format(
            asset_id, dims))
    shape = raw.get("shape", {"kind": "box"})
    if shape.get("kind") not in ("box", "mesh"):
        raise ManifestError("{}.shape.kind: expected 'box' or 'mesh'".format(where))
    if shape["kind"] == "mesh" and not isinstance(shape.get("path"), str):
        raise ManifestError("{}.shape: mesh shapes need a path".format(where))
    tags = raw.get("tags", [])
    if not isinstance(tags, list):
        raise ManifestError("{}.tags: expected a list".format(where))
    return AssetRecord(
        asset_id=asset_id,
        category=category,
        display_name=raw.get("display_name", asset_id),
        dims=tuple(float(v) for v in dims),
        has_front=bool(raw.get("has_front", False)),
        shape=dict(shape),
        tags=frozenset(tags),
        preview=raw.get("preview"),
    )


def parse_manifest(text, manifest_dir=".", source="<manifest>"):
    logger = logging.getLogger("mvqa_core.assets")
    if not text.strip():
        raw = {}
    else:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ManifestError("{}:{}:{}: {}".format(source, e.lineno, e.colno, e.msg))
    if not isinstance(raw, dict):
        raise ManifestError("{}: top level must be an object".format(source))
    categories = [_parse_category(c, i, logger) for i, c in enumerate(raw.get("categories", []))]
    names = [c.name for c in categories]
    dup = sorted({n for n in names if names.count(n) > 1})
    if dup:
        raise ManifestError("{}: duplicate category '{}'".format(source, dup[0]))
    library = TagLibrary(categories)
    assets = [_parse_asset(a, i, library.categories) for i, a in enumerate(raw.get("assets", []))]
    ids = [a.asset_id for a in assets]
    dup = sorted({n for n in ids if ids.count(n) > 1})
    if dup:
        raise ManifestError("{}: duplicate asset_id '{}'".format(source, dup[0]))
    return AssetLibrary(library, assets, manifest_dir)


def load_asset_library(manifest_path):
    with open(manifest_path, "r", encoding="utf-8") as f:
        text = f.read()
    lib = parse_manifest(text, os.path.dirname(manifest_path) or ".", manifest_path)
    logger = logging.getLogger("mvqa_core.assets")
    logger.info("Loaded {} assets in {} categories from {}".format(
        len(lib), len(lib.tag_library.categories), manifest_path))
    return lib


def write_asset_manifest(lib, path):
    """Serialize with mesh and preview paths rebased onto the new manifest directory."""
    d = lib.to_dict()
    target_dir = os.path.dirname(os.path.abspath(path))
    for a in d["assets"]:
        if a["shape"].get("kind") == "mesh":
            source = os.path.join(lib.manifest_dir, a["shape"]["path"])
            a["shape"]["path"] = os.path.relpath(os.path.abspath(source), target_dir)
        if a.get("preview"):
            source = os.path.join(lib.manifest_dir, a["preview"])
            a["preview"] = os.path.relpath(os.path.abspath(source), target_dir)
    write_json(path, d)


def verify_tag_library(lib):
    """Structural checks over the tag library; violations are data."""
    violations = []
    tags = lib.tag_library.tags
    census = lib.census()
    used = set()
    for name, category in lib.tag_library.categories.items():
        if census.get(name, 0) >= 2 and not category.comparison_keys:
            violations.append(TagViolation(
                MISSING_COMPARISON_KEYS, name,
                "{} assets but no comparison keys".format(census[name])))
        levels = category.levels()
        if levels:
            for level in range(1, max(levels) + 1):
                if level not in levels:
                    violations.append(TagViolation(
                        EMPTY_TAG_LEVEL, name, "level {} declares no tags".format(level)))
        elif census.get(name, 0) > 0:
            violations.append(TagViolation(EMPTY_TAG_LEVEL, name, "level 1 declares no tags"))
    for asset in lib.assets.values():
        level_one = False
        for tag_id in sorted(asset.tags):
            entry = tags.get(tag_id)
            if entry is None:
                violations.append(TagViolation(
                    UNKNOWN_TAG_ASSIGNED, asset.asset_id, "tag '{}' is not in the library".format(tag_id)))
                continue
            if entry.category != asset.category:
                violations.append(TagViolation(
                    UNKNOWN_TAG_ASSIGNED, asset.asset_id,
                    "tag '{}' belongs to category '{}'".format(tag_id, entry.category)))
                continue
            used.add(tag_id)
            level_one = level_one or entry.level == 1
        if not level_one:
            violations.append(TagViolation(
                UNTAGGED_ASSET, asset.asset_id, "no level-1 tag assigned"))
    for tag_id in sorted(tags):
        if tag_id not in used:
            violations.append(TagViolation(ORPHAN_TAG, tag_id, "assigned to no asset"))
    return violations


def query_assets_by_tags(lib, required_tags, category=None):
    """Sorted asset ids carrying every required tag (and the category if given)."""
    required = set(required_tags)
    unknown = sorted(t for t in required if t not in lib.tag_library)
    if unknown:
        raise UnknownTagError("unknown tag id(s): {}".format(", ".join(unknown)))
    if category is not None and category not in lib.tag_library.categories:
        raise KeyError("unknown category '{}'".format(category))
    return [
        a.asset_id for a in lib.assets.values()
        if required <= a.tags and (category is None or a.category == category)
    ]
