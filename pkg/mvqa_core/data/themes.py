"""Theme configurations: the designer-authored recipe a scene is sampled from.

See ``configs/themes/README.md`` for a commented example of each placement
kind.
"""
import glob
import json
import logging
import math
import os
from dataclasses import dataclass, field

from mvqa_core.structures.relation_graph import HORIZONTAL_LABELS

ANCHOR_LABELS = HORIZONTAL_LABELS + ("On",)
FACING_MODES = ("random", "target", "away")


class ThemeError(ValueError):
    pass


@dataclass(frozen=True)
class AnchorRelation:
    relation_label: object  # horizontal label, "On", or None for a distance band only
    target_category: str
    distance_range: tuple

    def to_dict(self):
        return {
            "relation_label": self.relation_label,
            "target_category": self.target_category,
            "distance_range": list(self.distance_range),
        }


@dataclass(frozen=True)
class GridPlacement:
    rows: int
    cols: int
    spacing: tuple
    origin: tuple = (0.0, 0.0)
    yaw: float = 0.0

    kind = "grid"

    def positions(self):
        """Row-major cell centers: origin + ((j - (cols-1)/2) sx, (i - (rows-1)/2) sy)."""
        sx, sy = self.spacing
        ox, oy = self.origin
        return [
            (ox + (j - (self.cols - 1) / 2.0) * sx, oy + (i - (self.rows - 1) / 2.0) * sy)
            for i in range(self.rows) for j in range(self.cols)
        ]


@dataclass(frozen=True)
class StochasticPlacement:
    clearance: float = 0.0

    kind = "stochastic"


@dataclass(frozen=True)
class ObjectSpec:
    category: str
    count: tuple  # (lo, hi) inclusive; fixed counts have lo == hi
    placement: object
    anchor_relations: tuple = ()
    required_tags: tuple = ()
    facing: object = "random"
    object_scale: tuple = (1.0, 1.0)


@dataclass(frozen=True)
class ThemeConfig:
    theme_id: str
    floor_extent: tuple
    material_tag: str
    scale_range: tuple
    object_specs: tuple
    lighting: dict = field(default_factory=dict)


def _pair(value, where, positive=False):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ThemeError("{}: expected a pair".format(where))
    a, b = float(value[0]), float(value[1])
    if positive and (a <= 0 or b <= 0):
        raise ThemeError("{}: values must be positive".format(where))
    return a, b


def _parse_count(value, where):
    if isinstance(value, int) and not isinstance(value, bool):
        lo = hi = value
    elif isinstance(value, list) and len(value) == 2:
        lo, hi = int(value[0]), int(value[1])
    else:
        raise ThemeError("{}: count must be an integer or [lo, hi]".format(where))
    if lo < 0 or hi < lo:
        raise ThemeError("{}: empty count range [{}, {}]".format(where, lo, hi))
    return lo, hi


def _parse_spec(raw, i, theme_id):
    where = "{}.object_specs[{}]".format(theme_id, i)
    if "category" not in raw:
        raise ThemeError("{}: missing category".format(where))
    placement_raw = raw.get("placement", {"kind": "stochastic"})
    kind = placement_raw.get("kind")
    if kind == "grid":
        placement = GridPlacement(
            rows=int(placement_raw["rows"]),
            cols=int(placement_raw["cols"]),
            spacing=_pair(placement_raw["spacing"], where + ".placement.spacing"),
            origin=_pair(placement_raw.get("origin", [0.0, 0.0]), where + ".placement.origin"),
            yaw=float(placement_raw.get("yaw", 0.0)),
        )
        if placement.rows < 1 or placement.cols < 1:
            raise ThemeError("{}: grid needs at least one row and column".format(where))
        count = (placement.rows * placement.cols,) * 2
    elif kind == "stochastic":
        clearance = float(placement_raw.get("clearance", 0.0))
        if clearance < 0:
            raise ThemeError("{}: clearance must be >= 0".format(where))
        placement = StochasticPlacement(clearance)
        count = _parse_count(raw.get("count", 1), where + ".count")
    else:
        raise ThemeError("{}: unknown placement kind '{}'".format(where, kind))

    anchors = []
    for j, a in enumerate(raw.get("anchor_relations", [])):
        awhere = "{}.anchor_relations[{}]".format(where, j)
        label = a.get("relation_label")
        if label is not None and label not in ANCHOR_LABELS:
            raise ThemeError("{}: unknown relation label '{}'".format(awhere, label))
        lo, hi = _pair(a.get("distance_range", [0.0, math.inf]), awhere + ".distance_range")
        if lo < 0 or hi < lo:
            raise ThemeError("{}: bad distance range".format(awhere))
        anchors.append(AnchorRelation(label, a["target_category"], (lo, hi)))
    if anchors and kind == "grid":
        raise ThemeError("{}: grid placements cannot carry anchor relations".format(where))

    facing = raw.get("facing", "random")
    if not (facing in FACING_MODES or isinstance(facing, (int, float))):
        raise ThemeError("{}: facing must be one of {} or a yaw".format(where, FACING_MODES))
    object_scale = _pair(raw.get("object_scale", [1.0, 1.0]), where + ".object_scale", True)
    return ObjectSpec(
        category=raw["category"],
        count=count,
        placement=placement,
        anchor_relations=tuple(anchors),
        required_tags=tuple(sorted(raw.get("required_tags", []))),
        facing=facing,
        object_scale=object_scale,
    )


def parse_theme(raw, source="<theme>"):
    if "theme_id" not in raw:
        raise ThemeError("{}: missing theme_id".format(source))
    theme_id = raw["theme_id"]
    floor = raw.get("floor", {})
    extent = _pair(floor.get("extent"), theme_id + ".floor.extent", positive=True)
    scale_range = _pair(raw.get("scale_range", [1.0, 1.0]), theme_id + ".scale_range", True)
    if scale_range[1] < scale_range[0]:
        raise ThemeError("{}: scale_range min exceeds max".format(theme_id))
    specs = tuple(_parse_spec(s, i, theme_id) for i, s in enumerate(raw.get("object_specs", [])))
    for i, spec in enumerate(specs):
        earlier = {s.category for s in specs[:i]}
        for a in spec.anchor_relations:
            if a.target_category not in {s.category for s in specs}:
                raise ThemeError("{}.object_specs[{}]: anchor target '{}' is not in the theme".format(
                    theme_id, i, a.target_category))
            if a.target_category not in earlier:
                raise ThemeError(
                    "{}.object_specs[{}]: anchor target '{}' must be placed by an earlier spec".format(
                        theme_id, i, a.target_category))
    return ThemeConfig(
        theme_id=theme_id,
        floor_extent=extent,
        material_tag=floor.get("material_tag", ""),
        scale_range=scale_range,
        object_specs=specs,
        lighting=dict(raw.get("lighting", {})),
    )


def load_theme(path):
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as e:
            raise ThemeError("{}:{}:{}: {}".format(path, e.lineno, e.colno, e.msg))
    return parse_theme(raw, path)


def load_themes(theme_dir):
    paths = sorted(glob.glob(os.path.join(theme_dir, "*.json")))
    if not paths:
        raise ThemeError("no theme files in {}".format(theme_dir))
    themes = [load_theme(p) for p in paths]
    logger = logging.getLogger("mvqa_core.themes")
    logger.info("Loaded {} themes from {}".format(len(themes), theme_dir))
    return themes


def validate_theme_against_library(theme, lib):
    """Every spec must find assets; relation anchors need a front-facing target pool."""
    for i, spec in enumerate(theme.object_specs):
        pool = [a for a in lib.by_category(spec.category) if set(spec.required_tags) <= a.tags]
        if not pool:
            raise ThemeError("{}.object_specs[{}]: no asset of category '{}' with tags {}".format(
                theme.theme_id, i, spec.category, list(spec.required_tags)))
        for a in spec.anchor_relations:
            if a.relation_label in HORIZONTAL_LABELS:
                if not any(x.has_front for x in lib.by_category(a.target_category)):
                    raise ThemeError(
                        "{}.object_specs[{}]: '{}' relations need a target with a front".format(
                            theme.theme_id, i, a.relation_label))
