"""Post-hoc scene checks, independent of the sampler's bookkeeping."""
import itertools
import math
from dataclasses import dataclass

import numpy as np

from mvqa_core.modeling.relations.spatial import (
    RelationParams,
    contact_relation,
    object_centric_relation,
)
from mvqa_core.structures.footprint import convex_intersection_area, inside_rect
from mvqa_core.structures.relation_graph import HORIZONTAL_LABELS

COLLISION = "Collision"
OUT_OF_FLOOR = "OutOfFloor"
ANCHOR_VIOLATED = "AnchorViolated"
UNKNOWN_ASSET = "UnknownAsset"

OVERLAP_TOLERANCE = 1e-4  # m^2
Z_EPS = 1e-9


@dataclass(frozen=True)
class SceneViolation:
    kind: str
    subject: str
    detail: str

    def __str__(self):
        return "{} {}: {}".format(self.kind, self.subject, self.detail)


def _range(rel):
    if isinstance(rel, dict):
        lo, hi = rel.get("distance_range") or (0.0, None)
        label = rel.get("relation_label")
    else:
        lo, hi = rel.distance_range
        label = rel.relation_label
    hi = math.inf if hi is None else float(hi)
    return label, float(lo), hi


def anchor_relation_satisfied(a, b, rel, params=RelationParams()):
    """Whether ``b`` sits where ``rel`` (relative to reference ``a``) demands.

    ``rel`` is an AnchorRelation or its dict form. Horizontal labels are read
    in ``a``'s frame; ``On`` requires ``b`` to rest on ``a``; a null label
    checks the center distance only.
    """
    label, lo, hi = _range(rel)
    distance = float(np.hypot(*(np.asarray(b.center_xy) - np.asarray(a.center_xy))))
    if not lo <= distance <= hi:
        return False
    if label is None:
        return True
    if label == "On":
        return contact_relation(b, a, params) == "On"
    if label in HORIZONTAL_LABELS:
        if not a.has_front:
            return False
        return object_centric_relation(a, b, params) == label
    return False


def z_overlap(a, b):
    return a.bottom_z < b.top_z - Z_EPS and b.bottom_z < a.top_z - Z_EPS


def footprint_overlap(a, b, margin=0.0):
    return convex_intersection_area(a.footprint(margin), b.footprint())


def validate_scene(scene, lib=None, theme=None, params=RelationParams(),
                   overlap_tolerance=OVERLAP_TOLERANCE):
    """Every violation found in a scene; an empty list means the layout is valid.

    With ``theme`` given, each object's spec index and category are also
    checked against it.
    """
    violations = []
    x_half, y_half = scene.floor.half
    for obj in scene.objects:
        if lib is not None and obj.asset_id not in lib:
            violations.append(SceneViolation(UNKNOWN_ASSET, obj.instance_id,
                                             "asset '{}' not in library".format(obj.asset_id)))
        if theme is not None:
            specs = theme.object_specs
            if not 0 <= obj.spec_index < len(specs) or specs[obj.spec_index].category != obj.category:
                violations.append(SceneViolation(
                    UNKNOWN_ASSET, obj.instance_id,
                    "no '{}' spec at index {} in theme {}".format(
                        obj.category, obj.spec_index, theme.theme_id)))
        if not inside_rect(obj.footprint(), x_half, y_half):
            violations.append(SceneViolation(OUT_OF_FLOOR, obj.instance_id,
                                             "footprint leaves the {:g} x {:g} m floor".format(
                                                 scene.floor.x_size, scene.floor.y_size)))
        for anchor in obj.anchors:
            target = anchor.get("target")
            if target not in scene:
                violations.append(SceneViolation(ANCHOR_VIOLATED, obj.instance_id,
                                                 "anchor target '{}' missing".format(target)))
                continue
            if not anchor_relation_satisfied(scene.get(target), obj, anchor, params):
                label, lo, hi = _range(anchor)
                distance = float(np.hypot(*(obj.center_xy - scene.get(target).center_xy)))
                violations.append(SceneViolation(
                    ANCHOR_VIOLATED, obj.instance_id,
                    "{} of '{}' within [{:g}, {:g}] m not met (distance {:.3f} m)".format(
                        label, target, lo, hi, distance)))
    for a, b in itertools.combinations(scene.objects, 2):
        if not z_overlap(a, b):
            continue
        overlap = footprint_overlap(a, b)
        if overlap > overlap_tolerance:
            violations.append(SceneViolation(
                COLLISION, "{}|{}".format(a.instance_id, b.instance_id),
                "footprints overlap by {:.4f} m^2".format(overlap)))
    return violations
