"""Rejection sampling of scene layouts from theme configurations.

Random streams are keyed so that each spec draws independently:

* ``(seed, theme_id, "scale")`` picks the per-scene count multiplier,
* ``(seed, theme_id, spec_index, "count")`` picks a spec's base count,
* ``(seed, theme_id, spec_index, object_index, attempt)`` drives one
  placement attempt.

Adding a spec at the end of a theme therefore leaves earlier objects alone.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from mvqa_core.data.themes import GridPlacement, validate_theme_against_library
from mvqa_core.modeling.relations.spatial import RelationParams
from mvqa_core.structures.footprint import inside_rect
from mvqa_core.structures.primitives import Pose3, normalize_yaw
from mvqa_core.structures.scene import FloorSpec, PlacedObject, SceneInstance
from mvqa_core.utils.parallel import ordered_map
from mvqa_core.utils.seeding import make_rng

from .splits import EVAL_SPLIT, split_scene
from .validate import OVERLAP_TOLERANCE, anchor_relation_satisfied, footprint_overlap, z_overlap

# angle of each horizontal label in the reference frame, counterclockwise from forward
LABEL_ANGLES = {
    "Front": 0.0, "FrontLeft": 45.0, "Left": 90.0, "BackLeft": 135.0,
    "Back": 180.0, "BackRight": -135.0, "Right": -90.0, "FrontRight": -45.0,
}


class ConstraintUnsatisfiable(RuntimeError):
    def __init__(self, theme_id, spec_index, category, attempts, reason=""):
        msg = "{}: object_specs[{}] ({}) could not be placed after {} attempts".format(
            theme_id, spec_index, category, attempts)
        if reason:
            msg += ": " + reason
        super(ConstraintUnsatisfiable, self).__init__(msg)
        self.theme_id = theme_id
        self.spec_index = spec_index


@dataclass(frozen=True)
class SceneParams:
    max_attempts: int = 1000
    overlap_tolerance: float = OVERLAP_TOLERANCE
    relations: RelationParams = RelationParams()


def build_scene_params(cfg, relation_params=None):
    return SceneParams(
        max_attempts=cfg.SCENE.MAX_ATTEMPTS,
        overlap_tolerance=cfg.SCENE.OVERLAP_TOLERANCE,
        relations=relation_params or RelationParams(),
    )


def _uniform(rng, lo, hi):
    return float(lo) if lo == hi else float(rng.uniform(lo, hi))


def _sector(label, epsilon):
    """Angular interval (radians) whose directions get ``label`` under the
    epsilon-zeroing rule, shrunk slightly away from the boundaries."""
    center = math.radians(LABEL_ANGLES[label])
    edge = math.asin(epsilon)
    if LABEL_ANGLES[label] % 90.0 == 0.0:
        half = 0.9 * edge
    else:
        half = 0.9 * (math.pi / 4 - edge)
    return center - half, center + half


class _Placer(object):
    def __init__(self, theme, lib, seed, params):
        self.theme = theme
        self.lib = lib
        self.seed = seed
        self.params = params
        self.floor = FloorSpec(theme.floor_extent[0], theme.floor_extent[1], theme.material_tag)
        self.placed = []
        self.per_category = {}

    def next_instance_id(self, category):
        k = self.per_category.get(category, 0) + 1
        self.per_category[category] = k
        return "{}_{:02d}".format(category, k)

    def pool(self, spec):
        return [a for a in self.lib.by_category(spec.category)
                if set(spec.required_tags) <= a.tags]

    def make_object(self, asset, spec_index, position, yaw, scale, anchors=()):
        return PlacedObject(
            instance_id="",
            asset_id=asset.asset_id,
            category=asset.category,
            pose=Pose3(position, yaw),
            scale=scale,
            dims=asset.dims,
            has_front=asset.has_front,
            tags=tuple(asset.tags),
            shape=self._shape(asset),
            anchors=anchors,
            spec_index=spec_index,
        )

    def _shape(self, asset):
        if asset.shape.get("kind") == "mesh":
            return {"kind": "mesh", "path": self.lib.mesh_path(asset)}
        return dict(asset.shape)

    def fits(self, obj, clearance=0.0):
        x_half, y_half = self.floor.half
        if not inside_rect(obj.footprint(), x_half, y_half):
            return False
        for other in self.placed:
            if z_overlap(obj, other) and (
                    footprint_overlap(obj, other, clearance) > self.params.overlap_tolerance):
                return False
        return True

    def commit(self, obj):
        obj.instance_id = self.next_instance_id(obj.category)
        self.placed.append(obj)

    def place_grid(self, spec, spec_index):
        pool = self.pool(spec)
        rng = make_rng(self.seed, self.theme.theme_id, spec_index, "grid")
        grid = spec.placement
        for cell, (x, y) in enumerate(grid.positions()):
            asset = pool[int(rng.integers(len(pool)))]
            scale = _uniform(rng, *spec.object_scale)
            yaw = spec.facing if isinstance(spec.facing, (int, float)) else grid.yaw
            obj = self.make_object(asset, spec_index, (x, y, 0.0), yaw, scale)
            if not self.fits(obj):
                raise ConstraintUnsatisfiable(
                    self.theme.theme_id, spec_index, spec.category, 1,
                    "grid cell {} collides or leaves the floor".format(cell))
            self.commit(obj)

    def candidate_targets(self, anchor):
        out = [o for o in self.placed if o.category == anchor.target_category]
        if anchor.relation_label not in (None, "On"):
            out = [o for o in out if o.has_front]
        return out

    def propose(self, spec, spec_index, pool, rng):
        asset = pool[int(rng.integers(len(pool)))]
        scale = _uniform(rng, *spec.object_scale)
        size = np.array(asset.dims) * scale
        z = 0.0
        target = None
        anchors = ()
        if spec.anchor_relations:
            primary = spec.anchor_relations[0]
            targets = self.candidate_targets(primary)
            target = targets[int(rng.integers(len(targets)))]
            lo, hi = primary.distance_range
            hi = min(hi, float(np.hypot(*self.floor.half)) * 2.0)
            if primary.relation_label == "On":
                half = target.half_extents[:2]
                local = rng.uniform(-1.0, 1.0, size=2) * np.maximum(half - 0.5 * size[:2], 0.0)
                c, s = math.cos(target.pose.yaw), math.sin(target.pose.yaw)
                xy = target.center_xy + np.array([c * local[0] - s * local[1],
                                                  s * local[0] + c * local[1]])
                z = target.top_z
            else:
                if primary.relation_label is None:
                    theta = float(rng.uniform(-math.pi, math.pi))
                else:
                    theta = float(rng.uniform(*_sector(primary.relation_label,
                                                       self.params.relations.epsilon)))
                distance = _uniform(rng, lo, max(lo, hi))
                heading = target.pose.yaw + theta
                xy = target.center_xy + distance * np.array([math.cos(heading), math.sin(heading)])
        else:
            x_half, y_half = self.floor.half
            r = 0.5 * float(np.hypot(size[0], size[1]))
            xr = max(x_half - r, 0.0)
            yr = max(y_half - r, 0.0)
            xy = np.array([rng.uniform(-xr, xr) if xr > 0 else 0.0,
                           rng.uniform(-yr, yr) if yr > 0 else 0.0])

        yaw = self._facing(spec.facing, rng, xy, target)
        obj = self.make_object(asset, spec_index, (xy[0], xy[1], z), yaw, scale)
        if spec.anchor_relations:
            anchors = []
            for k, anchor in enumerate(spec.anchor_relations):
                options = [target] if k == 0 else self.candidate_targets(anchor)
                hit = next((t for t in options if anchor_relation_satisfied(
                    t, obj, anchor, self.params.relations)), None)
                if hit is None:
                    return None
                hi = anchor.distance_range[1]
                anchors.append({
                    "target": hit.instance_id,
                    "relation_label": anchor.relation_label,
                    "distance_range": [anchor.distance_range[0], None if math.isinf(hi) else hi],
                })
            obj.anchors = tuple(anchors)
        return obj

    @staticmethod
    def _facing(facing, rng, xy, target):
        if isinstance(facing, (int, float)) and not isinstance(facing, bool):
            return normalize_yaw(facing)
        random_yaw = float(rng.uniform(-math.pi, math.pi))
        if facing == "random" or target is None:
            return random_yaw
        d = np.asarray(target.center_xy) - xy
        if np.hypot(d[0], d[1]) < 1e-9:
            return random_yaw
        yaw = math.atan2(d[1], d[0])
        return normalize_yaw(yaw if facing == "target" else yaw + math.pi)

    def place_stochastic(self, spec, spec_index, n):
        pool = self.pool(spec)
        theme_id = self.theme.theme_id
        for anchor in spec.anchor_relations:
            if n > 0 and not self.candidate_targets(anchor):
                raise ConstraintUnsatisfiable(
                    theme_id, spec_index, spec.category, 0,
                    "no placed '{}' to anchor to".format(anchor.target_category))
        clearance = spec.placement.clearance
        for obj_index in range(n):
            for attempt in range(self.params.max_attempts):
                rng = make_rng(self.seed, theme_id, spec_index, obj_index, attempt)
                obj = self.propose(spec, spec_index, pool, rng)
                if obj is not None and self.fits(obj, clearance):
                    self.commit(obj)
                    break
            else:
                raise ConstraintUnsatisfiable(theme_id, spec_index, spec.category,
                                              self.params.max_attempts)


def scaled_count(theme, spec, spec_index, seed):
    if isinstance(spec.placement, GridPlacement):
        return spec.count[0]
    scale = _uniform(make_rng(seed, theme.theme_id, "scale"), *theme.scale_range)
    lo, hi = spec.count
    base = int(make_rng(seed, theme.theme_id, spec_index, "count").integers(lo, hi + 1))
    return int(math.floor(base * scale + 0.5))


def sample_scene(theme, lib, seed, params=SceneParams(), scene_id=None):
    """Sample one layout; a pure function of (theme, lib, seed)."""
    validate_theme_against_library(theme, lib)
    placer = _Placer(theme, lib, seed, params)
    for spec_index, spec in enumerate(theme.object_specs):
        if isinstance(spec.placement, GridPlacement):
            placer.place_grid(spec, spec_index)
        else:
            n = scaled_count(theme, spec, spec_index, seed)
            placer.place_stochastic(spec, spec_index, n)
    tag_text = {}
    for obj in placer.placed:
        for tag_id in obj.tags:
            entry = lib.tag_library.tags.get(tag_id)
            if entry is not None:
                tag_text[tag_id] = {"text": entry.text, "level": entry.level}
    return SceneInstance(
        scene_id=scene_id or "{}_{}".format(theme.theme_id, seed),
        theme_id=theme.theme_id,
        seed=seed,
        floor=placer.floor,
        objects=placer.placed,
        lighting=dict(theme.lighting),
        tag_text=tag_text,
    )


def scene_jobs(themes, count, seed, split=EVAL_SPLIT):
    """(theme, scene_id, scene_seed) for ``count`` scenes of every theme."""
    jobs = []
    for theme in sorted(themes, key=lambda t: t.theme_id):
        for k in range(count):
            scene_id, scene_seed = split_scene(split, theme.theme_id, k, seed)
            jobs.append((theme, scene_id, scene_seed))
    return jobs


def generate_scenes(themes, lib, count, seed, params=SceneParams(), jobs=1, show_progress=False,
                    split=EVAL_SPLIT):
    logger = logging.getLogger("mvqa_core.scene")
    work = scene_jobs(themes, count, seed, split)
    logger.info("Sampling {} {} scenes from {} themes".format(len(work), split, len(themes)))
    return ordered_map(
        lambda job: sample_scene(job[0], lib, job[2], params, scene_id=job[1]),
        work, jobs=jobs, desc="scenes", show_progress=show_progress,
    )
