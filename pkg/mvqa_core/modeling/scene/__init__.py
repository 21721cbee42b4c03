from .sampler import (
    ConstraintUnsatisfiable,
    SceneParams,
    build_scene_params,
    generate_scenes,
    sample_scene,
)
from .splits import EVAL_SPLIT, SplitOverlapError, check_disjoint, scene_overlaps
from .validate import SceneViolation, anchor_relation_satisfied, validate_scene

__all__ = [
    "ConstraintUnsatisfiable",
    "EVAL_SPLIT",
    "SceneParams",
    "SceneViolation",
    "SplitOverlapError",
    "anchor_relation_satisfied",
    "build_scene_params",
    "check_disjoint",
    "generate_scenes",
    "sample_scene",
    "scene_overlaps",
    "validate_scene",
]
