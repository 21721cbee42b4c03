from .benchmark import BenchmarkResult, call_with_retries, run_benchmark
from .pipeline import (
    StageInputError,
    check_disjoint_renders,
    load_bundles,
    load_rendered_scenes,
    load_scenes,
    render_scene,
    run_qa_gen,
    run_render,
    run_scene_gen,
    verify_dataset,
)
from .tagging import OsdTagStageError, TaggingDraft, apply_drafts, auto_repair, osd_tag_category
from .verifier import verify_answer, verify_problems

__all__ = [
    "BenchmarkResult",
    "OsdTagStageError",
    "StageInputError",
    "TaggingDraft",
    "apply_drafts",
    "auto_repair",
    "call_with_retries",
    "check_disjoint_renders",
    "load_bundles",
    "load_rendered_scenes",
    "load_scenes",
    "osd_tag_category",
    "render_scene",
    "run_benchmark",
    "run_qa_gen",
    "run_render",
    "run_scene_gen",
    "verify_answer",
    "verify_dataset",
    "verify_problems",
]
