"""File-to-file stage drivers.

Output layout::

    scenes/<scene_id>.json                 scene gen
    render/<scene_id>/scene.json           render (scene copy)
    render/<scene_id>/views.json           cameras + per-object metadata
    render/<scene_id>/<view_id>.ppm        instance maps
    render/<scene_id>/<view_id>_depth.pgm  optional depth maps
    render/<scene_id>/relations.json       optional relation graphs
    data.jsonl, shortfall.txt              qa gen
"""
import glob
import logging
import os

from mvqa_core.data.datasets import QADataset
from mvqa_core.modeling.qa import QAParams, SceneBundle, generate_dataset
from mvqa_core.modeling.relations import RelationParams, build_relation_graphs, relation_graphs_to_dict
from mvqa_core.modeling.render import (
    extract_scene_metadata,
    place_cameras,
    render_instance_map,
    write_depth_map,
    write_instance_map,
)
from mvqa_core.modeling.scene import EVAL_SPLIT, SceneParams, check_disjoint, generate_scenes, validate_scene
from mvqa_core.structures.scene import SceneInstance
from mvqa_core.structures.views import SceneViewMetadata
from mvqa_core.utils.miscellaneous import mkdir
from mvqa_core.utils.parallel import ordered_map
from mvqa_core.utils.serialization import write_json
from mvqa_core.utils.timer import Timer, get_time_str

from .verifier import verify_answer, verify_problems

SCENE_FILE = "scene.json"
VIEWS_FILE = "views.json"
RELATIONS_FILE = "relations.json"


class StageInputError(ValueError):
    """A stage input directory is missing or holds no usable files."""


def run_scene_gen(themes, lib, count, seed, output_dir, params=SceneParams(), jobs=1,
                  show_progress=False, split=EVAL_SPLIT):
    """Sample ``count`` scenes per theme of ``split`` and write one canonical
    JSON each."""
    logger = logging.getLogger("mvqa_core.scene")
    scenes = generate_scenes(themes, lib, count, seed, params, jobs, show_progress, split)
    themes_by_id = {t.theme_id: t for t in themes}
    mkdir(output_dir)
    for scene in scenes:
        violations = validate_scene(scene, lib, themes_by_id[scene.theme_id], params.relations,
                                    params.overlap_tolerance)
        for v in violations:
            logger.warning("{}: {}".format(scene.scene_id, v))
        scene.save(os.path.join(output_dir, scene.scene_id + ".json"))
    logger.info("Wrote {} scenes to {}".format(len(scenes), output_dir))
    return scenes


def load_scenes(scene_dir):
    paths = sorted(glob.glob(os.path.join(scene_dir, "*.json")))
    if not paths:
        raise StageInputError("no scene files in {}".format(scene_dir))
    return [SceneInstance.load(p) for p in paths]


def load_rendered_scenes(render_dir):
    """Scene copies of a render directory, without metadata or relations."""
    paths = sorted(glob.glob(os.path.join(render_dir, "*", SCENE_FILE)))
    if not paths:
        raise StageInputError("no rendered scenes in {}".format(render_dir))
    return [SceneInstance.load(p) for p in paths]


def check_disjoint_renders(bundles, render_dirs):
    """Raise SplitOverlapError when a scene of ``bundles`` also occurs in
    any of ``render_dirs``."""
    scenes = [b.scene for b in bundles]
    others = []
    for d in render_dirs:
        others.extend(load_rendered_scenes(d))
    check_disjoint(scenes, others)
    logging.getLogger("mvqa_core.scene").info(
        "{} scenes are disjoint from {} scenes in {}".format(
            len(scenes), len(others), ", ".join(render_dirs)))


def render_scene(scene, views_spec, output_dir, seed, n_rays=1024, image_size=(1024, 768),
                 relation_params=RelationParams(), write_maps=True, write_depth=False,
                 write_relations=True):
    """Cameras, metadata and optional image files of one scene.

    Returns the SceneBundle, with image paths relative to ``output_dir``.
    """
    scene_dir = os.path.join(output_dir, scene.scene_id)
    mkdir(scene_dir)
    views = place_cameras(scene, views_spec, seed, image_size)
    metadata = extract_scene_metadata(scene, views, n_rays, jobs=1, seed=seed)
    scene.save(os.path.join(scene_dir, SCENE_FILE))
    metadata.save(os.path.join(scene_dir, VIEWS_FILE))

    image_paths = {}
    if write_maps or write_depth:
        for view in views:
            if write_depth:
                ids, depth = render_instance_map(scene, view, with_depth=True)
                write_depth_map(os.path.join(scene_dir, view.view_id + "_depth.pgm"), depth)
            else:
                ids = render_instance_map(scene, view)
            if write_maps:
                write_instance_map(os.path.join(scene_dir, view.view_id + ".ppm"), ids)
                image_paths[view.view_id] = os.path.join(scene.scene_id, view.view_id + ".ppm")

    graphs = build_relation_graphs(scene, views, metadata, relation_params)
    if write_relations:
        write_json(os.path.join(scene_dir, RELATIONS_FILE), relation_graphs_to_dict(graphs))
    return SceneBundle(scene, metadata, graphs, image_paths)


def run_render(scenes, views_spec, output_dir, seed, n_rays=1024, image_size=(1024, 768),
               relation_params=RelationParams(), write_maps=True, write_depth=False,
               write_relations=True, jobs=1, show_progress=False):
    """Render every scene; scenes are independent and run in parallel."""
    logger = logging.getLogger("mvqa_core.render")
    timer = Timer()
    timer.tic()
    bundles = ordered_map(
        lambda scene: render_scene(scene, views_spec, output_dir, seed, n_rays, image_size,
                                   relation_params, write_maps, write_depth, write_relations),
        scenes, jobs=jobs, desc="render", show_progress=show_progress,
    )
    timer.toc()
    logger.info("Rendered {} scenes in {} ({} / scene)".format(
        len(bundles), get_time_str(timer.total_time),
        get_time_str(timer.total_time / max(len(bundles), 1))))
    return bundles


def load_bundles(render_dir, relation_params=RelationParams(), image_root=None):
    """SceneBundles from a render directory. Image paths are made relative
    to ``image_root`` (default: ``render_dir``)."""
    scene_dirs = sorted(
        d for d in glob.glob(os.path.join(render_dir, "*"))
        if os.path.isfile(os.path.join(d, SCENE_FILE)) and os.path.isfile(os.path.join(d, VIEWS_FILE))
    )
    if not scene_dirs:
        raise StageInputError("no rendered scenes in {}".format(render_dir))
    image_root = image_root if image_root is not None else render_dir
    bundles = []
    for d in scene_dirs:
        scene = SceneInstance.load(os.path.join(d, SCENE_FILE))
        metadata = SceneViewMetadata.load(os.path.join(d, VIEWS_FILE))
        image_paths = {}
        for view_id in metadata.view_ids():
            path = os.path.join(d, view_id + ".ppm")
            if os.path.isfile(path):
                image_paths[view_id] = os.path.relpath(path, image_root)
        graphs = build_relation_graphs(scene, metadata.views, metadata, relation_params)
        bundles.append(SceneBundle(scene, metadata, graphs, image_paths))
    logging.getLogger("mvqa_core.render").info(
        "Loaded {} rendered scenes from {}".format(len(bundles), render_dir))
    return bundles


def run_qa_gen(bundles, templates, targets, seed, output_path, params=QAParams(), verify=True,
               show_progress=False):
    """Generate the dataset, write it with its shortfall report, and return
    the GenerationResult."""
    checker = None
    if verify:
        def checker(q, bundle):
            return verify_answer(q, bundle.scene, bundle.metadata, params.relations)

    result = generate_dataset(bundles, templates, targets, seed, params, checker, show_progress)
    output_dir = os.path.dirname(output_path) or "."
    mkdir(output_dir)
    QADataset(result.questions, output_dir).save(output_path, include_supervision=bool(
        params.supervision_level))
    with open(os.path.join(output_dir, "shortfall.txt"), "w") as f:
        f.write(result.shortfall_text())
    write_json(os.path.join(output_dir, "generation_stats.json"), {
        "targets": targets.to_dict(),
        "counts": dict(sorted(result.counts().items())),
        "shortfall": result.shortfall(),
        "templates": result.stats,
    })
    return result


def verify_dataset(dataset, bundles, params=RelationParams()):
    """``{qid: [problem, ...]}`` for every question that fails re-derivation."""
    by_scene = {b.scene_id: b for b in bundles}
    failures = {}
    for q in dataset:
        bundle = by_scene.get(q.scene_id)
        if bundle is None:
            failures[q.qid] = ["scene '{}' not found".format(q.scene_id)]
            continue
        problems = verify_problems(q, bundle.scene, bundle.metadata, params)
        if problems:
            failures[q.qid] = problems
    logger = logging.getLogger("mvqa_core.verify")
    logger.info("Verified {} questions: {} failed".format(len(dataset), len(failures)))
    return failures
