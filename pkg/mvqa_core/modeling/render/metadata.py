import logging

import numpy as np

from mvqa_core.structures.camera import project_box_to_bbox2, project_points
from mvqa_core.structures.views import ObjectViewMetadata, SceneViewMetadata
from mvqa_core.utils.parallel import ordered_map
from mvqa_core.utils.timer import Timer, get_time_str

from .geometry import SceneGeometry, unit_mesh
from .occlusion import DEFAULT_RAYS, compute_occlusion


def object_bbox2(camera, obj):
    """Clipped pixel box of the object's actual shape, or None behind the camera."""
    if obj.shape.get("kind") == "mesh":
        return project_box_to_bbox2(camera, unit_mesh(obj.shape["path"]),
                                    pose=obj.pose, scale=obj.size)
    return project_box_to_bbox2(camera, obj.box())


def object_view_metadata(scene, view, obj, n_rays=DEFAULT_RAYS, geometry=None, seed=None):
    camera = view.camera
    corners_uv, _ = project_points(camera, obj.box().corners())
    corners = [None if np.isnan(c[0]) else (float(c[0]), float(c[1])) for c in corners_uv]
    center_uv, depth = project_points(camera, obj.center[None])
    center = None if np.isnan(center_uv[0, 0]) else (float(center_uv[0, 0]), float(center_uv[0, 1]))
    bbox = object_bbox2(camera, obj)
    in_frustum = bbox is not None and bbox.area() > 0.0
    if in_frustum:
        occlusion = compute_occlusion(scene, camera, obj.instance_id, n_rays, geometry,
                                      view_id=view.view_id, seed=seed)
    else:
        bbox, occlusion = None, 1.0
    return ObjectViewMetadata(
        instance_id=obj.instance_id,
        view_id=view.view_id,
        bbox2=bbox,
        occlusion_ratio=occlusion,
        in_frustum=in_frustum,
        projected_3d_corners=corners,
        center_uv=center,
        depth=float(depth[0]),
    )


def extract_view_metadata(scene, view, n_rays=DEFAULT_RAYS, geometry=None, seed=None):
    """One record per scene object, in instance_id order."""
    geometry = geometry or SceneGeometry(scene)
    objects = sorted(scene.objects, key=lambda o: o.instance_id)
    return [object_view_metadata(scene, view, o, n_rays, geometry, seed) for o in objects]


def extract_scene_metadata(scene, views, n_rays=DEFAULT_RAYS, jobs=1, seed=None):
    """Metadata for every (view, object) pair; jobs run in parallel and are
    gathered back in (view_id, instance_id) order."""
    logger = logging.getLogger("mvqa_core.render")
    timer = Timer()
    timer.tic()
    geometry = SceneGeometry(scene)
    pairs = [(v, o) for v in views for o in sorted(scene.objects, key=lambda o: o.instance_id)]
    records = ordered_map(
        lambda pair: object_view_metadata(scene, pair[0], pair[1], n_rays, geometry, seed),
        pairs, jobs=jobs,
    )
    timer.toc()
    logger.debug("{}: {} views x {} objects in {}".format(
        scene.scene_id, len(views), len(scene.objects), get_time_str(timer.total_time)))
    return SceneViewMetadata(scene.scene_id, views, records)


def key_object_visibility(task_objects, metadata, view_ids=None):
    """Mean occlusion ratio over every (task object, view) pair."""
    task_objects = sorted(set(task_objects))
    if not task_objects:
        raise ValueError("key_object_visibility needs at least one task object")
    view_ids = list(view_ids) if view_ids is not None else metadata.view_ids()
    ratios = [metadata.get(v, i).occlusion_ratio for i in task_objects for v in view_ids]
    return float(np.mean(ratios))
