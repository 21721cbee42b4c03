from __future__ import absolute_import, division, print_function, unicode_literals

import env_tests.env as env_tests

import os
import copy

from mvqa_core.config import cfg as g_cfg
from mvqa_core.structures.primitives import Pose3
from mvqa_core.structures.scene import FloorSpec, PlacedObject, SceneInstance


def get_config_root_path():
    return env_tests.get_config_root_path()


def load_config(rel_path):
    ''' Load config from file path specified as path relative to config_root '''
    cfg_path = os.path.join(env_tests.get_config_root_path(), rel_path)
    return load_config_from_file(cfg_path)


def load_config_from_file(file_path):
    ''' Load config from file path specified as absolute path '''
    ret = copy.deepcopy(g_cfg)
    ret.merge_from_file(file_path)
    return ret


def make_object(instance_id, category, x, y, z=0.0, yaw=0.0, dims=(1.0, 1.0, 1.0),
                has_front=True, tags=(), scale=1.0):
    return PlacedObject(
        instance_id=instance_id,
        asset_id=category + "_asset",
        category=category,
        pose=Pose3((x, y, z), yaw),
        scale=scale,
        dims=dims,
        has_front=has_front,
        tags=tags,
    )


def make_scene(objects, extent=(20.0, 20.0), scene_id="scene_test", tag_text=None):
    return SceneInstance(
        scene_id=scene_id,
        theme_id="test",
        seed=0,
        floor=FloorSpec(extent[0], extent[1]),
        objects=list(objects),
        tag_text=dict(tag_text or {}),
    )


def make_qa_bundle(n_rays=64):
    """Six objects around a sofa, seen straight down by two aerial cameras.

    Object-centric labels from the sofa: chair_01 Front, chair_02 Left,
    plant_01 Back, lamp_01 Right, table_01 FrontLeft. The heights differ,
    so every pair except the two chairs has a camera depth order.
    """
    import math

    from mvqa_core.modeling.qa import SceneBundle
    from mvqa_core.modeling.render import extract_scene_metadata
    from mvqa_core.structures.camera import CameraModel
    from mvqa_core.structures.views import ViewRecord

    tag_text = {"blue": {"text": "blue", "level": 1}, "red": {"text": "red", "level": 1}}
    objects = [
        make_object("chair_01", "chair", 2.0, 0.0, dims=(0.6, 0.6, 0.8), tags=("red",)),
        make_object("chair_02", "chair", 0.0, 2.0, dims=(0.6, 0.6, 0.8), tags=("blue",)),
        make_object("lamp_01", "lamp", 0.0, -2.0, dims=(0.6, 0.6, 2.0)),
        make_object("plant_01", "plant", -2.0, 0.0, dims=(0.6, 0.6, 1.6)),
        make_object("sofa_01", "sofa", 0.0, 0.0, dims=(0.6, 0.6, 1.0)),
        make_object("table_01", "table", 2.0, 2.0, dims=(0.6, 0.6, 0.75), has_front=False),
    ]
    scene = make_scene(objects, scene_id="scene_qa", tag_text=tag_text)
    fov = math.radians(90.0)
    views = [
        ViewRecord("v0", "Drone", CameraModel((0.0, 0.0, 12.0), 0.0, -math.pi / 2, fov, 320, 240)),
        ViewRecord("v1", "BirdsEye",
                   CameraModel((0.5, 0.5, 14.0), math.pi / 2, -math.pi / 2, fov, 320, 240)),
    ]
    metadata = extract_scene_metadata(scene, views, n_rays=n_rays, seed=0)
    return SceneBundle(scene, metadata, image_paths={"v0": "scene_qa/v0.ppm",
                                                     "v1": "scene_qa/v1.ppm"})


def load_bundled_templates():
    from mvqa_core.data.templates import load_templates

    return load_templates(os.path.join(get_config_root_path(), "templates"))
