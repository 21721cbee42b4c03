from .cameras import CLASS_RANGES, ViewSpecEntry, parse_views_spec, place_cameras
from .geometry import SceneGeometry
from .instance_map import (
    read_depth_map,
    read_instance_map,
    render_instance_map,
    write_depth_map,
    write_instance_map,
)
from .metadata import extract_scene_metadata, extract_view_metadata, key_object_visibility
from .occlusion import compute_occlusion

__all__ = [
    "CLASS_RANGES",
    "SceneGeometry",
    "ViewSpecEntry",
    "compute_occlusion",
    "extract_scene_metadata",
    "extract_view_metadata",
    "key_object_visibility",
    "parse_views_spec",
    "place_cameras",
    "read_depth_map",
    "read_instance_map",
    "render_instance_map",
    "write_depth_map",
    "write_instance_map",
]
