from .ray_cast import ray_box_distances, ray_triangle_distances, segment_min

__all__ = ["ray_box_distances", "ray_triangle_distances", "segment_min"]
