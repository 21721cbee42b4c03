"""Ray-castable scene geometry: one oriented box or one posed mesh per object."""
import functools
import math

import numpy as np
import torch

from mvqa_core.data.obj_io import load_obj_mesh, normalize_to_unit_footprint
from mvqa_core.layers import ray_box_distances, ray_triangle_distances, segment_min
from mvqa_core.structures.primitives import triangle_areas


@functools.lru_cache(maxsize=64)
def unit_mesh(path):
    """A mesh file normalized to [-0.5, 0.5]^2 x [0, 1]; scaling by an
    object's size then gives its real extent."""
    return normalize_to_unit_footprint(load_obj_mesh(path))


def object_triangles(obj):
    """World triangles (T, 3, 3) of a mesh-shaped object, or None for boxes."""
    if obj.shape.get("kind") != "mesh":
        return None
    return unit_mesh(obj.shape["path"]).triangle_vertices(pose=obj.pose, scale=obj.size)


def box_row(obj):
    c = obj.center
    h = obj.half_extents
    return [c[0], c[1], c[2], h[0], h[1], h[2], obj.pose.yaw]


class SceneGeometry(object):
    """Batched distance queries over every object of a scene.

    ``distances(origins, directions)`` returns an (R, N) float64 tensor of
    first-hit distances per object, ``inf`` where a ray misses.
    """

    def __init__(self, scene):
        self.instance_ids = scene.instance_ids()
        self.num_objects = len(self.instance_ids)
        box_rows, box_owners = [], []
        tris, tri_owners = [], []
        for k, obj in enumerate(scene.objects):
            t = object_triangles(obj)
            if t is None:
                box_rows.append(box_row(obj))
                box_owners.append(k)
            else:
                tris.append(t)
                tri_owners.extend([k] * len(t))
        self.boxes = torch.tensor(box_rows, dtype=torch.float64).reshape(-1, 7)
        self.box_owners = torch.tensor(box_owners, dtype=torch.long)
        if tris:
            self.triangles = torch.as_tensor(np.concatenate(tris, axis=0), dtype=torch.float64)
        else:
            self.triangles = torch.zeros((0, 3, 3), dtype=torch.float64)
        self.tri_owners = torch.tensor(tri_owners, dtype=torch.long)

    def distances(self, origins, directions):
        origins = torch.as_tensor(origins, dtype=torch.float64).reshape(-1, 3)
        directions = torch.as_tensor(directions, dtype=torch.float64).reshape(-1, 3)
        out = torch.full((origins.shape[0], self.num_objects), math.inf, dtype=torch.float64)
        if len(self.boxes):
            out[:, self.box_owners] = ray_box_distances(origins, directions, self.boxes)
        if len(self.triangles):
            d = ray_triangle_distances(origins, directions, self.triangles)
            per_owner = segment_min(d, self.tri_owners, self.num_objects)
            out = torch.minimum(out, per_owner)
        return out

    def first_hit(self, origins, directions):
        """(distance, object index) of the nearest hit per ray; index -1 on a miss."""
        d = self.distances(origins, directions)
        if d.shape[1] == 0:
            return (torch.full((d.shape[0],), math.inf, dtype=torch.float64),
                    torch.full((d.shape[0],), -1, dtype=torch.long))
        t, idx = d.min(dim=1)
        idx = torch.where(torch.isinf(t), torch.full_like(idx, -1), idx)
        return t, idx


def object_distances(obj, origins, directions):
    """First-hit distances (R,) against a single object."""
    t = object_triangles(obj)
    if t is None:
        boxes = torch.tensor([box_row(obj)], dtype=torch.float64)
        return ray_box_distances(origins, directions, boxes)[:, 0]
    d = ray_triangle_distances(origins, directions, t)
    return d.min(dim=1).values


def surface_patches(obj):
    """Surface pieces of an object as (kind, data, center, normal, area).

    Boxes yield 6 ``"quad"`` faces with data (center, tu, tv); meshes yield
    one ``"tri"`` per triangle with data (a, b, c) and an outward normal
    taken from the winding order.
    """
    t = object_triangles(obj)
    patches = []
    if t is None:
        for center, normal, tu, tv in obj.box().faces():
            area = 4.0 * float(np.linalg.norm(tu) * np.linalg.norm(tv))
            patches.append(("quad", (center, tu, tv), center, normal, area))
        return patches
    areas = triangle_areas(t)
    normals = np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 0])
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    centers = t.mean(axis=1)
    for k in range(len(t)):
        patches.append(("tri", (t[k, 0], t[k, 1], t[k, 2]), centers[k], normals[k], float(areas[k])))
    return patches
