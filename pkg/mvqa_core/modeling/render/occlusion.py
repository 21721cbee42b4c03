"""Ray-cast occlusion ratio of one object in one view.

Sample points cover the object's camera-facing surface. Each patch (box
face or mesh triangle) facing the camera receives a share of the rays
proportional to area * cos / distance^2, i.e. its projected size, with
largest-remainder rounding; points inside a patch are Latin-hypercube
stratified. Points projecting outside the image are dropped. Every kept
point casts a ray toward the camera center, starting 1e-4 m off the surface;
the ratio is the fraction of rays that hit any geometry (the object itself
included) before reaching the camera.
"""
import numpy as np
import torch

from mvqa_core.structures.camera import NEAR_EPS, project_points
from mvqa_core.utils.seeding import make_rng

from .geometry import SceneGeometry, surface_patches

SELF_OFFSET = 1e-4
DEFAULT_RAYS = 1024


def allocate(n, weights):
    """Split ``n`` into integer shares proportional to ``weights``."""
    weights = np.asarray(weights, dtype=np.float64)
    raw = n * weights / weights.sum()
    counts = np.floor(raw).astype(np.int64)
    remainder = raw - counts
    order = sorted(range(len(raw)), key=lambda i: (-remainder[i], i))
    for i in order[: n - int(counts.sum())]:
        counts[i] += 1
    return counts


def latin_hypercube(rng, m):
    """m stratified points in the unit square."""
    u = (rng.permutation(m) + rng.random(m)) / m
    v = (rng.permutation(m) + rng.random(m)) / m
    return u, v


def sample_surface_points(obj, camera_position, n_rays, rng):
    """(points (M, 3)) on the camera-facing surface of ``obj``."""
    facing = []
    for kind, data, center, normal, area in surface_patches(obj):
        to_cam = camera_position - center
        dist = float(np.linalg.norm(to_cam))
        if dist <= 0.0:
            continue
        cos = float(np.dot(normal, to_cam)) / dist
        if cos > 0.0:
            facing.append((kind, data, area * cos / (dist * dist)))
    if not facing:
        return np.zeros((0, 3))
    counts = allocate(n_rays, [w for _, _, w in facing])
    points = []
    for (kind, data, _), m in zip(facing, counts):
        if m == 0:
            continue
        u, v = latin_hypercube(rng, int(m))
        if kind == "quad":
            center, tu, tv = data
            pts = center[None] + (2 * u - 1)[:, None] * tu[None] + (2 * v - 1)[:, None] * tv[None]
        else:
            a, b, c = data
            r = np.sqrt(u)[:, None]
            pts = (1 - r) * a[None] + r * (1 - v[:, None]) * b[None] + r * v[:, None] * c[None]
        points.append(pts)
    return np.concatenate(points, axis=0)


def occlusion_rng(scene, view_id, instance_id, seed=None):
    return make_rng(scene.seed if seed is None else seed, "occlusion",
                    scene.scene_id, view_id, instance_id)


def compute_occlusion(scene, camera, instance_id, n_rays=DEFAULT_RAYS, geometry=None,
                      view_id="", seed=None):
    """Fraction of in-image camera-facing sample rays that fail to reach the
    camera; 1.0 when no sample point lands inside the image."""
    if n_rays < 1:
        raise ValueError("n_rays must be at least 1, got {}".format(n_rays))
    obj = scene.get(instance_id)
    geometry = geometry or SceneGeometry(scene)
    rng = occlusion_rng(scene, view_id, instance_id, seed)
    points = sample_surface_points(obj, camera.position, n_rays, rng)
    if len(points) == 0:
        return 1.0
    uv, depth = project_points(camera, points)
    keep = ((depth > NEAR_EPS) & (uv[:, 0] >= 0) & (uv[:, 0] <= camera.width)
            & (uv[:, 1] >= 0) & (uv[:, 1] <= camera.height))
    points = points[keep]
    if len(points) == 0:
        return 1.0
    to_cam = camera.position[None] - points
    length = np.linalg.norm(to_cam, axis=1)
    directions = to_cam / length[:, None]
    origins = points + SELF_OFFSET * directions
    reach = torch.as_tensor(length - SELF_OFFSET, dtype=torch.float64)
    hits = geometry.distances(origins, directions)
    if hits.shape[1] == 0:
        return 0.0
    blocked = (hits < reach[:, None]).any(dim=1)
    return float(blocked.double().mean())
