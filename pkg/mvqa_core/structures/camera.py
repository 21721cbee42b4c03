"""Pinhole camera with yaw and pitch (no roll).

Camera frame: forward f = (cos p cos y, cos p sin y, sin p), right
r = (sin y, -cos y, 0), up = r x f. Pixels are square; u grows to the right
and v grows downward, the principal point is the image center.
"""
import math
from dataclasses import dataclass

import numpy as np

from .bounding_box import Bbox2
from .primitives import OrientedBox, Ray, normalize_yaw, vec3

NEAR_EPS = 1e-6


@dataclass(frozen=True, eq=False)
class CameraModel:
    position: np.ndarray
    yaw: float
    pitch: float
    fov_x: float
    width: int
    height: int

    def __post_init__(self):
        object.__setattr__(self, "position", vec3(self.position))
        object.__setattr__(self, "yaw", normalize_yaw(self.yaw))
        pitch = float(self.pitch)
        if not (-math.pi / 2 - 1e-12 <= pitch <= math.pi / 2 + 1e-12):
            raise ValueError("camera pitch must be within [-pi/2, pi/2], got {}".format(pitch))
        object.__setattr__(self, "pitch", min(max(pitch, -math.pi / 2), math.pi / 2))
        if not (0.0 < float(self.fov_x) < math.pi):
            raise ValueError("fov_x must be in (0, pi), got {}".format(self.fov_x))
        object.__setattr__(self, "fov_x", float(self.fov_x))
        for name in ("width", "height"):
            value = getattr(self, name)
            if int(value) != value or value <= 0:
                raise ValueError("camera {} must be a positive integer, got {}".format(name, value))
            object.__setattr__(self, name, int(value))

    @property
    def forward(self):
        cp = math.cos(self.pitch)
        return np.array([cp * math.cos(self.yaw), cp * math.sin(self.yaw), math.sin(self.pitch)])

    @property
    def right(self):
        return np.array([math.sin(self.yaw), -math.cos(self.yaw), 0.0])

    @property
    def up(self):
        return np.cross(self.right, self.forward)

    @property
    def focal(self):
        return (self.width / 2.0) / math.tan(self.fov_x / 2.0)

    @property
    def fov_y(self):
        return 2.0 * math.atan((self.height / 2.0) / self.focal)

    @property
    def image_size(self):
        return (self.width, self.height)

    def to_camera(self, points):
        """World points (N, 3) -> camera coordinates (x right, y up, depth)."""
        rel = np.asarray(points, dtype=np.float64) - self.position
        basis = np.stack([self.right, self.up, self.forward], axis=1)
        return rel @ basis

    def to_dict(self):
        return {
            "position": self.position.tolist(),
            "yaw": self.yaw,
            "pitch": self.pitch,
            "fov_x": self.fov_x,
            "width": self.width,
            "height": self.height,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["position"], d["yaw"], d["pitch"], d["fov_x"], d["width"], d["height"])


def project_points(camera, points):
    """Vectorized projection: returns (uv (N, 2), depth (N,)); uv rows are NaN
    for points at or behind the camera plane."""
    cam = camera.to_camera(np.atleast_2d(points))
    depth = cam[:, 2]
    uv = np.full((len(cam), 2), np.nan)
    ok = depth > NEAR_EPS
    f = camera.focal
    uv[ok, 0] = camera.width / 2.0 + f * cam[ok, 0] / depth[ok]
    uv[ok, 1] = camera.height / 2.0 - f * cam[ok, 1] / depth[ok]
    return uv, depth


def project_point(camera, p):
    uv, depth = project_points(camera, np.asarray(p, dtype=np.float64).reshape(1, 3))
    if not depth[0] > NEAR_EPS:
        return None
    return float(uv[0, 0]), float(uv[0, 1]), float(depth[0])


def in_image(camera, u, v):
    return 0.0 <= u <= camera.width and 0.0 <= v <= camera.height


def pixel_directions(camera, us, vs):
    """Unit world directions of rays through pixel positions (us, vs)."""
    us = np.asarray(us, dtype=np.float64)
    vs = np.asarray(vs, dtype=np.float64)
    f = camera.focal
    x = (us - camera.width / 2.0) / f
    y = -(vs - camera.height / 2.0) / f
    d = (camera.forward[None, :] + x[:, None] * camera.right[None, :]
         + y[:, None] * camera.up[None, :])
    return d / np.linalg.norm(d, axis=1, keepdims=True)


def pixel_ray(camera, u, v):
    return Ray(camera.position, pixel_directions(camera, [u], [v])[0])


def _near_plane_crossings(camera, segments):
    """Points where world segments (S, 2, 3) cross the near plane."""
    a = camera.to_camera(segments[:, 0])
    b = camera.to_camera(segments[:, 1])
    da, db = a[:, 2], b[:, 2]
    crossing = (da > NEAR_EPS) != (db > NEAR_EPS)
    if not np.any(crossing):
        return np.zeros((0, 2))
    a, b, da, db = a[crossing], b[crossing], da[crossing], db[crossing]
    t = (NEAR_EPS - da) / (db - da)
    pts = a + t[:, None] * (b - a)
    f = camera.focal
    u = camera.width / 2.0 + f * pts[:, 0] / NEAR_EPS
    v = camera.height / 2.0 - f * pts[:, 1] / NEAR_EPS
    return np.stack([u, v], axis=1)


def project_box_to_bbox2(camera, shape, pose=None, scale=None, clip=True):
    """Tight pixel bounds of a box or a posed mesh, or None when it lies
    entirely behind the camera.

    ``shape`` is an OrientedBox, or a TriMesh placed with ``pose`` (and an
    optional per-axis ``scale``). Edges that cross the near plane contribute
    their near-plane crossing so partially visible shapes keep a conservative
    extent.
    """
    if isinstance(shape, OrientedBox):
        tris = shape.triangles()
        vertices = shape.corners()
    else:
        tris = shape.triangle_vertices(pose=pose, scale=scale)
        vertices = tris.reshape(-1, 3)
    uv, depth = project_points(camera, vertices)
    front = depth > NEAR_EPS
    if not np.any(front):
        return None
    pts = uv[front]
    if not np.all(front):
        edges = np.concatenate(
            [tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]], axis=0
        )
        pts = np.concatenate([pts, _near_plane_crossings(camera, edges)], axis=0)
    box = Bbox2(
        float(pts[:, 0].min()), float(pts[:, 1].min()),
        float(pts[:, 0].max()), float(pts[:, 1].max()),
    )
    if clip:
        box = box.clip(camera.width, camera.height)
    return box
