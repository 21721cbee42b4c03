"""3D value types and scalar ray intersection.

World frame is right-handed with z up; yaw is measured counterclockwise from +x.
All vectors are read-only float64 numpy arrays of shape (3,).
"""
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
UNIT_TOL = 1e-9


def vec3(x, y=None, z=None):
    if y is None and z is None:
        arr = np.array(x, dtype=np.float64).reshape(-1)
    else:
        arr = np.array([x, y, z], dtype=np.float64)
    if arr.shape != (3,):
        raise ValueError("Vec3 needs 3 components, got shape {}".format(arr.shape))
    if not np.all(np.isfinite(arr)):
        raise ValueError("Vec3 components must be finite, got {}".format(arr.tolist()))
    arr.setflags(write=False)
    return arr


def normalize_yaw(yaw):
    """Wrap an angle into [-pi, pi)."""
    yaw = math.fmod(float(yaw) + math.pi, TWO_PI)
    if yaw < 0.0:
        yaw += TWO_PI
    yaw -= math.pi
    # fmod can land exactly on +pi through rounding
    if yaw >= math.pi:
        yaw -= TWO_PI
    return yaw


def yaw_rotation(yaw):
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]], dtype=np.float64)


@dataclass(frozen=True, eq=False)
class Pose3:
    position: np.ndarray
    yaw: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", vec3(self.position))
        object.__setattr__(self, "yaw", normalize_yaw(self.yaw))

    @property
    def forward(self):
        return vec3(math.cos(self.yaw), math.sin(self.yaw), 0.0)

    @property
    def right(self):
        return vec3(math.sin(self.yaw), -math.cos(self.yaw), 0.0)

    def transform_points(self, points):
        points = np.asarray(points, dtype=np.float64)
        return points @ yaw_rotation(self.yaw).T + self.position


@dataclass(frozen=True, eq=False)
class OrientedBox:
    center: np.ndarray
    half_extents: np.ndarray
    yaw: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", vec3(self.center))
        half = vec3(self.half_extents)
        if np.any(half <= 0):
            raise ValueError("box half-extents must be positive, got {}".format(half.tolist()))
        object.__setattr__(self, "half_extents", half)
        object.__setattr__(self, "yaw", normalize_yaw(self.yaw))

    def corners(self):
        """The 8 corners; corner index bits are (x, y, z) with 0 = negative side."""
        signs = np.array(
            [[sx, sy, sz] for sx in (-1.0, 1.0) for sy in (-1.0, 1.0) for sz in (-1.0, 1.0)]
        )
        local = signs * self.half_extents
        return local @ yaw_rotation(self.yaw).T + self.center

    def triangles(self):
        """The box surface as 12 triangles, shape (12, 3, 3)."""
        c = self.corners()
        tris = []
        for q in BOX_FACE_QUADS:
            tris.append((c[q[0]], c[q[1]], c[q[2]]))
            tris.append((c[q[0]], c[q[2]], c[q[3]]))
        return np.array(tris)

    def faces(self):
        """Faces as (center, outward normal, half-edge u, half-edge v)."""
        rot = yaw_rotation(self.yaw)
        axes = [rot[:, 0], rot[:, 1], rot[:, 2]]
        h = self.half_extents
        out = []
        for axis in range(3):
            others = [a for a in range(3) if a != axis]
            for sign in (-1.0, 1.0):
                normal = sign * axes[axis]
                center = self.center + normal * h[axis]
                tu = axes[others[0]] * h[others[0]]
                tv = axes[others[1]] * h[others[1]]
                out.append((center, normal, tu, tv))
        return out


# corner indices per face, corner index = 4 * ix + 2 * iy + iz
BOX_FACE_QUADS = (
    (0, 1, 3, 2),  # -x
    (4, 6, 7, 5),  # +x
    (0, 4, 5, 1),  # -y
    (2, 3, 7, 6),  # +y
    (0, 2, 6, 4),  # -z
    (1, 5, 7, 3),  # +z
)


def triangle_areas(tris):
    tris = np.asarray(tris, dtype=np.float64)
    cross = np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0])
    return 0.5 * np.linalg.norm(cross, axis=1)


@dataclass(frozen=True, eq=False)
class TriMesh:
    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        verts = np.array(self.vertices, dtype=np.float64).reshape(-1, 3)
        tris = np.array(self.triangles, dtype=np.int64).reshape(-1, 3)
        if len(tris) == 0:
            raise ValueError("a mesh needs at least one triangle")
        if not np.all(np.isfinite(verts)):
            raise ValueError("mesh vertices must be finite")
        if tris.min() < 0 or tris.max() >= len(verts):
            raise ValueError(
                "triangle index out of range [0, {})".format(len(verts))
            )
        areas = triangle_areas(verts[tris])
        bad = np.nonzero(areas <= 1e-12)[0]
        if len(bad):
            raise ValueError("degenerate triangle at index {}".format(int(bad[0])))
        verts.setflags(write=False)
        tris.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "triangles", tris)

    def surface_area(self):
        return float(triangle_areas(self.vertices[self.triangles]).sum())

    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def triangle_vertices(self, pose=None, scale=None):
        """World-space triangles (T, 3, 3) after per-axis scale then pose."""
        verts = self.vertices
        if scale is not None:
            verts = verts * np.asarray(scale, dtype=np.float64)
        if pose is not None:
            verts = pose.transform_points(verts)
        return verts[self.triangles]


@dataclass(frozen=True, eq=False)
class Ray:
    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "origin", vec3(self.origin))
        d = vec3(self.direction)
        if abs(np.linalg.norm(d) - 1.0) > UNIT_TOL:
            raise ValueError("ray direction must be unit length, got |d|={}".format(
                np.linalg.norm(d)))
        object.__setattr__(self, "direction", d)

    @classmethod
    def towards(cls, origin, target):
        origin = np.asarray(origin, dtype=np.float64)
        d = np.asarray(target, dtype=np.float64) - origin
        n = np.linalg.norm(d)
        if n == 0.0:
            raise ValueError("ray target coincides with origin")
        return cls(origin, d / n)

    def at(self, t):
        return self.origin + t * self.direction


def ray_intersect_box(ray, box):
    """Smallest t >= 0 on the box surface, or None.

    Slab test in the box's local frame; a ray starting inside returns its exit.
    """
    rot = yaw_rotation(box.yaw)
    o = rot.T @ (ray.origin - box.center)
    d = rot.T @ ray.direction
    h = box.half_extents
    t_near, t_far = -math.inf, math.inf
    for i in range(3):
        if abs(d[i]) < 1e-15:
            if abs(o[i]) > h[i]:
                return None
            continue
        t1 = (-h[i] - o[i]) / d[i]
        t2 = (h[i] - o[i]) / d[i]
        if t1 > t2:
            t1, t2 = t2, t1
        t_near = max(t_near, t1)
        t_far = min(t_far, t2)
        if t_near > t_far:
            return None
    if t_far < 0.0:
        return None
    return float(t_near) if t_near >= 0.0 else float(t_far)


def ray_intersect_triangle(ray, a, b, c, rel_tol=1e-9):
    """Moller-Trumbore; boundary hits count. Returns t >= 0 or None."""
    a = np.asarray(a, dtype=np.float64)
    e1 = np.asarray(b, dtype=np.float64) - a
    e2 = np.asarray(c, dtype=np.float64) - a
    p = np.cross(ray.direction, e2)
    det = float(e1 @ p)
    scale = np.linalg.norm(e1) * np.linalg.norm(e2)
    if abs(det) <= 1e-12 * scale:
        return None
    inv = 1.0 / det
    s = ray.origin - a
    u = float(s @ p) * inv
    if u < -rel_tol or u > 1.0 + rel_tol:
        return None
    q = np.cross(s, e1)
    v = float(ray.direction @ q) * inv
    if v < -rel_tol or u + v > 1.0 + rel_tol:
        return None
    t = float(e2 @ q) * inv
    if t < 0.0:
        return None
    return t
