"""Wavefront OBJ subset: ``v`` and ``f`` records.

Faces accept ``i``, ``i/t``, ``i//n`` and ``i/t/n`` references, 1-based or
negative (relative to the vertices read so far). Polygons are fan-triangulated
around their first vertex. Every other directive is ignored.
"""
import logging

import numpy as np

from mvqa_core.structures.primitives import TriMesh, triangle_areas


class ObjParseError(ValueError):
    def __init__(self, path, lineno, message):
        super(ObjParseError, self).__init__("{}:{}: {}".format(path, lineno, message))
        self.path = path
        self.lineno = lineno


def _vertex_index(token, n_vertices, path, lineno):
    ref = token.split("/")[0]
    try:
        idx = int(ref)
    except ValueError:
        raise ObjParseError(path, lineno, "bad face index '{}'".format(token))
    if idx == 0:
        raise ObjParseError(path, lineno, "face index 0 is not valid (indices are 1-based)")
    resolved = idx - 1 if idx > 0 else n_vertices + idx
    if not 0 <= resolved < n_vertices:
        raise ObjParseError(
            path, lineno, "face index {} out of range ({} vertices)".format(idx, n_vertices)
        )
    return resolved


def parse_obj(lines, path="<obj>"):
    vertices = []
    triangles = []
    tri_lines = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise ObjParseError(path, lineno, "vertex needs 3 coordinates")
            try:
                xyz = [float(p) for p in parts[1:4]]
            except ValueError:
                raise ObjParseError(path, lineno, "non-numeric vertex coordinate")
            if not np.all(np.isfinite(xyz)):
                raise ObjParseError(path, lineno, "non-finite vertex coordinate")
            vertices.append(xyz)
        elif tag == "f":
            if len(parts) < 4:
                raise ObjParseError(path, lineno, "face needs at least 3 vertices")
            idx = [_vertex_index(t, len(vertices), path, lineno) for t in parts[1:]]
            for k in range(1, len(idx) - 1):
                triangles.append((idx[0], idx[k], idx[k + 1]))
                tri_lines.append(lineno)
    if not triangles:
        raise ObjParseError(path, len(lines), "no faces")
    verts = np.array(vertices, dtype=np.float64)
    areas = triangle_areas(verts[np.array(triangles)])
    for area, lineno in zip(areas, tri_lines):
        if area <= 1e-12:
            raise ObjParseError(path, lineno, "degenerate triangle")
    return TriMesh(verts, np.array(triangles, dtype=np.int64))


def load_obj_mesh(path):
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    mesh = parse_obj(lines, path)
    logger = logging.getLogger("mvqa_core.obj_io")
    logger.debug("Loaded {}: {} vertices, {} triangles".format(
        path, len(mesh.vertices), len(mesh.triangles)))
    return mesh


def write_obj_mesh(mesh, path):
    with open(path, "wb") as f:
        for v in mesh.vertices:
            f.write("v {!r} {!r} {!r}\n".format(float(v[0]), float(v[1]), float(v[2])).encode())
        for t in mesh.triangles:
            f.write("f {} {} {}\n".format(t[0] + 1, t[1] + 1, t[2] + 1).encode())


def normalize_to_unit_footprint(mesh):
    """Rescale a mesh so its bounds become [-0.5, 0.5]^2 x [0, 1]; multiplying
    by asset dims then yields the asset's real-world extent."""
    lo, hi = mesh.bounds()
    extent = hi - lo
    if np.any(extent <= 0):
        raise ValueError("mesh is flat along an axis and cannot be normalized")
    center = 0.5 * (lo + hi)
    verts = (mesh.vertices - np.array([center[0], center[1], lo[2]])) / extent
    return TriMesh(verts, mesh.triangles)
