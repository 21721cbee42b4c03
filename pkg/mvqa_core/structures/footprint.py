"""Yaw-aware 2D footprints and their overlap, on top of shapely."""
import math

import numpy as np
from shapely.geometry import Polygon, box


def footprint_polygon(cx, cy, hx, hy, yaw):
    """Counterclockwise rectangle corners, shape (4, 2)."""
    c, s = math.cos(yaw), math.sin(yaw)
    local = np.array([[-hx, -hy], [hx, -hy], [hx, hy], [-hx, hy]], dtype=np.float64)
    rot = np.array([[c, -s], [s, c]])
    return local @ rot.T + np.array([cx, cy])


def as_polygon(poly):
    if isinstance(poly, Polygon):
        return poly
    return Polygon(np.asarray(poly, dtype=np.float64))


def polygon_area(poly):
    if not isinstance(poly, Polygon) and len(poly) < 3:
        return 0.0
    return float(as_polygon(poly).area)


def convex_intersection_area(p, q):
    """Intersection area of two footprints."""
    a, b = as_polygon(p), as_polygon(q)
    if not a.intersects(b):
        return 0.0
    return float(a.intersection(b).area)


def inside_rect(poly, x_half, y_half, tol=1e-9):
    """Whether ``poly`` lies in the origin-centered rectangle of the given half extents."""
    floor = box(-x_half - tol, -y_half - tol, x_half + tol, y_half + tol)
    return bool(floor.covers(as_polygon(poly)))
