"""Per-pixel instance ids (and optional depth) by primary-ray casting.

Ids are 1-based scene object numbers, 0 is background. Rays pass through
pixel centers; each object only tests the pixels inside its projected box.

File formats:

* instance map: binary PPM (P6, maxval 255), the id of each pixel stored as
  24-bit little-endian across its R, G, B bytes;
* depth map: binary PGM (P5, maxval 65535), depth along the ray in
  millimeters, 16-bit big-endian, clamped to [1, 65535]; 0 is background.
"""
import math

import numpy as np
import torch

from mvqa_core.structures.camera import pixel_directions

from .geometry import object_distances, object_triangles
from .metadata import object_bbox2

CHUNK = 65536
TRIANGLE_BUDGET = 1 << 20  # rays x triangles per batch
MAX_DEPTH_MM = 65535


def render_instance_map(scene, view, with_depth=False):
    camera = view.camera
    w, h = camera.width, camera.height
    ids = np.zeros((h, w), dtype=np.uint32)
    depth = np.full((h, w), math.inf)
    origin = torch.as_tensor(camera.position, dtype=torch.float64)
    for k, obj in enumerate(scene.objects):
        box = object_bbox2(camera, obj)
        if box is None or box.area() <= 0.0:
            continue
        j0 = max(int(math.ceil(box.x_min - 0.5)), 0)
        j1 = min(int(math.floor(box.x_max - 0.5)), w - 1)
        i0 = max(int(math.ceil(box.y_min - 0.5)), 0)
        i1 = min(int(math.floor(box.y_max - 0.5)), h - 1)
        if j1 < j0 or i1 < i0:
            continue
        jj, ii = np.meshgrid(np.arange(j0, j1 + 1), np.arange(i0, i1 + 1))
        jj, ii = jj.ravel(), ii.ravel()
        tris = object_triangles(obj)
        chunk = CHUNK if tris is None else max(256, TRIANGLE_BUDGET // len(tris))
        for start in range(0, len(jj), chunk):
            cj, ci = jj[start:start + chunk], ii[start:start + chunk]
            dirs = torch.as_tensor(pixel_directions(camera, cj + 0.5, ci + 0.5))
            t = object_distances(obj, origin.expand(len(cj), 3), dirs).numpy()
            closer = t < depth[ci, cj]
            ids[ci[closer], cj[closer]] = k + 1
            depth[ci[closer], cj[closer]] = t[closer]
    if with_depth:
        return ids, depth
    return ids


def encode_ppm_ids(ids):
    h, w = ids.shape
    rgb = np.stack([ids & 0xFF, (ids >> 8) & 0xFF, (ids >> 16) & 0xFF], axis=-1).astype(np.uint8)
    return "P6\n{} {}\n255\n".format(w, h).encode("ascii") + rgb.tobytes()


def _read_header(data, magic):
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end].decode("ascii"))
        pos = end
    if tokens[0] != magic:
        raise ValueError("expected a {} file, got {}".format(magic, tokens[0]))
    return int(tokens[1]), int(tokens[2]), int(tokens[3]), pos + 1


def decode_ppm_ids(data):
    w, h, _, offset = _read_header(data, "P6")
    rgb = np.frombuffer(data, dtype=np.uint8, count=w * h * 3, offset=offset).reshape(h, w, 3)
    rgb = rgb.astype(np.uint32)
    return rgb[..., 0] | (rgb[..., 1] << 8) | (rgb[..., 2] << 16)


def write_instance_map(path, ids):
    with open(path, "wb") as f:
        f.write(encode_ppm_ids(ids))


def read_instance_map(path):
    with open(path, "rb") as f:
        return decode_ppm_ids(f.read())


def write_depth_map(path, depth):
    h, w = depth.shape
    mm = np.zeros((h, w), dtype=np.float64)
    hit = np.isfinite(depth)
    mm[hit] = np.clip(np.round(depth[hit] * 1000.0), 1, MAX_DEPTH_MM)
    with open(path, "wb") as f:
        f.write("P5\n{} {}\n{}\n".format(w, h, MAX_DEPTH_MM).encode("ascii"))
        f.write(mm.astype(">u2").tobytes())


def read_depth_map(path):
    """Depth in meters; background pixels come back as inf."""
    with open(path, "rb") as f:
        data = f.read()
    w, h, _, offset = _read_header(data, "P5")
    mm = np.frombuffer(data, dtype=">u2", count=w * h, offset=offset).reshape(h, w)
    depth = mm.astype(np.float64) / 1000.0
    depth[mm == 0] = math.inf
    return depth
