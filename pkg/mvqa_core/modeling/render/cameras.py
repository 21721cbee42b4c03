"""Camera placement for the four viewpoint classes.

Per-class ranges (height in meters, pitch in degrees, negative looks down):

==============  ===========  ============  =========================
class           height       pitch         position
==============  ===========  ============  =========================
Drone           8 - 15       -60 .. -35    stand-off h / tan(-pitch)
BirdsEye        10 - 20      -90 .. -80    stand-off h / tan(-pitch)
Egocentric      1.4 - 1.8    -15 .. 5      on the floor boundary
Surveillance    2.5 - 3.5    -40 .. -20    floor corners
==============  ===========  ============  =========================

Fov presets: Wide 90 degrees, Narrow 50 degrees horizontal.
"""
import json
import math
import os
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from mvqa_core.structures.camera import CameraModel, in_image, project_point
from mvqa_core.structures.views import COVERAGES, FOV_PRESETS, VIEWPOINT_CLASSES, ViewRecord
from mvqa_core.utils.seeding import make_rng

CLASS_RANGES = {
    "Drone": {"height": (8.0, 15.0), "pitch": (-60.0, -35.0)},
    "BirdsEye": {"height": (10.0, 20.0), "pitch": (-90.0, -80.0)},
    "Egocentric": {"height": (1.4, 1.8), "pitch": (-15.0, 5.0)},
    "Surveillance": {"height": (2.5, 3.5), "pitch": (-40.0, -20.0)},
}
FOV_DEGREES = {"Wide": 90.0, "Narrow": 50.0}
# (+,+), (-,+), (-,-), (+,-)
CORNER_SIGNS = ((1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0))
PERIPHERAL_RING = (0.6, 0.95)
MAX_RESAMPLES = 32


@dataclass(frozen=True)
class ViewSpecEntry:
    count: int
    coverage: str = "Center"
    fov: str = "Wide"
    pitch: float = None  # degrees; fixes the pitch instead of sampling it
    height: float = None

    def __post_init__(self):
        if self.coverage not in COVERAGES:
            raise ValueError("coverage must be one of {}, got '{}'".format(COVERAGES, self.coverage))
        if self.fov not in FOV_PRESETS:
            raise ValueError("fov preset must be one of {}, got '{}'".format(FOV_PRESETS, self.fov))


def _entry(view_class, raw):
    if view_class not in VIEWPOINT_CLASSES:
        raise ValueError("unknown viewpoint class '{}'".format(view_class))
    entry = ViewSpecEntry(
        count=int(raw.get("count", 1)),
        coverage=raw.get("coverage", "Center"),
        fov=raw.get("fov", raw.get("fov_preset", "Wide")),
        pitch=raw.get("pitch"),
        height=raw.get("height"),
    )
    if entry.count <= 0:
        raise ValueError("{}: camera count must be positive, got {}".format(view_class, entry.count))
    return entry


def parse_views_spec(spec):
    """Views spec from a dict, a JSON file, a JSON string or the compact form
    ``"Drone:1:Center:Wide,BirdsEye:2"``. Returns class -> ViewSpecEntry in
    canonical class order."""
    if isinstance(spec, str):
        text = spec.strip()
        if os.path.isfile(text):
            with open(text, "r", encoding="utf-8") as f:
                spec = json.load(f)
        elif text.startswith("{"):
            spec = json.loads(text)
        else:
            parsed = {}
            for item in filter(None, (s.strip() for s in text.split(","))):
                parts = item.split(":")
                if len(parts) > 4:
                    raise ValueError("bad views spec item '{}'".format(item))
                raw = {"count": int(parts[1]) if len(parts) > 1 else 1}
                if len(parts) > 2:
                    raw["coverage"] = parts[2]
                if len(parts) > 3:
                    raw["fov"] = parts[3]
                parsed[parts[0]] = raw
            spec = parsed
    for name in spec:
        if name not in VIEWPOINT_CLASSES:
            raise ValueError("unknown viewpoint class '{}'".format(name))
    return OrderedDict((c, _entry(c, spec[c])) for c in VIEWPOINT_CLASSES if c in spec)


def _aim_point(scene, entry, rng):
    if entry.coverage == "Center":
        return np.zeros(3)
    x_half, y_half = scene.floor.half
    rho = rng.uniform(*PERIPHERAL_RING)
    phi = rng.uniform(-math.pi, math.pi)
    return np.array([rho * x_half * math.cos(phi), rho * y_half * math.sin(phi), 0.0])


def _look_at(position, target):
    d = np.asarray(target) - np.asarray(position)
    horizontal = math.hypot(d[0], d[1])
    yaw = math.atan2(d[1], d[0]) if horizontal > 1e-12 else 0.0
    return yaw, math.atan2(d[2], horizontal)


def _sample(rng, lo, hi, fixed=None):
    if fixed is not None:
        return float(fixed)
    return float(rng.uniform(lo, hi))


def _stand_off_camera(scene, view_class, entry, rng, fov_x, width, height):
    ranges = CLASS_RANGES[view_class]
    aim = _aim_point(scene, entry, rng)
    h = _sample(rng, *ranges["height"], fixed=entry.height)
    pitch = math.radians(_sample(rng, *ranges["pitch"], fixed=entry.pitch))
    azimuth = float(rng.uniform(-math.pi, math.pi))
    # horizontal stand-off so the optical axis passes through the aim point
    r = h * math.cos(-pitch) / math.sin(-pitch) if pitch < 0 else 0.0
    position = aim + np.array([-r * math.cos(azimuth), -r * math.sin(azimuth), h])
    return CameraModel(position, azimuth, pitch, fov_x, width, height)


def _grounded_camera(position, aim, view_class, entry, rng, fov_x, width, height):
    lo, hi = CLASS_RANGES[view_class]["pitch"]
    yaw, aim_pitch = _look_at(position, aim)
    if entry.pitch is not None:
        return CameraModel(position, yaw, math.radians(entry.pitch), fov_x, width, height)
    for _ in range(MAX_RESAMPLES):
        pitch = math.radians(rng.uniform(lo, hi))
        camera = CameraModel(position, yaw, pitch, fov_x, width, height)
        proj = project_point(camera, aim)
        if proj is not None and in_image(camera, proj[0], proj[1]):
            return camera
    clamped = min(max(aim_pitch, math.radians(lo)), math.radians(hi))
    return CameraModel(position, yaw, clamped, fov_x, width, height)


def _egocentric_camera(scene, entry, rng, fov_x, width, height):
    x_half, y_half = scene.floor.half
    aim = _aim_point(scene, entry, rng)
    h = _sample(rng, *CLASS_RANGES["Egocentric"]["height"], fixed=entry.height)
    # a point on the floor boundary, chosen by perimeter position
    perimeter = 4.0 * (x_half + y_half)
    s = rng.uniform(0.0, perimeter)
    if s < 2 * x_half:
        xy = (-x_half + s, -y_half)
    elif s < 2 * x_half + 2 * y_half:
        xy = (x_half, -y_half + (s - 2 * x_half))
    elif s < 4 * x_half + 2 * y_half:
        xy = (x_half - (s - 2 * x_half - 2 * y_half), y_half)
    else:
        xy = (-x_half, y_half - (s - 4 * x_half - 2 * y_half))
    position = np.array([xy[0], xy[1], h])
    return _grounded_camera(position, aim, "Egocentric", entry, rng, fov_x, width, height)


def _surveillance_camera(scene, entry, index, rng, fov_x, width, height):
    x_half, y_half = scene.floor.half
    sx, sy = CORNER_SIGNS[index % 4]
    aim = _aim_point(scene, entry, rng)
    h = _sample(rng, *CLASS_RANGES["Surveillance"]["height"], fixed=entry.height)
    position = np.array([sx * x_half, sy * y_half, h])
    return _grounded_camera(position, aim, "Surveillance", entry, rng, fov_x, width, height)


def place_cameras(scene, spec, seed, image_size=(1024, 768)):
    """Views for a scene, numbered ``v0, v1, ...`` in canonical class order.

    Each camera draws from its own stream keyed by (seed, scene_id, class,
    index within class).
    """
    if isinstance(spec, dict) and all(isinstance(v, ViewSpecEntry) for v in spec.values()):
        entries = spec
    else:
        entries = parse_views_spec(spec)
    width, height = image_size
    views = []
    for view_class, entry in entries.items():
        if entry.count <= 0:
            raise ValueError("{}: camera count must be positive".format(view_class))
        fov_x = math.radians(FOV_DEGREES[entry.fov])
        for index in range(entry.count):
            rng = make_rng(seed, "camera", scene.scene_id, view_class, index)
            if view_class in ("Drone", "BirdsEye"):
                camera = _stand_off_camera(scene, view_class, entry, rng, fov_x, width, height)
            elif view_class == "Egocentric":
                camera = _egocentric_camera(scene, entry, rng, fov_x, width, height)
            else:
                camera = _surveillance_camera(scene, entry, index, rng, fov_x, width, height)
            views.append(ViewRecord("v{}".format(len(views)), view_class, camera,
                                    entry.coverage, entry.fov))
    return views
