"""Pairwise spatial relations in the object-centric and camera-centric frames."""
import math
from dataclasses import dataclass

import numpy as np

from mvqa_core.structures.camera import project_box_to_bbox2, project_point
from mvqa_core.structures.footprint import convex_intersection_area

COINCIDENT_EPS = 1e-6
FRONT_MODES = ("depth", "image_rows")


@dataclass(frozen=True)
class RelationParams:
    epsilon: float = 0.1
    contact_gap: float = 0.01
    contact_overlap_frac: float = 0.25
    pixel_deadzone: float = 1.0
    depth_deadzone: float = 0.01
    camera_front_mode: str = "depth"

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must be in (0, 1), got {}".format(self.epsilon))
        if not self.contact_gap > 0.0:
            raise ValueError("contact_gap must be positive")
        if not 0.0 < self.contact_overlap_frac <= 1.0:
            raise ValueError("contact_overlap_frac must be in (0, 1]")
        if self.camera_front_mode not in FRONT_MODES:
            raise ValueError("camera_front_mode must be one of {}".format(FRONT_MODES))


def build_relation_params(cfg):
    r = cfg.RELATIONS
    return RelationParams(
        epsilon=r.EPSILON,
        contact_gap=r.CONTACT_GAP,
        contact_overlap_frac=r.CONTACT_OVERLAP_FRAC,
        pixel_deadzone=r.PIXEL_DEADZONE,
        depth_deadzone=r.DEPTH_DEADZONE,
        camera_front_mode=r.CAMERA_FRONT_MODE,
    )


_LABELS = {
    (1, 0): "Front", (-1, 0): "Back", (0, 1): "Right", (0, -1): "Left",
    (1, 1): "FrontRight", (1, -1): "FrontLeft", (-1, 1): "BackRight", (-1, -1): "BackLeft",
}


def direction_label(f, r, epsilon):
    """Combine forward/right cosines; components with |c| < epsilon are zeroed."""
    fs = 0 if abs(f) < epsilon else (1 if f > 0 else -1)
    rs = 0 if abs(r) < epsilon else (1 if r > 0 else -1)
    return _LABELS.get((fs, rs))


def object_centric_relation(ref, other, params=RelationParams()):
    """Where ``other`` lies in ``ref``'s forward/right frame, or None."""
    if not ref.has_front:
        raise ValueError("'{}' has no front and cannot be a reference".format(ref.instance_id))
    if ref.instance_id == other.instance_id:
        raise ValueError("relation needs two distinct objects")
    disp = np.asarray(other.center_xy) - np.asarray(ref.center_xy)
    norm = float(np.hypot(disp[0], disp[1]))
    if norm < COINCIDENT_EPS:
        return None
    d = disp / norm
    yaw = ref.pose.yaw
    f = d[0] * math.cos(yaw) + d[1] * math.sin(yaw)
    r = d[0] * math.sin(yaw) - d[1] * math.cos(yaw)
    return direction_label(f, r, params.epsilon)


def _rests_on(a, b, params):
    if abs(a.bottom_z - b.top_z) > params.contact_gap:
        return False
    overlap = convex_intersection_area(a.footprint(), b.footprint())
    return overlap >= params.contact_overlap_frac * min(a.footprint_area(), b.footprint_area())


def contact_relation(a, b, params=RelationParams()):
    """"On" when a rests on b, "Under" when b rests on a, else None."""
    if a.instance_id == b.instance_id:
        raise ValueError("relation needs two distinct objects")
    if _rests_on(a, b, params):
        return "On"
    if _rests_on(b, a, params):
        return "Under"
    return None


def camera_anchor(camera, obj):
    """Projected center u, v and camera-frame depth of an object's box center."""
    center = obj.center
    proj = project_point(camera, center)
    depth = float(camera.to_camera(center[None, :])[0, 2])
    if proj is not None:
        return proj[0], proj[1], depth
    box = project_box_to_bbox2(camera, obj.box())
    u, v = box.center()
    return u, v, depth


def in_frustum(camera, obj):
    box = project_box_to_bbox2(camera, obj.box())
    return box is not None and box.area() > 0.0


def camera_centric_relations(view, a, b, params=RelationParams()):
    """Viewer-relative labels for a pair, as (label, subject, object) tuples
    covering both directions."""
    camera = view.camera
    for obj in (a, b):
        if not in_frustum(camera, obj):
            raise ValueError("'{}' is outside the frustum of view {}".format(
                obj.instance_id, view.view_id))
    ua, va, da = camera_anchor(camera, a)
    ub, vb, db = camera_anchor(camera, b)
    out = set()
    if ua < ub - params.pixel_deadzone:
        out |= {("CamLeft", a.instance_id, b.instance_id), ("CamRight", b.instance_id, a.instance_id)}
    elif ub < ua - params.pixel_deadzone:
        out |= {("CamLeft", b.instance_id, a.instance_id), ("CamRight", a.instance_id, b.instance_id)}
    if params.camera_front_mode == "depth":
        a_closer = da < db - params.depth_deadzone
        b_closer = db < da - params.depth_deadzone
    else:
        # lower in the image reads as closer
        a_closer = va > vb + params.pixel_deadzone
        b_closer = vb > va + params.pixel_deadzone
    if a_closer:
        out |= {("CamCloser", a.instance_id, b.instance_id), ("CamFarther", b.instance_id, a.instance_id)}
    elif b_closer:
        out |= {("CamCloser", b.instance_id, a.instance_id), ("CamFarther", a.instance_id, b.instance_id)}
    return out
