from dataclasses import dataclass, field

from mvqa_core.utils.serialization import read_json, write_json

from .bounding_box import Bbox2, BoxList
from .camera import CameraModel

VIEWPOINT_CLASSES = ("Drone", "BirdsEye", "Egocentric", "Surveillance")
COVERAGES = ("Center", "Peripheral")
FOV_PRESETS = ("Wide", "Narrow")


@dataclass(eq=False)
class ViewRecord:
    view_id: str
    view_class: str
    camera: CameraModel
    coverage: str = "Center"
    fov_preset: str = "Wide"

    def __post_init__(self):
        if self.view_class not in VIEWPOINT_CLASSES:
            raise ValueError("unknown viewpoint class '{}'".format(self.view_class))

    def to_dict(self):
        return {
            "view_id": self.view_id,
            "class": self.view_class,
            "coverage": self.coverage,
            "fov_preset": self.fov_preset,
            "camera": self.camera.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["view_id"], d["class"], CameraModel.from_dict(d["camera"]),
                   d.get("coverage", "Center"), d.get("fov_preset", "Wide"))


@dataclass(eq=False)
class ObjectViewMetadata:
    instance_id: str
    view_id: str
    bbox2: object  # Bbox2 or None
    occlusion_ratio: float
    in_frustum: bool
    projected_3d_corners: list = field(default_factory=lambda: [None] * 8)
    center_uv: object = None
    depth: object = None

    def __post_init__(self):
        if not 0.0 <= self.occlusion_ratio <= 1.0:
            raise ValueError("occlusion ratio {} outside [0, 1]".format(self.occlusion_ratio))
        if not self.in_frustum and (self.bbox2 is not None or self.occlusion_ratio != 1.0):
            raise ValueError("{}@{}: out-of-frustum objects carry no box and occlusion 1".format(
                self.instance_id, self.view_id))

    @property
    def visible(self):
        return self.in_frustum and self.occlusion_ratio < 1.0

    def to_dict(self):
        return {
            "instance_id": self.instance_id,
            "view_id": self.view_id,
            "bbox2": self.bbox2.as_list() if self.bbox2 is not None else None,
            "bbox2_clipped": bool(self.bbox2.clipped) if self.bbox2 is not None else False,
            "occlusion_ratio": self.occlusion_ratio,
            "in_frustum": self.in_frustum,
            "projected_3d_corners": [list(c) if c is not None else None
                                     for c in self.projected_3d_corners],
            "center_uv": list(self.center_uv) if self.center_uv is not None else None,
            "depth": self.depth,
        }

    @classmethod
    def from_dict(cls, d):
        bbox = None
        if d.get("bbox2") is not None:
            bbox = Bbox2(*d["bbox2"], clipped=d.get("bbox2_clipped", False))
        return cls(
            instance_id=d["instance_id"],
            view_id=d["view_id"],
            bbox2=bbox,
            occlusion_ratio=float(d["occlusion_ratio"]),
            in_frustum=bool(d["in_frustum"]),
            projected_3d_corners=[tuple(c) if c is not None else None
                                  for c in d.get("projected_3d_corners", [None] * 8)],
            center_uv=tuple(d["center_uv"]) if d.get("center_uv") is not None else None,
            depth=d.get("depth"),
        )


class SceneViewMetadata(object):
    """All views of one scene plus per (object, view) metadata, kept in
    (view_id, instance_id) order."""

    def __init__(self, scene_id, views, records):
        self.scene_id = scene_id
        self.views = list(views)
        self.records = sorted(records, key=lambda r: (r.view_id, r.instance_id))
        self._views = {v.view_id: v for v in self.views}
        self._index = {(r.view_id, r.instance_id): r for r in self.records}

    def view(self, view_id):
        return self._views[view_id]

    def view_ids(self):
        return [v.view_id for v in self.views]

    def get(self, view_id, instance_id):
        try:
            return self._index[(view_id, instance_id)]
        except KeyError:
            raise KeyError("{}: no metadata for {} in view {}".format(
                self.scene_id, instance_id, view_id))

    def for_view(self, view_id):
        return [r for r in self.records if r.view_id == view_id]

    def boxlist(self, view_id):
        """In-frustum boxes of one view with their instance ids."""
        view = self.view(view_id)
        recs = [r for r in self.for_view(view_id) if r.in_frustum]
        boxes = BoxList.from_bbox2([r.bbox2 for r in recs], view.camera.image_size)
        boxes.add_field("instance_ids", [r.instance_id for r in recs])
        return boxes

    def to_dict(self):
        return {
            "scene_id": self.scene_id,
            "views": [v.to_dict() for v in self.views],
            "objects": [r.to_dict() for r in self.records],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            d["scene_id"],
            [ViewRecord.from_dict(v) for v in d["views"]],
            [ObjectViewMetadata.from_dict(r) for r in d["objects"]],
        )

    def save(self, path):
        write_json(path, self.to_dict())

    @classmethod
    def load(cls, path):
        return cls.from_dict(read_json(path))
