from dataclasses import dataclass, field

import numpy as np

from mvqa_core.utils.serialization import read_json, write_json

from .footprint import footprint_polygon
from .primitives import OrientedBox, Pose3


@dataclass(eq=False)
class PlacedObject:
    """An asset instance placed in a scene.

    ``pose.position`` is the footprint center at the object's base, so the
    object spans z in [position.z, position.z + height]. ``dims`` are the
    asset's unscaled (width, depth, height) along local (x, y, z); forward is
    local +x. Category, dims, front flag, tags and shape are copied from the
    asset record so a scene file is self-contained.
    """

    instance_id: str
    asset_id: str
    category: str
    pose: Pose3
    scale: float
    dims: tuple
    has_front: bool
    tags: tuple = ()
    shape: dict = field(default_factory=lambda: {"kind": "box"})
    anchors: tuple = ()
    spec_index: int = -1

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("{}: scale must be positive".format(self.instance_id))
        self.dims = tuple(float(v) for v in self.dims)
        if len(self.dims) != 3 or min(self.dims) <= 0:
            raise ValueError("{}: dims must be 3 positive reals".format(self.instance_id))
        self.tags = tuple(sorted(self.tags))
        self.anchors = tuple(dict(a) for a in self.anchors)

    @property
    def size(self):
        return np.array(self.dims) * self.scale

    @property
    def half_extents(self):
        return 0.5 * self.size

    @property
    def bottom_z(self):
        return float(self.pose.position[2])

    @property
    def top_z(self):
        return self.bottom_z + float(self.size[2])

    @property
    def center(self):
        return self.pose.position + np.array([0.0, 0.0, 0.5 * self.size[2]])

    @property
    def center_xy(self):
        return self.pose.position[:2]

    def box(self):
        return OrientedBox(self.center, self.half_extents, self.pose.yaw)

    def footprint(self, margin=0.0):
        hx, hy = self.half_extents[:2] + margin
        return footprint_polygon(self.pose.position[0], self.pose.position[1], hx, hy, self.pose.yaw)

    def footprint_area(self):
        return float(self.size[0] * self.size[1])

    def to_dict(self):
        return {
            "instance_id": self.instance_id,
            "asset_id": self.asset_id,
            "category": self.category,
            "pose": {"position": self.pose.position.tolist(), "yaw": self.pose.yaw},
            "scale": self.scale,
            "dims": list(self.dims),
            "has_front": self.has_front,
            "tags": list(self.tags),
            "shape": dict(self.shape),
            "anchors": [dict(a) for a in self.anchors],
            "spec_index": self.spec_index,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            instance_id=d["instance_id"],
            asset_id=d["asset_id"],
            category=d["category"],
            pose=Pose3(d["pose"]["position"], d["pose"]["yaw"]),
            scale=d["scale"],
            dims=d["dims"],
            has_front=d["has_front"],
            tags=d.get("tags", ()),
            shape=d.get("shape", {"kind": "box"}),
            anchors=d.get("anchors", ()),
            spec_index=d.get("spec_index", -1),
        )


@dataclass
class FloorSpec:
    x_size: float
    y_size: float
    material_tag: str = ""

    def __post_init__(self):
        if not (self.x_size > 0 and self.y_size > 0):
            raise ValueError("floor extent must be positive, got ({}, {})".format(
                self.x_size, self.y_size))

    @property
    def half(self):
        return 0.5 * self.x_size, 0.5 * self.y_size

    def to_dict(self):
        return {"extent": [self.x_size, self.y_size], "material_tag": self.material_tag}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["extent"][0]), float(d["extent"][1]), d.get("material_tag", ""))


@dataclass(eq=False)
class SceneInstance:
    scene_id: str
    theme_id: str
    seed: int
    floor: FloorSpec
    objects: list
    lighting: dict = field(default_factory=dict)
    tag_text: dict = field(default_factory=dict)

    def __post_init__(self):
        ids = [o.instance_id for o in self.objects]
        if len(set(ids)) != len(ids):
            raise ValueError("{}: duplicate instance ids".format(self.scene_id))
        self._index = {o.instance_id: i for i, o in enumerate(self.objects)}

    def get(self, instance_id):
        try:
            return self.objects[self._index[instance_id]]
        except KeyError:
            raise KeyError("{}: unknown instance '{}'".format(self.scene_id, instance_id))

    def __contains__(self, instance_id):
        return instance_id in self._index

    def instance_number(self, instance_id):
        """1-based integer id used in instance maps (0 is background)."""
        return self._index[instance_id] + 1

    def instance_ids(self):
        return [o.instance_id for o in self.objects]

    def to_dict(self):
        return {
            "scene_id": self.scene_id,
            "theme_id": self.theme_id,
            "seed": self.seed,
            "floor": self.floor.to_dict(),
            "lighting": dict(self.lighting),
            "tag_text": dict(self.tag_text),
            "objects": [o.to_dict() for o in self.objects],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            scene_id=d["scene_id"],
            theme_id=d["theme_id"],
            seed=int(d["seed"]),
            floor=FloorSpec.from_dict(d["floor"]),
            objects=[PlacedObject.from_dict(o) for o in d["objects"]],
            lighting=d.get("lighting", {}),
            tag_text=d.get("tag_text", {}),
        )

    def save(self, path):
        write_json(path, self.to_dict())

    @classmethod
    def load(cls, path):
        return cls.from_dict(read_json(path))
