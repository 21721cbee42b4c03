from dataclasses import dataclass

import torch


@dataclass(frozen=True)
class Bbox2:
    """Axis-aligned pixel box. Zero-area boxes (points, lines) are legal."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float
    clipped: bool = False

    def __post_init__(self):
        for name in ("x_min", "y_min", "x_max", "y_max"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError("invalid box {}".format(self.as_list()))

    @property
    def width(self):
        return self.x_max - self.x_min

    @property
    def height(self):
        return self.y_max - self.y_min

    def area(self):
        return self.width * self.height

    def center(self):
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def as_list(self):
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    def clip(self, width, height):
        x0 = min(max(self.x_min, 0.0), width)
        y0 = min(max(self.y_min, 0.0), height)
        x1 = min(max(self.x_max, 0.0), width)
        y1 = min(max(self.y_max, 0.0), height)
        changed = (x0, y0, x1, y1) != (self.x_min, self.y_min, self.x_max, self.y_max)
        return Bbox2(x0, y0, x1, y1, clipped=self.clipped or changed)

    def dilate(self, pixels):
        return Bbox2(self.x_min - pixels, self.y_min - pixels,
                     self.x_max + pixels, self.y_max + pixels, clipped=self.clipped)

    def contains(self, x, y):
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    @classmethod
    def from_list(cls, values):
        if len(values) != 4:
            raise ValueError("a box needs 4 coordinates, got {}".format(len(values)))
        return cls(*[float(v) for v in values])


def iou(a, b):
    if a.as_list() == b.as_list():
        return 1.0
    iw = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    ih = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    inter = max(iw, 0.0) * max(ih, 0.0)
    union = a.area() + b.area() - inter
    if union <= 0.0:
        return 0.0
    return inter / union


class BoxList(object):
    """
    A set of pixel boxes for one view, stored as an Nx4 float64 tensor in
    xyxy mode, with the image size and per-box extra fields (instance ids,
    scores).
    """

    def __init__(self, bbox, image_size, mode="xyxy"):
        bbox = torch.as_tensor(bbox, dtype=torch.float64).reshape(-1, 4)
        if mode not in ("xyxy", "xywh"):
            raise ValueError("mode should be 'xyxy' or 'xywh'")
        self.bbox = bbox
        self.size = tuple(image_size)  # (image_width, image_height)
        self.mode = mode
        self.extra_fields = {}

    @classmethod
    def from_bbox2(cls, boxes, image_size):
        return cls([b.as_list() for b in boxes], image_size)

    def add_field(self, field, field_data):
        if len(field_data) != len(self):
            raise ValueError("field '{}' has {} entries for {} boxes".format(
                field, len(field_data), len(self)))
        self.extra_fields[field] = field_data

    def get_field(self, field):
        return self.extra_fields[field]

    def has_field(self, field):
        return field in self.extra_fields

    def fields(self):
        return list(self.extra_fields.keys())

    def _copy_extra_fields(self, bbox):
        for k, v in bbox.extra_fields.items():
            self.extra_fields[k] = v

    def convert(self, mode):
        if mode not in ("xyxy", "xywh"):
            raise ValueError("mode should be 'xyxy' or 'xywh'")
        if mode == self.mode:
            return self
        a, b, c, d = self.bbox.unbind(dim=-1)
        if mode == "xyxy":
            bbox = torch.stack((a, b, a + c, b + d), dim=-1)
        else:
            bbox = torch.stack((a, b, c - a, d - b), dim=-1)
        out = BoxList(bbox, self.size, mode=mode)
        out._copy_extra_fields(self)
        return out

    def clip_to_image(self, remove_empty=True):
        boxes = self.convert("xyxy")
        w, h = self.size
        bbox = boxes.bbox.clone()
        bbox[:, 0].clamp_(min=0, max=w)
        bbox[:, 1].clamp_(min=0, max=h)
        bbox[:, 2].clamp_(min=0, max=w)
        bbox[:, 3].clamp_(min=0, max=h)
        out = BoxList(bbox, self.size)
        out._copy_extra_fields(boxes)
        if remove_empty:
            keep = (bbox[:, 2] > bbox[:, 0]) & (bbox[:, 3] > bbox[:, 1])
            return out[keep]
        return out

    def area(self):
        box = self.convert("xyxy").bbox
        return (box[:, 2] - box[:, 0]) * (box[:, 3] - box[:, 1])

    def to_bbox2(self):
        return [Bbox2.from_list(row) for row in self.convert("xyxy").bbox.tolist()]

    def __getitem__(self, item):
        if isinstance(item, torch.Tensor) and item.dtype == torch.bool:
            item = torch.nonzero(item).flatten()
        out = BoxList(self.bbox[item].reshape(-1, 4), self.size, self.mode)
        index = item.tolist() if isinstance(item, torch.Tensor) else item
        for k, v in self.extra_fields.items():
            if isinstance(v, torch.Tensor):
                out.extra_fields[k] = v[item]
            elif isinstance(index, int):
                out.extra_fields[k] = [v[index]]
            elif isinstance(index, slice):
                out.extra_fields[k] = list(v[index])
            else:
                out.extra_fields[k] = [v[i] for i in index]
        return out

    def __len__(self):
        return self.bbox.shape[0]

    def __repr__(self):
        s = self.__class__.__name__ + "("
        s += "num_boxes={}, ".format(len(self))
        s += "image_width={}, ".format(self.size[0])
        s += "image_height={}, ".format(self.size[1])
        s += "mode={})".format(self.mode)
        return s
