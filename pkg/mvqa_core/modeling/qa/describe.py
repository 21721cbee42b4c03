"""Unique referring expressions built from the tag hierarchy."""
import itertools
from dataclasses import dataclass


@dataclass(frozen=True)
class Description:
    instance_id: str
    category: str
    tag_ids: tuple
    text: str

    def to_dict(self):
        return {"category": self.category, "tags": list(self.tag_ids), "text": self.text}


def category_text(category):
    return category.replace("_", " ")


def phrase(scene, category, tag_ids):
    words = [scene.tag_text.get(t, {}).get("text", t) for t in tag_ids]
    return "the " + " ".join(words + [category_text(category)])


def matches(obj, category, tag_ids):
    return obj.category == category and set(tag_ids) <= set(obj.tags)


def _tag_order(scene, obj):
    return sorted(obj.tags, key=lambda t: (scene.tag_text.get(t, {}).get("level", 99), t))


def describe(scene, obj, max_tags=2):
    """Shortest expression naming only ``obj``: the category alone, then one
    tag, then two, lower tag levels first. None when no such expression exists."""
    tags = _tag_order(scene, obj)
    for size in range(0, max_tags + 1):
        for combo in itertools.combinations(tags, size):
            hits = [o for o in scene.objects if matches(o, obj.category, combo)]
            if len(hits) == 1:
                return Description(obj.instance_id, obj.category, combo,
                                   phrase(scene, obj.category, combo))
    return None


def describe_all(scene, max_tags=2):
    out = {}
    for obj in scene.objects:
        d = describe(scene, obj, max_tags)
        if d is not None:
            out[obj.instance_id] = d
    return out
