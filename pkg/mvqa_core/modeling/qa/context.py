import itertools
from dataclasses import dataclass, field

from mvqa_core.modeling.relations import RelationParams, build_relation_graphs

from .describe import describe_all

SPARSE_OCCLUSION = 0.1


@dataclass(eq=False)
class SceneBundle:
    """A scene with its rendered views: metadata, relation graphs and the
    image path of every view."""

    scene: object
    metadata: object
    graphs: dict = None
    image_paths: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.graphs is None:
            self.graphs = build_relation_graphs(self.scene, self.metadata.views, self.metadata)

    @property
    def scene_id(self):
        return self.scene.scene_id


class SceneContext(object):
    """Read-only lookups shared by every question family on one scene."""

    def __init__(self, bundle, params=RelationParams(), max_tags=2):
        self.bundle = bundle
        self.scene = bundle.scene
        self.metadata = bundle.metadata
        self.graphs = bundle.graphs
        self.params = params
        self.descriptions = describe_all(self.scene, max_tags)
        self.view_ids = self.metadata.view_ids()

    @property
    def object_graph(self):
        return self.graphs["object_centric"]

    def camera_graph(self, view_id):
        return self.graphs["camera"][view_id]

    def obj(self, instance_id):
        return self.scene.get(instance_id)

    def described(self, filter_fn=None):
        ids = sorted(self.descriptions)
        if filter_fn is not None:
            ids = [i for i in ids if filter_fn(self.scene.get(i))]
        return ids

    def text(self, instance_id):
        d = self.descriptions.get(instance_id)
        if d is not None:
            return d.text
        return "the " + self.scene.get(instance_id).category.replace("_", " ")

    def record(self, view_id, instance_id):
        return self.metadata.get(view_id, instance_id)

    def visible(self, view_id, instance_id):
        r = self.record(view_id, instance_id)
        return r.in_frustum and r.occlusion_ratio < 1.0

    def visible_views(self, instance_id, view_ids):
        return [v for v in view_ids if self.visible(v, instance_id)]

    def boxes(self, instance_id, view_ids):
        return {v: self.record(v, instance_id).bbox2.as_list()
                for v in self.visible_views(instance_id, view_ids)}

    def view_combinations(self, num_views, rng):
        combos = list(itertools.combinations(self.view_ids, num_views))
        order = rng.permutation(len(combos)) if combos else []
        return [list(combos[i]) for i in order]

    def sparse_ok(self, combo, key_objects):
        """No single view shows every key object with occlusion below the
        sparse threshold."""
        for v in combo:
            if all(self.record(v, k).in_frustum and self.record(v, k).occlusion_ratio < SPARSE_OCCLUSION
                   for k in key_objects):
                return False
        return True

    def select_views(self, template, rng, key_objects, predicate=None):
        """First combination (in seeded order) where every key object is
        visible somewhere, the sparse rule holds if requested, and
        ``predicate(combo)`` accepts."""
        for combo in self.view_combinations(template.num_views, rng):
            if any(not self.visible_views(k, combo) for k in key_objects):
                continue
            if template.sparse and not self.sparse_ok(combo, key_objects):
                continue
            if predicate is not None and not predicate(combo):
                continue
            return combo
        return None
