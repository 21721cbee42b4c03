"""Independent answer checker.

Re-derives every stored answer from the scene geometry, the view metadata
and the relation predicates alone; nothing here goes through the question
generator, so a generator bug shows up as a failed check rather than as a
self-consistent wrong answer.
"""
import logging
import math

from mvqa_core.modeling.relations import (
    RelationParams,
    camera_centric_relations,
    contact_relation,
    in_frustum,
    object_centric_relation,
)
from mvqa_core.modeling.render.metadata import object_bbox2
from mvqa_core.structures.bounding_box import iou
from mvqa_core.structures.relation_graph import HORIZONTAL_LABELS, VERTICAL_LABELS

SPARSE_OCCLUSION = 0.1
MIN_BOX_IOU = 0.9


class _Check(object):
    def __init__(self, q, scene, metadata, params):
        self.q = q
        self.scene = scene
        self.metadata = metadata
        self.params = params
        self.program = q.program
        self.bindings = q.program.get("bindings", {})
        self.problems = []

    def fail(self, message):
        self.problems.append(message)

    def obj(self, iid):
        return self.scene.get(iid)

    def rec(self, view_id, iid):
        return self.metadata.get(view_id, iid)

    def visible(self, view_id, iid):
        r = self.rec(view_id, iid)
        return r.in_frustum and r.occlusion_ratio < 1.0

    def relation_holds(self, subject, ref, label):
        a, b = self.obj(subject), self.obj(ref)
        if label in HORIZONTAL_LABELS:
            return b.has_front and object_centric_relation(b, a, self.params) == label
        if label in VERTICAL_LABELS:
            return contact_relation(a, b, self.params) == label
        raise ValueError("not an object-centric label: {}".format(label))

    def camera_relations(self, view_id, a, b):
        view = self.metadata.view(view_id)
        if not (in_frustum(view.camera, self.obj(a)) and in_frustum(view.camera, self.obj(b))):
            return set()
        return camera_centric_relations(view, self.obj(a), self.obj(b), self.params)

    def option_value(self, index):
        return self.program["option_values"][index]

    def distractors(self):
        values = self.program["option_values"]
        return [v for i, v in enumerate(values) if i != self.q.gt_answer]


def _check_common(c):
    q = c.q
    for v in q.view_ids:
        try:
            c.metadata.view(v)
        except KeyError:
            c.fail("unknown view {}".format(v))
            return
    for iid, d in sorted(c.program.get("descriptions", {}).items()):
        if iid not in c.scene:
            c.fail("unknown object {}".format(iid))
            return
        if d.get("unique"):
            hits = [o.instance_id for o in c.scene.objects
                    if o.category == d["category"] and set(d["tags"]) <= set(o.tags)]
            if hits != [iid]:
                c.fail("description '{}' resolves to {}".format(d["text"], hits))
    for iid in q.key_objects:
        if not any(c.visible(v, iid) for v in q.view_ids):
            c.fail("{} is not visible in any cited view".format(iid))
    if c.program.get("sparse"):
        for v in q.view_ids:
            if all(c.rec(v, k).in_frustum and c.rec(v, k).occlusion_ratio < SPARSE_OCCLUSION
                   for k in q.key_objects):
                c.fail("view {} shows every key object".format(v))
    ratios = [c.rec(v, k).occlusion_ratio for k in q.key_objects for v in q.view_ids]
    if ratios and not math.isclose(sum(ratios) / len(ratios), q.visibility_difficulty,
                                   rel_tol=0.0, abs_tol=1e-9):
        c.fail("visibility difficulty {} does not match metadata".format(q.visibility_difficulty))


def _check_object_direction(c):
    ref, target = c.bindings["ref"], c.bindings["target"]
    label = object_centric_relation(c.obj(ref), c.obj(target), c.params)
    if label is None or c.option_value(c.q.gt_answer) != label:
        c.fail("direction of {} from {} is {}".format(target, ref, label))
    if label in c.distractors():
        c.fail("distractor {} is true".format(label))


def _check_camera_left_right(c):
    a, b, view = c.bindings["a"], c.bindings["b"], c.bindings["view"]
    rels = {label for label, s, o in c.camera_relations(view, a, b) if s == a and o == b}
    if c.option_value(c.q.gt_answer) not in rels:
        c.fail("{} is not {} of {} in {}".format(a, c.option_value(c.q.gt_answer), b, view))
    for d in c.distractors():
        if d in rels:
            c.fail("distractor {} is true".format(d))


def _check_camera_closer(c):
    view = c.bindings["view"]
    values = c.program["option_values"]

    def closest(candidate):
        others = [o for o in values if o != candidate]
        return all(("CamCloser", candidate, o) in c.camera_relations(view, candidate, o)
                   for o in others)

    if not closest(c.option_value(c.q.gt_answer)):
        c.fail("{} is not the closest option in {}".format(c.option_value(c.q.gt_answer), view))
    for d in c.distractors():
        if closest(d):
            c.fail("distractor {} is also closest".format(d))


def _check_which_object(c):
    params = c.program["params"]
    ref = c.bindings["ref"]
    anchor, label = ref, params["label"]
    if params.get("hops", 1) == 2:
        mid = c.bindings["mid"]
        same = [o.instance_id for o in c.scene.objects
                if o.instance_id != ref and o.category == c.obj(mid).category
                and c.relation_holds(o.instance_id, ref, params["label"])]
        if same != [mid]:
            c.fail("intermediate {} is not unique: {}".format(mid, same))
        anchor, label = mid, params["label2"]
    if not c.relation_holds(c.option_value(c.q.gt_answer), anchor, label):
        c.fail("{} is not {} of {}".format(c.option_value(c.q.gt_answer), label, anchor))
    for d in c.distractors():
        if c.relation_holds(d, anchor, label):
            c.fail("distractor {} is {} of {}".format(d, label, anchor))


def _check_count_category(c):
    params = c.program["params"]
    members = [o.instance_id for o in c.scene.objects
               if o.category == params["category"]
               and (params.get("tag") is None or params["tag"] in o.tags)
               and any(c.visible(v, o.instance_id) for v in c.q.view_ids)]
    if len(members) != c.q.gt_answer:
        c.fail("recount gives {}, stored {}".format(len(members), c.q.gt_answer))


def _check_count_relation(c):
    params = c.program["params"]
    ref = c.bindings["ref"]
    members = [o.instance_id for o in c.scene.objects
               if o.instance_id != ref and o.category == params["category"]
               and any(c.visible(v, o.instance_id) for v in c.q.view_ids)
               and c.relation_holds(o.instance_id, ref, params["label"])]
    if len(members) != c.q.gt_answer:
        c.fail("recount gives {}, stored {}".format(len(members), c.q.gt_answer))


def _check_boxes(c, target, views):
    stored = {}
    for view_id, box in c.q.gt_answer:
        stored[view_id] = box
    if sorted(stored) != sorted(views):
        c.fail("boxes cover views {}, expected {}".format(sorted(stored), sorted(views)))
    for view_id, box in sorted(stored.items()):
        if box.area() <= 0.0:
            c.fail("empty box in {}".format(view_id))
            continue
        reprojected = object_bbox2(c.metadata.view(view_id).camera, c.obj(target))
        if reprojected is None or iou(box, reprojected) < MIN_BOX_IOU:
            c.fail("box of {} in {} does not match its reprojection".format(target, view_id))


def _check_locate_unique(c):
    target = c.bindings["target"]
    _check_boxes(c, target, [v for v in c.q.view_ids if c.visible(v, target)])


def _check_locate_relation(c):
    params = c.program["params"]
    ref, target, view = c.bindings["ref"], c.bindings["target"], c.bindings["view"]
    same = [o.instance_id for o in c.scene.objects
            if o.instance_id != ref and o.category == params["category"]
            and c.relation_holds(o.instance_id, ref, params["label"])]
    if same != [target]:
        c.fail("target {} is not the unique match: {}".format(target, same))
    if not c.visible(view, target):
        c.fail("{} is not visible in {}".format(target, view))
    _check_boxes(c, target, [view])


CHECKS = {
    "object_direction": _check_object_direction,
    "camera_left_right": _check_camera_left_right,
    "camera_closer": _check_camera_closer,
    "which_object": _check_which_object,
    "count_category": _check_count_category,
    "count_relation": _check_count_relation,
    "locate_unique": _check_locate_unique,
    "locate_relation": _check_locate_relation,
}


def verify_problems(q, scene, metadata, params=RelationParams()):
    """Every mismatch between the stored question and a fresh derivation."""
    c = _Check(q, scene, metadata, params)
    check = CHECKS.get(q.family)
    if check is None:
        return ["no checker for family '{}'".format(q.family)]
    try:
        _check_common(c)
        if not c.problems:
            check(c)
    except (KeyError, IndexError, TypeError, ValueError) as e:
        c.fail("malformed question: {}".format(e))
    return c.problems


def verify_answer(q, scene, metadata, params=RelationParams()):
    problems = verify_problems(q, scene, metadata, params)
    if problems:
        logger = logging.getLogger("mvqa_core.verify")
        logger.debug("{}: {}".format(q.qid, "; ".join(problems)))
    return not problems
