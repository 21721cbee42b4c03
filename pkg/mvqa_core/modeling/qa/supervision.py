"""Grounded step-by-step supervision rendered from a question's trace.

Levels:

1. final answer only;
2. templated step texts (grounding, relation and counting steps);
3. adds cross-view identity statements and a machine-checkable claim on
   every relation step;
4. adds (view, instance, box) evidence to every step that names an object.
"""
from mvqa_core.structures.bounding_box import Bbox2
from mvqa_core.structures.question import SupervisionStep, SupervisionTrace
from mvqa_core.structures.relation_graph import LABEL_PHRASES

SUPERVISION_LEVELS = (1, 2, 3, 4)


def _text(q, instance_id):
    d = q.program.get("descriptions", {}).get(instance_id)
    return d["text"] if d else instance_id


def _image(q, view_id):
    return "image {}".format(q.view_ids.index(view_id) + 1)


def _boxes(q):
    return {g["instance_id"]: g["boxes"] for g in q.trace.get("grounding", [])}


def _evidence(q, boxes, instance_ids, view_id=None):
    out = []
    for iid in instance_ids:
        for v, box in sorted(boxes.get(iid, {}).items()):
            if view_id is None or v == view_id:
                out.append((v, iid, Bbox2.from_list(box)))
    return out


def emit_supervision(q, level):
    if level not in SUPERVISION_LEVELS:
        raise ValueError("supervision level must be in 1..4, got {}".format(level))
    final = q.answer_text()
    if level == 1:
        return SupervisionTrace(1, [], final)

    boxes = _boxes(q)
    with_evidence = level >= 4
    steps = []
    for g in q.trace.get("grounding", []):
        iid = g["instance_id"]
        images = ", ".join(_image(q, v) for v in sorted(g["boxes"], key=q.view_ids.index))
        steps.append(SupervisionStep(
            "Find {} in {}.".format(_text(q, iid), images),
            _evidence(q, boxes, [iid]) if with_evidence else [],
        ))

    if level >= 3:
        for fact in q.trace.get("identity", []):
            iid, views = fact["instance_id"], fact["views"]
            text = "{} visible in {} is the same instance as in {}.".format(
                _text(q, iid), _image(q, views[0]),
                " and ".join(_image(q, v) for v in views[1:]))
            steps.append(SupervisionStep(
                text[0].upper() + text[1:],
                _evidence(q, boxes, [iid]) if with_evidence else [],
                {"kind": "identity", "instance_id": iid, "views": list(views)},
            ))

    for fact in q.trace.get("relations", []):
        subject, obj, label = fact["subject"], fact["object"], fact["label"]
        sentence = "{} is {} {}".format(_text(q, subject), LABEL_PHRASES[label], _text(q, obj))
        if fact["frame"] == "camera":
            text = "In {}, {}.".format(_image(q, fact["view_id"]), sentence)
        else:
            text = "Seen from {}, {}.".format(_text(q, obj), sentence)
        claim = None
        if level >= 3:
            claim = {"kind": "relation", "frame": fact["frame"], "view_id": fact["view_id"],
                     "subject": subject, "object": obj, "label": label}
        steps.append(SupervisionStep(
            text,
            _evidence(q, boxes, [subject, obj], fact["view_id"]) if with_evidence else [],
            claim,
        ))

    count = q.trace.get("count")
    if count is not None:
        members = count["members"]
        steps.append(SupervisionStep(
            "Counting each matching object once across the images gives {}.".format(count["value"]),
            _evidence(q, boxes, members) if with_evidence else [],
            {"kind": "count", "members": list(members), "value": count["value"]} if level >= 3 else None,
        ))

    steps.append(SupervisionStep("The answer is {}.".format(q.trace.get("answer_text", final))))
    return SupervisionTrace(level, steps, final)
