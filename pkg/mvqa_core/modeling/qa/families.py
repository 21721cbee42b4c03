"""Question families.

A family turns a template plus one scene into a draft question: it binds
plan slots to scene objects, picks the views shown, computes the answer
from the relation graphs and metadata, and records the facts a grounded
explanation needs. Families are looked up by name in ``QUESTION_FAMILIES``.
"""
import string
from dataclasses import dataclass, field

from mvqa_core.modeling.registry import QUESTION_FAMILIES
from mvqa_core.structures.question import TemplateError
from mvqa_core.structures.relation_graph import HORIZONTAL_LABELS, LABEL_PHRASES, LABEL_WORDS

from .describe import category_text

MAX_TRIES = 8


@dataclass(eq=False)
class Draft:
    bindings: dict
    key_objects: list
    view_ids: list
    fields: dict
    answer: object
    options: list = None
    option_values: list = None
    params: dict = field(default_factory=dict)
    relations: list = field(default_factory=list)
    count: dict = None


def pick(rng, seq):
    return seq[int(rng.integers(len(seq)))]


def shuffled(rng, seq):
    seq = list(seq)
    return [seq[i] for i in rng.permutation(len(seq))]


def relation_fact(frame, subject, obj, label, view_id=None):
    return {"frame": frame, "view_id": view_id, "subject": subject, "object": obj, "label": label}


def image_ref(combo, view_id):
    return "image {}".format(combo.index(view_id) + 1)


class QuestionFamily(object):
    task = None
    option_counts = ()
    binding_names = ()

    def check_template(self, template):
        if template.task != self.task:
            raise TemplateError("{}: family {} produces {} questions, not {}".format(
                template.template_id, template.family, self.task, template.task))
        if self.task == "MCQ" and template.option_count not in self.option_counts:
            raise TemplateError("{}: {} supports option counts {}, got {}".format(
                template.template_id, template.family, list(self.option_counts),
                template.option_count))
        for _, name, _, _ in string.Formatter().parse(template.text_pattern):
            if name is not None and name not in self.text_fields:
                raise TemplateError("{}: unknown slot '{{{}}}' in text pattern".format(
                    template.template_id, name))
        for step in template.plan:
            for key in ("slot", "from", "to", "view"):
                if key in step and step[key] not in self.binding_names:
                    raise TemplateError("{}: plan refers to unknown binding '{}'".format(
                        template.template_id, step[key]))

    text_fields = ()

    def propose(self, ctx, template, rng):
        raise NotImplementedError

    @staticmethod
    def mcq(rng, correct, distractors, k, words):
        values = shuffled(rng, [correct] + list(distractors[: k - 1]))
        options = [words(v) for v in values]
        if len(set(options)) != len(options):
            return None
        return values, options, values.index(correct)


def _oc_label(ctx, subject, ref):
    for label in ctx.object_graph.labels(subject, ref):
        if label in HORIZONTAL_LABELS:
            return label
    return None


def _holds(ctx, subject, ref, label):
    return ctx.object_graph.has_edge(subject, ref, label)


@QUESTION_FAMILIES.register("object_direction")
class ObjectDirection(QuestionFamily):
    """Where is the target in the reference object's own frame?"""

    task = "MCQ"
    option_counts = (2, 3, 4)
    binding_names = ("ref", "target")
    text_fields = ("ref", "target")

    def propose(self, ctx, template, rng):
        refs = ctx.described(lambda o: o.has_front)
        pairs = [(r, t) for r in refs for t in ctx.described()
                 if t != r and _oc_label(ctx, t, r) is not None]
        if not pairs:
            return None
        for _ in range(MAX_TRIES):
            ref, target = pick(rng, pairs)
            combo = ctx.select_views(template, rng, [ref, target])
            if combo is not None:
                break
        else:
            return None
        label = _oc_label(ctx, target, ref)
        others = shuffled(rng, [l for l in HORIZONTAL_LABELS if l != label])
        built = self.mcq(rng, label, others, template.option_count, LABEL_WORDS.get)
        if built is None:
            return None
        values, options, answer = built
        return Draft(
            bindings={"ref": ref, "target": target},
            key_objects=[ref, target],
            view_ids=combo,
            fields={"ref": ctx.text(ref), "target": ctx.text(target)},
            answer=answer, options=options, option_values=values,
            relations=[relation_fact("object_centric", target, ref, label)],
        )


@QUESTION_FAMILIES.register("camera_left_right")
class CameraLeftRight(QuestionFamily):
    """Is a left or right of b in one of the images?"""

    task = "MCQ"
    option_counts = (2,)
    binding_names = ("a", "b", "view")
    text_fields = ("a", "b", "view")

    @staticmethod
    def _views(ctx, a, b, combo):
        return [v for v in combo if ctx.visible(v, a) and ctx.visible(v, b) and (
            ctx.camera_graph(v).has_edge(a, b, "CamLeft")
            or ctx.camera_graph(v).has_edge(a, b, "CamRight"))]

    def propose(self, ctx, template, rng):
        ids = ctx.described()
        if len(ids) < 2:
            return None
        for _ in range(MAX_TRIES):
            a, b = shuffled(rng, ids)[:2]
            combo = ctx.select_views(template, rng, [a, b],
                                     lambda c: bool(self._views(ctx, a, b, c)))
            if combo is not None:
                break
        else:
            return None
        view = pick(rng, self._views(ctx, a, b, combo))
        label = "CamLeft" if ctx.camera_graph(view).has_edge(a, b, "CamLeft") else "CamRight"
        other = "CamRight" if label == "CamLeft" else "CamLeft"
        values, options, answer = self.mcq(rng, label, [other], 2, LABEL_WORDS.get)
        return Draft(
            bindings={"a": a, "b": b, "view": view},
            key_objects=[a, b],
            view_ids=combo,
            fields={"a": ctx.text(a), "b": ctx.text(b), "view": image_ref(combo, view)},
            answer=answer, options=options, option_values=values,
            params={"view": view},
            relations=[relation_fact("camera", a, b, label, view)],
        )


@QUESTION_FAMILIES.register("camera_closer")
class CameraCloser(QuestionFamily):
    """Which of these objects is closest to the camera of one image?"""

    task = "MCQ"
    option_counts = (2, 3, 4)
    binding_names = ("answer", "others", "view")
    text_fields = ("view",)

    def propose(self, ctx, template, rng):
        k = template.option_count
        for combo in ctx.view_combinations(template.num_views, rng)[:MAX_TRIES]:
            view = pick(rng, combo)
            candidates = [i for i in ctx.described() if ctx.visible(view, i)]
            if len(candidates) < k:
                continue
            chosen = shuffled(rng, candidates)[:k]
            closest = min(chosen, key=lambda i: (ctx.record(view, i).depth, i))
            others = [i for i in chosen if i != closest]
            graph = ctx.camera_graph(view)
            if not all(graph.has_edge(closest, o, "CamCloser") for o in others):
                continue
            if template.sparse and not ctx.sparse_ok(combo, chosen):
                continue
            built = self.mcq(rng, closest, others, k, ctx.text)
            if built is None:
                continue
            values, options, answer = built
            return Draft(
                bindings={"answer": closest, "others": sorted(others), "view": view},
                key_objects=chosen,
                view_ids=combo,
                fields={"view": image_ref(combo, view)},
                answer=answer, options=options, option_values=values,
                params={"view": view},
                relations=[relation_fact("camera", closest, o, "CamCloser", view)
                           for o in sorted(others)],
            )
        return None


@QUESTION_FAMILIES.register("which_object")
class WhichObject(QuestionFamily):
    """Which option stands in a given relation to the reference, directly
    (one hop) or through an intermediate object (two hops)?"""

    task = "MCQ"
    option_counts = (2, 3, 4)
    binding_names = ("ref", "mid", "answer")
    text_fields = ("ref", "label", "label2", "mid_category")

    def check_template(self, template):
        super(WhichObject, self).check_template(template)
        if template.params.get("hops", 1) not in (1, 2):
            raise TemplateError("{}: which_object supports 1 or 2 hops".format(
                template.template_id))

    def _unique_mid(self, ctx, ref, label):
        """Objects that are the only member of their category standing in
        ``label`` to ``ref``."""
        by_category = {}
        for o in ctx.scene.objects:
            if o.instance_id != ref and _holds(ctx, o.instance_id, ref, label):
                by_category.setdefault(o.category, []).append(o)
        return sorted(m[0].instance_id for m in by_category.values()
                      if len(m) == 1 and m[0].has_front)

    def propose(self, ctx, template, rng):
        hops = template.params.get("hops", 1)
        k = template.option_count
        refs = ctx.described(lambda o: o.has_front)
        if not refs:
            return None
        for _ in range(MAX_TRIES):
            ref = pick(rng, refs)
            mid, label1 = None, None
            anchor = ref
            if hops == 2:
                label1 = pick(rng, HORIZONTAL_LABELS)
                mids = self._unique_mid(ctx, ref, label1)
                if not mids:
                    continue
                mid = pick(rng, mids)
                anchor = mid
            label = pick(rng, HORIZONTAL_LABELS)
            pool = [i for i in ctx.described() if i not in (ref, mid)]
            good = [i for i in pool if _holds(ctx, i, anchor, label)]
            bad = [i for i in pool if not _holds(ctx, i, anchor, label)]
            if not good or len(bad) < k - 1:
                continue
            answer_id = pick(rng, good)
            keys = [i for i in (ref, mid, answer_id) if i is not None]
            combo = ctx.select_views(template, rng, keys)
            if combo is None:
                continue
            built = self.mcq(rng, answer_id, shuffled(rng, bad), k, ctx.text)
            if built is None:
                continue
            values, options, answer = built
            if hops == 1:
                fields = {"ref": ctx.text(ref), "label": LABEL_PHRASES[label]}
                relations = [relation_fact("object_centric", answer_id, ref, label)]
                params = {"hops": 1, "label": label}
                bindings = {"ref": ref, "answer": answer_id}
            else:
                mid_category = ctx.obj(mid).category
                fields = {"ref": ctx.text(ref), "label": LABEL_PHRASES[label1],
                          "label2": LABEL_PHRASES[label],
                          "mid_category": category_text(mid_category)}
                relations = [relation_fact("object_centric", mid, ref, label1),
                             relation_fact("object_centric", answer_id, mid, label)]
                params = {"hops": 2, "label": label1, "label2": label,
                          "mid_category": mid_category}
                bindings = {"ref": ref, "mid": mid, "answer": answer_id}
            return Draft(
                bindings=bindings, key_objects=keys, view_ids=combo, fields=fields,
                answer=answer, options=options, option_values=values,
                params=params, relations=relations,
            )
        return None


def _noun(ctx, category, tag):
    words = [ctx.scene.tag_text.get(tag, {}).get("text", tag)] if tag else []
    return " ".join(words + [category_text(category)])


@QUESTION_FAMILIES.register("count_category")
class CountCategory(QuestionFamily):
    """How many objects of a category (optionally with a tag) appear across
    the images? Objects seen in several images count once."""

    task = "Counting"
    binding_names = ("members",)
    text_fields = ("category",)

    def propose(self, ctx, template, rng):
        with_tag = bool(template.params.get("with_tag", False))
        for combo in ctx.view_combinations(template.num_views, rng)[:MAX_TRIES]:
            seen = [o for o in ctx.scene.objects if ctx.visible_views(o.instance_id, combo)]
            if not seen:
                continue
            category = pick(rng, sorted({o.category for o in seen}))
            tag = None
            if with_tag:
                tags = sorted({t for o in seen if o.category == category for t in o.tags
                               if ctx.scene.tag_text.get(t, {}).get("level") == 1})
                if not tags:
                    continue
                tag = pick(rng, tags)
            members = sorted(o.instance_id for o in seen
                             if o.category == category and (tag is None or tag in o.tags))
            if template.sparse and not ctx.sparse_ok(combo, members):
                continue
            return Draft(
                bindings={"members": members},
                key_objects=members,
                view_ids=combo,
                fields={"category": _noun(ctx, category, tag)},
                answer=len(members),
                params={"category": category, "tag": tag},
                count={"members": members, "value": len(members)},
            )
        return None


def _allowed_labels(template):
    return list(template.params.get("labels", list(HORIZONTAL_LABELS) + ["On"]))


@QUESTION_FAMILIES.register("count_relation")
class CountRelation(QuestionFamily):
    """How many objects of a category stand in a relation to the reference?"""

    task = "Counting"
    binding_names = ("ref", "members")
    text_fields = ("ref", "label", "category")

    def propose(self, ctx, template, rng):
        refs = ctx.described()
        labels = _allowed_labels(template)
        categories = sorted({o.category for o in ctx.scene.objects})
        if not refs:
            return None
        for _ in range(MAX_TRIES):
            ref = pick(rng, refs)
            label = pick(rng, labels)
            if label in HORIZONTAL_LABELS and not ctx.obj(ref).has_front:
                continue
            category = pick(rng, categories)
            combo = ctx.select_views(template, rng, [ref])
            if combo is None:
                continue
            members = sorted(
                o.instance_id for o in ctx.scene.objects
                if o.instance_id != ref and o.category == category
                and ctx.visible_views(o.instance_id, combo)
                and _holds(ctx, o.instance_id, ref, label))
            if template.sparse and not ctx.sparse_ok(combo, [ref] + members):
                continue
            return Draft(
                bindings={"ref": ref, "members": members},
                key_objects=[ref] + members,
                view_ids=combo,
                fields={"ref": ctx.text(ref), "label": LABEL_PHRASES[label],
                        "category": category_text(category)},
                answer=len(members),
                params={"label": label, "category": category},
                relations=[relation_fact("object_centric", m, ref, label) for m in members],
                count={"members": members, "value": len(members)},
            )
        return None


@QUESTION_FAMILIES.register("locate_unique")
class LocateUnique(QuestionFamily):
    """Box the described object in every image where it is visible."""

    task = "Detection"
    binding_names = ("target",)
    text_fields = ("target",)

    def propose(self, ctx, template, rng):
        ids = ctx.described()
        if not ids:
            return None
        for _ in range(MAX_TRIES):
            target = pick(rng, ids)
            combo = ctx.select_views(template, rng, [target])
            if combo is None:
                continue
            answer = [(v, ctx.record(v, target).bbox2) for v in ctx.visible_views(target, combo)]
            return Draft(
                bindings={"target": target},
                key_objects=[target],
                view_ids=combo,
                fields={"target": ctx.text(target)},
                answer=answer,
            )
        return None


@QUESTION_FAMILIES.register("locate_relation")
class LocateRelation(QuestionFamily):
    """Box, in one image, the only object of a category that stands in a
    relation to the reference."""

    task = "Detection"
    binding_names = ("ref", "target", "view")
    text_fields = ("ref", "label", "category", "view")

    def propose(self, ctx, template, rng):
        refs = ctx.described()
        labels = _allowed_labels(template)
        if not refs:
            return None
        for _ in range(MAX_TRIES):
            ref = pick(rng, refs)
            label = pick(rng, labels)
            if label in HORIZONTAL_LABELS and not ctx.obj(ref).has_front:
                continue
            by_category = {}
            for o in ctx.scene.objects:
                if o.instance_id != ref and _holds(ctx, o.instance_id, ref, label):
                    by_category.setdefault(o.category, []).append(o.instance_id)
            unique = sorted((c, m[0]) for c, m in by_category.items() if len(m) == 1)
            if not unique:
                continue
            category, target = pick(rng, unique)
            combo = ctx.select_views(template, rng, [ref, target],
                                     lambda c: bool(ctx.visible_views(target, c)))
            if combo is None:
                continue
            view = pick(rng, ctx.visible_views(target, combo))
            return Draft(
                bindings={"ref": ref, "target": target, "view": view},
                key_objects=[ref, target],
                view_ids=combo,
                fields={"ref": ctx.text(ref), "label": LABEL_PHRASES[label],
                        "category": category_text(category), "view": image_ref(combo, view)},
                answer=[(view, ctx.record(view, target).bbox2)],
                params={"label": label, "category": category, "view": view},
                relations=[relation_fact("object_centric", target, ref, label)],
            )
        return None
