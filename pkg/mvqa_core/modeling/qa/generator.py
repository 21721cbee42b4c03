import json
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from mvqa_core.modeling.registry import QUESTION_FAMILIES
from mvqa_core.modeling.relations import RelationParams, build_relation_params
from mvqa_core.modeling.render.metadata import key_object_visibility
from mvqa_core.structures.question import QuestionInstance, TemplateError
from mvqa_core.utils.parallel import ordered_map
from mvqa_core.utils.seeding import derive_seed, make_rng
from mvqa_core.utils.timer import Timer, get_time_str

from . import families  # noqa: F401  registers the question families
from .context import SceneBundle, SceneContext
from .difficulty import DifficultyError, count_hops, reasoning_difficulty
from .supervision import emit_supervision


@dataclass(frozen=True)
class QAParams:
    log_scale: float = 1.0
    position_slack: int = 1
    count_max_share: float = 0.4
    supervision_level: int = 0  # 0 omits supervision
    rounds: int = 40
    max_tags: int = 2
    jobs: int = 1
    relations: RelationParams = field(default_factory=RelationParams)


def build_qa_params(cfg):
    return QAParams(
        log_scale=cfg.QA.LOG_SCALE,
        position_slack=cfg.QA.POSITION_SLACK,
        count_max_share=cfg.QA.COUNT_MAX_SHARE,
        supervision_level=cfg.QA.SUPERVISION_LEVEL,
        rounds=cfg.QA.ROUNDS,
        max_tags=cfg.QA.MAX_TAGS,
        jobs=cfg.JOBS,
        relations=build_relation_params(cfg),
    )


def get_family(name):
    return QUESTION_FAMILIES[name]()


def check_templates(templates):
    for template in templates:
        try:
            family = get_family(template.family)
        except KeyError as e:
            raise TemplateError("{}: {}".format(template.template_id, e.args[0]))
        family.check_template(template)


def _ids(value):
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _program(ctx, template, draft):
    referenced = set(draft.key_objects)
    for name, value in draft.bindings.items():
        if name != "view":
            referenced.update(_ids(value))
    descriptions = {}
    for iid in sorted(referenced):
        obj = ctx.obj(iid)
        d = ctx.descriptions.get(iid)
        descriptions[iid] = {
            "category": obj.category,
            "tags": list(d.tag_ids) if d is not None else [],
            "text": ctx.text(iid),
            "unique": d is not None,
        }
    return {
        "bindings": dict(draft.bindings),
        "params": dict(draft.params),
        "option_values": list(draft.option_values) if draft.option_values is not None else None,
        "descriptions": descriptions,
        "view_classes": [ctx.metadata.view(v).view_class for v in draft.view_ids],
        "sparse": template.sparse,
    }


def _trace(ctx, draft):
    grounding, identity = [], []
    for iid in sorted(draft.key_objects):
        boxes = ctx.boxes(iid, draft.view_ids)
        grounding.append({"instance_id": iid, "text": ctx.text(iid), "boxes": boxes})
        seen = [v for v in draft.view_ids if v in boxes]
        if len(seen) >= 2:
            identity.append({"instance_id": iid, "views": seen})
    trace = {"grounding": grounding, "identity": identity, "relations": list(draft.relations)}
    if draft.count is not None:
        trace["count"] = dict(draft.count)
    return trace


def _instantiate(ctx, template, seed, params, qid=""):
    family = get_family(template.family)
    rng = make_rng(seed, "instantiate", ctx.scene.scene_id, template.template_id)
    draft = family.propose(ctx, template, rng)
    if draft is None:
        return None
    try:
        text = template.text_pattern.format_map(draft.fields)
    except KeyError as e:
        raise TemplateError("{}: slot {} is not filled by family {}".format(
            template.template_id, e.args[0], template.family))
    try:
        hops = count_hops(template.plan, ctx.graphs, draft.bindings)
        difficulty = reasoning_difficulty(template.plan, ctx.graphs, draft.bindings,
                                          len(draft.key_objects), params.log_scale)
    except DifficultyError as e:
        logging.getLogger("mvqa_core.qa").debug("{}@{}: {}".format(
            template.template_id, ctx.scene.scene_id, e))
        return None
    q = QuestionInstance(
        qid=qid,
        scene_id=ctx.scene.scene_id,
        template_id=template.template_id,
        family=template.family,
        task=template.task,
        text=text[0].upper() + text[1:],
        view_ids=list(draft.view_ids),
        gt_answer=draft.answer,
        reasoning_difficulty=difficulty,
        visibility_difficulty=key_object_visibility(draft.key_objects, ctx.metadata, draft.view_ids),
        key_objects=list(draft.key_objects),
        options=draft.options,
        images=[ctx.bundle.image_paths.get(v, "") for v in draft.view_ids],
        program=_program(ctx, template, draft),
        trace=_trace(ctx, draft),
        hops=hops,
        image_size=tuple(ctx.metadata.view(draft.view_ids[0]).camera.image_size),
    )
    q.trace["answer_text"] = q.options[q.gt_answer] if q.task == "MCQ" else q.answer_text()
    if params.supervision_level:
        q.supervision = emit_supervision(q, params.supervision_level)
    return q


def instantiate_question(template, scene, graphs, metadata, seed, params=None, image_paths=None):
    """One question from ``template`` on ``scene``, or None when the template
    does not apply (no unique referent, no admissible views, unreachable hop)."""
    params = params or QAParams()
    if len(metadata.views) < 2:
        raise ValueError("{}: questions need metadata for at least 2 views".format(scene.scene_id))
    get_family(template.family).check_template(template)
    bundle = SceneBundle(scene, metadata, graphs, dict(image_paths or {}))
    return _instantiate(SceneContext(bundle, params.relations, params.max_tags), template, seed, params)


def _dedup_key(q):
    return (q.template_id, q.scene_id, json.dumps(q.program["bindings"], sort_keys=True),
            tuple(q.view_ids))


def _bin_index(edges, value):
    for i in range(len(edges) - 1):
        last = i == len(edges) - 2
        if edges[i] <= value < edges[i + 1] or (last and value == edges[-1]):
            return i
    return None


class GenerationResult(object):
    def __init__(self, questions, targets, accepted, stats):
        self.questions = questions
        self.targets = targets
        self.accepted = accepted
        self.stats = stats

    def counts(self):
        return Counter(q.task for q in self.questions)

    @property
    def complete(self):
        counts = self.counts()
        return all(counts[t] >= n for t, n in self.targets.counts.items())

    def shortfall(self):
        counts = self.counts()
        return {t: n - counts[t] for t, n in self.targets.counts.items() if counts[t] < n}

    def shortfall_text(self):
        counts = self.counts()
        lines = []
        for task, target in self.targets.counts.items():
            status = "ok" if counts[task] >= target else "short {}".format(target - counts[task])
            lines.append("{:<10}: {} / {} ({})".format(task, counts[task], target, status))
            for template_id in sorted(self.stats):
                s = self.stats[template_id]
                if s["task"] != task:
                    continue
                lines.append("  {:<28} accepted {:>6}  inapplicable {:>6}  rejected {:>6}".format(
                    template_id, s["accepted"], s["inapplicable"], s["rejected"]))
        return "\n".join(lines) + "\n"


class _Acceptor(object):
    """Sequential owner of the balance state; candidates arrive in a fixed order."""

    def __init__(self, targets, params, verify):
        self.targets = targets
        self.verify = verify
        balance = targets.balance
        self.slack = int(balance.get("position_slack", params.position_slack))
        self.share = float(balance.get("count_max_share", params.count_max_share))
        self.count_cap = max(1, int(math.floor(self.share * targets.counts["Counting"])))
        self.counts = Counter()
        self.positions = {}
        self.values = Counter()
        self.bins = {t: targets.quotas(t) for t in targets.counts}
        self.bin_counts = defaultdict(Counter)
        self.seen = set()
        self.questions = []

    def _bin(self, q):
        if self.bins[q.task] is None:
            return None
        return _bin_index(self.bins[q.task][0], q.reasoning_difficulty)

    def full(self, task):
        return self.counts[task] >= self.targets.counts[task]

    @property
    def done(self):
        return all(self.full(t) for t in self.targets.counts)

    def offer(self, q, bundle):
        if self.full(q.task):
            return False
        key = _dedup_key(q)
        if key in self.seen:
            return False
        b = self._bin(q)
        if self.bins[q.task] is not None:
            if b is None or self.bin_counts[q.task][b] >= self.bins[q.task][1][b]:
                return False
        if q.task == "MCQ":
            slots = self.positions.setdefault(q.option_count, [0] * q.option_count)
            if slots[q.gt_answer] - min(slots) >= self.slack:
                return False
        if q.task == "Counting" and self.values[q.gt_answer] + 1 > self.count_cap:
            return False
        if self.verify is not None and not self.verify(q, bundle):
            logging.getLogger("mvqa_core.qa").warning(
                "{}@{}: candidate failed verification, dropped".format(q.template_id, q.scene_id))
            return False

        self.seen.add(key)
        if b is not None:
            self.bin_counts[q.task][b] += 1
        if q.task == "MCQ":
            self.positions[q.option_count][q.gt_answer] += 1
        if q.task == "Counting":
            self.values[q.gt_answer] += 1
        self.counts[q.task] += 1
        q.qid = "q{:06d}".format(len(self.questions))
        self.questions.append(q)
        return True

    def trim_counting(self):
        """Drop the latest Counting questions of the most frequent answer until
        no answer exceeds its share of the accepted Counting questions.

        The cap tracks the accepted total, not the target, so a short split
        stays balanced. Returns the dropped questions; qids are renumbered.
        """
        dropped = []
        while self.counts["Counting"]:
            cap = max(1, int(math.floor(self.share * self.counts["Counting"])))
            value = max(sorted(self.values), key=lambda v: self.values[v])
            if self.values[value] <= cap:
                break
            idx = max(i for i, q in enumerate(self.questions)
                      if q.task == "Counting" and q.gt_answer == value)
            q = self.questions.pop(idx)
            self.seen.discard(_dedup_key(q))
            b = self._bin(q)
            if b is not None:
                self.bin_counts[q.task][b] -= 1
            self.values[value] -= 1
            self.counts["Counting"] -= 1
            dropped.append(q)
        if dropped:
            for i, q in enumerate(self.questions):
                q.qid = "q{:06d}".format(i)
        return dropped


def generate_dataset(bundles, templates, targets, seed, params=None, verify=None,
                     show_progress=False):
    """Rejection-sample questions until every per-task target is met or the
    round budget runs out.

    Candidates are instantiated in parallel (one derived seed per round,
    scene and template) and offered to the balancing pass in
    (round, scene, template) order, so the result is the same for any
    number of jobs. ``verify(q, bundle)`` may veto candidates.
    """
    params = params or QAParams()
    logger = logging.getLogger("mvqa_core.qa")
    check_templates(templates)
    templates = sorted(templates, key=lambda t: t.template_id)
    contexts = [SceneContext(b, params.relations, params.max_tags)
                for b in sorted(bundles, key=lambda b: b.scene_id)]
    acceptor = _Acceptor(targets, params, verify)
    stats = {t.template_id: {"task": t.task, "accepted": 0, "inapplicable": 0, "rejected": 0}
             for t in templates}
    rounds = targets.rounds if targets.rounds is not None else params.rounds

    timer = Timer()
    timer.tic()
    for r in range(rounds):
        if acceptor.done:
            break
        jobs = [(ctx, t) for ctx in contexts for t in templates if not acceptor.full(t.task)]
        candidates = ordered_map(
            lambda job: _instantiate(
                job[0], job[1],
                derive_seed(seed, "qa", r, job[0].scene.scene_id, job[1].template_id), params),
            jobs, jobs=params.jobs, desc="qa round {}".format(r), show_progress=show_progress,
        )
        for (ctx, template), q in zip(jobs, candidates):
            s = stats[template.template_id]
            if q is None:
                s["inapplicable"] += 1
            elif acceptor.offer(q, ctx.bundle):
                s["accepted"] += 1
            else:
                s["rejected"] += 1
        logger.info("Round {}: {}".format(r, dict(acceptor.counts)))
    for q in acceptor.trim_counting():
        stats[q.template_id]["accepted"] -= 1
        stats[q.template_id]["rejected"] += 1
        logger.info("{}@{}: dropped to keep counting answers balanced".format(q.template_id, q.scene_id))
    timer.toc()

    result = GenerationResult(acceptor.questions, targets, acceptor.counts, stats)
    logger.info("Generated {} questions in {}".format(
        len(result.questions), get_time_str(timer.total_time)))
    if not result.complete:
        logger.warning("Targets not met:\n{}".format(result.shortfall_text()))
    return result
