from dataclasses import dataclass, field

from .bounding_box import Bbox2

TASKS = ("MCQ", "Counting", "Detection")
STEP_KINDS = ("Ground", "Hop", "Aggregate", "Localize")
OPTION_LETTERS = "ABCD"


class TemplateError(ValueError):
    pass


def validate_plan(plan, task):
    if not plan:
        raise TemplateError("plan must not be empty")
    for i, step in enumerate(plan):
        kind = step.get("kind")
        if kind not in STEP_KINDS:
            raise TemplateError("plan[{}]: unknown step kind '{}'".format(i, kind))
        if kind in ("Ground", "Aggregate", "Localize") and "slot" not in step:
            raise TemplateError("plan[{}]: {} step needs a slot".format(i, kind))
        if kind == "Hop" and not ("from" in step and "to" in step and "frame" in step):
            raise TemplateError("plan[{}]: Hop step needs from, to and frame".format(i))
    last = plan[-1]["kind"]
    if task == "Detection" and last != "Localize":
        raise TemplateError("Detection plans must end in Localize")
    if task == "Counting" and last != "Aggregate":
        raise TemplateError("Counting plans must end in Aggregate")


@dataclass(eq=False)
class QuestionTemplate:
    template_id: str
    family: str
    task: str
    text_pattern: str
    plan: list
    option_count: int = 0
    num_views: int = 2
    sparse: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.task not in TASKS:
            raise TemplateError("{}: unknown task '{}'".format(self.template_id, self.task))
        try:
            validate_plan(self.plan, self.task)
        except TemplateError as e:
            raise TemplateError("{}: {}".format(self.template_id, e))
        if self.task == "MCQ" and not 2 <= self.option_count <= 4:
            raise TemplateError("{}: MCQ option_count must be in [2, 4], got {}".format(
                self.template_id, self.option_count))
        if self.num_views < 2:
            raise TemplateError("{}: num_views must be at least 2".format(self.template_id))

    def to_dict(self):
        return {
            "template_id": self.template_id,
            "family": self.family,
            "task": self.task,
            "text_pattern": self.text_pattern,
            "plan": [dict(s) for s in self.plan],
            "option_count": self.option_count,
            "num_views": self.num_views,
            "sparse": self.sparse,
            "params": dict(self.params),
        }

    @classmethod
    def from_dict(cls, d):
        missing = [k for k in ("template_id", "family", "task", "text_pattern", "plan") if k not in d]
        if missing:
            raise TemplateError("template is missing fields: {}".format(", ".join(missing)))
        return cls(
            template_id=d["template_id"],
            family=d["family"],
            task=d["task"],
            text_pattern=d["text_pattern"],
            plan=[dict(s) for s in d["plan"]],
            option_count=int(d.get("option_count", 0)),
            num_views=int(d.get("num_views", 2)),
            sparse=bool(d.get("sparse", False)),
            params=dict(d.get("params", {})),
        )


@dataclass(eq=False)
class SupervisionStep:
    text: str
    evidence: list = field(default_factory=list)  # (view_id, instance_id, Bbox2)
    claim: dict = None

    def to_dict(self):
        d = {
            "text": self.text,
            "evidence": [{"view_id": v, "instance_id": i, "box": b.as_list()}
                         for v, i, b in self.evidence],
        }
        if self.claim is not None:
            d["claim"] = dict(self.claim)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(
            d["text"],
            [(e["view_id"], e["instance_id"], Bbox2.from_list(e["box"])) for e in d["evidence"]],
            d.get("claim"),
        )


@dataclass(eq=False)
class SupervisionTrace:
    level: int
    steps: list
    final_answer: object

    def __post_init__(self):
        if self.level not in (1, 2, 3, 4):
            raise ValueError("supervision level must be in 1..4, got {}".format(self.level))
        if self.level == 1 and self.steps:
            raise ValueError("level-1 supervision carries no steps")

    def to_dict(self):
        return {
            "level": self.level,
            "steps": [s.to_dict() for s in self.steps],
            "final_answer": self.final_answer,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["level"], [SupervisionStep.from_dict(s) for s in d["steps"]], d["final_answer"])


def answer_to_json(task, answer):
    if task == "Detection":
        return [{"view_id": v, "box": b.as_list()} for v, b in answer]
    return int(answer)


def answer_from_json(task, payload):
    if task == "Detection":
        return [(d["view_id"], Bbox2.from_list(d["box"])) for d in payload]
    return int(payload)


@dataclass(eq=False)
class QuestionInstance:
    qid: str
    scene_id: str
    template_id: str
    family: str
    task: str
    text: str
    view_ids: list
    gt_answer: object
    reasoning_difficulty: float
    visibility_difficulty: float
    key_objects: list
    options: list = None
    images: list = field(default_factory=list)
    program: dict = field(default_factory=dict)
    trace: dict = field(default_factory=dict)
    hops: int = 0
    image_size: tuple = (0, 0)
    supervision: SupervisionTrace = None

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError("{}: unknown task '{}'".format(self.qid, self.task))
        self.key_objects = sorted(self.key_objects)
        if self.task == "MCQ":
            if not self.options or not 0 <= self.gt_answer < len(self.options):
                raise ValueError("{}: MCQ answer must index its options".format(self.qid))
        if self.task == "Detection":
            w, h = self.image_size
            for view_id, box in self.gt_answer:
                if box.x_min < 0 or box.y_min < 0 or box.x_max > w or box.y_max > h:
                    raise ValueError("{}: gt box in {} is not clipped to the image".format(
                        self.qid, view_id))

    @property
    def option_count(self):
        return len(self.options) if self.options else 0

    def answer_text(self):
        if self.task == "MCQ":
            return OPTION_LETTERS[self.gt_answer]
        if self.task == "Counting":
            return str(self.gt_answer)
        return "; ".join("{} {:.1f} {:.1f} {:.1f} {:.1f}".format(v, *b.as_list())
                         for v, b in self.gt_answer)

    def to_record(self, include_supervision=True):
        d = {
            "qid": self.qid,
            "scene_id": self.scene_id,
            "template_id": self.template_id,
            "family": self.family,
            "task": self.task,
            "text": self.text,
            "view_ids": list(self.view_ids),
            "images": list(self.images),
            "answer": answer_to_json(self.task, self.gt_answer),
            "reasoning_difficulty": self.reasoning_difficulty,
            "visibility_difficulty": self.visibility_difficulty,
            "key_objects": list(self.key_objects),
            "hops": self.hops,
            "image_size": list(self.image_size),
            "program": self.program,
            "trace": self.trace,
        }
        if self.options is not None:
            d["options"] = list(self.options)
        if include_supervision and self.supervision is not None:
            d["supervision"] = self.supervision.to_dict()
        return d

    @classmethod
    def from_record(cls, d):
        supervision = d.get("supervision")
        return cls(
            qid=d["qid"],
            scene_id=d["scene_id"],
            template_id=d.get("template_id", ""),
            family=d.get("family", ""),
            task=d["task"],
            text=d["text"],
            view_ids=list(d.get("view_ids", [])),
            gt_answer=answer_from_json(d["task"], d["answer"]),
            reasoning_difficulty=float(d["reasoning_difficulty"]),
            visibility_difficulty=float(d["visibility_difficulty"]),
            key_objects=list(d["key_objects"]),
            options=d.get("options"),
            images=list(d.get("images", [])),
            program=d.get("program", {}),
            trace=d.get("trace", {}),
            hops=int(d.get("hops", 0)),
            image_size=tuple(d.get("image_size", (0, 0))),
            supervision=SupervisionTrace.from_dict(supervision) if supervision else None,
        )
