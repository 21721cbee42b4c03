import glob
import json
import logging
import os

from mvqa_core.structures.question import TASKS, QuestionTemplate, TemplateError


def load_templates(template_dir):
    """All ``*.json`` templates in a directory, sorted by template_id. A file
    may hold one template object or a list of them."""
    templates = []
    for path in sorted(glob.glob(os.path.join(template_dir, "*.json"))):
        with open(path, "r", encoding="utf-8") as f:
            try:
                raw = json.load(f)
            except json.JSONDecodeError as e:
                raise TemplateError("{}:{}:{}: {}".format(path, e.lineno, e.colno, e.msg))
        for item in raw if isinstance(raw, list) else [raw]:
            templates.append(QuestionTemplate.from_dict(item))
    ids = [t.template_id for t in templates]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        raise TemplateError("duplicate template_id '{}'".format(dup[0]))
    if not templates:
        raise TemplateError("no templates in {}".format(template_dir))
    logger = logging.getLogger("mvqa_core.templates")
    logger.info("Loaded {} templates from {}".format(len(templates), template_dir))
    return sorted(templates, key=lambda t: t.template_id)


class GenerationTargets(object):
    """Per-task question counts plus optional difficulty quotas and balance policy.

    JSON form::

        {"counts": {"MCQ": 1400, "Counting": 591, "Detection": 1600},
         "difficulty": {"MCQ": {"edges": [1, 3, 5, 9], "weights": [0.4, 0.4, 0.2]}},
         "balance": {"position_slack": 1, "count_max_share": 0.4},
         "rounds": 50}
    """

    def __init__(self, counts, difficulty=None, balance=None, rounds=None):
        for task in counts:
            if task not in TASKS:
                raise ValueError("unknown task '{}' in targets".format(task))
            if counts[task] < 0:
                raise ValueError("target count for {} must be >= 0".format(task))
        self.counts = {t: int(counts.get(t, 0)) for t in TASKS}
        self.difficulty = dict(difficulty or {})
        for task, spec in self.difficulty.items():
            edges, weights = spec["edges"], spec["weights"]
            if len(weights) != len(edges) - 1 or any(b <= a for a, b in zip(edges, edges[1:])):
                raise ValueError("difficulty bins for {} must be increasing with one weight "
                                 "per bin".format(task))
        self.balance = dict(balance or {})
        self.rounds = rounds

    @property
    def total(self):
        return sum(self.counts.values())

    def quotas(self, task):
        """Per-bin question quotas by largest-remainder rounding, or None."""
        spec = self.difficulty.get(task)
        if spec is None:
            return None
        target = self.counts[task]
        weights = [float(w) for w in spec["weights"]]
        total = sum(weights)
        raw = [target * w / total for w in weights]
        quotas = [int(r) for r in raw]
        order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - quotas[i]), i))
        for i in order[: target - sum(quotas)]:
            quotas[i] += 1
        return list(spec["edges"]), quotas

    def to_dict(self):
        d = {"counts": dict(self.counts)}
        if self.difficulty:
            d["difficulty"] = self.difficulty
        if self.balance:
            d["balance"] = self.balance
        if self.rounds is not None:
            d["rounds"] = self.rounds
        return d

    @classmethod
    def from_dict(cls, d):
        counts = d.get("counts", {k: v for k, v in d.items() if k in TASKS})
        return cls(counts, d.get("difficulty"), d.get("balance"), d.get("rounds"))


def load_targets(path):
    with open(path, "r", encoding="utf-8") as f:
        return GenerationTargets.from_dict(json.load(f))
