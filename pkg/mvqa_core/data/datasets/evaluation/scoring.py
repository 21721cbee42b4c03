import logging
from collections import OrderedDict
from dataclasses import dataclass, field

from mvqa_core.structures.bounding_box import BoxList
from mvqa_core.structures.boxlist_ops import greedy_match

from .parsing import parse_boxes, parse_count, parse_mcq

F1_IOU = 0.5


def index_predictions(dataset, predictions):
    """qid -> payload for predictions whose qid is in the dataset, plus the
    qids that match nothing. Missing-prediction records map to None."""
    logger = logging.getLogger("mvqa_core.eval")
    known = {q.qid for q in dataset}
    index, unmatched = OrderedDict(), []
    for p in predictions:
        qid = p.get("qid")
        if qid not in known:
            unmatched.append(qid)
            continue
        if qid in index:
            logger.warning("duplicate prediction for {}; keeping the first".format(qid))
            continue
        index[qid] = None if p.get("missing") else p.get("answer")
    if unmatched:
        logger.warning("{} predictions match no question, e.g. {}".format(len(unmatched), unmatched[0]))
    return index, unmatched


def detection_scores(q, boxes):
    """(mIoU, F1) of one question in [0, 1]. Boxes are matched greedily one to
    one within each view; unmatched gt boxes contribute IoU 0."""
    gt_by_view, pred_by_view = OrderedDict(), OrderedDict()
    for v, b in q.gt_answer:
        gt_by_view.setdefault(v, []).append(b)
    for v, b in boxes:
        pred_by_view.setdefault(v, []).append(b)
    n_gt, n_pred = len(q.gt_answer), len(boxes)
    if n_gt == 0 or n_pred == 0:
        return 0.0, 0.0
    iou_sum, tp = 0.0, 0
    for v, gts in gt_by_view.items():
        preds = pred_by_view.get(v)
        if not preds:
            continue
        matches = greedy_match(BoxList.from_bbox2(preds, q.image_size),
                               BoxList.from_bbox2(gts, q.image_size))
        for _, _, value in matches:
            iou_sum += value
            tp += value > F1_IOU
    precision, recall = tp / float(n_pred), tp / float(n_gt)
    f1 = 0.0 if tp == 0 else 2.0 * precision * recall / (precision + recall)
    return iou_sum / n_gt, f1


def score_question(q, payload):
    """Per-question outcome: ``answered`` (parse succeeded), the task metric
    fields and an optional record-level ``error``."""
    if q.task == "MCQ":
        pred = parse_mcq(payload, q.options)
        return {"answered": pred is not None, "correct": pred == q.gt_answer, "pred": pred}
    if q.task == "Counting":
        pred = parse_count(payload)
        value = 0 if pred is None else pred
        return {"answered": pred is not None, "correct": pred == q.gt_answer,
                "abs_err": abs(value - q.gt_answer), "pred": pred}
    boxes, error = parse_boxes(payload, q.view_ids)
    if error is not None:
        return {"answered": False, "iou": 0.0, "f1": 0.0, "error": error}
    miou, f1 = detection_scores(q, boxes)
    return {"answered": bool(boxes), "iou": miou, "f1": f1}


def _pct(values):
    return 100.0 * sum(values) / len(values) if values else 0.0


def score_mcq(dataset, predictions):
    index, _ = index_predictions(dataset, predictions)
    rows = [score_question(q, index.get(q.qid)) for q in dataset if q.task == "MCQ"]
    return _pct([r["correct"] for r in rows])


def score_counting(dataset, predictions):
    index, _ = index_predictions(dataset, predictions)
    rows = [score_question(q, index.get(q.qid)) for q in dataset if q.task == "Counting"]
    mae = sum(r["abs_err"] for r in rows) / len(rows) if rows else 0.0
    return {"acc": _pct([r["correct"] for r in rows]), "mae": mae}


def score_detection(dataset, predictions):
    index, _ = index_predictions(dataset, predictions)
    rows = [score_question(q, index.get(q.qid)) for q in dataset if q.task == "Detection"]
    return {"miou": _pct([r["iou"] for r in rows]), "f1": _pct([r["f1"] for r in rows])}


def task_metric(task, rows):
    """Headline metric of a task over per-question rows, in percent."""
    if not rows:
        return None
    if task == "Detection":
        return _pct([r["iou"] for r in rows])
    return _pct([r["correct"] for r in rows])


@dataclass(eq=False)
class EvalReport:
    mcq: dict = field(default_factory=dict)
    counting: dict = field(default_factory=dict)
    detection: dict = field(default_factory=dict)
    coverage: dict = field(default_factory=dict)
    buckets: dict = field(default_factory=dict)
    unmatched: list = field(default_factory=list)
    record_errors: list = field(default_factory=list)
    name: str = "predictions"

    def to_dict(self):
        return {
            "name": self.name,
            "mcq": self.mcq,
            "counting": self.counting,
            "detection": self.detection,
            "coverage": self.coverage,
            "buckets": self.buckets,
            "unmatched": list(self.unmatched),
            "record_errors": list(self.record_errors),
        }

    def result_str(self):
        result_str = "{}\n".format(self.name)
        rows = [
            ("MCQ ACC", self.mcq.get("acc")),
            ("Counting ACC", self.counting.get("acc")),
            ("Counting MAE", self.counting.get("mae")),
            ("Det mIoU", self.detection.get("miou")),
            ("Det F1", self.detection.get("f1")),
        ]
        for name, value in rows:
            if value is not None:
                result_str += "{:<16}: {:.4f}\n".format(name, value)
        for task, c in self.coverage.items():
            result_str += "{:<16}: {}/{}\n".format("answered " + task, c["answered"], c["total"])
        return result_str


def build_report(dataset, rows, name="predictions"):
    """Aggregate per-question rows (qid -> score_question output)."""
    report = EvalReport(name=name)
    by_task = OrderedDict((t, []) for t in ("MCQ", "Counting", "Detection"))
    for q in dataset:
        by_task[q.task].append(rows[q.qid])
    mcq, counting, detection = by_task["MCQ"], by_task["Counting"], by_task["Detection"]
    if mcq:
        report.mcq = {"acc": _pct([r["correct"] for r in mcq]), "n": len(mcq)}
    if counting:
        report.counting = {"acc": _pct([r["correct"] for r in counting]),
                           "mae": sum(r["abs_err"] for r in counting) / len(counting),
                           "n": len(counting)}
    if detection:
        report.detection = {"miou": _pct([r["iou"] for r in detection]),
                            "f1": _pct([r["f1"] for r in detection]), "n": len(detection)}
    report.coverage = {t: {"answered": sum(1 for r in rs if r["answered"]), "total": len(rs)}
                       for t, rs in by_task.items() if rs}
    report.record_errors = [{"qid": qid, "error": r["error"]}
                            for qid, r in rows.items() if r.get("error")]
    return report
