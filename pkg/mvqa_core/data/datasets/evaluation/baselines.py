"""Chance and frequency baselines by Monte-Carlo simulation.

Each question draws all of its trials from its own stream keyed by
``(seed, kind, qid)``, so results do not depend on evaluation order.
"""
from collections import Counter

import numpy as np

from mvqa_core.structures.bounding_box import BoxList
from mvqa_core.structures.boxlist_ops import boxlist_iou
from mvqa_core.utils.seeding import make_rng

from .scoring import F1_IOU, EvalReport

KINDS = ("chance", "frequency")


def _trial_ious(boxes, gt, image_size):
    """IoU of (T, 4) sampled boxes against one gt Bbox2."""
    ious = boxlist_iou(BoxList(boxes, image_size), BoxList.from_bbox2([gt], image_size))
    return ious[:, 0].numpy()


def _random_boxes(rng, trials, width, height):
    xs = np.sort(rng.uniform(0.0, width, size=(trials, 2)), axis=1)
    ys = np.sort(rng.uniform(0.0, height, size=(trials, 2)), axis=1)
    return np.stack([xs[:, 0], ys[:, 0], xs[:, 1], ys[:, 1]], axis=1)


def _detection_trials(q, sample_boxes):
    """Per-trial (mIoU, F1) of one question when one box is guessed for each
    gt view; with one guess per gt box, greedy matching pairs them directly."""
    ious = np.stack([_trial_ious(sample_boxes(v), b, q.image_size) for v, b in q.gt_answer])
    miou = ious.mean(axis=0)
    f1 = (ious > F1_IOU).mean(axis=0)
    return miou, f1


class _Context(object):
    def __init__(self, dataset):
        self.counts = [q.gt_answer for q in dataset if q.task == "Counting"]
        self.positions = {}
        for q in dataset:
            if q.task == "MCQ":
                self.positions.setdefault(q.option_count, Counter())[q.gt_answer] += 1
        self.gt_boxes = np.array([b.as_list() for q in dataset if q.task == "Detection"
                                  for _, b in q.gt_answer]).reshape(-1, 4)


def _sample_mcq(kind, q, ctx, rng, trials):
    k = q.option_count
    if kind == "chance":
        return rng.integers(k, size=trials)
    hist = ctx.positions[k]
    values = sorted(hist)
    p = np.array([hist[v] for v in values], dtype=np.float64)
    return np.array(values)[rng.choice(len(values), size=trials, p=p / p.sum())]


def _sample_count(kind, ctx, rng, trials):
    if kind == "chance":
        return rng.integers(min(ctx.counts), max(ctx.counts) + 1, size=trials)
    return np.array(ctx.counts)[rng.integers(len(ctx.counts), size=trials)]


def run_baseline(dataset, kind, seed, trials):
    if kind not in KINDS:
        raise ValueError("baseline kind must be one of {}, got '{}'".format(KINDS, kind))
    if trials < 1:
        raise ValueError("trials must be >= 1, got {}".format(trials))
    ctx = _Context(dataset)
    mcq, count_hits, count_err, det_iou, det_f1 = [], [], [], [], []
    for q in dataset:
        rng = make_rng(seed, kind, q.qid)
        if q.task == "MCQ":
            mcq.append(np.mean(_sample_mcq(kind, q, ctx, rng, trials) == q.gt_answer))
        elif q.task == "Counting":
            draws = _sample_count(kind, ctx, rng, trials)
            count_hits.append(np.mean(draws == q.gt_answer))
            count_err.append(np.mean(np.abs(draws - q.gt_answer)))
        else:
            width, height = q.image_size
            if kind == "chance":
                def sample(view_id):
                    return _random_boxes(rng, trials, width, height)
            else:
                def sample(view_id):
                    return ctx.gt_boxes[rng.integers(len(ctx.gt_boxes), size=trials)]
            miou, f1 = _detection_trials(q, sample)
            det_iou.append(miou.mean())
            det_f1.append(f1.mean())

    report = EvalReport(name="baseline {} ({} trials)".format(kind, trials))
    if mcq:
        report.mcq = {"acc": 100.0 * float(np.mean(mcq)), "n": len(mcq)}
    if count_hits:
        report.counting = {"acc": 100.0 * float(np.mean(count_hits)),
                           "mae": float(np.mean(count_err)), "n": len(count_hits)}
    if det_iou:
        report.detection = {"miou": 100.0 * float(np.mean(det_iou)),
                            "f1": 100.0 * float(np.mean(det_f1)), "n": len(det_iou)}
    totals = Counter(q.task for q in dataset)
    report.coverage = {t: {"answered": n, "total": n} for t, n in sorted(totals.items())}
    return report


def baseline_chance(dataset, seed, trials):
    return run_baseline(dataset, "chance", seed, trials)


def baseline_frequency(dataset, seed, trials):
    return run_baseline(dataset, "frequency", seed, trials)
