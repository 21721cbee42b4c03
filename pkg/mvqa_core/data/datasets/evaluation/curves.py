import csv
import logging
import os

from .scoring import task_metric

AXES = ("reasoning", "visibility")

# complementary-axis filters: reasoning curves keep well-visible questions,
# visibility curves keep shallow ones
DEFAULT_FILTERS = {
    "reasoning": {"max_visibility": 0.5},
    "visibility": {"max_reasoning": 6.0},
}


def difficulty_value(q, axis):
    if axis == "reasoning":
        return q.reasoning_difficulty
    if axis == "visibility":
        return q.visibility_difficulty
    raise ValueError("axis must be one of {}, got '{}'".format(AXES, axis))


def passes(q, filters):
    f = filters or {}
    if "max_visibility" in f and not q.visibility_difficulty < f["max_visibility"]:
        return False
    if "max_reasoning" in f and not q.reasoning_difficulty < f["max_reasoning"]:
        return False
    return True


def _bin_of(edges, value):
    """Bin index of ``value``; values beyond the range land in the edge bins."""
    last = len(edges) - 2
    if value < edges[0]:
        return 0
    for i in range(last + 1):
        if edges[i] <= value < edges[i + 1]:
            return i
    return last


def difficulty_curves(dataset, rows, axis, bins, filters=None):
    """Per-task metric per difficulty bin.

    Questions failing ``filters`` are dropped; the rest fall into the
    half-open bins ``[lo, hi)`` (the last bin is closed). Values below the
    first edge join the first bin and values above the last edge join the
    last bin, so the rows partition the filtered questions. Returns
    ``{task: [row, ...]}`` with rows ``{bin_lo, bin_hi, count, metric}``;
    empty bins carry ``metric=None``.
    """
    edges = [float(b) for b in bins]
    if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
        raise ValueError("bins must be at least two strictly increasing edges, got {}".format(bins))
    members = {}
    outside = 0
    for q in dataset:
        if not passes(q, filters):
            continue
        value = difficulty_value(q, axis)
        if not edges[0] <= value <= edges[-1]:
            outside += 1
        k = _bin_of(edges, value)
        members.setdefault(q.task, [[] for _ in range(len(edges) - 1)])[k].append(rows[q.qid])
    if outside:
        logging.getLogger("mvqa_core.eval").info(
            "{} questions outside the {} range [{:g}, {:g}] were put in the edge bins".format(
                outside, axis, edges[0], edges[-1]))
    curves = {}
    for task in sorted(members):
        curves[task] = [
            {"bin_lo": edges[i], "bin_hi": edges[i + 1], "count": len(r), "metric": task_metric(task, r)}
            for i, r in enumerate(members[task])
        ]
    return curves


def write_curves_csv(output_folder, axis, curves):
    paths = []
    for task, rows in sorted(curves.items()):
        path = os.path.join(output_folder, "curves_{}_{}.csv".format(axis, task))
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["bin_lo", "bin_hi", "count", "metric"])
            for r in rows:
                metric = "" if r["metric"] is None else "{:.6f}".format(r["metric"])
                writer.writerow(["{:g}".format(r["bin_lo"]), "{:g}".format(r["bin_hi"]), r["count"], metric])
        paths.append(path)
    return paths
