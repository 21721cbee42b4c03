import re
from collections import Counter

import numpy as np

GRID = 32
_WORD = re.compile(r"[a-z]+")


def _box_coverage(box, width, height, grid=GRID):
    """Area of a pixel box falling into each cell of a grid x grid partition
    of the image, in image-fraction units."""
    edges = np.linspace(0.0, 1.0, grid + 1)
    x0, y0, x1, y1 = box.x_min / width, box.y_min / height, box.x_max / width, box.y_max / height
    ox = np.clip(np.minimum(edges[1:], x1) - np.maximum(edges[:-1], x0), 0.0, None)
    oy = np.clip(np.minimum(edges[1:], y1) - np.maximum(edges[:-1], y0), 0.0, None)
    return np.outer(oy, ox)


def dataset_stats(dataset, grid=GRID):
    """Answer distributions, MCQ correct-position histograms, a normalized
    detection heatmap (rows are image y) and question vocabulary."""
    questions = list(dataset)
    answers = {}
    positions = {}
    heat = np.zeros((grid, grid))
    vocabulary = Counter()
    for q in questions:
        vocabulary.update(_WORD.findall(q.text.lower()))
        if q.task == "Detection":
            width, height = q.image_size
            for _, box in q.gt_answer:
                heat += _box_coverage(box, width, height, grid)
            answers.setdefault("Detection", Counter())[len(q.gt_answer)] += 1
            continue
        answers.setdefault(q.task, Counter())[q.gt_answer] += 1
        if q.task == "MCQ":
            positions.setdefault(q.option_count, [0] * q.option_count)[q.gt_answer] += 1

    deviation = {}
    for k, counts in positions.items():
        total = float(sum(counts))
        deviation[k] = max(abs(100.0 * c / total - 100.0 / k) for c in counts)

    total = heat.sum()
    return {
        "counts": dict(sorted(Counter(q.task for q in questions).items())),
        "answers": {t: {str(v): n for v, n in sorted(c.items())} for t, c in sorted(answers.items())},
        "mcq_positions": {str(k): v for k, v in sorted(positions.items())},
        "mcq_position_deviation": {str(k): v for k, v in sorted(deviation.items())},
        "detection_heatmap": (heat / total).tolist() if total > 0 else [],
        "vocabulary": dict(sorted(vocabulary.items(), key=lambda kv: (-kv[1], kv[0]))),
    }
