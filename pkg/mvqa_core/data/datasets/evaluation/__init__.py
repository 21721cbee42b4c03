import logging
import os

from mvqa_core.utils.serialization import write_json

from .baselines import baseline_chance, baseline_frequency, run_baseline
from .curves import AXES, DEFAULT_FILTERS, difficulty_curves, write_curves_csv
from .parsing import parse_boxes, parse_count, parse_mcq
from .scoring import (
    EvalReport,
    build_report,
    index_predictions,
    score_counting,
    score_detection,
    score_mcq,
    score_question,
)
from .stats import dataset_stats


def evaluate(dataset, predictions, output_folder=None, curves=(), bins=None, filters=None,
             name="predictions", report_name="report"):
    """Score predictions against a question dataset.

    Args:
        dataset: iterable of QuestionInstance (e.g. a QADataset)
        predictions (list[dict]): ``{qid, answer}`` records
        output_folder: where <report_name>.json, <report_name>.txt and curve CSVs go
        curves: difficulty axes to break the scores down by
        bins (dict): axis -> bin edges
        filters (dict): axis -> complementary filter, defaults to DEFAULT_FILTERS
    Returns:
        EvalReport
    """
    logger = logging.getLogger("mvqa_core.eval")
    index, unmatched = index_predictions(dataset, predictions)
    rows = {q.qid: score_question(q, index.get(q.qid)) for q in dataset}
    report = build_report(dataset, rows, name)
    report.unmatched = unmatched
    for axis in curves:
        axis_filters = (filters or DEFAULT_FILTERS).get(axis)
        report.buckets[axis] = difficulty_curves(dataset, rows, axis, bins[axis], axis_filters)
    for e in report.record_errors:
        logger.info("{}: {}".format(e["qid"], e["error"]))
    logger.info(report.result_str())
    if output_folder:
        write_json(os.path.join(output_folder, report_name + ".json"), report.to_dict())
        with open(os.path.join(output_folder, report_name + ".txt"), "w") as fid:
            fid.write(report.result_str())
        for axis, axis_curves in report.buckets.items():
            write_curves_csv(output_folder, axis, axis_curves)
    return report


__all__ = [
    "AXES",
    "DEFAULT_FILTERS",
    "EvalReport",
    "baseline_chance",
    "baseline_frequency",
    "build_report",
    "dataset_stats",
    "difficulty_curves",
    "evaluate",
    "index_predictions",
    "parse_boxes",
    "parse_count",
    "parse_mcq",
    "run_baseline",
    "score_counting",
    "score_detection",
    "score_mcq",
    "score_question",
    "write_curves_csv",
]
