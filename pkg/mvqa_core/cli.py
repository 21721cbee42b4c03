"""``mvqa`` command line.

Every subcommand takes ``--config-file`` and trailing ``KEY VALUE`` config
overrides, resolves the config (defaults < config file < flags < overrides),
freezes it and writes it next to its outputs as ``<command>.config.yaml``.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 external
service failure.
"""
import argparse
import logging
import os
import sys

from mvqa_core.client import EndpointError, build_endpoint, build_provider
from mvqa_core.config import cfg as default_cfg
from mvqa_core.config.paths_catalog import DemoCatalog
from mvqa_core.data import load_asset_library, load_targets, load_templates, load_themes, verify_tag_library
from mvqa_core.data.asset_library import write_asset_manifest
from mvqa_core.data.datasets import QADataset
from mvqa_core.data.datasets.evaluation import AXES, dataset_stats, evaluate, run_baseline
from mvqa_core.engine import (
    OsdTagStageError,
    apply_drafts,
    auto_repair,
    check_disjoint_renders,
    load_bundles,
    load_scenes,
    osd_tag_category,
    run_benchmark,
    run_qa_gen,
    run_render,
    run_scene_gen,
    verify_dataset,
)
from mvqa_core.modeling.qa import build_qa_params
from mvqa_core.modeling.relations import build_relation_params
from mvqa_core.modeling.scene import ConstraintUnsatisfiable, SplitOverlapError, build_scene_params
from mvqa_core.utils.collect_env import collect_env_info
from mvqa_core.utils.logger import setup_logger
from mvqa_core.utils.miscellaneous import mkdir, save_config
from mvqa_core.utils.serialization import read_jsonl, write_json, write_jsonl

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_EXTERNAL = 3

# argparse dest -> config key
FLAG_KEYS = {
    "seed": "SEED",
    "jobs": "JOBS",
    "assets": "PATHS.ASSETS",
    "themes": "PATHS.THEMES",
    "templates": "PATHS.TEMPLATES",
    "targets": "PATHS.TARGETS",
    "count": "SCENE.COUNT",
    "split": "SCENE.SPLIT",
    "views": "RENDER.VIEWS",
    "n_rays": "RENDER.N_RAYS",
    "supervision": "QA.SUPERVISION_LEVEL",
    "mode": "ENDPOINT.MODE",
    "trials": "EVAL.TRIALS",
}


class UsageError(ValueError):
    pass


def resolve_config(args):
    cfg = default_cfg.clone()
    if args.config_file:
        if not os.path.isfile(args.config_file):
            raise UsageError("config file not found: {}".format(args.config_file))
        cfg.merge_from_file(args.config_file)
    flags = []
    for dest, key in FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            flags.extend([key, value])
    cfg.merge_from_list(flags)
    if len(args.opts) % 2:
        raise UsageError("config overrides must be KEY VALUE pairs, got {}".format(args.opts))
    cfg.merge_from_list(args.opts)
    cfg.freeze()
    return cfg


def setup_run(args, output_dir):
    """Resolved config plus logger; writes the config snapshot into ``output_dir``."""
    cfg = resolve_config(args)
    output_dir = output_dir or cfg.OUTPUT_DIR
    mkdir(output_dir)
    stem = args.command_name.replace(" ", "_")
    logger = setup_logger("mvqa_core", output_dir, filename=stem + ".log.txt")
    logger.info("Command: {}".format(args.command_name))
    logger.info(args)
    logger.debug("Collecting env info\n" + collect_env_info())
    logger.info("Running with config:\n{}".format(cfg))
    save_config(cfg, os.path.join(output_dir, stem + ".config.yaml"))
    return cfg, logger


def _require_file(path, what):
    if not path or not os.path.isfile(path):
        raise UsageError("{} not found: {}".format(what, path))
    return path


def _require_dir(path, what):
    if not path or not os.path.isdir(path):
        raise UsageError("{} not found: {}".format(what, path))
    return path


def _paths(cfg):
    return DemoCatalog.resolve(cfg, cfg.PATHS.SPLIT)


def _parent(path):
    return os.path.dirname(os.path.abspath(path))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_assets_validate(args):
    cfg, logger = setup_run(args, args.out)
    manifest = _require_file(args.manifest or _paths(cfg)["assets"], "asset manifest")
    lib = load_asset_library(manifest)
    violations = verify_tag_library(lib)
    for v in violations:
        logger.info(str(v))
    errors = [v for v in violations if v.severity == "error"]
    if args.out:
        write_json(os.path.join(args.out, "tag_violations.json"), [
            {"kind": v.kind, "subject": v.subject, "detail": v.detail, "severity": v.severity}
            for v in violations])
    logger.info("{} violations ({} errors) in {}".format(len(violations), len(errors), manifest))
    return EXIT_VALIDATION if errors else EXIT_OK


def cmd_assets_tag(args):
    cfg, logger = setup_run(args, args.out)
    lib = load_asset_library(_require_file(args.manifest, "asset manifest"))
    if not args.endpoint and not args.mock:
        raise UsageError("assets tag needs --endpoint or --mock")
    endpoint = build_endpoint(cfg, args.endpoint, _require_file(args.mock, "mock fixture")
                              if args.mock else None)
    provider = build_provider(endpoint)
    census = lib.census()
    categories = args.category or [c for c, n in census.items() if n > 0]
    drafts, repaired, notes = [], [], {}
    for category in categories:
        if category not in census:
            raise UsageError("unknown category '{}'".format(category))
        try:
            draft = osd_tag_category(lib, category, provider, endpoint, seed=cfg.SEED)
        except OsdTagStageError as e:
            write_json(os.path.join(args.out, "{}_transcript.json".format(category)), {
                "category": e.category, "stage": e.stage, "error": str(e),
                "transcript": e.transcript})
            raise
        write_json(os.path.join(args.out, "{}_transcript.json".format(category)),
                   {"category": category, "transcript": draft.transcript})
        fixed, fixed_notes = auto_repair(draft)
        for note in fixed_notes:
            logger.info("{}: {}".format(category, note))
        drafts.append(draft)
        repaired.append(fixed)
        notes[category] = fixed_notes

    write_json(os.path.join(args.out, "drafts.json"), [d.to_dict() for d in drafts])
    write_json(os.path.join(args.out, "repaired.json"),
               [dict(d.to_dict(), repair_notes=notes[d.category]) for d in repaired])
    tagged = apply_drafts(lib, repaired)
    write_asset_manifest(tagged, os.path.join(args.out, "manifest.json"))
    violations = verify_tag_library(tagged)
    for v in violations:
        logger.info(str(v))
    return EXIT_VALIDATION if any(v.severity == "error" for v in violations) else EXIT_OK


def cmd_scene_gen(args):
    cfg, logger = setup_run(args, args.out)
    paths = _paths(cfg)
    lib = load_asset_library(_require_file(paths["assets"], "asset manifest"))
    themes = load_themes(_require_dir(paths["themes"], "themes directory"))
    params = build_scene_params(cfg, build_relation_params(cfg))
    run_scene_gen(themes, lib, cfg.SCENE.COUNT, cfg.SEED, args.out, params, cfg.JOBS,
                  show_progress=args.progress, split=cfg.SCENE.SPLIT)
    return EXIT_OK


def cmd_render(args):
    cfg, logger = setup_run(args, args.out)
    scenes = load_scenes(_require_dir(args.scenes, "scenes directory"))
    r = cfg.RENDER
    run_render(scenes, r.VIEWS, args.out, cfg.SEED, r.N_RAYS, tuple(r.IMAGE_SIZE),
               build_relation_params(cfg), r.WRITE_INSTANCE_MAPS, r.WRITE_DEPTH_MAPS,
               r.WRITE_RELATIONS, jobs=cfg.JOBS, show_progress=args.progress)
    return EXIT_OK


def cmd_qa_gen(args):
    cfg, logger = setup_run(args, _parent(args.out))
    paths = _paths(cfg)
    params = build_qa_params(cfg)
    bundles = load_bundles(_require_dir(args.scenes, "render directory"), params.relations,
                           image_root=_parent(args.out))
    if args.disjoint_from:
        check_disjoint_renders(
            bundles, [_require_dir(d, "render directory") for d in args.disjoint_from])
    templates = load_templates(_require_dir(paths["templates"], "templates directory"))
    targets = load_targets(_require_file(paths["targets"], "targets file"))
    result = run_qa_gen(bundles, templates, targets, cfg.SEED, args.out, params,
                        verify=cfg.QA.VERIFY, show_progress=args.progress)
    logger.info("Shortfall report:\n" + result.shortfall_text())
    return EXIT_OK if result.complete else EXIT_VALIDATION


def cmd_qa_verify(args):
    cfg, logger = setup_run(args, args.out)
    dataset = QADataset.load(_require_file(args.data, "dataset"))
    params = build_relation_params(cfg)
    bundles = load_bundles(_require_dir(args.scenes, "render directory"), params)
    failures = verify_dataset(dataset, bundles, params)
    for qid, problems in sorted(failures.items()):
        print("{}: {}".format(qid, "; ".join(problems)))
    return EXIT_VALIDATION if failures else EXIT_OK


def cmd_bench_run(args):
    cfg, logger = setup_run(args, _parent(args.out))
    dataset = QADataset.load(_require_file(args.data, "dataset"))
    if not args.endpoint and not args.mock:
        raise UsageError("bench run needs --endpoint or --mock")
    endpoint = build_endpoint(cfg, args.endpoint, _require_file(args.mock, "mock fixture")
                              if args.mock else None)
    transcript = os.path.splitext(args.out)[0] + "_transcript.jsonl"
    result = run_benchmark(dataset, endpoint, cfg.ENDPOINT.MODE, cfg.SEED, image_root=dataset.root,
                           transcript_path=transcript, show_progress=args.progress)
    write_jsonl(args.out, result.predictions)
    logger.info("Wrote {} predictions to {}".format(len(result.predictions), args.out))
    return EXIT_OK


def parse_curves(values, cfg):
    """``axis`` or ``axis=e0,e1,...`` items -> (axes, bins)."""
    bins = {"reasoning": list(cfg.EVAL.REASONING_BINS), "visibility": list(cfg.EVAL.VISIBILITY_BINS)}
    axes = []
    for item in values or ():
        axis, _, edges = item.partition("=")
        if axis not in AXES:
            raise UsageError("--curves axis must be one of {}, got '{}'".format(AXES, axis))
        if edges:
            try:
                bins[axis] = [float(e) for e in edges.split(",")]
            except ValueError:
                raise UsageError("bad bin edges '{}'".format(edges))
        axes.append(axis)
    return axes, bins


def cmd_eval_score(args):
    cfg, logger = setup_run(args, _parent(args.out))
    dataset = QADataset.load(_require_file(args.data, "dataset"))
    predictions = read_jsonl(_require_file(args.predictions, "predictions"))
    axes, bins = parse_curves(args.curves, cfg)
    evaluate(dataset, predictions, output_folder=_parent(args.out), curves=axes, bins=bins,
             name=os.path.basename(args.predictions),
             report_name=os.path.splitext(os.path.basename(args.out))[0])
    return EXIT_OK


def cmd_eval_baseline(args):
    cfg, logger = setup_run(args, args.out)
    dataset = QADataset.load(_require_file(args.data, "dataset"))
    report = run_baseline(dataset, args.kind, cfg.SEED, cfg.EVAL.TRIALS)
    logger.info(report.result_str())
    if args.out:
        write_json(os.path.join(args.out, "baseline_{}.json".format(args.kind)), report.to_dict())
    return EXIT_OK


def cmd_stats(args):
    cfg, logger = setup_run(args, _parent(args.out))
    dataset = QADataset.load(_require_file(args.data, "dataset"))
    stats = dataset_stats(dataset)
    write_json(args.out, stats)
    logger.info("Question counts: {}".format(stats["counts"]))
    for k, dev in stats["mcq_position_deviation"].items():
        logger.info("{}-option MCQ: largest deviation from uniform {:.2f} points".format(k, dev))
    return EXIT_OK


def cmd_demo(args):
    """Every stage on the bundled demo data into one directory."""
    cfg, logger = setup_run(args, args.out)
    out = args.out
    paths = _paths(cfg)
    relations = build_relation_params(cfg)

    lib = load_asset_library(paths["assets"])
    themes = load_themes(paths["themes"])
    scene_dir = os.path.join(out, "scenes")
    run_scene_gen(themes, lib, cfg.SCENE.COUNT, cfg.SEED, scene_dir,
                  build_scene_params(cfg, relations), cfg.JOBS, show_progress=args.progress)

    render_dir = os.path.join(out, "render")
    r = cfg.RENDER
    run_render(load_scenes(scene_dir), r.VIEWS, render_dir, cfg.SEED, r.N_RAYS, tuple(r.IMAGE_SIZE),
               relations, r.WRITE_INSTANCE_MAPS, r.WRITE_DEPTH_MAPS, r.WRITE_RELATIONS,
               jobs=cfg.JOBS, show_progress=args.progress)

    # questions are built from the files on disk, as a staged run would
    data_path = os.path.join(out, "data.jsonl")
    bundles = load_bundles(render_dir, relations, image_root=out)
    result = run_qa_gen(bundles, load_templates(paths["templates"]), load_targets(paths["targets"]),
                        cfg.SEED, data_path, build_qa_params(cfg), verify=cfg.QA.VERIFY,
                        show_progress=args.progress)
    logger.info("Shortfall report:\n" + result.shortfall_text())

    dataset = QADataset.load(data_path)
    failures = verify_dataset(dataset, bundles, relations)
    endpoint = build_endpoint(cfg, "mock-echo")
    bench = run_benchmark(dataset, endpoint, cfg.ENDPOINT.MODE, cfg.SEED, image_root=dataset.root,
                          transcript_path=os.path.join(out, "preds_transcript.jsonl"))
    write_jsonl(os.path.join(out, "preds.jsonl"), bench.predictions)
    axes, bins = parse_curves(AXES, cfg)
    evaluate(dataset, bench.predictions, output_folder=out, curves=axes, bins=bins,
             name="mock-echo")
    for kind in ("chance", "frequency"):
        report = run_baseline(dataset, kind, cfg.SEED, cfg.EVAL.TRIALS)
        logger.info(report.result_str())
        write_json(os.path.join(out, "baseline_{}.json".format(kind)), report.to_dict())
    write_json(os.path.join(out, "stats.json"), dataset_stats(dataset))
    if failures or not result.complete:
        return EXIT_VALIDATION
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _common(parser):
    parser.add_argument(
        "--config-file",
        default="",
        metavar="FILE",
        help="path to config file",
        type=str,
    )
    parser.add_argument("--seed", type=int, default=None, help="global seed (SEED)")
    parser.add_argument("--jobs", type=int, default=None, help="worker threads (JOBS)")
    parser.add_argument("--progress", action="store_true", help="show progress bars")


def _endpoint_flags(parser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--endpoint", default=None, help="endpoint name from the catalog")
    group.add_argument("--mock", default=None, metavar="FIXTURE", help="mock provider fixture")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mvqa", description="Multi-view spatial reasoning data engine")
    commands = parser.add_subparsers(dest="group", metavar="COMMAND")
    commands.required = True

    def add(group, name, handler, help_text):
        sub = group.add_parser(name, help=help_text)
        _common(sub)
        sub.set_defaults(handler=handler)
        return sub

    assets = commands.add_parser("assets", help="asset library").add_subparsers(dest="action")
    assets.required = True
    p = add(assets, "validate", cmd_assets_validate, "check the tag library")
    p.add_argument("manifest", nargs="?", default=None)
    p.add_argument("--out", default=None, help="directory for the violation report")
    p = add(assets, "tag", cmd_assets_tag, "draft tags with a vision-language model")
    p.add_argument("manifest")
    _endpoint_flags(p)
    p.add_argument("--category", action="append", default=None)
    p.add_argument("--out", required=True)

    scene = commands.add_parser("scene", help="scene synthesis").add_subparsers(dest="action")
    scene.required = True
    p = add(scene, "gen", cmd_scene_gen, "sample scenes from themes")
    p.add_argument("--themes", default=None)
    p.add_argument("--assets", default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--split", default=None,
                   help="split tag; non-eval splits get their own scene ids and seeds")
    p.add_argument("--out", required=True)

    p = add(commands, "render", cmd_render, "views, metadata and instance maps")
    p.add_argument("--scenes", required=True)
    p.add_argument("--views", default=None)
    p.add_argument("--n-rays", dest="n_rays", type=int, default=None)
    p.add_argument("--out", required=True)

    qa = commands.add_parser("qa", help="question generation").add_subparsers(dest="action")
    qa.required = True
    p = add(qa, "gen", cmd_qa_gen, "generate a question dataset")
    p.add_argument("--scenes", required=True, help="render output directory")
    p.add_argument("--templates", default=None)
    p.add_argument("--targets", default=None)
    p.add_argument("--supervision", type=int, default=None, choices=(0, 1, 2, 3, 4))
    p.add_argument("--disjoint-from", dest="disjoint_from", action="append", default=None,
                   metavar="RENDER_DIR", help="fail when a scene also occurs in this render output")
    p.add_argument("--out", required=True)
    p = add(qa, "verify", cmd_qa_verify, "re-derive every answer")
    p.add_argument("data")
    p.add_argument("--scenes", required=True, help="render output directory")
    p.add_argument("--out", default=None)

    bench = commands.add_parser("bench", help="model benchmark").add_subparsers(dest="action")
    bench.required = True
    p = add(bench, "run", cmd_bench_run, "ask an endpoint every question")
    p.add_argument("data")
    _endpoint_flags(p)
    p.add_argument("--mode", choices=("thinking", "direct"), default=None)
    p.add_argument("--out", required=True)

    ev = commands.add_parser("eval", help="evaluation").add_subparsers(dest="action")
    ev.required = True
    p = add(ev, "score", cmd_eval_score, "score predictions")
    p.add_argument("data")
    p.add_argument("predictions")
    p.add_argument("--curves", action="append", default=None, metavar="AXIS[=EDGES]")
    p.add_argument("--out", required=True)
    p = add(ev, "baseline", cmd_eval_baseline, "chance and frequency baselines")
    p.add_argument("data")
    p.add_argument("--kind", choices=("chance", "frequency"), required=True)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--out", default=None)

    p = add(commands, "stats", cmd_stats, "dataset statistics")
    p.add_argument("data")
    p.add_argument("--out", required=True)

    p = add(commands, "demo", cmd_demo, "run every stage on the bundled demo")
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--out", required=True)
    return parser


def main(argv=None):
    parser = build_parser()
    args, rest = parser.parse_known_args(argv)
    unknown = [a for a in rest if a.startswith("--")]
    if unknown:
        parser.error("unrecognized arguments: {}".format(" ".join(unknown)))
    args.opts = rest
    args.command_name = " ".join(filter(None, [args.group, getattr(args, "action", None)]))

    logger = logging.getLogger("mvqa_core")
    try:
        return args.handler(args)
    except EndpointError as e:
        logger.error("endpoint failure: {}".format(e))
        return EXIT_EXTERNAL
    except OsdTagStageError as e:
        logger.error("tagging stopped: {} (transcript saved)".format(e))
        return EXIT_EXTERNAL
    except (ConstraintUnsatisfiable, SplitOverlapError) as e:
        logger.error(str(e))
        return EXIT_VALIDATION
    except (OSError, ValueError, KeyError, AssertionError) as e:
        # missing files, schema mismatches and bad config keys
        logger.error("{}: {}".format(type(e).__name__, e))
        print("mvqa {}: error: {}".format(args.command_name, e), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
