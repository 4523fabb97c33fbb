"""
Command line entry point.

    gsdkit ingest    --images DIR --masks DIR --gsd 20
    gsdkit harmonize out/P50/manifest.json [--enhancer spec.json]
    gsdkit pairs     out/P20/manifest.json --resolutions 32 64 96 128 192
    gsdkit enhance   out/P20/manifest.json --enhancer spec.json
    gsdkit eval      --pred-dir preds --target out/P20/manifest.json --source P20
    gsdkit scenario  scenario.json
    gsdkit table     out/P20/manifest.json out/P50to20/manifest.json

Every command prints one json summary line on stdout. Domain errors are
printed as one json line on stderr with exit code 1.
"""

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from gsdkit import __version__
from gsdkit.app.dataset import APP_NAME as DATASET_APP_NAME
from gsdkit.app.dataset import DatasetApp, load_manifest, save_manifest
from gsdkit.app.dataset.base import MANIFEST_FILENAME
from gsdkit.app.dataset.engine import table_to_markdown
from gsdkit.app.enhance_bridge import APP_NAME as BRIDGE_APP_NAME
from gsdkit.app.enhance_bridge import EnhanceBridgeApp, EnhancerSpec, load_enhancer_spec
from gsdkit.app.eval_iou import APP_NAME as EVAL_APP_NAME
from gsdkit.app.eval_iou import EvalIoUApp
from gsdkit.app.eval_iou.base import format_iou
from gsdkit.app.harmonize import APP_NAME as HARMONIZE_APP_NAME
from gsdkit.app.harmonize import HarmonizeApp
from gsdkit.app.lowres_sim import APP_NAME as SCENARIO_APP_NAME
from gsdkit.app.lowres_sim import LowResSimApp, load_scenario
from gsdkit.app.pairgen import APP_NAME as PAIR_APP_NAME
from gsdkit.app.pairgen import PairGenApp
from gsdkit.app.pairgen.base import parse_resolutions
from gsdkit.core.constant import SPLIT_ORDER
from gsdkit.core.engine import MainEngine
from gsdkit.core.exception import ConfigError, GeometryError, GsdError
from gsdkit.core.object import DatasetManifest
from gsdkit.core.setting import SETTINGS, PipelineConfig
from gsdkit.core.utility import fraction_to_json, image_size, parse_fraction

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
TABLE_FILENAME = "datasets.md"


def create_main_engine(config: PipelineConfig) -> MainEngine:
    """"""
    SETTINGS["log.level"] = config.log_level

    main_engine = MainEngine()
    main_engine.add_app(DatasetApp)
    main_engine.add_app(HarmonizeApp)
    main_engine.add_app(PairGenApp)
    main_engine.add_app(EnhanceBridgeApp)
    main_engine.add_app(EvalIoUApp)
    main_engine.add_app(LowResSimApp)
    return main_engine


def manifest_summary(manifest: DatasetManifest, filepath: Optional[Path] = None) -> dict:
    """"""
    counts = manifest.split_counts()
    data = {
        "dataset": manifest.name,
        "gsd_cm": fraction_to_json(manifest.gsd_cm),
        "entries": len(manifest),
    }
    data.update({split.value: counts[split] for split in SPLIT_ORDER})
    failed = failed_ids(manifest)
    if failed:
        data["failed"] = failed
    if filepath:
        data["manifest"] = str(filepath)
    return data


def failed_ids(manifest: DatasetManifest) -> List[str]:
    """
    Entries an enhancer failed on (keep-going runs only).
    """
    failed = []
    for descriptor in manifest.lineage:
        failed.extend(descriptor.get("failed", []))
    return sorted(set(failed))


def write_output(manifest: DatasetManifest, config: PipelineConfig) -> Path:
    """"""
    return save_manifest(manifest, config.out_root.joinpath(manifest.name, MANIFEST_FILENAME))


def read_enhancer(path: str, args: argparse.Namespace) -> EnhancerSpec:
    """
    Enhancer spec file, with --timeout taking precedence over its own.
    """
    spec = load_enhancer_spec(path)
    if args.timeout is not None:
        spec = replace(spec, timeout=args.timeout)
    return spec


def parse_size(value: str) -> Tuple[int, int]:
    """
    "640" or "640x480".
    """
    parts = value.lower().split("x")
    try:
        sizes = [int(part) for part in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size {value!r}")
    if len(sizes) == 1:
        sizes = sizes * 2
    if len(sizes) != 2 or min(sizes) < 1:
        raise argparse.ArgumentTypeError(f"invalid size {value!r}")
    return sizes[0], sizes[1]


def cmd_ingest(main_engine: MainEngine, config: PipelineConfig, args: argparse.Namespace) -> dict:
    """"""
    engine = main_engine.get_engine(DATASET_APP_NAME)
    manifest = engine.build_manifest(args.images, args.masks, args.gsd, args.name)
    manifest = engine.assign_splits(manifest, config.seed)

    if args.dry_run:
        return manifest_summary(manifest)
    return manifest_summary(manifest, write_output(manifest, config))


def cmd_harmonize(main_engine: MainEngine, config: PipelineConfig, args: argparse.Namespace) -> dict:
    """"""
    engine = main_engine.get_engine(HARMONIZE_APP_NAME)
    manifest = load_manifest(args.manifest)
    enhancer = read_enhancer(args.enhancer, args) if args.enhancer else None

    if args.dry_run:
        _, counts = engine.plan(manifest, config.target_gsd_cm, config.patch, config.rows, config.cols)
        target_w, target_h = engine.target_dims(manifest, config.target_gsd_cm)
        return {"dry_run": True, "target": [target_w, target_h], **counts}

    result = engine.harmonize(
        manifest,
        config.target_gsd_cm,
        out_root=config.out_root,
        patch=config.patch,
        rows=config.rows,
        cols=config.cols,
        name=args.name,
        enhancer=enhancer,
        workers=config.workers,
        keep_going=config.keep_going,
        batch_size=config.batch_size,
    )
    return manifest_summary(result, write_output(result, config))


def cmd_pairs(main_engine: MainEngine, config: PipelineConfig, args: argparse.Namespace) -> dict:
    """"""
    engine = main_engine.get_engine(PAIR_APP_NAME)
    manifest = load_manifest(args.manifest)

    resolutions = config.resolutions
    if not resolutions:
        key = f"pairs.p{fraction_to_json(manifest.gsd_cm)}"
        if key not in SETTINGS:
            raise ConfigError(f"no --resolutions given and no {key} setting")
        resolutions = SETTINGS[key]
    spec = parse_resolutions(resolutions)

    if args.dry_run:
        return {"dry_run": True, **engine.plan_pairs(manifest, spec)}

    result = engine.generate_pairs(manifest, spec, config.out_root, args.name, config.workers)
    return manifest_summary(result, write_output(result, config))


def cmd_enhance(main_engine: MainEngine, config: PipelineConfig, args: argparse.Namespace) -> dict:
    """"""
    engine = main_engine.get_engine(BRIDGE_APP_NAME)
    manifest = load_manifest(args.manifest)
    enhancer = read_enhancer(args.enhancer, args)

    if not manifest.entries:
        raise GeometryError(f"{manifest.name} has no entries")
    target = args.target_size or image_size(manifest.entries[0].image_path)

    if args.dry_run:
        counts = {split.value: n for split, n in manifest.split_counts().items()}
        return {"dry_run": True, "target": list(target), "entries": len(manifest), **counts}

    result = engine.run_enhancer(
        manifest,
        enhancer,
        target,
        out_root=config.out_root,
        name=args.name,
        workers=config.workers,
        keep_going=config.keep_going,
        batch_size=config.batch_size,
    )
    return manifest_summary(result, write_output(result, config))


def cmd_eval(main_engine: MainEngine, config: PipelineConfig, args: argparse.Namespace) -> dict:
    """"""
    engine = main_engine.get_engine(EVAL_APP_NAME)
    manifest = load_manifest(args.target)
    report_dir = Path(args.report_dir) if args.report_dir else config.out_root.joinpath("reports")

    if args.dry_run:
        engine.check_source(args.source)
        entries = engine.select_entries(manifest, args.split)
        return {"dry_run": True, "source": args.source, "target": manifest.name, "images": len(entries)}

    report = engine.evaluate(args.pred_dir, manifest, args.source, args.split, config.workers)
    engine.save_report(report, report_dir)
    written = engine.write_reports(report_dir, heatmap=args.heatmap)

    data = report.to_dict()
    return {
        "source": report.eval_pair.source,
        "target": report.eval_pair.target,
        "images": report.images,
        "iou": data["iou"],
        "average": format_iou(report.macro_average),
        "reports": [str(path) for path in written],
    }


def cmd_scenario(main_engine: MainEngine, config: PipelineConfig, args: argparse.Namespace) -> dict:
    """"""
    engine = main_engine.get_engine(SCENARIO_APP_NAME)
    spec = load_scenario(args.scenario)
    if args.timeout is not None:
        spec.enhancers = [(replace(e, timeout=args.timeout), name) for e, name in spec.enhancers]

    out_root = config.out_root if args.out else None
    if args.dry_run:
        return {"dry_run": True, "datasets": engine.plan_scenario(spec)}

    results = engine.run_scenario(
        spec,
        out_root=out_root,
        workers=config.workers,
        keep_going=config.keep_going,
        batch_size=config.batch_size,
    )
    return {"datasets": [manifest_summary(manifest) for manifest in results]}


def cmd_table(main_engine: MainEngine, config: PipelineConfig, args: argparse.Namespace) -> dict:
    """
    Distribution table of several manifests, written as markdown.
    """
    engine = main_engine.get_engine(DATASET_APP_NAME)
    manifests = [load_manifest(path) for path in args.manifests]
    df = engine.dataset_table(manifests)

    data = {"datasets": json.loads(df.to_json(orient="records"))}
    if args.dry_run:
        return {"dry_run": True, **data}

    filepath = Path(args.output) if args.output else config.out_root.joinpath(TABLE_FILENAME)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    filepath.write_text(table_to_markdown(df), encoding="utf-8")
    return {**data, "table": str(filepath)}


COMMANDS: Dict[str, Callable] = {
    "ingest": cmd_ingest,
    "harmonize": cmd_harmonize,
    "pairs": cmd_pairs,
    "enhance": cmd_enhance,
    "eval": cmd_eval,
    "scenario": cmd_scenario,
    "table": cmd_table,
}


def build_parser() -> argparse.ArgumentParser:
    """"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dry-run", action="store_true", help="print planned counts, write nothing")
    common.add_argument("--seed", type=int, default=None, help="split seed")
    common.add_argument("--workers", type=int, default=None, help="parallel workers")
    common.add_argument("--config", default=None, help="json file overriding the settings")
    common.add_argument("--out", default=None, help="output root (default <workspace>/out)")
    common.add_argument("--log-level", choices=LOG_LEVELS, default=None)

    enhancing = argparse.ArgumentParser(add_help=False)
    enhancing.add_argument("--timeout", type=float, default=None, help="seconds per enhancer job")
    enhancing.add_argument("--keep-going", action="store_true", help="skip images an enhancer fails on")
    enhancing.add_argument("--batch-size", type=int, default=None, help="images per enhancer job")

    parser = argparse.ArgumentParser(prog="gsdkit", description="GSD harmonization toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    ingest = subparsers.add_parser("ingest", parents=[common], help="build a split manifest")
    ingest.add_argument("--images", required=True)
    ingest.add_argument("--masks", required=True)
    ingest.add_argument("--gsd", required=True, type=parse_fraction, help="ground sample distance in cm")
    ingest.add_argument("--name", default=None)

    harmonize = subparsers.add_parser(
        "harmonize", parents=[common, enhancing], help="resize or enhance to a target gsd, then tile"
    )
    harmonize.add_argument("manifest")
    harmonize.add_argument("--enhancer", default=None, help="enhancer spec json (default: lanczos)")
    harmonize.add_argument("--target-gsd", type=parse_fraction, default=None)
    harmonize.add_argument("--patch", type=int, default=None)
    harmonize.add_argument("--rows", type=int, default=None)
    harmonize.add_argument("--cols", type=int, default=None)
    harmonize.add_argument("--name", default=None)

    pairs = subparsers.add_parser("pairs", parents=[common], help="clean|degraded training pairs")
    pairs.add_argument("manifest")
    pairs.add_argument("--resolutions", type=int, nargs="+", default=None)
    pairs.add_argument("--name", default=None)

    enhance = subparsers.add_parser("enhance", parents=[common, enhancing], help="run an external enhancer")
    enhance.add_argument("manifest")
    enhance.add_argument("--enhancer", required=True)
    enhance.add_argument("--target-size", type=parse_size, default=None, help="WxH (default: input size)")
    enhance.add_argument("--name", default=None)

    evaluate = subparsers.add_parser("eval", parents=[common], help="pixel IoU of prediction masks")
    evaluate.add_argument("--pred-dir", required=True)
    evaluate.add_argument("--target", required=True, help="manifest evaluated on")
    evaluate.add_argument("--source", required=True, help="dataset the model was trained on")
    evaluate.add_argument("--split", default=SETTINGS["eval.split"], choices=["train", "val", "test", "all"])
    evaluate.add_argument("--report-dir", default=None)
    evaluate.add_argument("--heatmap", action="store_true", default=SETTINGS["eval.heatmap"])

    scenario = subparsers.add_parser(
        "scenario", parents=[common, enhancing], help="low-resolution scenario"
    )
    scenario.add_argument("scenario", help="scenario json")

    table = subparsers.add_parser("table", parents=[common], help="split distribution of datasets")
    table.add_argument("manifests", nargs="+")
    table.add_argument("--output", default=None, help="markdown file (default <out>/datasets.md)")

    return parser


def build_config(args: argparse.Namespace) -> PipelineConfig:
    """"""
    level = getattr(logging, args.log_level) if args.log_level else None
    resolutions = getattr(args, "resolutions", None)
    enhancer = getattr(args, "enhancer", None)

    config = PipelineConfig.from_settings(
        args.config,
        seed=args.seed,
        workers=args.workers,
        out_root=Path(args.out) if args.out else None,
        target_gsd_cm=getattr(args, "target_gsd", None),
        patch=getattr(args, "patch", None),
        rows=getattr(args, "rows", None),
        cols=getattr(args, "cols", None),
        resolutions=list(resolutions) if resolutions else None,
        enhancers=[Path(enhancer)] if enhancer else None,
        timeout=getattr(args, "timeout", None),
        batch_size=getattr(args, "batch_size", None),
        keep_going=getattr(args, "keep_going", None) or None,
        log_level=level,
    )
    return config.validate()


def main(argv: Optional[Sequence[str]] = None) -> int:
    """"""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = build_config(args)
        main_engine = create_main_engine(config)
        try:
            summary = COMMANDS[args.command](main_engine, config, args)
        finally:
            main_engine.close()
    except GsdError as e:
        print(json.dumps(e.to_dict()), file=sys.stderr)
        return 1

    summary = {"command": args.command, **summary}
    print(json.dumps(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
