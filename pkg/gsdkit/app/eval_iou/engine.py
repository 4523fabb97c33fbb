"""
Evaluate prediction masks against a manifest and keep the cross-domain
report folder up to date.
"""

import re
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from time import perf_counter
from typing import Iterable, List, Optional, Sequence

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import seaborn as sns  # noqa: E402

from gsdkit.core.constant import Split
from gsdkit.core.engine import BaseEngine, MainEngine
from gsdkit.core.exception import ConfigError, EmptyEvaluation, GeometryError, IoError, PredictionMissing
from gsdkit.core.object import DatasetManifest, LabelMask, ManifestEntry
from gsdkit.core.utility import PathLike, quantize, read_json, read_mask, write_json
from gsdkit.event import EventEngine
from .base import (
    APP_NAME,
    CLASSES,
    ConfusionAccumulator,
    CrossMatrix,
    EvalPair,
    IoUReport,
    build_matrix,
    format_iou,
)

ALL_SPLITS = "all"
CSV_FILENAME = "report.csv"
MARKDOWN_FILENAME = "report.md"
HEATMAP_FILENAME = "report_trees.png"
SUMMARY_FILES = (CSV_FILENAME, MARKDOWN_FILENAME)
# Source names end up in report file names <source>__<target>.json.
SOURCE_PATTERN = re.compile(r"[A-Za-z0-9][A-Za-z0-9._-]*")

sns.set_style("white")


class EvalEngine(BaseEngine):
    """"""

    def __init__(self, main_engine: MainEngine, event_engine: EventEngine):
        """"""
        super().__init__(main_engine, event_engine, APP_NAME)

    def accumulate(
        self,
        acc: ConfusionAccumulator,
        pred: LabelMask,
        gt: LabelMask,
    ) -> ConfusionAccumulator:
        """
        Add one mask pair to acc (in place) and return it.
        """
        acc.add(pred.classes, gt.classes)
        return acc

    def finalize(
        self,
        acc: ConfusionAccumulator,
        eval_pair: EvalPair = EvalPair("", ""),
        images: int = 0,
        split: str = "",
    ) -> IoUReport:
        """
        Percentages from the summed counts. A class whose union is empty
        over the whole set is undefined and left out of the average.
        """
        if acc.pixels == 0:
            raise EmptyEvaluation(f"no pixels accumulated for {eval_pair}")

        exact = acc.exact_iou()
        defined = [value for value in exact if value is not None]
        macro = quantize(sum(defined, Fraction(0)) / len(defined)) if defined else None
        union = acc.union().tolist()

        return IoUReport(
            eval_pair=eval_pair,
            per_class_iou={
                cls: None if value is None else quantize(value) for cls, value in zip(CLASSES, exact)
            },
            macro_average=macro,
            intersection={cls: int(n) for cls, n in zip(CLASSES, acc.intersection.tolist())},
            union={cls: int(n) for cls, n in zip(CLASSES, union)},
            pixels=acc.pixels,
            images=images,
            split=split,
        )

    def cross_matrix(self, reports: Iterable[IoUReport]) -> CrossMatrix:
        """"""
        return build_matrix(reports)

    def check_source(self, source_name: str) -> None:
        """
        Any model name is accepted as source as long as it is usable in a
        report file name: no separators and no double underscore.
        """
        if not isinstance(source_name, str) or not SOURCE_PATTERN.fullmatch(source_name) or "__" in source_name:
            raise ConfigError(f"invalid source name {source_name!r}")

    def select_entries(self, manifest: DatasetManifest, split: Optional[str]) -> List[ManifestEntry]:
        """"""
        if split in (None, ALL_SPLITS):
            return list(manifest.entries)
        return list(manifest.select(Split(split)))

    def evaluate(
        self,
        pred_dir: PathLike,
        manifest: DatasetManifest,
        source_name: str,
        split: Optional[str] = Split.TEST.value,
        workers: int = 1,
    ) -> IoUReport:
        """
        Compare <pred_dir>/<id>.png with the ground-truth mask of every
        selected entry of the target manifest.
        """
        self.check_source(source_name)
        start = perf_counter()
        pred_dir = Path(pred_dir)
        if not pred_dir.is_dir():
            raise IoError("prediction folder not found", path=str(pred_dir))

        entries = self.select_entries(manifest, split)
        if not entries:
            raise EmptyEvaluation(f"{manifest.name} has no entries in split {split}")

        # Fail before reading any mask when a prediction is absent.
        for entry in entries:
            if not pred_dir.joinpath(f"{entry.id}.png").exists():
                raise PredictionMissing("no prediction for entry", id=entry.id, path=str(pred_dir))

        def count(chunk: Sequence[ManifestEntry]) -> ConfusionAccumulator:
            acc = ConfusionAccumulator()
            for entry in chunk:
                pred = read_mask(pred_dir.joinpath(f"{entry.id}.png"))
                gt = read_mask(entry.mask_path)
                if pred.size != gt.size:
                    raise GeometryError(
                        f"prediction {pred.width}x{pred.height} does not match mask {gt.width}x{gt.height}",
                        id=entry.id,
                    )
                self.accumulate(acc, pred, gt)
            return acc

        chunks = [entries[i::workers] for i in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as executor:
            partials = list(executor.map(count, chunks))

        total = ConfusionAccumulator()
        for partial in partials:
            total = total + partial

        eval_pair = EvalPair(source_name, manifest.name)
        report = self.finalize(total, eval_pair, images=len(entries), split=split or ALL_SPLITS)

        summary = ", ".join(
            f"{cls.display_name} {format_iou(report.per_class_iou[cls]) or 'n/a'}" for cls in CLASSES
        )
        self.write_log(f"{eval_pair}: {summary}, Average {format_iou(report.macro_average) or 'n/a'}")
        self.put_stage("eval", start, source=source_name, target=manifest.name, images=len(entries))
        return report

    def save_report(self, report: IoUReport, report_dir: PathLike) -> Path:
        """"""
        filepath = Path(report_dir).joinpath(report.eval_pair.filename)
        write_json(filepath, report.to_dict())
        return filepath

    def load_reports(self, report_dir: PathLike) -> List[IoUReport]:
        """
        Every saved evaluation of a report folder, in file name order.
        """
        report_dir = Path(report_dir)
        if not report_dir.is_dir():
            return []
        return [
            IoUReport.from_dict(read_json(filepath))
            for filepath in sorted(report_dir.glob("*__*.json"))
        ]

    def write_reports(self, report_dir: PathLike, heatmap: bool = False) -> List[Path]:
        """
        Rebuild report.csv, report.md (and the heatmap) from all saved
        evaluations.
        """
        report_dir = Path(report_dir)
        matrix = self.cross_matrix(self.load_reports(report_dir))

        csv_path = report_dir.joinpath(CSV_FILENAME)
        md_path = report_dir.joinpath(MARKDOWN_FILENAME)
        report_dir.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(matrix.to_csv(), encoding="utf-8")
        md_path.write_text(matrix.to_markdown(), encoding="utf-8")
        written = [csv_path, md_path]

        if heatmap and len(matrix):
            written.append(self.render_heatmap(matrix, report_dir.joinpath(HEATMAP_FILENAME)))
        return written

    def render_heatmap(self, matrix: CrossMatrix, filepath: PathLike, key: str = "trees") -> Path:
        """
        Source x target grid of one IoU column.
        """
        grid = matrix.grid(key)
        size = (1.2 * len(grid.columns) + 2, 1.0 * len(grid.index) + 1.5)

        fig, ax = plt.subplots(figsize=size)
        sns.heatmap(
            grid,
            annot=True,
            fmt=".2f",
            vmin=0,
            vmax=100,
            cmap="viridis",
            cbar_kws={"label": f"{key} IoU (%)"},
            ax=ax,
        )
        ax.set_xlabel("target")
        ax.set_ylabel("source")
        fig.tight_layout()

        filepath = Path(filepath)
        fig.savefig(filepath, dpi=100)
        plt.close(fig)
        return filepath
