"""
Pixel IoU bookkeeping: mergeable per-class counters, per-evaluation
reports and the source x target cross-domain matrix.

IoU of class c over a whole evaluation set is

    I / (P + G - I)

with I the pixels predicted c where the ground truth is c, P the pixels
predicted c and G the ground-truth pixels of c, all summed over every
image before dividing.
"""

from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from pandas import DataFrame

from gsdkit.core.constant import TreeClass
from gsdkit.core.exception import DuplicateEvaluation, GeometryError
from gsdkit.core.utility import quantize

APP_NAME = "EvalIoU"

CLASSES = tuple(TreeClass)
N_CLASS = len(CLASSES)
AVERAGE_KEY = "average"
CSV_COLUMNS = ["source", "target", "class", "iou"]


def class_key(cls: TreeClass) -> str:
    """"""
    return cls.name.lower()


@dataclass
class ConfusionAccumulator:
    """
    Per-class intersection, predicted and ground-truth pixel counts.
    """

    intersection: np.ndarray = field(default_factory=lambda: np.zeros(N_CLASS, dtype=np.int64))
    pred_count: np.ndarray = field(default_factory=lambda: np.zeros(N_CLASS, dtype=np.int64))
    gt_count: np.ndarray = field(default_factory=lambda: np.zeros(N_CLASS, dtype=np.int64))

    @property
    def pixels(self) -> int:
        return int(self.gt_count.sum())

    def add(self, pred: np.ndarray, gt: np.ndarray):
        """
        Count one prediction/ground-truth pair of class grids.
        """
        if pred.shape != gt.shape:
            raise GeometryError(f"prediction {pred.shape} and ground truth {gt.shape} differ in size")

        pred = pred.astype(np.int64).ravel()
        gt = gt.astype(np.int64).ravel()
        confusion = np.bincount(N_CLASS * gt + pred, minlength=N_CLASS ** 2).reshape(N_CLASS, N_CLASS)

        self.intersection += np.diag(confusion)
        self.pred_count += confusion.sum(axis=0)
        self.gt_count += confusion.sum(axis=1)

    def merge(self, other: "ConfusionAccumulator") -> "ConfusionAccumulator":
        """"""
        return ConfusionAccumulator(
            intersection=self.intersection + other.intersection,
            pred_count=self.pred_count + other.pred_count,
            gt_count=self.gt_count + other.gt_count,
        )

    def __add__(self, other: "ConfusionAccumulator") -> "ConfusionAccumulator":
        return self.merge(other)

    def union(self) -> np.ndarray:
        """"""
        return self.pred_count + self.gt_count - self.intersection

    def exact_iou(self) -> List[Optional[Fraction]]:
        """
        IoU per class as an exact percentage, None when the union is empty.
        """
        values = []
        for i, u in zip(self.intersection.tolist(), self.union().tolist()):
            values.append(Fraction(100 * i, u) if u else None)
        return values


@dataclass(frozen=True)
class EvalPair:
    """
    Model trained on source, evaluated on target.
    """

    source: str
    target: str

    def __str__(self) -> str:
        return f"{self.source} -> {self.target}"

    @property
    def supervised(self) -> bool:
        return self.source == self.target

    @property
    def filename(self) -> str:
        return f"{self.source}__{self.target}.json"


@dataclass
class IoUReport:
    """"""

    eval_pair: EvalPair
    per_class_iou: Dict[TreeClass, Optional[Decimal]]
    macro_average: Optional[Decimal]
    intersection: Dict[TreeClass, int]
    union: Dict[TreeClass, int]
    pixels: int
    images: int = 0
    split: str = ""

    def iou(self, key: str) -> Optional[Decimal]:
        """
        Value of a class key or "average".
        """
        if key == AVERAGE_KEY:
            return self.macro_average
        return self.per_class_iou[TreeClass[key.upper()]]

    def to_dict(self) -> dict:
        """"""
        return {
            "source": self.eval_pair.source,
            "target": self.eval_pair.target,
            "split": self.split,
            "images": self.images,
            "pixels": self.pixels,
            "iou": {
                class_key(cls): format_iou(value) for cls, value in self.per_class_iou.items()
            },
            AVERAGE_KEY: format_iou(self.macro_average),
            "intersection": {class_key(cls): n for cls, n in self.intersection.items()},
            "union": {class_key(cls): n for cls, n in self.union.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IoUReport":
        """"""
        def parse(value):
            return None if value is None else Decimal(value)

        return cls(
            eval_pair=EvalPair(data["source"], data["target"]),
            per_class_iou={c: parse(data["iou"][class_key(c)]) for c in CLASSES},
            macro_average=parse(data[AVERAGE_KEY]),
            intersection={c: int(data["intersection"][class_key(c)]) for c in CLASSES},
            union={c: int(data["union"][class_key(c)]) for c in CLASSES},
            pixels=int(data["pixels"]),
            images=int(data.get("images", 0)),
            split=data.get("split", ""),
        )


def format_iou(value: Optional[Decimal]) -> Optional[str]:
    """"""
    return None if value is None else f"{value:.2f}"


def relative_change(before, after) -> Decimal:
    """
    Percent change from before to after; a drop is negative.
    77.44 -> 57.43 gives -25.84.
    """
    before, after = Fraction(str(before)), Fraction(str(after))
    if not before:
        raise ValueError("relative change from zero is undefined")
    return quantize((after - before) / before * 100)


def gap_closure(baseline, improved, reference) -> Decimal:
    """
    Share of the baseline -> reference gap recovered by improved, in
    percent. 57.43 -> 68.05 against 77.44 closes 53.07.
    """
    baseline, improved, reference = (Fraction(str(v)) for v in (baseline, improved, reference))
    if reference == baseline:
        raise ValueError("reference equals baseline, there is no gap")
    return quantize((improved - baseline) / (reference - baseline) * 100)


class CrossMatrix:
    """
    IoU reports keyed by (source, target).
    """

    def __init__(self):
        """"""
        self.reports: Dict[Tuple[str, str], IoUReport] = {}

    def add(self, report: IoUReport):
        """"""
        key = (report.eval_pair.source, report.eval_pair.target)
        if key in self.reports:
            raise DuplicateEvaluation(f"{report.eval_pair} evaluated twice")
        self.reports[key] = report

    def __len__(self) -> int:
        return len(self.reports)

    def __contains__(self, key: Tuple[str, str]) -> bool:
        return key in self.reports

    def get(self, source: str, target: str) -> Optional[IoUReport]:
        """"""
        return self.reports.get((source, target), None)

    @property
    def sources(self) -> List[str]:
        return sorted({source for source, _ in self.reports})

    @property
    def targets(self) -> List[str]:
        return sorted({target for _, target in self.reports})

    def ordered_keys(self) -> List[Tuple[str, str]]:
        """
        Supervised (diagonal) results first, then transfer results.
        """
        keys = sorted(self.reports)
        return [k for k in keys if k[0] == k[1]] + [k for k in keys if k[0] != k[1]]

    def to_dataframe(self) -> DataFrame:
        """
        Long format: one row per (source, target, class) incl. the average.
        """
        rows = []
        for source, target in self.ordered_keys():
            report = self.reports[(source, target)]
            for cls in CLASSES:
                rows.append([source, target, class_key(cls), format_iou(report.per_class_iou[cls])])
            rows.append([source, target, AVERAGE_KEY, format_iou(report.macro_average)])
        return DataFrame(rows, columns=CSV_COLUMNS)

    def to_csv(self) -> str:
        """
        Undefined IoU values are left empty.
        """
        return self.to_dataframe().to_csv(index=False)

    def grid(self, key: str) -> DataFrame:
        """
        source x target table of one class key (float, NaN when missing).
        """
        df = DataFrame(index=self.sources, columns=self.targets, dtype=float)
        for (source, target), report in self.reports.items():
            value = report.iou(key)
            if value is not None:
                df.loc[source, target] = float(value)
        return df

    def to_markdown(self) -> str:
        """
        Table laid out as Background | Trees | Average per evaluation,
        followed by the transfer section.
        """
        header = ["Evaluation"] + [cls.display_name for cls in CLASSES] + ["Average"]
        lines = [
            "| " + " | ".join(header) + " |",
            "|" + "|".join(["---"] + ["---:"] * (len(header) - 1)) + "|",
        ]
        for key in self.ordered_keys():
            report = self.reports[key]
            values = [report.per_class_iou[cls] for cls in CLASSES] + [report.macro_average]
            cells = [format_iou(v) or "n/a" for v in values]
            lines.append(f"| {report.eval_pair} | " + " | ".join(cells) + " |")

        transfer = self.transfer_lines()
        if transfer:
            lines += ["", "## Transfer", ""] + transfer
        return "\n".join(lines) + "\n"

    def transfer_lines(self) -> List[str]:
        """
        Trees IoU change of every S -> T against the supervised T -> T.
        """
        trees = TreeClass.TREES
        lines = []
        for source, target in self.ordered_keys():
            if source == target:
                continue
            supervised = self.get(target, target)
            if supervised is None:
                continue

            reference = supervised.per_class_iou[trees]
            value = self.reports[(source, target)].per_class_iou[trees]
            if reference is None or value is None or not reference:
                continue

            change = relative_change(reference, value)
            lines.append(
                f"- {source} -> {target}: trees {value:.2f} vs {reference:.2f} "
                f"supervised ({change:+.2f} %)"
            )
        return lines


def build_matrix(reports: Iterable[IoUReport]) -> CrossMatrix:
    """"""
    matrix = CrossMatrix()
    for report in reports:
        matrix.add(report)
    return matrix
