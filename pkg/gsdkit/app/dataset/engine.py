"""
Ingest image/mask folders into manifests, assign reproducible splits and
derive manifests whose entries inherit the split of their source.
"""

from fractions import Fraction
from pathlib import Path
from time import perf_counter
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
from pandas import DataFrame

from gsdkit.core.constant import SPLIT_ORDER, Split
from gsdkit.core.engine import BaseEngine, MainEngine
from gsdkit.core.exception import (
    EmptyDataset,
    GeometryError,
    IoError,
    ManifestError,
    MissingMask,
    TooFewEntries,
    UnknownParent,
)
from gsdkit.core.object import DatasetManifest, ManifestEntry
from gsdkit.core.utility import PathLike, fraction_to_json, image_size, parse_fraction
from gsdkit.event import EventEngine
from .base import APP_NAME, split_sizes

IMAGE_SUFFIX = ".png"


class DatasetEngine(BaseEngine):
    """"""

    def __init__(self, main_engine: MainEngine, event_engine: EventEngine):
        """"""
        super().__init__(main_engine, event_engine, APP_NAME)

    def list_pairs(self, image_dir: PathLike, mask_dir: PathLike) -> List[tuple]:
        """
        (id, image path, mask path) for every image, sorted by id.
        """
        image_dir, mask_dir = Path(image_dir), Path(mask_dir)
        for folder in (image_dir, mask_dir):
            if not folder.is_dir():
                raise IoError("folder not found", path=str(folder))

        pairs = []
        for image_path in sorted(image_dir.glob(f"*{IMAGE_SUFFIX}")):
            entry_id = image_path.stem
            mask_path = mask_dir.joinpath(image_path.name)
            if not mask_path.exists():
                raise MissingMask(f"no mask for image {image_path.name}", id=entry_id)
            pairs.append((entry_id, image_path.resolve(), mask_path.resolve()))

        if not pairs:
            raise EmptyDataset(f"no {IMAGE_SUFFIX} images", path=str(image_dir))
        return pairs

    def build_manifest(
        self,
        image_dir: PathLike,
        mask_dir: PathLike,
        gsd_cm: Fraction,
        name: Optional[str] = None,
    ) -> DatasetManifest:
        """
        One entry per image/mask pair, splits unassigned.
        """
        start = perf_counter()
        gsd_cm = parse_fraction(gsd_cm)
        pairs = self.list_pairs(image_dir, mask_dir)

        entries = []
        expected = None
        for entry_id, image_path, mask_path in pairs:
            size = image_size(image_path)
            if expected is None:
                expected = size
            elif size != expected:
                raise GeometryError(f"image is {size}, dataset is {expected}", id=entry_id)

            if image_size(mask_path) != size:
                raise GeometryError(f"mask size differs from image {size}", id=entry_id)

            entries.append(ManifestEntry(
                id=entry_id,
                image_path=str(image_path),
                mask_path=str(mask_path),
            ))

        if name is None:
            name = f"P{fraction_to_json(gsd_cm)}"

        manifest = DatasetManifest(
            name=name,
            gsd_cm=gsd_cm,
            entries=entries,
            lineage=[{"op": "source", "gsd_cm": fraction_to_json(gsd_cm)}],
        )
        self.put_stage("build_manifest", start, dataset=name, entries=len(manifest))
        return manifest

    def assign_splits(self, manifest: DatasetManifest, seed: int) -> DatasetManifest:
        """
        Seeded shuffle of the entry ids, then train/val/test blocks of
        split_sizes(n). The result only depends on the ids and the seed.
        """
        if any(entry.split is not None for entry in manifest.entries):
            raise ManifestError(f"splits of {manifest.name} are already assigned")

        n = len(manifest)
        if n < 3:
            raise TooFewEntries(f"{manifest.name} has {n} entries, at least 3 are needed")

        sizes = split_sizes(n)
        ids = sorted(entry.id for entry in manifest.entries)
        order = np.random.default_rng(seed).permutation(n)

        assignment: Dict[str, Split] = {}
        position = 0
        for split in SPLIT_ORDER:
            for k in order[position:position + sizes[split]]:
                assignment[ids[k]] = split
            position += sizes[split]

        entries = [entry.with_split(assignment[entry.id]) for entry in manifest.entries]
        descriptor = {"op": "split", "seed": seed}
        descriptor.update({split.value: sizes[split] for split in SPLIT_ORDER})

        self.write_log(
            f"{manifest.name}: train {sizes[Split.TRAIN]}, val {sizes[Split.VAL]}, test {sizes[Split.TEST]}"
        )
        return DatasetManifest(
            name=manifest.name,
            gsd_cm=manifest.gsd_cm,
            entries=entries,
            lineage=list(manifest.lineage) + [descriptor],
        )

    def derive_manifest(
        self,
        parent: DatasetManifest,
        name: str,
        transform: Union[dict, List[dict]],
        entries: Iterable[ManifestEntry],
        gsd_cm: Optional[Fraction] = None,
    ) -> DatasetManifest:
        """
        New manifest built from parent: every entry must trace back to a
        parent entry (through parent_id, or by keeping the parent's id)
        and takes over that entry's split. transform is one lineage
        descriptor or a list of them.
        """
        entries = list(entries)
        if not entries:
            raise EmptyDataset(f"derived dataset {name} has no entries")
        transforms = [transform] if isinstance(transform, dict) else list(transform)
        if not transforms:
            raise ManifestError(f"derived dataset {name} records no transform")

        parents = parent.entry_map()
        derived = []
        for entry in entries:
            source_id = entry.parent_id if entry.parent_id is not None else entry.id
            source = parents.get(source_id)
            if source is None:
                raise UnknownParent(f"{source_id} is not an entry of {parent.name}", id=entry.id)
            derived.append(entry.with_split(source.split))

        return DatasetManifest(
            name=name,
            gsd_cm=parent.gsd_cm if gsd_cm is None else gsd_cm,
            entries=derived,
            lineage=list(parent.lineage) + transforms,
        )

    def dataset_table(self, manifests: Sequence[DatasetManifest]) -> DataFrame:
        """
        Distribution table: one row per dataset with its split counts.
        """
        rows = []
        for manifest in manifests:
            counts = manifest.split_counts()
            rows.append({
                "dataset": manifest.name,
                "method": describe_method(manifest),
                "gsd": f"{fraction_to_json(manifest.gsd_cm)}cm",
                "train": counts[Split.TRAIN],
                "val": counts[Split.VAL],
                "test": counts[Split.TEST],
                "total": len(manifest),
            })
        return DataFrame(rows, columns=["dataset", "method", "gsd", "train", "val", "test", "total"])


def describe_method(manifest: DatasetManifest) -> str:
    """
    Name of the last transform that changed pixels.
    """
    for descriptor in reversed(manifest.lineage):
        op = descriptor.get("op")
        if op == "enhance":
            return descriptor.get("enhancer", "enhancer")
        if op == "resize":
            return descriptor.get("filter", "resize")
        if op in ("degrade", "pairs"):
            return op
    return "original"


def table_to_markdown(df: DataFrame) -> str:
    """
    Markdown pipe table, one line per DataFrame row.
    """
    header = "| " + " | ".join(str(c) for c in df.columns) + " |"
    rule = "|" + "|".join("---" for _ in df.columns) + "|"
    lines = [header, rule]
    for row in df.itertuples(index=False):
        lines.append("| " + " | ".join(str(v) for v in row) + " |")
    return "\n".join(lines) + "\n"
