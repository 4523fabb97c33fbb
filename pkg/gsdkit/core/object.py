"""
Basic data structures shared by every pipeline stage.
"""

from dataclasses import dataclass, field, replace
from datetime import datetime
from fractions import Fraction
from logging import INFO
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from .constant import SPLIT_ORDER, Split, TreeClass
from .exception import GeometryError, ManifestError, MaskValueError

MASK_VALUES = frozenset(c.value for c in TreeClass)


@dataclass(eq=False)
class RasterImage:
    """
    8-bit RGB pixel grid with its ground sample distance.

    pixels is a (height, width, 3) uint8 array in row-major order.
    """

    pixels: np.ndarray
    gsd_cm: Fraction

    def __post_init__(self):
        """"""
        self.gsd_cm = Fraction(self.gsd_cm)
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise GeometryError(f"expected an RGB pixel grid, got shape {self.pixels.shape}")
        if self.pixels.dtype != np.uint8:
            raise GeometryError(f"expected 8-bit samples, got {self.pixels.dtype}")
        if self.width < 1 or self.height < 1:
            raise GeometryError("image must be at least 1x1")
        if self.gsd_cm <= 0:
            raise GeometryError(f"gsd must be positive, got {self.gsd_cm}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @property
    def size(self) -> Tuple[int, int]:
        return self.width, self.height

    def same_pixels(self, other: "RasterImage") -> bool:
        """
        Bit-exact pixel comparison (gsd is not compared).
        """
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)


@dataclass(eq=False)
class LabelMask:
    """
    Per-pixel class grid: 0 is background, 1 is tree.
    """

    classes: np.ndarray

    def __post_init__(self):
        """"""
        if self.classes.ndim != 2:
            raise GeometryError(f"expected a single-channel mask, got shape {self.classes.shape}")
        if self.width < 1 or self.height < 1:
            raise GeometryError("mask must be at least 1x1")
        if self.classes.dtype != np.uint8:
            self.classes = self.classes.astype(np.uint8)
        values = set(np.unique(self.classes).tolist())
        if not values <= MASK_VALUES:
            raise MaskValueError(f"mask values {sorted(values - MASK_VALUES)} outside {{0, 1}}")

    @property
    def width(self) -> int:
        return self.classes.shape[1]

    @property
    def height(self) -> int:
        return self.classes.shape[0]

    @property
    def size(self) -> Tuple[int, int]:
        return self.width, self.height

    def same_classes(self, other: "LabelMask") -> bool:
        return self.classes.shape == other.classes.shape and np.array_equal(self.classes, other.classes)


@dataclass(frozen=True)
class ManifestEntry:
    """
    One image/mask pair of a dataset.

    Derived entries point back at their source through parent_id and tell
    how they were derived: patch_index for tiles, degrade_to for
    translation pairs.
    """

    id: str
    image_path: str
    mask_path: str
    split: Optional[Split] = None
    parent_id: Optional[str] = None
    patch_index: Optional[int] = None
    degrade_to: Optional[int] = None

    def __post_init__(self):
        """"""
        derived = self.patch_index is not None or self.degrade_to is not None
        if derived != (self.parent_id is not None):
            raise ManifestError("patch_index/degrade_to present iff parent_id present", id=self.id)
        if self.patch_index is not None and self.degrade_to is not None:
            raise ManifestError("an entry is either a patch or a pair, not both", id=self.id)
        if self.patch_index is not None and self.patch_index < 0:
            raise ManifestError(f"negative patch index {self.patch_index}", id=self.id)

    def with_split(self, split: Optional[Split]) -> "ManifestEntry":
        return replace(self, split=split)


@dataclass(frozen=True)
class DatasetManifest:
    """
    Ordered record of a dataset: its entries plus the chain of transforms
    that produced it. Treated as an immutable value.
    """

    name: str
    gsd_cm: Fraction
    entries: Tuple[ManifestEntry, ...]
    lineage: Tuple[dict, ...] = field(default_factory=tuple)

    def __post_init__(self):
        """"""
        object.__setattr__(self, "gsd_cm", Fraction(self.gsd_cm))
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "lineage", tuple(self.lineage))

        if self.gsd_cm <= 0:
            raise ManifestError(f"gsd must be positive, got {self.gsd_cm}")

        seen = set()
        for entry in self.entries:
            if entry.id in seen:
                raise ManifestError("duplicate entry id", id=entry.id)
            seen.add(entry.id)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[ManifestEntry]:
        return iter(self.entries)

    def get_entry(self, entry_id: str) -> Optional[ManifestEntry]:
        """
        Get entry by id.
        """
        for entry in self.entries:
            if entry.id == entry_id:
                return entry
        return None

    def entry_map(self) -> Dict[str, ManifestEntry]:
        return {entry.id: entry for entry in self.entries}

    @property
    def splits_assigned(self) -> bool:
        return bool(self.entries) and all(e.split is not None for e in self.entries)

    def split_counts(self) -> Dict[Split, int]:
        """
        Number of entries per split, in train/val/test order.
        """
        counts = {split: 0 for split in SPLIT_ORDER}
        for entry in self.entries:
            if entry.split is not None:
                counts[entry.split] += 1
        return counts

    def select(self, split: Optional[Split]) -> Tuple[ManifestEntry, ...]:
        """
        Entries of one split, or all entries if split is None.
        """
        if split is None:
            return self.entries
        return tuple(e for e in self.entries if e.split is split)


@dataclass
class LogData:
    """
    Log message travelling through the event engine.
    """

    msg: str
    level: int = INFO
    source: str = ""

    def __post_init__(self):
        """"""
        self.time = datetime.now()


@dataclass
class StageData:
    """
    Summary of one finished pipeline stage: counts and wall time.
    """

    stage: str
    counts: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        data = {"stage": self.stage, "elapsed_s": round(self.elapsed, 3)}
        data.update(self.counts)
        return data
