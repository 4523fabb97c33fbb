"""
Paired training images for image-to-image translation: the clean view
on the left, its degraded counterpart on the right.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from gsdkit.core.constant import PairLayout
from gsdkit.core.exception import GeometryError, PairSpecError
from gsdkit.core.object import RasterImage

APP_NAME = "PairGen"

PAIR_FOLDER = "pairs"


@dataclass(frozen=True)
class PairSpec:
    """
    Degradation targets in pixels, e.g. (32, 64, 96, 128, 192) for 20 cm.
    """

    resolutions: Tuple[int, ...]
    layout: PairLayout = PairLayout.A_LEFT_B_RIGHT

    def __post_init__(self):
        """"""
        resolutions = tuple(int(r) for r in self.resolutions)
        object.__setattr__(self, "resolutions", resolutions)
        object.__setattr__(self, "layout", PairLayout(self.layout))

        if not resolutions:
            raise PairSpecError("at least one resolution is needed")
        if resolutions[0] < 1:
            raise PairSpecError(f"resolutions must be positive, got {list(resolutions)}")
        if any(a >= b for a, b in zip(resolutions, resolutions[1:])):
            raise PairSpecError(f"resolutions must be strictly increasing, got {list(resolutions)}")

    def check_size(self, width: int, height: int):
        """
        Every resolution has to reduce the source.
        """
        largest = self.resolutions[-1]
        if largest >= min(width, height):
            raise PairSpecError(f"resolution {largest} does not reduce {width}x{height} images")

    def descriptor(self) -> dict:
        """"""
        return {"op": "pairs", "resolutions": list(self.resolutions), "layout": self.layout.value}


@dataclass(eq=False)
class PairImage:
    """"""

    left: RasterImage           # target view
    right: RasterImage          # degraded input view
    source_id: str
    low: int

    @property
    def width(self) -> int:
        return self.left.width * 2

    @property
    def height(self) -> int:
        return self.left.height

    def composite(self) -> RasterImage:
        """
        Side-by-side image as consumed by paired translation training.
        """
        pixels = np.concatenate([self.left.pixels, self.right.pixels], axis=1)
        return RasterImage(pixels=pixels, gsd_cm=self.left.gsd_cm)


def split_pair(composite: RasterImage) -> Tuple[RasterImage, RasterImage]:
    """
    Cut a composite at width/2 into (left, right).
    """
    if composite.width % 2:
        raise GeometryError(f"composite width {composite.width} is odd")

    half = composite.width // 2
    left = RasterImage(pixels=composite.pixels[:, :half].copy(), gsd_cm=composite.gsd_cm)
    right = RasterImage(pixels=composite.pixels[:, half:].copy(), gsd_cm=composite.gsd_cm)
    return left, right


def pair_id(source_id: str, low: int) -> str:
    """"""
    return f"{source_id}_r{low}"


def parse_resolutions(values: Sequence) -> PairSpec:
    """"""
    try:
        return PairSpec(tuple(int(v) for v in values))
    except (TypeError, ValueError):
        raise PairSpecError(f"resolutions must be integers, got {list(values)}")
