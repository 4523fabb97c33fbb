"""
Uniform-stride patch grids: cutting an image into rows x cols square
patches and putting them back together.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .exception import GeometryError, GridError
from .object import LabelMask, RasterImage


@dataclass(frozen=True)
class TileGrid:
    """
    Placement of square patches over an image. Offsets are row-major:
    patch k sits at (x_offsets[k % cols], y_offsets[k // cols]).
    """

    image_w: int
    image_h: int
    patch: int
    rows: int
    cols: int
    x_offsets: Tuple[int, ...]
    y_offsets: Tuple[int, ...]

    @property
    def count(self) -> int:
        return self.rows * self.cols

    def origin(self, patch_index: int) -> Tuple[int, int]:
        """
        (x, y) of the top-left pixel of a patch.
        """
        row, col = divmod(patch_index, self.cols)
        return self.x_offsets[col], self.y_offsets[row]

    def scaled(self, factor: int) -> "TileGrid":
        """
        The same layout on an image enlarged by an integer factor.
        """
        return plan_grid(
            self.image_w * factor,
            self.image_h * factor,
            self.patch * factor,
            self.rows,
            self.cols,
        )

    def descriptor(self) -> dict:
        return {"op": "tile", "patch": self.patch, "rows": self.rows, "cols": self.cols}


def _offsets(image_dim: int, patch: int, n: int) -> Tuple[int, ...]:
    """"""
    if n == 1:
        if patch != image_dim:
            raise GridError(f"a single patch of {patch} does not cover {image_dim}")
        return (0,)

    span = image_dim - patch
    if span % (n - 1):
        raise GridError(f"{span} is not divisible by {n - 1}")
    stride = span // (n - 1)
    if stride == 0:
        raise GridError(f"{n} patches of {patch} on {image_dim} would coincide")
    return tuple(i * stride for i in range(n))


def plan_grid(image_w: int, image_h: int, patch: int, rows: int, cols: int) -> TileGrid:
    """
    Uniform-stride grid: first offset 0, last offset image_dim - patch.
    """
    if rows < 1 or cols < 1 or patch < 1:
        raise GridError(f"invalid grid {rows}x{cols} of {patch}")
    if patch > image_w or patch > image_h:
        raise GeometryError(f"patch {patch} larger than image {image_w}x{image_h}")

    return TileGrid(
        image_w=image_w,
        image_h=image_h,
        patch=patch,
        rows=rows,
        cols=cols,
        x_offsets=_offsets(image_w, patch, cols),
        y_offsets=_offsets(image_h, patch, rows),
    )


def extract_patches(
    img: RasterImage,
    mask: Optional[LabelMask],
    grid: TileGrid,
) -> List[Tuple[RasterImage, Optional[LabelMask], int]]:
    """
    Cut image (and co-registered mask) into grid.count patches in
    row-major order. Patches are exact copies of the source pixels.
    """
    if img.size != (grid.image_w, grid.image_h):
        raise GeometryError(f"grid planned for {grid.image_w}x{grid.image_h}, image is {img.width}x{img.height}")
    if mask is not None and mask.size != img.size:
        raise GeometryError(f"mask {mask.width}x{mask.height} does not match image {img.width}x{img.height}")

    size = grid.patch
    patches = []
    for index in range(grid.count):
        x, y = grid.origin(index)
        pixels = img.pixels[y:y + size, x:x + size].copy()
        patch_img = RasterImage(pixels=pixels, gsd_cm=img.gsd_cm)

        patch_mask = None
        if mask is not None:
            patch_mask = LabelMask(classes=mask.classes[y:y + size, x:x + size].copy())

        patches.append((patch_img, patch_mask, index))
    return patches


def reassemble(patches: Sequence[Tuple[int, RasterImage]], grid: TileGrid) -> RasterImage:
    """
    Write (patch_index, image) pairs back onto the grid in row-major
    order; where patches overlap the later one wins.
    """
    indices = [index for index, _ in patches]
    if sorted(indices) != list(range(grid.count)):
        missing = sorted(set(range(grid.count)) - set(indices))
        duplicate = sorted({i for i in indices if indices.count(i) > 1})
        raise GridError(f"incomplete patch set: missing {missing}, duplicate {duplicate}")

    ordered = sorted(patches, key=lambda item: item[0])
    gsd_cm = ordered[0][1].gsd_cm
    canvas = np.zeros((grid.image_h, grid.image_w, 3), dtype=np.uint8)

    for index, patch_img in ordered:
        if patch_img.size != (grid.patch, grid.patch):
            raise GeometryError(f"patch {index} is {patch_img.width}x{patch_img.height}, grid expects {grid.patch}")
        x, y = grid.origin(index)
        canvas[y:y + grid.patch, x:x + grid.patch] = patch_img.pixels

    return RasterImage(pixels=canvas, gsd_cm=gsd_cm)
