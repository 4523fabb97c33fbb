"""
Separable image resampling.

Lanczos-3 and box filters are applied as precomputed weight plans, rows
then columns, with edge clamping. Masks and the degradation upscale use
nearest neighbour, which never interpolates.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Tuple

import numpy as np

from .constant import LANCZOS_RADIUS, FilterKind
from .exception import GeometryError, InvalidDegradeTarget
from .object import LabelMask, RasterImage
from .utility import round_half_up

# Filter kinds double as the resample filter type.
ResampleFilter = FilterKind

FILTER_SUPPORT = {
    FilterKind.LANCZOS3: float(LANCZOS_RADIUS),
    FilterKind.BOX: 0.5,
}

ANISOTROPIC_WARNING = "anisotropic gsd, width ratio governs"


def _lanczos(x: np.ndarray, a: int) -> np.ndarray:
    """
    Vectorized sinc(x) * sinc(x / a) inside |x| < a, exact at integers.
    """
    x = np.abs(np.asarray(x, dtype=np.float64))
    values = np.sinc(x) * np.sinc(x / a)
    integral = x == np.round(x)
    values = np.where(integral, 0.0, values)
    values = np.where(x == 0.0, 1.0, values)
    return np.where(x < a, values, 0.0)


def _box(x: np.ndarray) -> np.ndarray:
    """"""
    x = np.asarray(x, dtype=np.float64)
    return np.where((x >= -0.5) & (x < 0.5), 1.0, 0.0)


def lanczos_kernel(x: float, a: int = LANCZOS_RADIUS) -> float:
    """
    L(x) = sinc(x) * sinc(x / a) for |x| < a, else 0 (normalized sinc).
    """
    if a < 1:
        raise ValueError(f"lanczos radius must be >= 1, got {a}")
    return float(_lanczos(np.array([x]), a)[0])


def _kernel(x: np.ndarray, kind: FilterKind) -> np.ndarray:
    """"""
    if kind is FilterKind.LANCZOS3:
        return _lanczos(x, LANCZOS_RADIUS)
    if kind is FilterKind.BOX:
        return _box(x)
    raise ValueError(f"{kind} has no continuous kernel")


@dataclass(frozen=True)
class ResamplePlan:
    """
    Contributing source indices and normalized weights for every output
    coordinate along one axis.
    """

    in_size: int
    out_size: int
    kind: FilterKind
    indices: np.ndarray     # (out_size, taps), clamped into [0, in_size)
    weights: np.ndarray     # (out_size, taps), rows sum to 1

    def matrix(self) -> np.ndarray:
        """
        Dense (out_size, in_size) operator. Clamped taps that land on the
        same source index are summed.
        """
        matrix = np.zeros((self.out_size, self.in_size), dtype=np.float64)
        rows = np.repeat(np.arange(self.out_size), self.indices.shape[1])
        np.add.at(matrix, (rows, self.indices.ravel()), self.weights.ravel())
        return matrix


def _centers(in_size: int, out_size: int) -> np.ndarray:
    """
    Source coordinate of every output pixel center.
    """
    i = np.arange(out_size, dtype=np.int64)
    return ((2 * i + 1) * in_size - out_size) / (2.0 * out_size)


def _nearest_indices(in_size: int, out_size: int) -> np.ndarray:
    """
    floor((i + 0.5) * in / out) in exact integer arithmetic.
    """
    i = np.arange(out_size, dtype=np.int64)
    return np.minimum(((2 * i + 1) * in_size) // (2 * out_size), in_size - 1)


def _taps(centers: np.ndarray, in_size: int, filter_scale: float, kind: FilterKind):
    """
    Clamped indices and normalized weights around each center.
    """
    support = FILTER_SUPPORT[kind] * filter_scale
    count = int(np.ceil(2 * support)) + 2
    first = np.floor(centers - support).astype(np.int64)
    positions = first[:, None] + np.arange(count)[None, :]

    weights = _kernel((positions - centers[:, None]) / filter_scale, kind)
    weights = weights / weights.sum(axis=1, keepdims=True)
    indices = np.clip(positions, 0, in_size - 1)
    return indices, weights


@lru_cache(maxsize=64)
def build_plan(in_size: int, out_size: int, kind: FilterKind = FilterKind.LANCZOS3) -> ResamplePlan:
    """
    Precompute one axis of a resize. Plans are cached and shared
    read-only between workers.
    """
    if in_size < 1 or out_size < 1:
        raise GeometryError(f"cannot resample {in_size} -> {out_size}")

    if kind is FilterKind.NEAREST:
        indices = _nearest_indices(in_size, out_size)[:, None]
        weights = np.ones_like(indices, dtype=np.float64)
    else:
        # Widen the kernel when shrinking so every source pixel contributes.
        filter_scale = max(in_size / out_size, 1.0)
        indices, weights = _taps(_centers(in_size, out_size), in_size, filter_scale, kind)

    indices.setflags(write=False)
    weights.setflags(write=False)
    return ResamplePlan(in_size, out_size, kind, indices, weights)


def phase_weights(phase: float, kind: FilterKind = FilterKind.LANCZOS3) -> Tuple[np.ndarray, np.ndarray]:
    """
    Integer offsets and normalized weights for a sample that sits at a
    fractional phase past a source pixel, without edge clamping.
    """
    large = 1 << 20
    center = np.array([large + phase])
    indices, weights = _taps(center, 2 * large, 1.0, kind)
    return indices[0] - large, weights[0]


def output_gsd(gsd_cm: Fraction, in_w: int, out_w: int) -> Fraction:
    """
    gsd_out * out_w = gsd_in * in_w, exactly.
    """
    return Fraction(gsd_cm) * Fraction(in_w, out_w)


def is_anisotropic(in_w: int, in_h: int, out_w: int, out_h: int) -> bool:
    return Fraction(in_w, out_w) != Fraction(in_h, out_h)


def resize_descriptor(img: RasterImage, out_w: int, out_h: int, kind: FilterKind) -> dict:
    """
    Lineage record of a resize; flags anisotropic scaling, where the width
    ratio decides the output gsd.
    """
    descriptor = {
        "op": "resize",
        "filter": kind.value,
        "width": out_w,
        "height": out_h,
    }
    if is_anisotropic(img.width, img.height, out_w, out_h):
        descriptor["warning"] = ANISOTROPIC_WARNING
    return descriptor


def resize_image(
    img: RasterImage,
    out_w: int,
    out_h: int,
    kind: FilterKind = FilterKind.LANCZOS3,
) -> RasterImage:
    """
    Resize an RGB image: rows first, then columns.
    """
    if out_w < 1 or out_h < 1:
        raise GeometryError(f"invalid output size {out_w}x{out_h}")

    gsd_cm = output_gsd(img.gsd_cm, img.width, out_w)

    if kind is FilterKind.NEAREST:
        rows = _nearest_indices(img.height, out_h)
        cols = _nearest_indices(img.width, out_w)
        pixels = img.pixels[rows][:, cols]
        return RasterImage(pixels=np.ascontiguousarray(pixels), gsd_cm=gsd_cm)

    wx = build_plan(img.width, out_w, kind).matrix()
    wy = build_plan(img.height, out_h, kind).matrix()

    data = np.moveaxis(img.pixels.astype(np.float64), 2, 0)    # (c, h, w)
    data = np.matmul(data, wx.T)                                # (c, h, out_w)
    data = np.matmul(wy, data)                                  # (c, out_h, out_w)
    pixels = round_half_up(np.moveaxis(data, 0, 2))

    return RasterImage(pixels=np.ascontiguousarray(pixels), gsd_cm=gsd_cm)


def resize_mask(mask: LabelMask, out_w: int, out_h: int) -> LabelMask:
    """
    Nearest-neighbour resize; the class set stays within {0, 1}.
    """
    if out_w < 1 or out_h < 1:
        raise GeometryError(f"invalid output size {out_w}x{out_h}")

    rows = _nearest_indices(mask.height, out_h)
    cols = _nearest_indices(mask.width, out_w)
    return LabelMask(classes=np.ascontiguousarray(mask.classes[rows][:, cols]))


def degrade(img: RasterImage, low_w: int, low_h: int) -> RasterImage:
    """
    Lanczos down to (low_w, low_h), then nearest back up to the original
    size. Geometry and gsd are kept; only the effective resolution drops.
    """
    if not (1 <= low_w < img.width and 1 <= low_h < img.height):
        raise InvalidDegradeTarget(
            f"degrade target {low_w}x{low_h} does not reduce {img.width}x{img.height}"
        )

    low = resize_image(img, low_w, low_h, FilterKind.LANCZOS3)
    up = resize_image(low, img.width, img.height, FilterKind.NEAREST)
    return RasterImage(pixels=up.pixels, gsd_cm=img.gsd_cm)
