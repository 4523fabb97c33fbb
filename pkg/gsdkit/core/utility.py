"""
General utility functions.
"""

import json
import math
import os
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from PIL import Image

from .exception import IoError
from .object import LabelMask, RasterImage

WORKSPACE_ENV = "GSDKIT_WORKSPACE"
CENT = Decimal("0.01")
PathLike = Union[str, Path]


def _get_workspace_dir(temp_name: str):
    """
    Get path where the toolkit keeps settings and logs.
    """
    env_root = os.environ.get(WORKSPACE_ENV)
    if env_root:
        root = Path(env_root)
        temp_path = root.joinpath(temp_name)
        temp_path.mkdir(parents=True, exist_ok=True)
        return root, temp_path

    # If .gsdkit folder exists in current working directory,
    # then use it as workspace.
    cwd = Path.cwd()
    temp_path = cwd.joinpath(temp_name)
    if temp_path.exists():
        return cwd, temp_path

    # Otherwise use home path of system.
    home_path = Path.home()
    temp_path = home_path.joinpath(temp_name)
    if not temp_path.exists():
        temp_path.mkdir()

    return home_path, temp_path


WORKSPACE_DIR, TEMP_DIR = _get_workspace_dir(".gsdkit")


def get_file_path(filename: str) -> Path:
    """
    Get path for temp file with filename.
    """
    return TEMP_DIR.joinpath(filename)


def get_folder_path(folder_name: str) -> Path:
    """
    Get path for temp folder with folder name.
    """
    folder_path = TEMP_DIR.joinpath(folder_name)
    if not folder_path.exists():
        folder_path.mkdir()
    return folder_path


def load_json(filename: str) -> dict:
    """
    Load data from json file in temp path.
    """
    filepath = get_file_path(filename)

    if filepath.exists():
        return read_json(filepath)
    else:
        save_json(filename, {})
        return {}


def save_json(filename: str, data: dict):
    """
    Save data into json file in temp path.
    """
    write_json(get_file_path(filename), data)


def read_json(filepath: PathLike) -> dict:
    """
    Read a UTF-8 json document.
    """
    try:
        with open(filepath, mode="r", encoding="UTF-8") as f:
            return json.load(f)
    except (OSError, ValueError) as e:
        raise IoError(f"cannot read json: {e}", path=str(filepath)) from e


def write_json(filepath: PathLike, data: dict):
    """
    Write a json document with stable formatting, so that identical data
    always produces identical bytes.
    """
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, mode="w", encoding="UTF-8", newline="\n") as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write("\n")


def fraction_to_json(value: Fraction) -> Union[int, str]:
    """
    Integral values as json numbers, everything else as "p/q".
    """
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return str(value)


def parse_fraction(value) -> Fraction:
    """
    Accepts ints, "2.5", "5/2" and floats with a short decimal form.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        value = repr(value)
    return Fraction(str(value).strip())


def round_half_up(values: np.ndarray) -> np.ndarray:
    """
    Clamp to [0, 255] and round half-up into uint8.
    """
    clipped = np.clip(values, 0.0, 255.0)
    return np.floor(clipped + 0.5).astype(np.uint8)


def percent(numerator: int, denominator: int) -> Decimal:
    """
    100 * numerator / denominator, two decimals, half-up.
    """
    return quantize(Fraction(100 * numerator, denominator))


def quantize(value: Fraction) -> Decimal:
    """
    Round an exact percentage to two decimals, half-up (ties away from 0).
    """
    value = Fraction(value)
    hundredths = math.floor(abs(value) * 100 + Fraction(1, 2))
    if value < 0:
        hundredths = -hundredths
    return Decimal(hundredths).scaleb(-2).quantize(CENT, rounding=ROUND_HALF_UP)


def image_size(filepath: PathLike) -> Tuple[int, int]:
    """
    (width, height) read from the file header only.
    """
    try:
        with Image.open(filepath) as img:
            return img.size
    except OSError as e:
        raise IoError(f"cannot read image: {e}", path=str(filepath)) from e


def read_image(filepath: PathLike, gsd_cm: Fraction) -> RasterImage:
    """
    Load an 8-bit RGB PNG.
    """
    try:
        with Image.open(filepath) as img:
            if img.mode != "RGB":
                img = img.convert("RGB")
            pixels = np.array(img, dtype=np.uint8)
    except OSError as e:
        raise IoError(f"cannot read image: {e}", path=str(filepath)) from e
    return RasterImage(pixels=pixels, gsd_cm=gsd_cm)


def write_image(img: RasterImage, filepath: PathLike):
    """
    Save as 8-bit RGB PNG.
    """
    _save_array(img.pixels, filepath)


def read_mask(filepath: PathLike) -> LabelMask:
    """
    Load a single-channel class-index PNG.
    """
    try:
        with Image.open(filepath) as img:
            if img.mode not in ("L", "P"):
                img = img.convert("L")
            classes = np.array(img, dtype=np.uint8)
    except OSError as e:
        raise IoError(f"cannot read mask: {e}", path=str(filepath)) from e
    return LabelMask(classes=classes)


def write_mask(mask: LabelMask, filepath: PathLike):
    """
    Save as 8-bit single-channel PNG with values {0, 1}.
    """
    _save_array(mask.classes, filepath)


def _save_array(array: np.ndarray, filepath: PathLike):
    """
    uint8 (h, w) arrays become L images, (h, w, 3) arrays RGB images.
    """
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    try:
        Image.fromarray(np.ascontiguousarray(array)).save(
            filepath, format="PNG", compress_level=6
        )
    except OSError as e:
        raise IoError(f"cannot write png: {e}", path=str(filepath)) from e
