"""
General constant values used across gsdkit.
"""

from enum import Enum


class Split(Enum):
    """
    Dataset split of a manifest entry.
    """
    TRAIN = "train"
    VAL = "val"
    TEST = "test"


class FilterKind(Enum):
    """
    Resampling filter.
    """
    LANCZOS3 = "lanczos3"
    NEAREST = "nearest"
    BOX = "box"


class EnhanceMode(Enum):
    """
    How an external enhancer is fed with images.
    """
    WHOLE_IMAGE = "whole_image"
    TILED = "tiled"


class PairLayout(Enum):
    """
    Composite layout of a translation training pair.
    """
    A_LEFT_B_RIGHT = "A|B"      # clean view left, degraded view right


class TreeClass(Enum):
    """
    Label classes of the tree masks.
    """
    BACKGROUND = 0
    TREES = 1

    @property
    def display_name(self) -> str:
        return self.name.capitalize()


LANCZOS_RADIUS = 3
SPLIT_ORDER = (Split.TRAIN, Split.VAL, Split.TEST)
