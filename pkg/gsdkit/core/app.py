"""
Base class of the pipeline apps plugged into the MainEngine.
"""

from abc import ABC
from typing import TYPE_CHECKING, Type

if TYPE_CHECKING:
    from .engine import BaseEngine


class BaseApp(ABC):
    """
    One pipeline stage: a unique name and the engine doing the work.
    """

    app_name: str = ""                      # also the engine name
    app_module: str = ""
    app_path = ""
    display_name: str = ""
    engine_class: Type["BaseEngine"] = None

    def __init_subclass__(cls, **kwargs):
        """"""
        super().__init_subclass__(**kwargs)
        if not cls.app_name or cls.engine_class is None:
            raise TypeError(f"{cls.__name__} needs app_name and engine_class")
