from pathlib import Path

from gsdkit.core.app import BaseApp
from .base import (
    APP_NAME,
    ConfusionAccumulator,
    CrossMatrix,
    EvalPair,
    IoUReport,
    gap_closure,
    relative_change,
)
from .engine import EvalEngine


class EvalIoUApp(BaseApp):
    """"""

    app_name = APP_NAME
    app_module = __module__
    app_path = Path(__file__).parent
    display_name = "IoU evaluation"
    engine_class = EvalEngine
