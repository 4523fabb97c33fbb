from pathlib import Path

from gsdkit.core.app import BaseApp
from .base import APP_NAME, PairImage, PairSpec, split_pair
from .engine import PairEngine


class PairGenApp(BaseApp):
    """"""

    app_name = APP_NAME
    app_module = __module__
    app_path = Path(__file__).parent
    display_name = "Translation pairs"
    engine_class = PairEngine
