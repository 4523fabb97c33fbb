from pathlib import Path

from gsdkit.core.app import BaseApp
from .engine import APP_NAME, HarmonizeEngine


class HarmonizeApp(BaseApp):
    """"""

    app_name = APP_NAME
    app_module = __module__
    app_path = Path(__file__).parent
    display_name = "GSD harmonization"
    engine_class = HarmonizeEngine
