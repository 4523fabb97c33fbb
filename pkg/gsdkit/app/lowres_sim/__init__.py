from pathlib import Path

from gsdkit.core.app import BaseApp
from .base import APP_NAME, ScenarioSpec, load_scenario
from .engine import ScenarioEngine


class LowResSimApp(BaseApp):
    """"""

    app_name = APP_NAME
    app_module = __module__
    app_path = Path(__file__).parent
    display_name = "Low-resolution scenario"
    engine_class = ScenarioEngine
