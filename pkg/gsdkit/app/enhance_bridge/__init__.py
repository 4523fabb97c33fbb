from pathlib import Path

from gsdkit.core.app import BaseApp
from .base import APP_NAME, EnhanceJob, EnhancerSpec, load_enhancer_spec
from .engine import EnhanceEngine


class EnhanceBridgeApp(BaseApp):
    """"""

    app_name = APP_NAME
    app_module = __module__
    app_path = Path(__file__).parent
    display_name = "External enhancers"
    engine_class = EnhanceEngine
