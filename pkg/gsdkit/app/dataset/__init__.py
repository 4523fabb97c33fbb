from pathlib import Path

from gsdkit.core.app import BaseApp
from .base import APP_NAME, load_manifest, save_manifest, split_sizes
from .engine import DatasetEngine


class DatasetApp(BaseApp):
    """"""

    app_name = APP_NAME
    app_module = __module__
    app_path = Path(__file__).parent
    display_name = "Dataset manifests"
    engine_class = DatasetEngine
