# flake8: noqa
import unittest


# noinspection PyUnresolvedReferences,PyMethodMayBeStatic
class CoreImportTest(unittest.TestCase):

    def test_import_event_engine(self):
        from gsdkit.event import EventEngine

    def test_import_main_engine(self):
        from gsdkit.core.engine import MainEngine

    def test_import_resample(self):
        from gsdkit.core.resample import degrade, resize_image, resize_mask

    def test_import_tiler(self):
        from gsdkit.core.tiler import extract_patches, plan_grid, reassemble


# noinspection PyUnresolvedReferences,PyMethodMayBeStatic
class AppImportTest(unittest.TestCase):

    def test_import_dataset_app(self):
        from gsdkit.app.dataset import DatasetApp

    def test_import_harmonize_app(self):
        from gsdkit.app.harmonize import HarmonizeApp

    def test_import_pairgen_app(self):
        from gsdkit.app.pairgen import PairGenApp

    def test_import_enhance_bridge_app(self):
        from gsdkit.app.enhance_bridge import EnhanceBridgeApp

    def test_import_eval_iou_app(self):
        from gsdkit.app.eval_iou import EvalIoUApp

    def test_import_lowres_sim_app(self):
        from gsdkit.app.lowres_sim import LowResSimApp

    def test_import_cli(self):
        from gsdkit.cli import main


if __name__ == '__main__':
    unittest.main()
