"""
Test settings and pipeline config
"""
import json
import tempfile
import unittest
from fractions import Fraction
from pathlib import Path

from gsdkit.core.exception import ConfigError
from gsdkit.core.setting import SETTINGS, PipelineConfig, get_settings


class TestSettings(unittest.TestCase):

    def test_get_settings(self):
        SETTINGS['a'] = 1
        got = get_settings()
        self.assertIn('a', got)
        self.assertEqual(got['a'], 1)

    def test_get_settings_with_prefix(self):
        got = get_settings("grid.")
        self.assertEqual(got["patch"], SETTINGS["grid.patch"])
        self.assertEqual(set(got), {"patch", "rows", "cols"})

    def test_pair_defaults(self):
        self.assertEqual(get_settings("pairs.")["p20"], [32, 64, 96, 128, 192])


class TestPipelineConfig(unittest.TestCase):

    def test_overrides_win(self):
        with tempfile.TemporaryDirectory() as tmp:
            config_file = Path(tmp).joinpath("config.json")
            config_file.write_text(json.dumps({"seed": 5, "workers": 2, "target_gsd_cm": "25/2"}))

            config = PipelineConfig.from_settings(str(config_file), workers=3, seed=None)
            self.assertEqual(config.seed, 5)
            self.assertEqual(config.workers, 3)
            self.assertEqual(config.target_gsd_cm, Fraction(25, 2))
            self.assertEqual(config.out_root, Path(config.workspace).joinpath("out"))

    def test_validate_ok(self):
        config = PipelineConfig.from_settings(resolutions=[32, 64, 96])
        self.assertIs(config.validate(), config)

    def test_validate_rejects(self):
        cases = [
            {"workers": 0},
            {"patch": 0},
            {"target_gsd_cm": 0},
            {"timeout": 0},
            {"resolutions": [64, 32]},
            {"resolutions": [32, 32]},
            {"enhancers": [Path("/nonexistent/spec.json")]},
        ]
        for overrides in cases:
            with self.subTest(**{k: str(v) for k, v in overrides.items()}):
                with self.assertRaises(ConfigError):
                    PipelineConfig.from_settings(**overrides).validate()

    def test_unknown_field(self):
        with self.assertRaises(ConfigError):
            PipelineConfig.from_settings(colour="red")


if __name__ == '__main__':
    unittest.main()
