"""
Test the low-resolution scenario
"""
import tempfile
import unittest
from pathlib import Path

from gsdkit.app.dataset import DatasetEngine, load_manifest, save_manifest
from gsdkit.app.enhance_bridge import load_enhancer_spec
from gsdkit.app.lowres_sim import ScenarioEngine, ScenarioSpec, load_scenario
from gsdkit.core.constant import Split
from gsdkit.core.exception import ConfigError, InvalidDegradeTarget
from gsdkit.core.resample import degrade
from gsdkit.core.utility import read_image, read_mask

from synthetic import reference_spec, write_dataset, write_spec


class TestScenario(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        cls.root = Path(cls.tmp.name)
        image_dir, mask_dir = write_dataset(cls.root.joinpath("data", "P20"), 363, 32)
        engine = DatasetEngine(None, None)
        cls.manifest = engine.assign_splits(engine.build_manifest(image_dir, mask_dir, 20), seed=0)
        cls.manifest_path = save_manifest(cls.manifest, cls.root.joinpath("out", "P20", "manifest.json"))

        write_spec(cls.root.joinpath("enhancers", "pix2pix.json"), reference_spec("pix2pix", scale=1))
        write_spec(cls.root.joinpath("enhancers", "realesrgan.json"), reference_spec("realesrgan", scale=2))
        cls.scenario_path = write_spec(cls.root.joinpath("scenario.json"), {
            "source_manifest": "out/P20/manifest.json",
            "degrade_to": 4,
            "out_root": "out",
            "enhancers": [
                {"spec": "enhancers/pix2pix.json", "output_name": "P20lp"},
                {"spec": "enhancers/realesrgan.json", "output_name": "P20lG"},
                {"spec": reference_spec("diffusion", scale=4), "output_name": "P20lD"},
            ],
        })

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def setUp(self) -> None:
        self.engine = ScenarioEngine(None, None)

    def test_load(self):
        spec = load_scenario(self.scenario_path)
        self.assertEqual(spec.source_manifest, self.manifest_path.resolve())
        self.assertEqual(spec.out_root, self.root.resolve().joinpath("out"))
        self.assertEqual(spec.output_names, ["P20lp", "P20lG", "P20lD"])
        self.assertEqual(spec.all_names("P20"), ["P20lr", "P20lp", "P20lG", "P20lD"])

    def test_plan(self):
        spec = load_scenario(self.scenario_path)
        self.assertEqual(
            self.engine.plan_scenario(spec),
            {"P20lr": 363, "P20lp": 363, "P20lG": 363, "P20lD": 363},
        )

    def test_run(self):
        spec = load_scenario(self.scenario_path)
        results = self.engine.run_scenario(spec, workers=2)

        self.assertEqual([m.name for m in results], ["P20lr", "P20lp", "P20lG", "P20lD"])
        degraded = results[0]
        self.assertEqual(degraded.lineage[-1], {"op": "degrade", "low": [4, 4], "down": "lanczos3", "up": "nearest"})

        sources = self.manifest.entry_map()
        for manifest in results:
            self.assertEqual(len(manifest), 363)
            self.assertEqual(manifest.gsd_cm, 20)
            self.assertEqual(
                manifest.split_counts(),
                {Split.TRAIN: 218, Split.VAL: 36, Split.TEST: 109},
            )
            self.assertTrue(spec.out_root.joinpath(manifest.name, "manifest.json").exists())

            for entry in manifest.entries[:20]:
                source = sources[entry.id]
                self.assertIs(entry.split, source.split)
                self.assertTrue(read_mask(entry.mask_path).same_classes(read_mask(source.mask_path)))
                self.assertEqual(read_image(entry.image_path, 20).size, (32, 32))

        for entry in degraded.entries[:20]:
            source = read_image(sources[entry.id].image_path, 20)
            low = read_image(entry.image_path, 20)
            self.assertTrue(low.same_pixels(degrade(source, 4, 4)))
            self.assertFalse(low.same_pixels(source))

        # a scale 1 enhancer is an exact copy of the degraded images
        copies = results[1].entry_map()
        for entry in degraded.entries[:20]:
            self.assertTrue(read_image(copies[entry.id].image_path, 20).same_pixels(read_image(entry.image_path, 20)))

        reloaded = load_manifest(spec.out_root.joinpath("P20lD", "manifest.json"))
        self.assertEqual([d["op"] for d in reloaded.lineage[-2:]], ["degrade", "enhance"])

    def test_invalid(self):
        with self.assertRaises(ConfigError):
            ScenarioSpec(self.manifest_path, 4, degraded_name="P20lp", enhancers=[
                (load_enhancer_spec(reference_spec("pix2pix")), "P20lp"),
            ])
        with self.assertRaises(ConfigError):
            ScenarioSpec(self.manifest_path, 4, enhancers=[
                (load_enhancer_spec(reference_spec("a")), "P20lx"),
                (load_enhancer_spec(reference_spec("b")), "P20lx"),
            ])
        with self.assertRaises(ConfigError):
            ScenarioSpec(self.manifest_path, "32")
        with self.assertRaises(InvalidDegradeTarget):
            ScenarioSpec(self.manifest_path, 0)
        with self.assertRaises(ConfigError):
            load_scenario({"degrade_to": 4})

    def test_degrade_target_too_large(self):
        with self.assertRaises(InvalidDegradeTarget):
            self.engine.plan_scenario(ScenarioSpec(self.manifest_path, 32))


if __name__ == '__main__':
    unittest.main()
