"""
Test translation pair generation
"""
import tempfile
import unittest
from pathlib import Path

import numpy as np

from gsdkit.app.dataset import DatasetEngine
from gsdkit.app.pairgen import PairSpec, split_pair
from gsdkit.app.pairgen.engine import PairEngine
from gsdkit.core.constant import Split
from gsdkit.core.exception import InvalidDegradeTarget, ManifestError, PairSpecError
from gsdkit.core.object import DatasetManifest, ManifestEntry
from gsdkit.core.resample import degrade
from gsdkit.core.utility import read_image

from synthetic import make_image, write_dataset

P20_RESOLUTIONS = (32, 64, 96, 128, 192)
P50_RESOLUTIONS = (16, 32, 64, 96, 128)


class TestPairSpec(unittest.TestCase):

    def test_valid(self):
        spec = PairSpec(P20_RESOLUTIONS)
        self.assertEqual(spec.descriptor(), {"op": "pairs", "resolutions": list(P20_RESOLUTIONS), "layout": "A|B"})

    def test_invalid(self):
        for resolutions in ((), (64, 32), (32, 32), (0, 32)):
            with self.subTest(resolutions=resolutions):
                with self.assertRaises(PairSpecError):
                    PairSpec(resolutions)

    def test_resolution_must_reduce(self):
        with self.assertRaises(PairSpecError):
            PairSpec((32, 256)).check_size(256, 256)


class TestMakePair(unittest.TestCase):

    def setUp(self) -> None:
        self.engine = PairEngine(None, None)

    def test_halves(self):
        img = make_image(256, 256, seed=1)
        for low in P20_RESOLUTIONS:
            pair = self.engine.make_pair(img, low, "0001")
            composite = pair.composite()
            self.assertEqual(composite.size, (512, 256))
            self.assertEqual((pair.source_id, pair.low), ("0001", low))

            left, right = split_pair(composite)
            self.assertTrue(left.same_pixels(img))
            self.assertTrue(right.same_pixels(degrade(img, low, low)))

    def test_invalid_low(self):
        img = make_image(256, 256)
        with self.assertRaises(InvalidDegradeTarget):
            self.engine.make_pair(img, 256)

    def test_degradation_monotonic(self):
        differences = {low: 0.0 for low in P20_RESOLUTIONS}
        for seed in range(8):
            img = make_image(256, 256, seed=seed)
            for low in P20_RESOLUTIONS:
                right = self.engine.make_pair(img, low).right
                differences[low] += np.abs(right.pixels.astype(int) - img.pixels.astype(int)).mean()

        values = [differences[low] for low in P20_RESOLUTIONS]
        self.assertEqual(values, sorted(values, reverse=True))


class TestGeneratePairs(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        cls.root = Path(cls.tmp.name)
        image_dir, mask_dir = write_dataset(cls.root.joinpath("P20"), 3, 256)
        engine = DatasetEngine(None, None)
        cls.manifest = engine.assign_splits(engine.build_manifest(image_dir, mask_dir, 20), seed=0)

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def setUp(self) -> None:
        self.engine = PairEngine(None, None)

    def test_generate(self):
        spec = PairSpec(P20_RESOLUTIONS)
        result = self.engine.generate_pairs(self.manifest, spec, self.root.joinpath("out"), workers=2)

        self.assertEqual(result.name, "P20pairs")
        self.assertEqual(len(result), 15)
        self.assertEqual(result.lineage[-1], spec.descriptor())

        sources = self.manifest.entry_map()
        for entry in result:
            source = sources[entry.parent_id]
            self.assertEqual(entry.id, f"{source.id}_r{entry.degrade_to}")
            self.assertEqual(Path(entry.image_path).name, f"{entry.id}.png")
            self.assertIs(entry.split, source.split)
            self.assertEqual(entry.mask_path, source.mask_path)

            clean, degraded = self.engine.read_pair(entry, 20)
            img = read_image(source.image_path, 20)
            self.assertTrue(clean.same_pixels(img))
            self.assertTrue(degraded.same_pixels(degrade(img, entry.degrade_to, entry.degrade_to)))

    def test_counts(self):
        # Planning only reads the size of the first image.
        entry = self.manifest.entries[0]
        splits = [Split.TRAIN] * 218 + [Split.VAL] * 36 + [Split.TEST] * 109
        entries = [
            ManifestEntry(f"{i:04d}", entry.image_path, entry.mask_path, split=split)
            for i, split in enumerate(splits)
        ]
        p20 = DatasetManifest("P20", 20, entries)
        p50 = DatasetManifest("P50", 50, entries[:224])

        self.assertEqual(self.engine.plan_pairs(p20, PairSpec(P20_RESOLUTIONS))["entries"], 1815)
        self.assertEqual(self.engine.plan_pairs(p50, PairSpec(P50_RESOLUTIONS))["entries"], 1120)

    def test_needs_splits(self):
        manifest = DatasetManifest("P20", 20, [e.with_split(None) for e in self.manifest])
        with self.assertRaises(ManifestError):
            self.engine.generate_pairs(manifest, PairSpec((32,)), self.root.joinpath("x"))


if __name__ == '__main__':
    unittest.main()
