"""
Test gsd harmonization pipelines
"""
import tempfile
import unittest
from fractions import Fraction
from pathlib import Path

from gsdkit.app.dataset import DatasetEngine
from gsdkit.app.enhance_bridge import load_enhancer_spec
from gsdkit.app.harmonize import HarmonizeEngine
from gsdkit.core.constant import FilterKind, Split
from gsdkit.core.exception import GeometryError
from gsdkit.core.resample import resize_image, resize_mask
from gsdkit.core.tiler import plan_grid
from gsdkit.core.utility import read_image, read_mask

from synthetic import reference_spec, write_dataset


def build(root: Path, count: int, size: int, gsd: int):
    image_dir, mask_dir = write_dataset(root, count, size)
    engine = DatasetEngine(None, None)
    return engine.assign_splits(engine.build_manifest(image_dir, mask_dir, gsd), seed=0)


class TestHarmonizeCounts(unittest.TestCase):

    def setUp(self) -> None:
        self.engine = HarmonizeEngine(None, None)
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def test_factor_nine(self):
        # 16 px at 50 cm -> 40 px at 20 cm -> 3 x 3 patches of 16 px
        manifest = build(self.root.joinpath("P50"), 224, 16, 50)
        result = self.engine.harmonize(manifest, 20, self.root.joinpath("out"), patch=16, workers=4)

        self.assertEqual(result.name, "P50to20")
        self.assertEqual(len(result), 2016)
        self.assertEqual(result.split_counts(), {Split.TRAIN: 1206, Split.VAL: 207, Split.TEST: 603})
        self.assertEqual(result.gsd_cm, 20)
        self.assertEqual([d["op"] for d in result.lineage[-2:]], ["resize", "tile"])

        parents = manifest.entry_map()
        for entry in result:
            self.assertEqual(entry.id, f"{entry.parent_id}_p{entry.patch_index}")
            self.assertIs(entry.split, parents[entry.parent_id].split)

    def test_plan_matches(self):
        manifest = build(self.root.joinpath("P50"), 10, 16, 50)
        grid, counts = self.engine.plan(manifest, 20, 16, 3, 3)
        result = self.engine.harmonize(manifest, 20, self.root.joinpath("out"), patch=16)

        self.assertEqual(grid.x_offsets, (0, 12, 24))
        self.assertEqual(counts["entries"], len(result))
        self.assertEqual(counts["train"], result.split_counts()[Split.TRAIN])

    def test_no_whole_pixel_size(self):
        manifest = build(self.root.joinpath("P50"), 3, 16, 50)
        with self.assertRaises(GeometryError):
            self.engine.target_dims(manifest, 30)

    def test_same_gsd_keeps_entries(self):
        manifest = build(self.root.joinpath("P20"), 5, 16, 20)
        result = self.engine.harmonize(manifest, 20, self.root.joinpath("out"), patch=16)
        self.assertEqual([e.id for e in result], [e.id for e in manifest])
        self.assertTrue(all(e.parent_id is None for e in result))
        self.assertEqual(len(result.lineage), len(manifest.lineage) + 1)
        self.assertEqual(result.lineage[-1], {"op": "copy"})


class TestHarmonizePixels(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        cls.root = Path(cls.tmp.name)
        cls.manifest = build(cls.root.joinpath("P50"), 3, 256, 50)

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def setUp(self) -> None:
        self.engine = HarmonizeEngine(None, None)

    def test_lanczos_patches(self):
        result = self.engine.harmonize(self.manifest, 20, self.root.joinpath("lanczos"))
        self.assertEqual(len(result), 27)

        source = self.manifest.entries[0]
        big = resize_image(read_image(source.image_path, 50), 640, 640, FilterKind.LANCZOS3)
        big_mask = resize_mask(read_mask(source.mask_path), 640, 640)
        grid = plan_grid(640, 640, 256, 3, 3)

        for entry in result:
            if entry.parent_id != source.id:
                continue
            x, y = grid.origin(entry.patch_index)
            patch = read_image(entry.image_path, 20)
            self.assertEqual(patch.size, (256, 256))
            self.assertTrue((patch.pixels == big.pixels[y:y + 256, x:x + 256]).all())
            mask = read_mask(entry.mask_path)
            self.assertTrue((mask.classes == big_mask.classes[y:y + 256, x:x + 256]).all())

    def test_identity_enhancer_equals_lanczos(self):
        lanczos = self.engine.harmonize(self.manifest, 20, self.root.joinpath("a"))
        spec = load_enhancer_spec(reference_spec("identity", scale=1, suffix="I"))
        enhanced = self.engine.harmonize(self.manifest, 20, self.root.joinpath("b"), enhancer=spec)

        self.assertEqual(enhanced.name, "P50I")
        self.assertEqual([e.id for e in enhanced], [e.id for e in lanczos])
        self.assertEqual(enhanced.gsd_cm, Fraction(20))
        for a, b in zip(lanczos, enhanced):
            self.assertEqual(Path(a.image_path).read_bytes(), Path(b.image_path).read_bytes())
            self.assertEqual(Path(a.mask_path).read_bytes(), Path(b.mask_path).read_bytes())


if __name__ == '__main__':
    unittest.main()
