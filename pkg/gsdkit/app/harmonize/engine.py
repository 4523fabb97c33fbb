"""
GSD harmonization pipelines.

Bring a dataset to a target ground sample distance, either by Lanczos
resampling or through an external enhancer, then cut the enlarged images
into a patch grid (640 px -> 3 x 3 patches of 256 px for 50 cm -> 20 cm).
"""

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from time import perf_counter
from typing import Dict, List, Optional, Tuple

from gsdkit.app.dataset import APP_NAME as DATASET_APP_NAME
from gsdkit.app.dataset.engine import DatasetEngine
from gsdkit.app.enhance_bridge import APP_NAME as BRIDGE_APP_NAME
from gsdkit.app.enhance_bridge import EnhancerSpec
from gsdkit.app.enhance_bridge.engine import EnhanceEngine
from gsdkit.core.constant import SPLIT_ORDER, FilterKind
from gsdkit.core.engine import BaseEngine, MainEngine
from gsdkit.core.exception import GeometryError
from gsdkit.core.object import DatasetManifest, ManifestEntry
from gsdkit.core.resample import output_gsd, resize_descriptor, resize_image, resize_mask
from gsdkit.core.tiler import TileGrid, extract_patches, plan_grid
from gsdkit.core.utility import (
    PathLike,
    fraction_to_json,
    image_size,
    parse_fraction,
    read_image,
    read_mask,
    write_image,
    write_mask,
)
from gsdkit.event import EventEngine

APP_NAME = "Harmonize"


class HarmonizeEngine(BaseEngine):
    """"""

    def __init__(self, main_engine: MainEngine, event_engine: EventEngine):
        """"""
        super().__init__(main_engine, event_engine, APP_NAME)

    def target_dims(self, manifest: DatasetManifest, target_gsd: Fraction) -> Tuple[int, int]:
        """
        Pixel size that gives the dataset the target gsd.
        """
        if not manifest.entries:
            raise GeometryError(f"{manifest.name} has no entries")

        width, height = image_size(manifest.entries[0].image_path)
        target_gsd = parse_fraction(target_gsd)
        target_w = Fraction(width) * manifest.gsd_cm / target_gsd
        target_h = Fraction(height) * manifest.gsd_cm / target_gsd
        if target_w.denominator != 1 or target_h.denominator != 1:
            raise GeometryError(
                f"{width}x{height} at {manifest.gsd_cm} cm has no whole-pixel size at {target_gsd} cm"
            )
        return int(target_w), int(target_h)

    def plan(
        self,
        manifest: DatasetManifest,
        target_gsd: Fraction,
        patch: int,
        rows: int,
        cols: int,
    ) -> Tuple[Optional[TileGrid], Dict[str, int]]:
        """
        Grid to use (None when no resize is needed) and the planned counts.
        """
        width, height = image_size(manifest.entries[0].image_path)
        target_w, target_h = self.target_dims(manifest, target_gsd)

        grid = None
        factor = 1
        if (target_w, target_h) != (width, height):
            grid = plan_grid(target_w, target_h, patch, rows, cols)
            factor = grid.count

        counts = {"entries": len(manifest) * factor}
        for split, count in manifest.split_counts().items():
            counts[split.value] = count * factor
        return grid, counts

    def harmonize(
        self,
        manifest: DatasetManifest,
        target_gsd: Fraction,
        out_root: PathLike,
        patch: int = 256,
        rows: int = 3,
        cols: int = 3,
        name: Optional[str] = None,
        enhancer: Optional[EnhancerSpec] = None,
        workers: int = 1,
        keep_going: bool = False,
        batch_size: int = 0,
    ) -> DatasetManifest:
        """
        Resize (or enhance) to target_gsd, then tile. When the dataset is
        already at the target size the tiling step is skipped and entries
        stay one-to-one.
        """
        start = perf_counter()
        target_gsd = parse_fraction(target_gsd)
        grid, _ = self.plan(manifest, target_gsd, patch, rows, cols)
        target = self.target_dims(manifest, target_gsd)

        if name is None:
            if enhancer:
                name = f"{manifest.name}{enhancer.suffix}"
            else:
                name = f"{manifest.name}to{fraction_to_json(target_gsd)}"
        out_dir = Path(out_root).joinpath(name)

        if enhancer:
            bridge = self.get_peer(BRIDGE_APP_NAME, EnhanceEngine)
            upsampled = bridge.run_enhancer(
                manifest,
                enhancer,
                target,
                out_root=out_dir,
                name="upsampled",
                workers=workers,
                keep_going=keep_going,
                batch_size=batch_size,
            )
            if grid is None:
                result = self.rename(upsampled, name)
            else:
                result = self.tile_manifest(upsampled, grid, out_dir, name, None, workers)
        else:
            resize_to = target if grid else None
            result = self.tile_manifest(manifest, grid, out_dir, name, resize_to, workers)

        self.put_stage("harmonize", start, dataset=name, entries=len(result))
        return result

    def rename(self, manifest: DatasetManifest, name: str) -> DatasetManifest:
        """"""
        return DatasetManifest(name=name, gsd_cm=manifest.gsd_cm, entries=manifest.entries, lineage=manifest.lineage)

    def tile_manifest(
        self,
        manifest: DatasetManifest,
        grid: Optional[TileGrid],
        out_dir: Path,
        name: str,
        resize_to: Optional[Tuple[int, int]],
        workers: int,
    ) -> DatasetManifest:
        """
        Optionally Lanczos-resize every image (nearest for masks) to
        resize_to, then cut image and mask into the grid. Patch k of
        entry e becomes entry "<e>_p<k>".
        """
        images_dir = out_dir.joinpath("images")
        masks_dir = out_dir.joinpath("masks")
        transforms = []
        gsd_cm = manifest.gsd_cm

        if resize_to:
            first = read_image(manifest.entries[0].image_path, manifest.gsd_cm)
            transforms.append(resize_descriptor(first, resize_to[0], resize_to[1], FilterKind.LANCZOS3))
            gsd_cm = output_gsd(manifest.gsd_cm, first.width, resize_to[0])
        if grid:
            transforms.append(grid.descriptor())
        if not transforms:
            transforms.append({"op": "copy"})

        def process(entry: ManifestEntry) -> List[ManifestEntry]:
            img = read_image(entry.image_path, manifest.gsd_cm)
            mask = read_mask(entry.mask_path)
            if resize_to:
                img = resize_image(img, resize_to[0], resize_to[1], FilterKind.LANCZOS3)
                mask = resize_mask(mask, resize_to[0], resize_to[1])

            if grid is None:
                image_path = images_dir.joinpath(f"{entry.id}.png")
                mask_path = masks_dir.joinpath(f"{entry.id}.png")
                write_image(img, image_path)
                write_mask(mask, mask_path)
                return [ManifestEntry(id=entry.id, image_path=str(image_path), mask_path=str(mask_path))]

            derived = []
            for patch_img, patch_mask, index in extract_patches(img, mask, grid):
                patch_id = f"{entry.id}_p{index}"
                image_path = images_dir.joinpath(f"{patch_id}.png")
                mask_path = masks_dir.joinpath(f"{patch_id}.png")
                write_image(patch_img, image_path)
                write_mask(patch_mask, mask_path)
                derived.append(ManifestEntry(
                    id=patch_id,
                    image_path=str(image_path),
                    mask_path=str(mask_path),
                    parent_id=entry.id,
                    patch_index=index,
                ))
            return derived

        with ThreadPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(process, manifest.entries))

        entries = [entry for outcome in outcomes for entry in outcome]
        dataset_engine = self.get_peer(DATASET_APP_NAME, DatasetEngine)
        result = dataset_engine.derive_manifest(manifest, name, transforms, entries, gsd_cm=gsd_cm)

        counts = result.split_counts()
        self.write_log(
            f"{name}: {len(result)} entries at {fraction_to_json(gsd_cm)} cm "
            + ", ".join(f"{split.value} {counts[split]}" for split in SPLIT_ORDER)
        )
        return result
