"""
Low-resolution study: degrade a dataset in place (same pixel size, lower
effective resolution) and run every enhancer on the degraded copy, back
to the source size.
"""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from time import perf_counter
from typing import Dict, List, Optional

from gsdkit.app.dataset import APP_NAME as DATASET_APP_NAME
from gsdkit.app.dataset import load_manifest, save_manifest
from gsdkit.app.dataset.base import MANIFEST_FILENAME
from gsdkit.app.dataset.engine import DatasetEngine
from gsdkit.app.enhance_bridge import APP_NAME as BRIDGE_APP_NAME
from gsdkit.app.enhance_bridge.engine import EnhanceEngine
from gsdkit.core.engine import BaseEngine, MainEngine
from gsdkit.core.exception import InvalidDegradeTarget, ManifestError
from gsdkit.core.object import DatasetManifest, ManifestEntry
from gsdkit.core.resample import degrade
from gsdkit.core.utility import PathLike, image_size, read_image, read_mask, write_image, write_mask
from gsdkit.event import EventEngine
from .base import APP_NAME, ScenarioSpec


class ScenarioEngine(BaseEngine):
    """"""

    def __init__(self, main_engine: MainEngine, event_engine: EventEngine):
        """"""
        super().__init__(main_engine, event_engine, APP_NAME)

    def load_source(self, spec: ScenarioSpec) -> DatasetManifest:
        """"""
        manifest = load_manifest(spec.source_manifest)
        if not manifest.splits_assigned:
            raise ManifestError(f"splits of {manifest.name} are not assigned")
        if not manifest.entries:
            raise ManifestError(f"{manifest.name} has no entries")

        width, height = image_size(manifest.entries[0].image_path)
        if not (spec.degrade_to < width and spec.degrade_to < height):
            raise InvalidDegradeTarget(
                f"degrade target {spec.degrade_to} does not reduce {width}x{height} images"
            )
        return manifest

    def plan_scenario(self, spec: ScenarioSpec) -> Dict[str, int]:
        """
        Entry count of every output dataset.
        """
        source = self.load_source(spec)
        return {name: len(source) for name in spec.all_names(source.name)}

    def degrade_manifest(
        self,
        manifest: DatasetManifest,
        low: int,
        out_root: PathLike,
        name: str,
        workers: int = 1,
    ) -> DatasetManifest:
        """
        Same ids, same masks, images degraded to low x low and back.
        """
        start = perf_counter()
        out_dir = Path(out_root).joinpath(name)

        def process(entry: ManifestEntry) -> ManifestEntry:
            img = read_image(entry.image_path, manifest.gsd_cm)
            image_path = out_dir.joinpath("images", f"{entry.id}.png")
            mask_path = out_dir.joinpath("masks", f"{entry.id}.png")
            write_image(degrade(img, low, low), image_path)
            write_mask(read_mask(entry.mask_path), mask_path)
            return ManifestEntry(id=entry.id, image_path=str(image_path), mask_path=str(mask_path))

        with ThreadPoolExecutor(max_workers=workers) as executor:
            entries = list(executor.map(process, manifest.entries))

        descriptor = {"op": "degrade", "low": [low, low], "down": "lanczos3", "up": "nearest"}
        dataset_engine = self.get_peer(DATASET_APP_NAME, DatasetEngine)
        result = dataset_engine.derive_manifest(manifest, name, descriptor, entries)

        self.put_stage("degrade", start, dataset=name, entries=len(result), low=low)
        return result

    def run_scenario(
        self,
        spec: ScenarioSpec,
        out_root: Optional[PathLike] = None,
        workers: int = 1,
        keep_going: bool = False,
        batch_size: int = 0,
    ) -> List[DatasetManifest]:
        """
        Degraded dataset plus one enhanced dataset per enhancer. Manifests
        are only written once every stage has succeeded.
        """
        start = perf_counter()
        source = self.load_source(spec)
        names = spec.all_names(source.name)
        out_root = Path(out_root or spec.out_root or spec.source_manifest.parent.parent)

        width, height = image_size(source.entries[0].image_path)
        degraded = self.degrade_manifest(source, spec.degrade_to, out_root, names[0], workers)
        results = [degraded]

        bridge = self.get_peer(BRIDGE_APP_NAME, EnhanceEngine)
        for enhancer, output_name in spec.enhancers:
            results.append(bridge.run_enhancer(
                degraded,
                enhancer,
                (width, height),
                out_root=out_root,
                name=output_name,
                workers=workers,
                keep_going=keep_going,
                batch_size=batch_size,
            ))

        for manifest in results:
            save_manifest(manifest, out_root.joinpath(manifest.name, MANIFEST_FILENAME))

        self.put_stage("scenario", start, source=source.name, manifests=len(results))
        return results
