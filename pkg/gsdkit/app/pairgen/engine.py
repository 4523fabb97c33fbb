"""
Pair generation over a whole manifest.
"""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from time import perf_counter
from typing import Dict, List, Optional, Tuple

from gsdkit.app.dataset import APP_NAME as DATASET_APP_NAME
from gsdkit.app.dataset.engine import DatasetEngine
from gsdkit.core.engine import BaseEngine, MainEngine
from gsdkit.core.exception import ManifestError
from gsdkit.core.object import DatasetManifest, ManifestEntry, RasterImage
from gsdkit.core.resample import degrade
from gsdkit.core.utility import PathLike, image_size, read_image, write_image
from gsdkit.event import EventEngine
from .base import APP_NAME, PAIR_FOLDER, PairImage, PairSpec, pair_id, split_pair


class PairEngine(BaseEngine):
    """"""

    def __init__(self, main_engine: MainEngine, event_engine: EventEngine):
        """"""
        super().__init__(main_engine, event_engine, APP_NAME)

    def make_pair(self, img: RasterImage, low: int, source_id: str = "") -> PairImage:
        """
        Pair of the image and its degrade(img, low, low) view.
        """
        degraded = degrade(img, low, low)
        return PairImage(left=img, right=degraded, source_id=source_id, low=low)

    def plan_pairs(self, manifest: DatasetManifest, spec: PairSpec) -> Dict[str, int]:
        """"""
        if not manifest.splits_assigned:
            raise ManifestError(f"splits of {manifest.name} are not assigned")
        if manifest.entries:
            spec.check_size(*image_size(manifest.entries[0].image_path))

        factor = len(spec.resolutions)
        counts = {"entries": len(manifest) * factor}
        for split, count in manifest.split_counts().items():
            counts[split.value] = count * factor
        return counts

    def generate_pairs(
        self,
        manifest: DatasetManifest,
        spec: PairSpec,
        out_root: PathLike,
        name: Optional[str] = None,
        workers: int = 1,
    ) -> DatasetManifest:
        """
        One composite per (entry, resolution), written as
        pairs/<id>_r<low>.png. Pair entries keep the source mask and
        inherit the source split.
        """
        start = perf_counter()
        self.plan_pairs(manifest, spec)

        name = name or f"{manifest.name}pairs"
        pair_dir = Path(out_root).joinpath(name, PAIR_FOLDER)

        def process(entry: ManifestEntry) -> List[ManifestEntry]:
            img = read_image(entry.image_path, manifest.gsd_cm)
            pairs = []
            for low in spec.resolutions:
                pair = self.make_pair(img, low, entry.id)
                filepath = pair_dir.joinpath(f"{pair_id(entry.id, low)}.png")
                write_image(pair.composite(), filepath)
                pairs.append(ManifestEntry(
                    id=pair_id(entry.id, low),
                    image_path=str(filepath),
                    mask_path=entry.mask_path,
                    parent_id=entry.id,
                    degrade_to=low,
                ))
            return pairs

        with ThreadPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(process, manifest.entries))

        entries = [entry for outcome in outcomes for entry in outcome]
        dataset_engine = self.get_peer(DATASET_APP_NAME, DatasetEngine)
        result = dataset_engine.derive_manifest(manifest, name, spec.descriptor(), entries)

        self.put_stage(
            "pairs",
            start,
            dataset=name,
            entries=len(result),
            resolutions=len(spec.resolutions),
        )
        return result

    def read_pair(self, entry: ManifestEntry, gsd_cm) -> Tuple[RasterImage, RasterImage]:
        """
        (clean, degraded) views of a stored pair entry.
        """
        return split_pair(read_image(entry.image_path, gsd_cm))
