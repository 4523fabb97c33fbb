"""
Runs external enhancement models through the job-file protocol and turns
their outputs into derived datasets at the requested pixel size.
"""

import logging
import math
import shlex
import shutil
import subprocess
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from time import perf_counter
from typing import Dict, List, Optional, Sequence, Tuple

from gsdkit.app.dataset import APP_NAME as DATASET_APP_NAME
from gsdkit.app.dataset.engine import DatasetEngine
from gsdkit.core.constant import EnhanceMode, FilterKind
from gsdkit.core.engine import BaseEngine, MainEngine
from gsdkit.core.exception import (
    EnhancerFailed,
    EnhancerSpecError,
    EnhancerTimeout,
    GeometryError,
    GsdError,
    ManifestError,
    OutputMissing,
)
from gsdkit.core.object import DatasetManifest, ManifestEntry, RasterImage
from gsdkit.core.resample import ANISOTROPIC_WARNING, is_anisotropic, output_gsd, resize_image, resize_mask
from gsdkit.core.tiler import extract_patches, plan_grid, reassemble
from gsdkit.core.utility import (
    PathLike,
    image_size,
    read_image,
    read_mask,
    write_image,
    write_mask,
)
from gsdkit.event import EventEngine
from .base import APP_NAME, JOB_FILENAME, JOB_PLACEHOLDER, PYTHON_PLACEHOLDER, EnhanceJob, EnhancerSpec

STDERR_EXCERPT = 2000


class EnhanceEngine(BaseEngine):
    """"""

    def __init__(self, main_engine: MainEngine, event_engine: EventEngine):
        """"""
        super().__init__(main_engine, event_engine, APP_NAME)

        self.failures: Dict[str, GsdError] = {}     # entry id: error of the last run

    def build_command(self, spec: EnhancerSpec, job_file: Path) -> List[str]:
        """
        Split the command template and fill in the placeholders.
        """
        args = []
        for token in shlex.split(spec.command_template):
            token = token.replace(JOB_PLACEHOLDER, str(job_file))
            token = token.replace(PYTHON_PLACEHOLDER, sys.executable)
            args.append(token)
        return args

    def run_job(self, job: EnhanceJob, spec: EnhancerSpec, job_dir: Path) -> Dict[str, Path]:
        """
        Invoke the enhancer once and check that every input produced an
        output of the same stem. Returns stem: output path.
        """
        if job.output_dir.exists():
            shutil.rmtree(job.output_dir)
        job.output_dir.mkdir(parents=True)
        job_file = job.write(job_dir.joinpath(JOB_FILENAME))

        args = self.build_command(spec, job_file)
        try:
            result = subprocess.run(
                args,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                timeout=spec.timeout,
            )
        except subprocess.TimeoutExpired as e:
            raise EnhancerTimeout(
                f"{spec.name} did not finish within {spec.timeout}s", path=str(job_file)
            ) from e
        except OSError as e:
            raise EnhancerFailed(f"cannot start {spec.name}: {e}", path=str(job_file)) from e

        if result.returncode != 0:
            stderr = result.stderr.decode("utf-8", errors="replace").strip()
            raise EnhancerFailed(
                f"{spec.name} exited with {result.returncode}: {stderr[-STDERR_EXCERPT:]}",
                path=str(job_file),
            )

        outputs = {}
        for entry_id, input_path in zip(job.ids, job.inputs):
            stem = Path(input_path).stem
            output_path = job.output_dir.joinpath(f"{stem}.png")
            if not output_path.exists():
                raise OutputMissing(f"{spec.name} wrote no output for {stem}", id=entry_id)
            outputs[stem] = output_path
        return outputs

    def tiled_enhance(
        self,
        img: RasterImage,
        spec: EnhancerSpec,
        work_dir: Optional[PathLike] = None,
    ) -> RasterImage:
        """
        Cut the image into tile x tile pieces, enhance every piece and
        reassemble at (width x scale, height x scale).
        """
        if spec.mode is not EnhanceMode.TILED:
            raise EnhancerSpecError(f"{spec.name} is not a tiled enhancer")
        if img.width % spec.tile or img.height % spec.tile:
            raise GeometryError(f"tile {spec.tile} does not divide {img.width}x{img.height}")

        grid = plan_grid(img.width, img.height, spec.tile, img.height // spec.tile, img.width // spec.tile)
        factor = int(spec.scale)
        out_tile = spec.tile * factor

        with tempfile.TemporaryDirectory(dir=work_dir) as tmp:
            tmp = Path(tmp)
            inputs = []
            for patch_img, _, index in extract_patches(img, None, grid):
                path = tmp.joinpath("in", f"tile_{index}.png")
                write_image(patch_img, path)
                inputs.append(path)

            job = EnhanceJob(
                enhancer=spec.name,
                inputs=inputs,
                output_dir=tmp.joinpath("out"),
                scale=spec.scale,
                expected_out_dims=(out_tile, out_tile),
                prompt=spec.prompt,
                ids=[f"tile_{index}" for index in range(grid.count)],
            )
            outputs = self.run_job(job, spec, tmp)

            tile_gsd = img.gsd_cm / spec.scale
            tiles = []
            for index in range(grid.count):
                tile = read_image(outputs[f"tile_{index}"], tile_gsd)
                if tile.size != job.expected_out_dims:
                    raise GeometryError(
                        f"{spec.name} returned a {tile.width}x{tile.height} tile, expected {out_tile}"
                    )
                tiles.append((index, tile))

        return reassemble(tiles, grid.scaled(factor))

    def plan_batches(self, entries: Sequence[ManifestEntry], workers: int, batch_size: int) -> List[list]:
        """"""
        if not batch_size:
            batch_size = max(1, math.ceil(len(entries) / workers))
        return [list(entries[i:i + batch_size]) for i in range(0, len(entries), batch_size)]

    def run_enhancer(
        self,
        manifest: DatasetManifest,
        spec: EnhancerSpec,
        target_dims: Tuple[int, int],
        out_root: PathLike,
        name: Optional[str] = None,
        workers: int = 1,
        keep_going: bool = False,
        batch_size: int = 0,
    ) -> DatasetManifest:
        """
        Enhance every image of a manifest, bring the outputs to
        target_dims (Lanczos) and return the derived manifest. Masks are
        resampled by nearest neighbour to the same size.

        Without keep_going the first failure aborts the run. With it,
        failed entries are left out and listed in self.failures.
        """
        start = perf_counter()
        name = name or f"{manifest.name}{spec.suffix}"
        out_dir = Path(out_root).joinpath(name)
        work_dir = out_dir.joinpath("jobs")
        target_w, target_h = target_dims
        self.failures = {}

        entries = list(manifest.entries)
        if not entries:
            raise ManifestError(f"{manifest.name} has no entries")
        stems = [Path(entry.image_path).stem for entry in entries]
        if len(set(stems)) != len(stems):
            raise ManifestError(f"image file names of {manifest.name} are not unique")

        in_w, in_h = image_size(entries[0].image_path)
        gsd_cm = output_gsd(manifest.gsd_cm, in_w, target_w)
        expected = (round(in_w * spec.scale), round(in_h * spec.scale))

        unexpected = set()     # enhancer output sizes other than the job expected

        def finish(entry: ManifestEntry, enhanced: RasterImage) -> ManifestEntry:
            if enhanced.size != (target_w, target_h):
                enhanced = resize_image(enhanced, target_w, target_h, FilterKind.LANCZOS3)

            image_path = out_dir.joinpath("images", f"{entry.id}.png")
            mask_path = out_dir.joinpath("masks", f"{entry.id}.png")
            write_image(enhanced, image_path)
            write_mask(resize_mask(read_mask(entry.mask_path), target_w, target_h), mask_path)
            return ManifestEntry(id=entry.id, image_path=str(image_path), mask_path=str(mask_path))

        def run_batch(label: str, batch: List[ManifestEntry]) -> List[ManifestEntry]:
            job_dir = work_dir.joinpath(f"job_{label}")
            job = EnhanceJob(
                enhancer=spec.name,
                inputs=[Path(entry.image_path) for entry in batch],
                output_dir=job_dir.joinpath("out"),
                scale=spec.scale,
                expected_out_dims=expected,
                prompt=spec.prompt,
                ids=[entry.id for entry in batch],
            )
            outputs = self.run_job(job, spec, job_dir)

            results = []
            for entry in batch:
                stem = Path(entry.image_path).stem
                enhanced = read_image(outputs[stem], manifest.gsd_cm)
                if enhanced.size != job.expected_out_dims:
                    unexpected.add(enhanced.size)
                enhanced.gsd_cm = output_gsd(manifest.gsd_cm, in_w, enhanced.width)
                results.append(finish(entry, enhanced))
            return results

        def run_tiled(entry: ManifestEntry) -> ManifestEntry:
            work_dir.mkdir(parents=True, exist_ok=True)
            img = read_image(entry.image_path, manifest.gsd_cm)
            return finish(entry, self.tiled_enhance(img, spec, work_dir))

        def run_guarded(label: str, batch: List[ManifestEntry]) -> List[Optional[ManifestEntry]]:
            try:
                if spec.mode is EnhanceMode.TILED:
                    return [run_tiled(entry) for entry in batch]
                return run_batch(label, batch)
            except GsdError as e:
                if not keep_going:
                    raise
                if len(batch) == 1:
                    self.failures[batch[0].id] = e
                    self.write_log(f"{spec.name} failed on {batch[0].id}: {e.message}", logging.WARNING)
                    return [None]

            # Rerun one entry at a time to find out which inputs failed.
            results = []
            for i, entry in enumerate(batch):
                results.extend(run_guarded(f"{label}_{i}", [entry]))
            return results

        if spec.mode is EnhanceMode.TILED:
            batches = [[entry] for entry in entries]
        else:
            batches = self.plan_batches(entries, workers, batch_size)

        work_dir.mkdir(parents=True, exist_ok=True)
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(run_guarded, str(k), batch) for k, batch in enumerate(batches)]
            try:
                outcomes = [future.result() for future in futures]
            except GsdError:
                for future in futures:
                    future.cancel()
                raise

        derived = [entry for outcome in outcomes for entry in outcome if entry is not None]

        descriptor = spec.descriptor((target_w, target_h))
        if is_anisotropic(in_w, in_h, target_w, target_h):
            descriptor["warning"] = ANISOTROPIC_WARNING
        if unexpected:
            descriptor["output_sizes"] = sorted(list(size) for size in unexpected)
            self.write_log(
                f"{spec.name} returned {sorted(unexpected)}, expected {list(expected)}", logging.WARNING
            )
        if self.failures:
            descriptor["failed"] = sorted(self.failures)

        dataset_engine = self.get_peer(DATASET_APP_NAME, DatasetEngine)
        result = dataset_engine.derive_manifest(manifest, name, descriptor, derived, gsd_cm=gsd_cm)

        self.put_stage(
            "enhance",
            start,
            dataset=name,
            enhancer=spec.name,
            entries=len(result),
            failed=len(self.failures),
        )
        return result
