"""
Manifest file format and split arithmetic.

A manifest is one UTF-8 json document:

```json
{
  "name": "P20",
  "gsd_cm": 20,
  "lineage": [{"op": "source", "gsd_cm": 20}],
  "entries": [
    {"id": "0001", "image_path": "images/0001.png", "mask_path": "masks/0001.png", "split": "train"}
  ]
}
```

File references are stored relative to the manifest's own folder.
"""

import os
from pathlib import Path
from typing import Dict

from gsdkit.core.constant import Split
from gsdkit.core.exception import ManifestError
from gsdkit.core.object import DatasetManifest, ManifestEntry
from gsdkit.core.utility import PathLike, fraction_to_json, parse_fraction, read_json, write_json

APP_NAME = "Dataset"

MANIFEST_FILENAME = "manifest.json"

TRAIN_SHARE = 6     # tenths
TEST_SHARE = 3


def split_sizes(n: int) -> Dict[Split, int]:
    """
    train = round(0.6 n), test = round(0.3 n) half-up, val takes the rest.
    """
    train = (TRAIN_SHARE * n + 5) // 10
    test = (TEST_SHARE * n + 5) // 10
    return {Split.TRAIN: train, Split.VAL: n - train - test, Split.TEST: test}


def _relative(path: str, root: Path) -> str:
    """"""
    return Path(os.path.relpath(path, root)).as_posix()


def manifest_to_dict(manifest: DatasetManifest, root: PathLike) -> dict:
    """"""
    root = Path(root)
    entries = []
    for entry in manifest.entries:
        data = {
            "id": entry.id,
            "image_path": _relative(entry.image_path, root),
            "mask_path": _relative(entry.mask_path, root),
            "split": entry.split.value if entry.split else None,
        }
        if entry.parent_id is not None:
            data["parent_id"] = entry.parent_id
        if entry.patch_index is not None:
            data["patch_index"] = entry.patch_index
        if entry.degrade_to is not None:
            data["degrade_to"] = entry.degrade_to
        entries.append(data)

    return {
        "name": manifest.name,
        "gsd_cm": fraction_to_json(manifest.gsd_cm),
        "lineage": list(manifest.lineage),
        "entries": entries,
    }


def manifest_from_dict(data: dict, root: PathLike) -> DatasetManifest:
    """"""
    root = Path(root)
    try:
        entries = [
            ManifestEntry(
                id=item["id"],
                image_path=str(root.joinpath(item["image_path"]).resolve()),
                mask_path=str(root.joinpath(item["mask_path"]).resolve()),
                split=Split(item["split"]) if item.get("split") else None,
                parent_id=item.get("parent_id"),
                patch_index=item.get("patch_index"),
                degrade_to=item.get("degrade_to"),
            )
            for item in data["entries"]
        ]
        return DatasetManifest(
            name=data["name"],
            gsd_cm=parse_fraction(data["gsd_cm"]),
            entries=entries,
            lineage=data.get("lineage", []),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ManifestError(f"malformed manifest: {e!r}") from e


def save_manifest(manifest: DatasetManifest, filepath: PathLike) -> Path:
    """
    Write manifest json; paths are made relative to its folder.
    """
    filepath = Path(filepath)
    write_json(filepath, manifest_to_dict(manifest, filepath.parent.resolve()))
    return filepath


def load_manifest(filepath: PathLike) -> DatasetManifest:
    """"""
    filepath = Path(filepath)
    return manifest_from_dict(read_json(filepath), filepath.parent.resolve())
