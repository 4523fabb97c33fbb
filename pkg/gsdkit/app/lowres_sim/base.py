"""
Scenario file of the low-resolution study:

```json
{
  "source_manifest": "out/P20/manifest.json",
  "degrade_to": 32,
  "degraded_name": "P20lr",
  "out_root": "out",
  "enhancers": [
    {"spec": "enhancers/pix2pix.json", "output_name": "P20lp"},
    {"spec": "enhancers/realesrgan.json", "output_name": "P20lG"}
  ]
}
```

Relative paths are resolved against the scenario file's folder.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

from gsdkit.app.enhance_bridge import EnhancerSpec, load_enhancer_spec
from gsdkit.core.exception import ConfigError, InvalidDegradeTarget
from gsdkit.core.utility import PathLike, read_json

APP_NAME = "LowResSim"

DEGRADED_SUFFIX = "lr"


@dataclass
class ScenarioSpec:
    """"""

    source_manifest: Path
    degrade_to: int
    enhancers: List[Tuple[EnhancerSpec, str]] = field(default_factory=list)
    degraded_name: Optional[str] = None
    out_root: Optional[Path] = None

    def __post_init__(self):
        """"""
        if isinstance(self.degrade_to, bool) or not isinstance(self.degrade_to, int):
            raise ConfigError(f"degrade_to must be an integer, got {self.degrade_to!r}")
        if self.degrade_to < 1:
            raise InvalidDegradeTarget(f"degrade_to must be positive, got {self.degrade_to}")

        names = self.output_names
        if self.degraded_name is not None and self.degraded_name in names:
            raise ConfigError(f"output name {self.degraded_name} is used twice")
        if len(set(names)) != len(names):
            raise ConfigError(f"output names are not unique: {names}")

    @property
    def output_names(self) -> List[str]:
        return [name for _, name in self.enhancers]

    def all_names(self, source_name: str) -> List[str]:
        """
        Degraded dataset first, then one per enhancer.
        """
        degraded = self.degraded_name or f"{source_name}{DEGRADED_SUFFIX}"
        names = [degraded] + self.output_names
        if len(set(names)) != len(names):
            raise ConfigError(f"output names are not unique: {names}")
        return names


def load_scenario(source: Union[PathLike, dict], root: Optional[PathLike] = None) -> ScenarioSpec:
    """
    Parse a scenario from a json file (root = its folder) or a dict.
    """
    if isinstance(source, dict):
        data = source
        root = Path(root) if root else Path.cwd()
    else:
        data = read_json(source)
        root = Path(source).resolve().parent

    def resolve(value) -> Path:
        path = Path(value)
        return path if path.is_absolute() else root.joinpath(path)

    try:
        enhancers = []
        for item in data.get("enhancers", []):
            spec_source = item["spec"]
            if not isinstance(spec_source, dict):
                spec_source = resolve(spec_source)
            enhancers.append((load_enhancer_spec(spec_source), item["output_name"]))

        return ScenarioSpec(
            source_manifest=resolve(data["source_manifest"]),
            degrade_to=data["degrade_to"],
            enhancers=enhancers,
            degraded_name=data.get("degraded_name"),
            out_root=resolve(data["out_root"]) if data.get("out_root") else None,
        )
    except (KeyError, TypeError) as e:
        raise ConfigError(f"malformed scenario: {e!r}") from e
