"""
Defines the enhancer description and the job-file protocol.

An enhancer is any program that reads a job file path from its command
line, writes one PNG per input (same stem) into the job's output_dir and
exits 0 on success. Job file:

```json
{"enhancer": "realesrgan", "scale": 2.5, "prompt": "...", "inputs": ["a.png"], "output_dir": "out"}
```
"""

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple, Union

from gsdkit.core.constant import EnhanceMode
from gsdkit.core.exception import EnhancerSpecError
from gsdkit.core.utility import PathLike, parse_fraction, read_json, write_json

APP_NAME = "EnhanceBridge"

JOB_PLACEHOLDER = "{job_file}"
PYTHON_PLACEHOLDER = "{python}"
JOB_FILENAME = "job.json"


@dataclass(frozen=True)
class EnhancerSpec:
    """
    One external enhancement model and how to call it.
    """

    name: str
    command_template: str
    mode: EnhanceMode = EnhanceMode.WHOLE_IMAGE
    scale: Fraction = Fraction(1)
    tile: Optional[int] = None
    prompt: Optional[str] = None
    timeout: float = 3600
    suffix: str = ""        # dataset name suffix, e.g. "G" for P50G

    def __post_init__(self):
        """"""
        object.__setattr__(self, "scale", parse_fraction(self.scale))
        object.__setattr__(self, "mode", EnhanceMode(self.mode))

        if self.command_template.count(JOB_PLACEHOLDER) != 1:
            raise EnhancerSpecError(
                f"command template of {self.name} must contain {JOB_PLACEHOLDER} exactly once"
            )
        if self.scale <= 0:
            raise EnhancerSpecError(f"scale of {self.name} must be positive")
        if self.timeout <= 0:
            raise EnhancerSpecError(f"timeout of {self.name} must be positive")

        if self.mode is EnhanceMode.TILED:
            if not self.tile or self.tile < 1:
                raise EnhancerSpecError(f"tiled enhancer {self.name} needs a tile size")
            if self.scale < 1:
                raise EnhancerSpecError(f"tiled enhancer {self.name} must not shrink")
            if (self.scale * self.tile).denominator != 1:
                raise EnhancerSpecError(f"tile {self.tile} x scale {self.scale} is not a whole pixel count")
            if self.scale.denominator != 1:
                raise EnhancerSpecError(f"tiled enhancer {self.name} needs an integer scale")

    def descriptor(self, target: Tuple[int, int]) -> dict:
        """
        Lineage record of a run.
        """
        data = {
            "op": "enhance",
            "enhancer": self.name,
            "mode": self.mode.value,
            "scale": scale_to_json(self.scale),
            "target": list(target),
        }
        if self.mode is EnhanceMode.TILED:
            data["tile"] = self.tile
        if self.prompt:
            data["prompt"] = self.prompt
        return data


@dataclass
class EnhanceJob:
    """
    One invocation of an enhancer over a batch of files.
    """

    enhancer: str
    inputs: List[Path]
    output_dir: Path
    scale: Fraction
    expected_out_dims: Tuple[int, int]
    prompt: Optional[str] = None
    ids: List[str] = field(default_factory=list)     # entry id of every input

    def to_dict(self) -> dict:
        data = {
            "enhancer": self.enhancer,
            "scale": scale_to_json(self.scale),
            "inputs": [str(path) for path in self.inputs],
            "output_dir": str(self.output_dir),
        }
        if self.prompt is not None:
            data["prompt"] = self.prompt
        return data

    def write(self, filepath: PathLike) -> Path:
        filepath = Path(filepath)
        write_json(filepath, self.to_dict())
        return filepath


def scale_to_json(scale: Fraction) -> Union[int, float]:
    """
    Enhancers expect a plain number.
    """
    if scale.denominator == 1:
        return scale.numerator
    return float(scale)


def load_enhancer_spec(source: Union[PathLike, dict]) -> EnhancerSpec:
    """
    Build a spec from a json file or an already parsed dict:
    {"name", "command", "mode", "scale", "tile", "prompt", "timeout", "suffix"}.
    """
    data = source if isinstance(source, dict) else read_json(source)
    if not isinstance(data, dict):
        raise EnhancerSpecError("enhancer spec must be a json object", path=str(source))

    try:
        name = data["name"]
        command = data["command"]
        for key, value in (("name", name), ("command", command)):
            if not isinstance(value, str) or not value:
                raise EnhancerSpecError(f"enhancer spec field {key} must be a non-empty string")

        tile = data.get("tile")
        if tile is not None:
            tile = _whole_number(tile, "tile")
        prompt = data.get("prompt")
        if prompt is not None and not isinstance(prompt, str):
            raise EnhancerSpecError("enhancer spec field prompt must be a string")
        suffix = data.get("suffix", name)
        if not isinstance(suffix, str):
            raise EnhancerSpecError("enhancer spec field suffix must be a string")

        return EnhancerSpec(
            name=name,
            command_template=command,
            mode=EnhanceMode(data.get("mode", EnhanceMode.WHOLE_IMAGE.value)),
            scale=parse_fraction(data.get("scale", 1)),
            tile=tile,
            prompt=prompt,
            timeout=float(data.get("timeout", 3600)),
            suffix=suffix,
        )
    except (KeyError, ValueError, TypeError, AttributeError, ZeroDivisionError) as e:
        raise EnhancerSpecError(f"malformed enhancer spec: {e!r}") from e


def _whole_number(value, key: str) -> int:
    """
    Accepts 128 and "128", rejects 12.5 and booleans.
    """
    if isinstance(value, bool):
        raise EnhancerSpecError(f"enhancer spec field {key} must be an integer")
    number = parse_fraction(value)
    if number.denominator != 1:
        raise EnhancerSpecError(f"enhancer spec field {key} must be an integer")
    return int(number)
