"""
Global setting of gsdkit.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from logging import INFO
from pathlib import Path
from typing import List, Optional

from .exception import ConfigError
from .utility import WORKSPACE_DIR, load_json, parse_fraction, read_json

SETTINGS = {
    "log.active": True,
    "log.level": INFO,
    "log.console": True,
    "log.file": False,

    "seed": 0,
    "workers": 4,
    "target_gsd_cm": 20,

    "grid.patch": 256,
    "grid.rows": 3,
    "grid.cols": 3,

    "pairs.p20": [32, 64, 96, 128, 192],
    "pairs.p50": [16, 32, 64, 96, 128],

    "enhance.timeout": 3600,
    "enhance.batch_size": 0,    # 0: split inputs evenly over the workers

    "eval.split": "test",
    "eval.heatmap": False,
}

# Load global setting from json file.
SETTING_FILENAME = "gsd_setting.json"
SETTINGS.update(load_json(SETTING_FILENAME))


def get_settings(prefix: str = ""):
    prefix_length = len(prefix)
    return {k[prefix_length:]: v for k, v in SETTINGS.items() if k.startswith(prefix)}


@dataclass
class PipelineConfig:
    """
    Everything one CLI run needs, checked before any file is touched.
    """

    workspace: Path = WORKSPACE_DIR
    out_root: Optional[Path] = None
    seed: int = 0
    target_gsd_cm: Fraction = Fraction(20)
    patch: int = 256
    rows: int = 3
    cols: int = 3
    resolutions: List[int] = field(default_factory=list)
    enhancers: List[Path] = field(default_factory=list)
    workers: int = 4
    timeout: float = 3600
    batch_size: int = 0
    keep_going: bool = False
    log_level: int = INFO

    @classmethod
    def from_settings(cls, config_file: Optional[str] = None, **overrides) -> "PipelineConfig":
        """
        SETTINGS first, then the json config file, then explicit overrides
        (None values are ignored).
        """
        values = dict(SETTINGS)
        if config_file:
            values.update(read_json(config_file))

        config = cls(
            seed=int(values["seed"]),
            target_gsd_cm=parse_fraction(values["target_gsd_cm"]),
            patch=int(values["grid.patch"]),
            rows=int(values["grid.rows"]),
            cols=int(values["grid.cols"]),
            workers=int(values["workers"]),
            timeout=float(values["enhance.timeout"]),
            batch_size=int(values["enhance.batch_size"]),
            log_level=values["log.level"],
        )
        if "workspace" in values:
            config.workspace = Path(values["workspace"])

        for key, value in overrides.items():
            if value is None:
                continue
            if not hasattr(config, key):
                raise ConfigError(f"unknown config field {key}")
            setattr(config, key, value)

        config.target_gsd_cm = parse_fraction(config.target_gsd_cm)
        if config.out_root is None:
            config.out_root = Path(config.workspace).joinpath("out")
        config.out_root = Path(config.out_root)
        return config

    def validate(self):
        """
        Fail fast on anything a later stage would reject.
        """
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.patch < 1 or self.rows < 1 or self.cols < 1:
            raise ConfigError(f"invalid grid {self.patch}px {self.rows}x{self.cols}")
        if self.target_gsd_cm <= 0:
            raise ConfigError(f"target gsd must be positive, got {self.target_gsd_cm}")
        if self.timeout <= 0:
            raise ConfigError(f"timeout must be positive, got {self.timeout}")
        if self.batch_size < 0:
            raise ConfigError(f"batch size must be >= 0, got {self.batch_size}")
        if self.resolutions:
            if any(r < 1 for r in self.resolutions):
                raise ConfigError(f"pair resolutions must be positive: {self.resolutions}")
            if any(b <= a for a, b in zip(self.resolutions, self.resolutions[1:])):
                raise ConfigError(f"pair resolutions must be strictly increasing: {self.resolutions}")
        for path in self.enhancers:
            if not Path(path).exists():
                raise ConfigError("enhancer spec not found", path=str(path))
        return self
