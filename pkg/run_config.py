"""
Run configuration: one JSON file plus command-line overrides (flags win).
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, fields
from typing import List, Optional

import config
from analysis.ols import AnalyzerSpec
from core.exceptions import ConfigError
from core.results import Method
from extractors.json_extractor import extract_config_from_json
from imputation.missing_value_handler import ImputerSpec
from simlab.battery import POINT_CHOICES, MethodSpec
from utils import config_hash

logger = logging.getLogger(__name__)

COMMANDS = ("analyze", "simulate", "pool")
FORMATS = ("csv", "json")
DEFAULT_M = 10
DEFAULT_B = 200

# Fields that change where or how fast output is written, not what it holds
UNHASHED_FIELDS = ("out", "threads", "grid_out", "db", "log_level")


def _as_int(value, name):
    if value is None:
        return None
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be an integer, got {value!r}") from None


@dataclass
class RunConfig:
    """Everything one CLI invocation needs."""

    command: str
    data_path: Optional[str] = None
    scenario: Optional[str] = None
    grid_path: Optional[str] = None
    imputer: Optional[dict] = None
    analyzer: Optional[dict] = None
    method: Optional[str] = None
    battery: Optional[List[dict]] = None
    m: Optional[int] = None
    b: Optional[int] = None
    alpha: float = config.DEFAULT_ALPHA
    seed: Optional[int] = None
    nsim: Optional[int] = None
    point: str = "grand"
    out: Optional[str] = None
    format: str = "csv"
    threads: Optional[int] = None
    grid_out: Optional[str] = None
    db: Optional[str] = None
    log_level: str = "INFO"

    @classmethod
    def build(cls, command, config_path=None, **overrides) -> "RunConfig":
        """
        Merge a JSON config file with flag overrides; None means "not given".

        Raises:
            ConfigError: unknown keys, missing required fields or bad values
        """
        values = {}
        if config_path:
            values.update(extract_config_from_json(config_path))
        known = {f.name for f in fields(cls)} - {"command"}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {unknown}")
        values.update({k: v for k, v in overrides.items() if v is not None})

        run = cls(command=command, **values)
        run.validate()
        return run

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"Unknown command '{self.command}'")
        if self.format not in FORMATS:
            raise ConfigError(f"Output format must be one of {FORMATS}, got '{self.format}'")
        if self.point not in POINT_CHOICES:
            raise ConfigError(f"Point estimate must be one of {POINT_CHOICES}, got '{self.point}'")
        try:
            self.alpha = float(self.alpha)
        except (TypeError, ValueError):
            raise ConfigError(f"alpha must be a number, got {self.alpha!r}") from None
        if not 0.0 < self.alpha < 0.5:
            raise ConfigError(f"alpha must lie in (0, 0.5), got {self.alpha}")
        for name in ("m", "b", "seed", "nsim", "threads"):
            setattr(self, name, _as_int(getattr(self, name), name))
        if self.seed is not None and self.seed < 0:
            raise ConfigError(f"Seed must be nonnegative, got {self.seed}")
        if self.threads is not None and self.threads == 0:
            raise ConfigError("--threads must be nonzero")
        if not self.out:
            raise ConfigError(f"'{self.command}' needs an output path (--out)")

        required = {
            "analyze": ("data_path", "imputer", "analyzer", "method"),
            "simulate": ("scenario", "nsim"),
            "pool": ("grid_path", "method"),
        }[self.command]
        missing = [name for name in required if getattr(self, name) in (None, "")]
        if missing:
            raise ConfigError(f"'{self.command}' needs {missing}")

        if self.method is not None:
            Method.parse(self.method)
        if self.command == "simulate" and self.nsim < 1:
            raise ConfigError(f"nsim must be at least 1, got {self.nsim}")

    @property
    def n_jobs(self) -> int:
        """joblib workers; all cores unless --threads is given."""
        return -1 if self.threads is None else int(self.threads)

    def imputer_spec(self) -> ImputerSpec:
        return ImputerSpec.from_dict(self.imputer)

    def analyzer_spec(self) -> AnalyzerSpec:
        return AnalyzerSpec.from_dict(self.analyzer)

    def method_spec(self) -> MethodSpec:
        """The single method of an analyze run, with default M and B filled in."""
        method = Method.parse(self.method)
        m = DEFAULT_M if self.m is None else int(self.m)
        b = 0 if method is Method.MI_RUBIN else (DEFAULT_B if self.b is None else int(self.b))
        return MethodSpec(method, m, b)

    def method_battery(self) -> Optional[List[MethodSpec]]:
        """Battery of a simulate run from the config file or --method; None for the default."""
        if self.battery is not None:
            return [MethodSpec.from_dict(entry) for entry in self.battery]
        if self.method is not None:
            return [self.method_spec()]
        return None

    def to_dict(self) -> dict:
        return asdict(self)

    def hash(self) -> str:
        """SHA-256 of the configuration without output locations and thread count."""
        values = {k: v for k, v in self.to_dict().items() if k not in UNHASHED_FIELDS}
        return config_hash(values)
