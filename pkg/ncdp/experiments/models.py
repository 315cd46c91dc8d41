"""
Experiment configuration and result models.
"""

import hashlib
import json
from typing import Any, Dict, List, Literal, Mapping, NamedTuple, Optional, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ncdp.config import DEFAULT_MASTER_SEED, DEFAULT_MAX_FREQ_OFFSET
from ncdp.exceptions import ConfigError

RESULT_COLUMNS = ["experiment", "series", "sweep", "x", "metric", "value", "stderr", "trials"]

# Short names accepted in config files and --set overrides.
KEY_ALIASES = {
    "S": "slots",
    "n": "field_bits",
    "B": "backlog",
    "G": "loads",
    "load": "loads",
    "ebn0": "ebn0_db",
    "esn0": "esn0_db",
    "k": "collision_sizes",
    "strategy": "strategies",
    "scheme": "schemes",
    "seed": "master_seed",
    "N_iter": "max_iterations",
    "delta_t_max": "dt_max",
    "alpha": "rolloff",
    "beta": "em_relaxation",
}


class Measurement(NamedTuple):
    """One metric of one sweep point."""
    metric: str
    value: float
    stderr: float = 0.0
    trials: int = 0


class ExecutionOptions(BaseModel):
    """Runtime controls that do NOT affect the results."""
    workers: int = Field(1, ge=1)
    progress: bool = True


def _split(v: Any) -> Any:
    if isinstance(v, str):
        return [p.strip() for p in v.split(",") if p.strip()]
    if isinstance(v, (int, float)):
        return [v]
    return v


def canonical_key(key: str) -> str:
    key = key.strip()
    return KEY_ALIASES.get(key, key)


class ExperimentConfig(BaseModel):
    """
    One experiment run: which experiment, its parameter overrides and the
    master seed. Grid-valued keys accept comma-separated strings.

    Keys left unset fall back to the experiment's own defaults, then to the
    field defaults below.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    experiment: str
    master_seed: int = Field(DEFAULT_MASTER_SEED, ge=0, lt=2 ** 64)

    # MAC
    slots: int = Field(150, ge=1, description="S")
    field_bits: int = Field(8, ge=1, le=16, description="n")
    p: Optional[float] = Field(None, ge=0.0, le=1.0)
    d: Optional[int] = Field(None, ge=1)
    backlog: int = Field(50, ge=1, description="B")
    loads: Tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1)
    schemes: Tuple[str, ...] = ("ncdp",)
    decoder: Literal["elimination", "full-rank"] = "elimination"
    preamble_collisions: bool = False
    preamble_limit: bool = True
    max_iterations: int = Field(20, ge=1)
    ideal_phy: bool = True
    frames: Optional[int] = Field(None, ge=1)

    # PHY
    ebn0_db: Optional[Tuple[float, ...]] = None
    esn0_db: Optional[Tuple[float, ...]] = None
    collision_sizes: Tuple[int, ...] = (1, 2, 3)
    strategies: Tuple[str, ...] = ("ideal", "md", "ml", "ms", "us", "ec")
    dt_max: float = Field(0.25, ge=0.0)
    csi: Literal["perfect", "estimated"] = "perfect"
    rolloff: float = Field(0.35, ge=0.0, le=1.0)
    span: int = Field(12, ge=2)
    oversampling: int = Field(8, ge=1)
    amplitude_spread_db: float = Field(0.0, ge=0.0)
    max_freq_offset: float = Field(DEFAULT_MAX_FREQ_OFFSET, ge=0.0)
    em_iterations: int = Field(6, ge=1)
    em_restarts: int = Field(2, ge=1)
    em_relaxation: float = Field(0.8, gt=0.0, le=1.0)
    trials: Optional[int] = Field(None, ge=1)

    execution: ExecutionOptions = Field(default_factory=ExecutionOptions, exclude=True)

    @field_validator("loads", "schemes", "ebn0_db", "esn0_db", "collision_sizes", "strategies", mode="before")
    @classmethod
    def split_lists(cls, v):
        return _split(v)

    @field_validator("strategies", "schemes")
    @classmethod
    def lower_names(cls, v):
        return tuple(s.lower() for s in v)

    @field_validator("loads")
    @classmethod
    def validate_loads(cls, v):
        if not v:
            raise ValueError("load grid is empty")
        if any(g < 0 for g in v):
            raise ValueError("loads must be non-negative")
        return v

    @field_validator("collision_sizes")
    @classmethod
    def validate_collision_sizes(cls, v):
        if any(k < 1 for k in v):
            raise ValueError("collision sizes must be >= 1")
        return v

    @model_validator(mode="after")
    def validate_experiment_name(self) -> "ExperimentConfig":
        if not self.experiment.strip():
            raise ValueError("experiment name is required")
        return self

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any], execution: Optional[ExecutionOptions] = None) -> "ExperimentConfig":
        """Build from loosely-typed key/value pairs, mapping validation errors to ConfigError."""
        data = {canonical_key(k): v for k, v in values.items()}
        if execution is not None:
            data["execution"] = execution
        try:
            return cls(**data)
        except ValidationError as e:
            first = e.errors()[0]
            location = ".".join(str(part) for part in first.get("loc", ())) or "config"
            raise ConfigError(first.get("msg", str(e)), field=location) from e

    @property
    def fingerprint(self) -> str:
        """SHA-256 of everything that shapes the results."""
        canonical = json.dumps(self.model_dump(mode="json", exclude={"execution"}), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_defaults(self, defaults: Mapping[str, Any]) -> "ExperimentConfig":
        """Apply ``defaults`` to the keys the user did not set."""
        missing = {k: v for k, v in defaults.items() if k not in self.model_fields_set}
        if not missing:
            return self
        data = self.model_dump(exclude={"execution"}, exclude_unset=True)
        data.update(missing)
        return ExperimentConfig.from_mapping(data, self.execution)


class ResultRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    experiment: str
    series: str
    sweep: str
    x: float
    metric: str
    value: float
    stderr: float = 0.0
    trials: int = 0


class ResultMetadata(BaseModel):
    """
    Provenance of an experiment result. Every result carries one.
    """
    fingerprint: str
    master_seed: int
    execution_time_ms: float
    points: int
    workers: int
    engine_version: str


class ExperimentResult(BaseModel):
    rows: List[ResultRow]
    meta: ResultMetadata
    output: Optional[str] = None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump() for row in self.rows], columns=RESULT_COLUMNS)

    def series(self, name: str, metric: str) -> Dict[float, float]:
        """x -> value for one series and metric."""
        return {row.x: row.value for row in self.rows if row.series == name and row.metric == metric}

    def stderr(self, name: str, metric: str) -> Dict[float, float]:
        return {row.x: row.stderr for row in self.rows if row.series == name and row.metric == metric}
