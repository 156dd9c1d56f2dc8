"""
Experiment configuration.

Configurations are JSON documents validated with pydantic. Power budgets
carry an explicit unit so a file can never be ambiguous about dB versus
linear scale.
"""

import json
from pathlib import Path
from typing import List, Literal, Optional, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    computed_field,
    field_validator,
    model_validator,
)

from ..errors import ConfigError

MAX_SEED = 2**64 - 1


class DcConfig(BaseModel):
    """Stopping rules for the DC iteration and its inner barrier solver."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    epsilon: float = Field(1e-6, gt=0)
    max_dc_iters: int = Field(100, ge=1)
    t0: float = Field(1.0, gt=0)
    mu: float = Field(10.0, gt=1)
    gap: float = Field(1e-9, gt=0)
    newton_tol: float = Field(1e-9, gt=0)
    max_newton_steps: int = Field(200, ge=1)
    grid_points: int = Field(400, ge=2)


class PowerSpec(BaseModel):
    """Total transmit power with its unit."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    value: float
    unit: Literal["dB", "linear"] = "dB"

    @model_validator(mode="after")
    def _check_positive(self) -> "PowerSpec":
        if self.unit == "linear" and not self.value > 0:
            raise ValueError("linear power must be positive")
        return self

    @property
    def linear(self) -> float:
        if self.unit == "dB":
            return float(10.0 ** (self.value / 10.0))
        return float(self.value)


# [re, im] pairs, row-major
ComplexRows = List[List[List[float]]]


class InlineChannels(BaseModel):
    """Channel matrices embedded directly in the configuration."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    h1: ComplexRows
    h2: ComplexRows

    @field_validator("h1", "h2")
    @classmethod
    def _check_pairs(cls, rows: ComplexRows) -> ComplexRows:
        if not rows or not rows[0]:
            raise ValueError("channel matrix must be non-empty")
        width = len(rows[0])
        for row in rows:
            if len(row) != width:
                raise ValueError("channel matrix rows must have equal length")
            for entry in row:
                if len(entry) != 2:
                    raise ValueError("complex entries must be [re, im] pairs")
        return rows


class ExperimentConfig(BaseModel):
    """A full region experiment: dimensions, power, sweep grid and seeds."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    nt: int = Field(..., ge=1)
    nb: int = Field(..., ge=1)
    ne: int = Field(..., ge=1)
    power: PowerSpec
    delta: float = Field(0.1, gt=0)
    dc: DcConfig = DcConfig()
    seed: int = Field(0, ge=0, le=MAX_SEED)
    trials: int = Field(1, ge=1)
    channel_source: Union[Literal["generated"], Path] = "generated"
    channels: Optional[InlineChannels] = None
    output_dir: Path = Path("results")
    baseline: bool = True
    grid_reference: bool = False
    reference_grid: int = Field(100, ge=1)
    workers: int = Field(1, ge=1)
    verify_removals: bool = False

    @model_validator(mode="after")
    def _check_channels(self) -> "ExperimentConfig":
        if self.channels is not None:
            if len(self.channels.h1) != self.nb or len(self.channels.h2) != self.ne:
                raise ValueError("inline channel row counts must equal nb and ne")
            widths = {len(self.channels.h1[0]), len(self.channels.h2[0])}
            if widths != {self.nt}:
                raise ValueError("inline channel column counts must equal nt")
        return self

    @computed_field
    @property
    def power_linear(self) -> float:
        """Total power budget on a linear scale; written alongside the configuration."""
        return self.power.linear


def _describe_validation_error(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        field = ".".join(str(part) for part in err["loc"]) or "<root>"
        lines.append(f"{field}: {err['msg']}")
    return "; ".join(lines)


def parse_config(data: dict) -> ExperimentConfig:
    """
    Validate an already-decoded configuration mapping.

    Raises:
        ConfigError: With the offending field names in the message
    """
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"Invalid configuration: {_describe_validation_error(exc)}") from exc


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Load and validate an experiment configuration file.

    Args:
        path: Path to a JSON configuration

    Returns:
        Validated ExperimentConfig

    Raises:
        ConfigError: If the file is missing, is not valid JSON, or fails validation
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Configuration file not found: {path}")

    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"Malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc

    if not isinstance(data, dict):
        raise ConfigError(f"Configuration in {path} must be a JSON object")
    return parse_config(data)
