"""Resolved run configuration: presets, YAML files and command-line flags."""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from odp.core.config import solver_section
from odp.core.errors import ConfigurationError
from odp.geometry.params import ProblemParams, first_error_message
from odp.geometry.symmetry import SymmetryGroup, group_from_spec

logger = logging.getLogger(__name__)

PRESETS = ("reference", "quick")


class RunConfig(BaseModel):
    """Flat options shared by all subcommands."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    d: int = 2
    p: float = 3.0
    k: float = 0.05
    lam: Optional[float] = Field(default=None, alias="lambda")
    group: str = "dihedral:2"
    n_r: int = Field(default=2000, ge=4)
    n_theta: int = Field(default=256, ge=8)
    n_exterior: int = Field(default=8000, ge=4)
    r_max: Optional[float] = None
    lambda0: Optional[float] = None
    lambda1: Optional[float] = None
    amplitudes: List[float] = Field(default_factory=lambda: [1e-3, 2e-3, 4e-3, 8e-3])
    eps_list: List[float] = Field(default_factory=lambda: [1e-2, 5e-3, 2.5e-3])
    k_list: List[float] = Field(default_factory=lambda: [0.2, 0.1, 0.05, 0.025])
    modes: List[int] = Field(default_factory=lambda: [1, 2])
    n_modes: int = Field(default=8, ge=1)
    n_jobs: Optional[int] = None
    preset: str = "reference"

    @model_validator(mode="after")
    def _check(self) -> "RunConfig":
        try:
            ProblemParams.create(self.d, self.p, self.k, self.lam or 1.0)
            group = group_from_spec(self.group, self.d)
        except ConfigurationError as e:
            raise ValueError(str(e)) from e
        if self.group.startswith("dihedral") and self.n_theta % (4 * group.first_degree):
            raise ValueError(f"n_theta={self.n_theta} must be a multiple of 4n={4 * group.first_degree}")
        if (self.lambda0 is None) != (self.lambda1 is None):
            raise ValueError("lambda0 and lambda1 must be given together")
        if self.lambda0 is not None and not self.lambda0 < self.lambda1:
            raise ValueError(f"Window ({self.lambda0}, {self.lambda1}) is empty")
        if self.preset not in PRESETS:
            raise ValueError(f"Unknown preset {self.preset!r} (use {', '.join(PRESETS)})")
        return self

    @classmethod
    def build(cls, **values: Any) -> "RunConfig":
        """Validate values, raising ConfigurationError with the violated rule."""
        try:
            return cls.model_validate(values)
        except ValidationError as e:
            raise ConfigurationError(f"Invalid run configuration: {first_error_message(e)}") from e

    @classmethod
    def from_preset(cls, name: str) -> "RunConfig":
        if name not in PRESETS:
            raise ConfigurationError(f"Unknown preset {name!r} (use {', '.join(PRESETS)})")
        values = solver_section(name)
        values["preset"] = name
        return cls.build(**values)

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"Config file not found: {path}")
        with open(path, "r") as f:
            values = yaml.safe_load(f) or {}
        if not isinstance(values, dict):
            raise ConfigurationError(f"{path} must hold a mapping")
        return cls.build(**values)

    def merged(self, overrides: Dict[str, Any]) -> "RunConfig":
        """Copy with the non-None overrides applied and validated."""
        values = self.model_dump(by_alias=True)
        values.update({key: value for key, value in overrides.items() if value is not None})
        return RunConfig.build(**values)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.model_dump(by_alias=True), sort_keys=True, default_flow_style=None)

    def save(self, path: str) -> str:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            f.write(self.to_yaml())
        logger.info(f"Saved run configuration to {path}")
        return str(path)

    @property
    def params(self) -> ProblemParams:
        return ProblemParams.create(self.d, self.p, self.k, self.lam or 1.0)

    @property
    def symmetry(self) -> SymmetryGroup:
        return group_from_spec(self.group, self.d)

    @property
    def window(self) -> Optional[tuple]:
        return None if self.lambda0 is None else (self.lambda0, self.lambda1)
