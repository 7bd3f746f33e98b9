"""Problem parameters (d, p, k, lambda) with their validity rules."""

import math
from typing import Any, Dict
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from odp.core.errors import ConfigurationError


class ProblemParams(BaseModel):
    """Dimension d, exponent p, curvature k (sphere radius 1/k) and diffusion lambda."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    d: int = Field(ge=2)
    p: float = Field(gt=1.0)
    k: float = Field(gt=0.0)
    lam: float = Field(gt=0.0, alias="lambda")

    @model_validator(mode="after")
    def _check_ranges(self) -> "ProblemParams":
        if self.d >= 3:
            p_crit = (self.d + 2) / (self.d - 2)
            if self.p >= p_crit:
                raise ValueError(
                    f"p={self.p} is not subcritical: need 1 < p < (d+2)/(d-2) = {p_crit:g} for d={self.d}"
                )
        if self.k >= math.pi:
            raise ValueError(f"k={self.k} too large: the unit geodesic ball needs k < pi")
        return self

    @classmethod
    def create(cls, d: int, p: float, k: float, lam: float) -> "ProblemParams":
        """Build parameters, raising ConfigurationError with the violated rule."""
        try:
            return cls(d=d, p=p, k=k, lam=lam)
        except ValidationError as e:
            raise ConfigurationError(f"Invalid problem parameters: {first_error_message(e)}") from e

    def with_lambda(self, lam: float) -> "ProblemParams":
        return ProblemParams.create(self.d, self.p, self.k, lam)

    def with_k(self, k: float) -> "ProblemParams":
        return ProblemParams.create(self.d, self.p, k, self.lam)

    def to_dict(self) -> Dict[str, Any]:
        return {"d": self.d, "p": self.p, "k": self.k, "lambda": self.lam}


def first_error_message(error: ValidationError) -> str:
    first = error.errors()[0]
    loc = ".".join(str(part) for part in first.get("loc", ()))
    msg = first.get("msg", str(error))
    return f"{loc}: {msg}" if loc else msg
