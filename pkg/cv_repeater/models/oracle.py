import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class QuadratureGrid(BaseModel):
    """A square grid of `points` x `points` nodes covering [-L, L]^2 around the integrand's centre."""

    model_config = ConfigDict(frozen=True)

    half_width: float = Field(..., gt=0)
    points: int = Field(201, ge=3)

    @property
    def spacing(self) -> float:
        return 2 * self.half_width / (self.points - 1)

    def nodes(self) -> NDArray[np.float64]:
        return np.linspace(-self.half_width, self.half_width, self.points)


class FockVector(BaseModel):
    """Complex amplitudes of a single-mode state on the truncated space {|0>, ..., |cutoff>}."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    cutoff: int = Field(..., ge=0)
    amplitudes: NDArray[np.complex128]

    @field_validator("amplitudes", mode="before")
    @classmethod
    def as_complex_array(cls: type["FockVector"], value: object) -> NDArray[np.complex128]:
        arr = np.asarray(value, dtype=np.complex128)
        if arr.ndim != 1:
            raise ValueError(f"amplitudes must be one-dimensional, got shape {arr.shape}")
        return arr

    @model_validator(mode="after")
    def check_length(self) -> "FockVector":
        if self.amplitudes.shape[0] != self.cutoff + 1:
            raise ValueError(f"expected {self.cutoff + 1} amplitudes, got {self.amplitudes.shape[0]}")
        return self

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def overlap(self, other: "FockVector") -> complex:
        """<self|other> over the common truncated support."""
        n = min(self.cutoff, other.cutoff) + 1
        return complex(np.vdot(self.amplitudes[:n], other.amplitudes[:n]))


class FockOperator(BaseModel):
    """A matrix <m|O|n> on the truncated space, rows m = 0..cutoff."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    cutoff: int = Field(..., ge=0)
    matrix: NDArray[np.complex128]

    def apply(self, vector: FockVector) -> FockVector:
        cols = self.matrix.shape[1]
        return FockVector(cutoff=self.cutoff, amplitudes=self.matrix @ vector.amplitudes[:cols])
