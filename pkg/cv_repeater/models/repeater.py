from pydantic import BaseModel, ConfigDict, Field, model_validator

from cv_repeater.models.link import EcParams, LinkMetrics

DEFAULT_ATTEN_DB_PER_KM = 0.2
# Alternative loss rate; does not reproduce eta = 0.01 per 100 km.
LOW_LOSS_ATTEN_DB_PER_KM = 0.02


class FiberModel(BaseModel):
    """Optical fibre with a constant loss rate in dB per kilometre."""

    model_config = ConfigDict(frozen=True)

    attenuation_db_per_km: float = Field(DEFAULT_ATTEN_DB_PER_KM, gt=0)


class ChainMetrics(BaseModel):
    """End-to-end figures of merit of a concatenated chain."""

    model_config = ConfigDict(frozen=True)

    fidelity_bound: float = Field(..., ge=0, le=1)
    success_prob: float = Field(..., ge=0, le=1)
    effective_transmission: float = Field(..., ge=0)
    physical_transmission: float | None = Field(None, gt=0, le=1)


class RepeaterChain(BaseModel):
    """
    M = 2^k identical error-correction links, nested k - 1 levels deep.

    `link_count == 1` describes a bare link whose composed metrics are the
    link metrics themselves.
    """

    model_config = ConfigDict(frozen=True)

    link_count: int = Field(..., ge=1)
    levels: int = Field(..., ge=0)
    link_metrics: LinkMetrics
    composed: ChainMetrics
    per_link: EcParams | None = None
    distance_km: float | None = Field(None, ge=0)

    @model_validator(mode="after")
    def check_levels(self) -> "RepeaterChain":
        k = self.link_count.bit_length() - 1
        if self.link_count != 1 << k:
            raise ValueError(f"link_count must be a power of two, got {self.link_count}")
        if self.levels != max(k - 1, 0):
            raise ValueError(f"levels must be {max(k - 1, 0)} for {self.link_count} links, got {self.levels}")
        return self
