import math

from pydantic import BaseModel, ConfigDict, Field

from cv_repeater.models.amplifier import AmplifierModel


class EcParams(BaseModel):
    """
    Physical parameters of one error-correction link: an EPR source of
    strength `chi`, one arm sent through a channel of power transmission `eta`
    and distilled by `amplifier` before teleportation.
    """

    model_config = ConfigDict(frozen=True)

    eta: float = Field(..., gt=0, le=1)
    chi: float = Field(..., ge=0, lt=1)
    amplifier: AmplifierModel

    @property
    def gain(self) -> float:
        return self.amplifier.gain

    @property
    def effective_gain(self) -> float:
        """Amplitude multiplier lambda = g chi sqrt(eta) of the target state."""
        return self.gain * self.chi * math.sqrt(self.eta)


class LinkMetrics(BaseModel):
    """Fidelity, success probability and effective amplitude gain of one link."""

    model_config = ConfigDict(frozen=True)

    fidelity: float = Field(..., ge=0, le=1)
    success_prob: float = Field(..., ge=0, le=1)
    effective_gain: float = Field(..., ge=0)

    @property
    def effective_transmission(self) -> float:
        return self.effective_gain**2
