from pydantic import BaseModel, ConfigDict, Field, model_validator

from cv_repeater.models.amplifier import AmplifierSpec
from cv_repeater.models.common import AmplifierKind, SolutionStatus

# Curves of the maximum-fidelity figure: one, two and three scissors plus the ideal two-photon amplifier.
DEFAULT_CURVES = (
    AmplifierSpec(kind="scissors", order=1),
    AmplifierSpec(kind="scissors", order=2),
    AmplifierSpec(kind="scissors", order=3),
    AmplifierSpec(kind="optimal", order=2),
)


class SweepSpec(BaseModel):
    """A grid of effective transmissions and the amplifier curves to evaluate on it."""

    model_config = ConfigDict(frozen=True)

    effective_transmissions: tuple[float, ...] = Field(..., min_length=1)
    curves: tuple[AmplifierSpec, ...] = DEFAULT_CURVES
    chi_min: float = Field(1e-6, ge=1e-6)
    chi_max: float = Field(0.99, le=0.99)
    target_fidelity: float = Field(0.99, gt=0, lt=1)

    @model_validator(mode="after")
    def check_ranges(self) -> "SweepSpec":
        if self.chi_min >= self.chi_max:
            raise ValueError(f"chi_min ({self.chi_min}) must be below chi_max ({self.chi_max})")
        bad = [eta for eta in self.effective_transmissions if not 0 < eta < 1]
        if bad:
            raise ValueError(f"effective transmissions must lie in (0, 1), got {bad}")
        return self


class FidelityOptimum(BaseModel):
    """Best two-link fidelity over chi under gain tuning, for one transmission and amplifier."""

    model_config = ConfigDict(frozen=True)

    eta: float
    kind: AmplifierKind
    order: int
    fidelity_two_link: float = Field(..., ge=0, le=1)
    fidelity_link: float = Field(..., ge=0, le=1)
    argmax_chi: float
    gain: float
    success_prob: float = Field(..., ge=0, le=1)


class FixedFidelitySolution(BaseModel):
    """
    The entanglement strength that meets a fidelity target, and the success
    probability it costs. `status == "infeasible"` when the target exceeds the
    best achievable fidelity; the chi-dependent fields are then None.
    """

    model_config = ConfigDict(frozen=True)

    eta: float
    kind: AmplifierKind
    order: int
    target_fidelity: float
    per_link: bool = False
    status: SolutionStatus
    max_fidelity: float
    chi: float | None = None
    gain: float | None = None
    success_prob: float | None = None
    fidelity_link: float | None = None

    @property
    def feasible(self) -> bool:
        return self.status == "ok"
