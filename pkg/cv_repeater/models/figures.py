from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from cv_repeater.models.common import AmplifierKind, SolutionStatus

# --- Row models for the reproduced figures and tables ---
# Field order is CSV column order; aliases are the CSV headers.


class CsvRow(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)


class Fig3Row(CsvRow):
    """Maximum two-link fidelity for one transmission and amplifier curve."""

    eta_eff: float
    kind: AmplifierKind
    order: int = Field(..., alias="N")
    fidelity_two_link_max: float = Field(..., alias="F_two_link_max")
    argmax_chi: float
    success_prob: float = Field(..., alias="P_at_argmax")
    fidelity_link: float = Field(..., alias="F_link")


class Fig4Row(CsvRow):
    """Success probability at a fixed fidelity target; empty when infeasible."""

    eta_eff: float
    kind: AmplifierKind
    order: int = Field(..., alias="N")
    f_target: float
    success_prob: float | None = Field(None, alias="P")
    chi: float | None = None
    status: SolutionStatus


class Fig5Row(CsvRow):
    """Chain fidelity bound for a fixed entanglement strength."""

    eta_eff: float
    links: int = Field(..., alias="M")
    fidelity_link: float = Field(..., alias="F_link")
    fidelity_bound: float = Field(..., alias="F_M")
    success_prob: float = Field(..., alias="P_M")


class Table1Row(CsvRow):
    """One distance/amplifier cell of the distance table, with the published value next to it."""

    distance_km: float
    links: int = Field(..., alias="M")
    scissors: int = Field(..., alias="N")
    chi: float
    eta_link: float
    fidelity_bound: float = Field(..., alias="F_M")
    success_prob: float = Field(..., alias="P_M")
    published_fidelity: float = Field(..., alias="F_published")
    published_success_prob: float = Field(..., alias="P_published")
    within_tolerance: bool


class LinkRow(CsvRow):
    """One evaluated link, optionally composed into a chain and cross-checked."""

    eta: float
    chi: float
    gain: float
    kind: AmplifierKind
    order: int = Field(..., alias="N")
    links: int = Field(..., alias="M")
    fidelity_link: float = Field(..., alias="F")
    success_prob_link: float = Field(..., alias="P")
    effective_gain: float = Field(..., alias="lambda")
    fidelity_bound: float = Field(..., alias="F_M")
    success_prob_chain: float = Field(..., alias="P_M")
    source: Literal["engine", "closed_form", "oracle"] = "engine"


class VerifyCheck(CsvRow):
    """Outcome of one invariant in the verification suite."""

    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""
