from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from cv_repeater.models.common import AmplifierKind, Spacing
from cv_repeater.models.repeater import DEFAULT_ATTEN_DB_PER_KM

Command = Literal["fig3", "fig4", "fig5", "table1", "link", "sweep", "verify"]


class Settings(BaseModel):
    """Numerical tolerances and defaults shared by every handler."""

    model_config = ConfigDict(frozen=True)

    # --- engine ---
    engine_rtol: float = Field(1e-10, gt=0)
    bound_atol: float = Field(1e-12, ge=0)

    # --- optimizer ---
    chi_min: float = Field(1e-6, ge=1e-6)
    chi_max: float = Field(0.99, le=0.99)
    scan_points: int = Field(64, ge=8)
    golden_xtol: float = Field(1e-9, gt=0)
    bisect_xtol: float = Field(1e-10, gt=0)
    tie_atol: float = Field(1e-9, ge=0)

    # --- oracle ---
    n_max: int = Field(30, ge=2)
    grid_points: int = Field(201, ge=3)
    grid_sigmas: float = Field(8.0, gt=0)
    tail_tol: float = Field(1e-10, gt=0)
    quadrature_rtol: float = Field(1e-6, gt=0)

    # --- fibre / execution ---
    atten_db_per_km: float = Field(DEFAULT_ATTEN_DB_PER_KM, gt=0)
    workers: int = Field(1, ge=1)


class GridSpec(BaseModel):
    """A 1-D sweep grid parsed from `start:stop:points:log|lin`."""

    model_config = ConfigDict(frozen=True)

    start: float
    stop: float
    points: int = Field(..., ge=1)
    spacing: Spacing = "log"

    @model_validator(mode="after")
    def check_bounds(self) -> "GridSpec":
        if self.spacing == "log" and (self.start <= 0 or self.stop <= 0):
            raise ValueError("log-spaced grids need positive start and stop")
        if self.points > 1 and self.start == self.stop:
            raise ValueError("a grid with several points needs start != stop")
        return self


class RunConfig(BaseModel):
    """One validated CLI invocation: the command, its flags and the shared settings."""

    model_config = ConfigDict(frozen=True)

    command: Command
    eta: float | None = Field(None, gt=0, le=1)
    chi: float | None = Field(None, ge=0, lt=1)
    gain: float | None = Field(None, ge=0)
    gain_tuned: bool = False
    kind: AmplifierKind = "scissors"
    order: int = Field(1, ge=1, le=8)
    links: int = Field(2, ge=1)
    f_target: float = Field(0.99, gt=0, lt=1)
    per_link: bool = False
    grid: GridSpec | None = None
    sweep_over: Literal["eta", "chi"] = "eta"
    out: Path | None = None
    oracle: bool = False
    settings: Settings = Settings()

    @model_validator(mode="after")
    def check_combinations(self) -> "RunConfig":
        if self.links & (self.links - 1):
            raise ValueError(f"--links must be a power of two, got {self.links}")
        if self.command in ("link", "sweep"):
            if self.gain is not None and self.gain_tuned:
                raise ValueError("--gain and --gain-tuned are mutually exclusive")
            if self.gain is None and not self.gain_tuned:
                raise ValueError(f"'{self.command}' needs --gain or --gain-tuned")
        if self.command == "link" and (self.eta is None or self.chi is None):
            raise ValueError("'link' needs --eta and --chi")
        if self.command == "sweep":
            if self.grid is None:
                raise ValueError("'sweep' needs --grid")
            fixed = "chi" if self.sweep_over == "eta" else "eta"
            if getattr(self, fixed) is None:
                raise ValueError(f"sweeping over {self.sweep_over} needs --{fixed}")
        if self.gain_tuned and self.chi == 0 and self.command == "link":
            raise ValueError("--gain-tuned needs --chi > 0")
        return self
