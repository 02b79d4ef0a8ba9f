from pathlib import Path
from typing import Any


class RepeaterError(Exception):
    """Base exception for all errors raised by the cv-repeater package."""

    pass


class ParameterError(RepeaterError):
    """
    Represents a physical or numerical parameter outside its valid range
    (e.g., chi = 0 when the gain must be tuned, eta outside (0, 1]).
    """

    def __init__(self, message: str, *, field: str | None = None, value: Any | None = None):
        super().__init__(message)
        self.field = field
        self.value = value

    def __str__(self) -> str:
        base_message = super().__str__()
        if self.field is None:
            return base_message
        return f"{base_message} [{self.field}={self.value!r}]"


# --- Specific Parameter Error Categories ---


class IntegrabilityError(ParameterError):
    """
    Raised when a Gaussian integrand has a non-positive decay exponent and so
    cannot be integrated over the complex plane.
    """

    def __init__(self, integrand: str, decay: float):
        super().__init__(
            f"The {integrand} integrand is not integrable: decay exponent {decay:.6g} is not positive.",
            field=f"{integrand}.decay",
            value=decay,
        )
        self.integrand = integrand
        self.decay = decay


class DomainError(ParameterError):
    """Raised when a value lies outside the domain of a conversion (e.g., transmission > 1)."""

    pass


class UsageError(RepeaterError):
    """
    Raised when an operation is applied to a configuration it does not define,
    such as the single-scissor closed form on a two-scissor amplifier.
    """

    pass


class CutoffError(RepeaterError):
    """Raised when the Fock-space truncation leaves a tail above the allowed tolerance."""

    def __init__(self, message: str, *, n_max: int, suggested_n_max: int, tail: float):
        super().__init__(message)
        self.n_max = n_max
        self.suggested_n_max = suggested_n_max
        self.tail = tail

    def __str__(self) -> str:
        return f"{super().__str__()} (n_max={self.n_max}, tail={self.tail:.3e}; try n_max >= {self.suggested_n_max})"


class QuadratureTailError(RepeaterError):
    """Raised when a quadrature grid is too narrow for the Gaussian decay of its integrand."""

    def __init__(self, message: str, *, tail: float, min_half_width: float):
        super().__init__(message)
        self.tail = tail
        self.min_half_width = min_half_width

    def __str__(self) -> str:
        return f"{super().__str__()} (tail={self.tail:.3e}; use half_width >= {self.min_half_width:.4g})"


class ConfigError(RepeaterError):
    """Raised for unreadable config files, unknown keys and invalid flag combinations."""

    pass


class OutputError(RepeaterError):
    """Raised when a result file cannot be written."""

    def __init__(self, message: str, *, path: Path | str):
        super().__init__(message)
        self.path = Path(path)

    def __str__(self) -> str:
        return f"{super().__str__()}: {self.path}"
