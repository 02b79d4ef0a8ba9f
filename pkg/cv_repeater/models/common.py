import math
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import gammaln

# --- Type Aliases and Enums ---
AmplifierKind = Literal["scissors", "optimal"]
SolutionStatus = Literal["ok", "infeasible"]
Spacing = Literal["log", "lin"]


class RadialPolyGaussian(BaseModel):
    """
    A radially symmetric integrand of the form c * sum_k a_k x^k * exp(-s x)
    with x = |w|^2, w a complex integration variable.

    Both the success-probability and the fidelity integrands of an
    error-correction link reduce to this shape, and its integral over the
    complex plane follows from the moment identity
    int exp(-s|w|^2) |w|^(2k) d^2w = pi k! / s^(k+1).
    """

    model_config = ConfigDict(frozen=True)

    scale: float = Field(..., ge=0)
    decay: float = Field(..., gt=0)
    coeffs: tuple[float, ...] = Field(..., min_length=1)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def as_array(self) -> NDArray[np.float64]:
        return np.asarray(self.coeffs, dtype=np.float64)

    def moments(self) -> NDArray[np.float64]:
        """pi k! / s^(k+1) for k = 0..degree, computed in log space."""
        k = np.arange(self.degree + 1, dtype=np.float64)
        return math.pi * np.exp(gammaln(k + 1.0) - (k + 1.0) * math.log(self.decay))

    def integral(self) -> float:
        """Exact integral over the complex plane (d^2w = dRe(w) dIm(w))."""
        return float(self.scale * np.sum(self.as_array() * self.moments()))

    def evaluate(self, x: ArrayLike) -> NDArray[np.float64]:
        """Point values of the integrand at x = |w|^2."""
        x_arr = np.asarray(x, dtype=np.float64)
        poly = np.polynomial.polynomial.polyval(x_arr, self.as_array())
        return np.asarray(self.scale * poly * np.exp(-self.decay * x_arr), dtype=np.float64)

    def normalized(self) -> "RadialPolyGaussian":
        """Moves a_0 into the scale so that the leading coefficient is 1."""
        lead = self.coeffs[0]
        if lead == 0:
            return self
        return RadialPolyGaussian(
            scale=self.scale * lead,
            decay=self.decay,
            coeffs=tuple(a / lead for a in self.coeffs),
        )
