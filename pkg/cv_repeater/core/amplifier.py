import math

import numpy as np
from numpy.typing import NDArray

from cv_repeater.core.base import BaseAPI
from cv_repeater.exceptions import ParameterError
from cv_repeater.models.amplifier import MAX_ORDER, AmplifierModel
from cv_repeater.models.common import AmplifierKind

_FACTORIALS = tuple(math.factorial(k) for k in range(MAX_ORDER + 1))
_LOG_FACTORIALS = tuple(math.log(f) for f in _FACTORIALS)


def log_prefactor(model: AmplifierModel) -> float:
    """
    Logarithm of the overall success amplitude.

    Scissors: (1 + g^2)^(-N/2). Optimal: g^(-N) for g >= 1, 1 below unit gain.
    """
    n_order = model.order
    if model.kind == "scissors":
        return -0.5 * n_order * math.log1p(model.gain**2)
    if model.gain >= 1:
        return -n_order * math.log(model.gain)
    return 0.0


def _log_coefficient(model: AmplifierModel, n: int) -> float:
    n_order = model.order
    log_t = log_prefactor(model)
    if n:
        log_t += n * math.log(model.gain)
    if model.kind == "scissors":
        log_t += _LOG_FACTORIALS[n_order] - _LOG_FACTORIALS[n_order - n] - n * math.log(n_order)
    return log_t


def coefficient(model: AmplifierModel, n: int) -> float:
    """
    Number-basis amplitude t_n of the amplifier, |n> -> t_n |n>.

    Scissors: t_n = (1/(1+g^2))^(N/2) * N!/((N-n)! N^n) * g^n.
    Optimal:  t_n = s_N * g^n.
    Both vanish for n > N.
    """
    if n < 0:
        raise ParameterError("Photon number must be non-negative.", field="n", value=n)
    if n > model.order or (n > 0 and model.gain == 0):
        return 0.0
    return math.exp(_log_coefficient(model, n))


def coefficients(model: AmplifierModel) -> NDArray[np.float64]:
    """All N + 1 amplitudes t_0..t_N."""
    return np.array([coefficient(model, n) for n in range(model.order + 1)], dtype=np.float64)


def success_probability_bound(model: AmplifierModel) -> float:
    """
    The g^(-2N) scaling of the best achievable amplification success
    probability for truncation order N; 1 below unit gain.
    """
    if model.gain <= 1:
        return 1.0
    return math.exp(-2 * model.order * math.log(model.gain))


class AmplifierAPI(BaseAPI):
    """
    Handler for building amplifier models and reading their number-basis action.
    """

    def model(self, kind: AmplifierKind, order: int, gain: float) -> AmplifierModel:
        """Builds a validated amplifier model."""
        return self._validate(AmplifierModel, kind=kind, order=order, gain=gain)

    def coefficient(self, model: AmplifierModel, n: int) -> float:
        return coefficient(model, n)

    def coefficients(self, model: AmplifierModel) -> NDArray[np.float64]:
        return coefficients(model)

    def success_probability_bound(self, model: AmplifierModel) -> float:
        return success_probability_bound(model)
