"""
Fidelity and success probability of a single error-correction link.

With w = beta* + alpha (beta the dual-homodyne outcome, alpha the input
coherent amplitude), the un-normalised heralded output has number-basis
amplitudes, before the final displacement,

    c_n(w) = sqrt((1 - chi^2)/pi) * exp(|w|^2 (chi^2 - 1 - eta chi^2)/2)
             * t_n * (sqrt(eta) chi w)^n / sqrt(n!)

The displacement is unitary and maps the target |g sqrt(eta) chi alpha> onto
|g sqrt(eta) chi w>, so both the norm and the target overlap depend on w only
through x = |w|^2 and take the form poly(x) * exp(-s x). Integrating over
beta is then exact through the Gaussian moments pi k!/s^(k+1).
"""

import logging
import math

import numpy as np
from scipy.special import gammaln

from cv_repeater.core.amplifier import coefficients
from cv_repeater.core.base import BaseAPI
from cv_repeater.exceptions import IntegrabilityError, ParameterError, UsageError
from cv_repeater.models.amplifier import AmplifierModel
from cv_repeater.models.common import AmplifierKind, RadialPolyGaussian
from cv_repeater.models.link import EcParams, LinkMetrics

logger = logging.getLogger(__name__)

# Rounding slack tolerated before F or P is reported as out of [0, 1].
_BOUND_SLACK = 1e-9


def gain_tuned(eta: float, chi: float) -> float:
    """
    The amplifier gain g = eta^(-1/4) / chi that makes the corrected channel
    an effective transmission sqrt(eta), i.e. lambda = g chi sqrt(eta) = eta^(1/4).

    Raises:
        ParameterError: If eta is outside (0, 1] or chi outside (0, 1).
    """
    if not 0 < eta <= 1:
        raise ParameterError("Channel transmission must lie in (0, 1].", field="eta", value=eta)
    if chi == 0:
        raise ParameterError("Gain tuning diverges at zero entanglement strength.", field="chi", value=chi)
    if not 0 < chi < 1:
        raise ParameterError("Entanglement strength must lie in (0, 1).", field="chi", value=chi)
    return float(eta**-0.25 / chi)


def effective_gain(eta: float, chi: float, gain: float) -> float:
    return gain * chi * math.sqrt(eta)


def output_coefficient_poly(params: EcParams) -> tuple[RadialPolyGaussian, RadialPolyGaussian]:
    """
    Reduces the link's two beta-integrands to canonical radial form.

    Returns:
        (norm, overlap): the squared norm <psi|psi> and the squared target
        overlap |<g sqrt(eta) chi alpha|psi>|^2, each as c * poly(|w|^2) * exp(-s |w|^2)
        with the leading polynomial coefficient normalised to 1.

    Raises:
        IntegrabilityError: If either decay exponent is not positive.
    """
    eta, chi, g = params.eta, params.chi, params.gain
    t = coefficients(params.amplifier)
    ratios = t / t[0]
    k = np.arange(t.size, dtype=np.float64)
    inv_factorial = np.exp(-gammaln(k + 1.0))
    scale = (1.0 - chi**2) / math.pi * t[0] ** 2

    norm_decay = 1.0 - chi**2 + eta * chi**2
    if norm_decay <= 0:
        raise IntegrabilityError("norm", norm_decay)
    overlap_decay = norm_decay + g**2 * eta * chi**2
    if overlap_decay <= 0:
        raise IntegrabilityError("overlap", overlap_decay)

    # sum_n |c_n|^2 = scale * sum_n (t_n/t_0)^2 (eta chi^2 x)^n / n!
    norm_coeffs = ratios**2 * (eta * chi**2) ** k * inv_factorial
    # <g sqrt(eta) chi w|c> = sqrt(scale) * sum_n (t_n/t_0) (g eta chi^2 x)^n / n!
    amplitude = ratios * (g * eta * chi**2) ** k * inv_factorial
    overlap_coeffs = np.polynomial.polynomial.polymul(amplitude, amplitude)

    norm = RadialPolyGaussian(scale=scale, decay=norm_decay, coeffs=tuple(float(a) for a in norm_coeffs))
    overlap = RadialPolyGaussian(scale=scale, decay=overlap_decay, coeffs=tuple(float(a) for a in overlap_coeffs))
    return norm, overlap


def clip_unit(value: float, name: str) -> float:
    """Clamps rounding noise into [0, 1]; a larger excursion is an error."""
    if not -_BOUND_SLACK <= value <= 1 + _BOUND_SLACK:
        raise ParameterError(f"Computed {name} {value!r} lies outside [0, 1].", field=name, value=value)
    return min(max(value, 0.0), 1.0)


def link_metrics(params: EcParams, alpha: complex = 0j) -> LinkMetrics:
    """
    Exact beta-averaged fidelity and success probability of one link.

    `alpha` is accepted for symmetry with the brute-force oracle; the change
    of variable w = beta* + alpha removes it from both integrals.
    """
    norm, overlap = output_coefficient_poly(params)
    success = norm.integral()
    fidelity = overlap.integral() / success
    logger.debug("link eta=%g chi=%g g=%g alpha=%s -> F=%.12g P=%.6e", params.eta, params.chi, params.gain, alpha,
                 fidelity, success)
    return LinkMetrics(
        fidelity=clip_unit(fidelity, "fidelity"),
        success_prob=clip_unit(success, "success_prob"),
        effective_gain=params.effective_gain,
    )


# --- Single-scissor closed forms ---


def _require_single_scissor(params: EcParams) -> None:
    if params.amplifier.kind != "scissors" or params.amplifier.order != 1:
        raise UsageError(
            f"The closed form covers one quantum scissor only, got {params.amplifier.kind} of order "
            f"{params.amplifier.order}."
        )


def closed_form_success(params: EcParams) -> float:
    _require_single_scissor(params)
    eta, chi, g = params.eta, params.chi, params.gain
    c2 = chi**2
    return (1 - c2) / (1 + g**2) * (1 + (-1 + eta + g**2 * eta) * c2) / (1 + (-1 + eta) * c2) ** 2


def closed_form_fidelity(params: EcParams) -> float:
    """The expanded closed form of the single-scissor fidelity."""
    _require_single_scissor(params)
    eta, chi, g = params.eta, params.chi, params.gain
    c2, c4 = chi**2, chi**4
    numerator = (1 + (-1 + eta) * c2) ** 2 * (
        1
        + 2 * (-1 + eta + 2 * g**2 * eta) * c2
        + (1 + eta * (-2 + 4 * g**2 * (-1 + eta) + eta + 5 * g**4 * eta)) * c4
    )
    return numerator / (1 + (-1 + eta + g**2 * eta) * c2) ** 4


def closed_form_fidelity_factored(params: EcParams) -> float:
    """The factored closed form; algebraically identical to `closed_form_fidelity`."""
    _require_single_scissor(params)
    eta, chi, g = params.eta, params.chi, params.gain
    c2, c4 = chi**2, chi**4
    first = (1 + (-1 + eta) * c2) ** 2 / (1 + (-1 + eta + g**2 * eta) * c2)
    quartic = eta * (5 * eta * g**4 + 4 * (eta - 1) * g**2 + eta - 2) + 1
    second = 2 * c2 * (2 * eta * g**2 + eta - 1) + c4 * quartic + 1
    return first * second / (c2 * (eta * g**2 + eta - 1) + 1) ** 3


def closed_form_n1(params: EcParams) -> LinkMetrics:
    """
    Single-scissor fidelity and success probability from the analytic formulas.

    Raises:
        UsageError: If the amplifier is not a single quantum scissor.
    """
    return LinkMetrics(
        fidelity=clip_unit(closed_form_fidelity(params), "fidelity"),
        success_prob=clip_unit(closed_form_success(params), "success_prob"),
        effective_gain=params.effective_gain,
    )


def fidelity_limit_small_chi(eta: float) -> float:
    """Gain-tuned single-scissor fidelity as chi -> 0: (1 + 4 sqrt(eta) + 5 eta) / (1 + sqrt(eta))^4."""
    root = math.sqrt(eta)
    return (1 + 4 * root + 5 * eta) / (1 + root) ** 4


def direct_transmission_fidelity(eta: float, alpha: complex) -> float:
    """|<sqrt(eta) alpha|alpha>|^2: fidelity of an uncorrected lossy channel, for comparison."""
    return math.exp(-((1 - math.sqrt(eta)) ** 2) * abs(alpha) ** 2)


class LinkAPI(BaseAPI):
    """
    Handler for single error-correction links: parameter construction, gain
    tuning and the exact moment engine with its closed-form regression path.
    """

    def params(
        self,
        eta: float,
        chi: float,
        *,
        kind: AmplifierKind = "scissors",
        order: int = 1,
        gain: float | None = None,
    ) -> EcParams:
        """
        Builds validated link parameters. Without `gain` the amplifier is gain-tuned.
        """
        if gain is None:
            gain = gain_tuned(eta, chi)
        amplifier = self._validate(AmplifierModel, kind=kind, order=order, gain=gain)
        return self._validate(EcParams, eta=eta, chi=chi, amplifier=amplifier)

    def gain_tuned(self, eta: float, chi: float) -> float:
        return gain_tuned(eta, chi)

    def output_coefficient_poly(self, params: EcParams) -> tuple[RadialPolyGaussian, RadialPolyGaussian]:
        return output_coefficient_poly(params)

    def metrics(self, params: EcParams, alpha: complex = 0j) -> LinkMetrics:
        """Fidelity and success probability of one link (moment engine)."""
        return link_metrics(params, alpha)

    def closed_form(self, params: EcParams) -> LinkMetrics:
        """Analytic single-scissor formulas; raises UsageError for any other amplifier."""
        return closed_form_n1(params)

    def direct_transmission_fidelity(self, eta: float, alpha: complex) -> float:
        return direct_transmission_fidelity(eta, alpha)
