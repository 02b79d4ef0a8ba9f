import logging
import math

from cv_repeater.core.base import BaseAPI
from cv_repeater.core.ec_link import link_metrics
from cv_repeater.exceptions import DomainError, UsageError
from cv_repeater.models.link import EcParams, LinkMetrics
from cv_repeater.models.repeater import ChainMetrics, FiberModel, RepeaterChain
from cv_repeater.utils import is_power_of_two

logger = logging.getLogger(__name__)


def _levels_exponent(link_count: int) -> int:
    if not is_power_of_two(link_count):
        raise UsageError(f"Link count must be a power of two (2^k), got {link_count}.")
    return link_count.bit_length() - 1


def compose(
    per_link_metrics: LinkMetrics,
    link_count: int,
    *,
    per_link: EcParams | None = None,
    distance_km: float | None = None,
) -> RepeaterChain:
    """
    Composes identical links into the concatenated chain of M = 2^k links.

    P_M = P^(log2 M) and F_M >= F^(2(M - 1)). M = 1 is a bare link reporting
    (F, P) unchanged.

    Raises:
        UsageError: If `link_count` is not a power of two.
    """
    k = _levels_exponent(link_count)
    f, p = per_link_metrics.fidelity, per_link_metrics.success_prob
    if link_count == 1:
        fidelity_bound, success = f, p
        effective = per_link_metrics.effective_transmission
    else:
        fidelity_bound = f ** (2 * (link_count - 1))
        success = p**k
        # each corrected pair keeps lambda^4; concatenation preserves it
        effective = per_link_metrics.effective_gain**4
    physical = per_link.eta**link_count if per_link is not None else None
    if physical == 0:
        physical = None  # underflow
    return RepeaterChain(
        link_count=link_count,
        levels=max(k - 1, 0),
        link_metrics=per_link_metrics,
        composed=ChainMetrics(
            fidelity_bound=fidelity_bound,
            success_prob=success,
            effective_transmission=effective,
            physical_transmission=physical,
        ),
        per_link=per_link,
        distance_km=distance_km,
    )


def distance_to_transmission(distance_km: float, fiber: FiberModel) -> float:
    """eta = 10^(-a d / 10) for a fibre of a dB/km."""
    if distance_km < 0:
        raise DomainError("Distance must be non-negative.", field="distance_km", value=distance_km)
    return float(10 ** (-fiber.attenuation_db_per_km * distance_km / 10))


def transmission_to_distance(eta: float, fiber: FiberModel) -> float:
    """Inverse of `distance_to_transmission`."""
    if not 0 < eta <= 1:
        raise DomainError("Transmission must lie in (0, 1].", field="eta", value=eta)
    # log10(1) gives -0.0
    return -10 * math.log10(eta) / fiber.attenuation_db_per_km + 0.0


class RepeaterAPI(BaseAPI):
    """
    Handler for composing links into repeater chains and converting between
    fibre length and transmission.
    """

    @property
    def fiber(self) -> FiberModel:
        return FiberModel(attenuation_db_per_km=self._settings.atten_db_per_km)

    def compose(self, per_link_metrics: LinkMetrics, link_count: int) -> RepeaterChain:
        return compose(per_link_metrics, link_count)

    def chain(self, params: EcParams, link_count: int) -> RepeaterChain:
        """Evaluates one link with the moment engine and composes M copies of it."""
        return compose(link_metrics(params), link_count, per_link=params)

    def chain_for_distance(self, distance_km: float, link_count: int, params: EcParams) -> RepeaterChain:
        """
        A chain spanning `distance_km` in `link_count` equal segments. The
        transmission of `params` is replaced by the segment transmission.
        """
        _levels_exponent(link_count)
        eta_link = distance_to_transmission(distance_km / link_count, self.fiber)
        segment = self._validate(EcParams, eta=eta_link, chi=params.chi, amplifier=params.amplifier)
        logger.info("%.1f km over %d links: eta_link=%.6g", distance_km, link_count, eta_link)
        return compose(link_metrics(segment), link_count, per_link=segment, distance_km=distance_km)

    def distance_to_transmission(self, distance_km: float) -> float:
        return distance_to_transmission(distance_km, self.fiber)

    def transmission_to_distance(self, eta: float) -> float:
        return transmission_to_distance(eta, self.fiber)
