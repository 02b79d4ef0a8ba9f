import math

import pytest
from pydantic import ValidationError

from cv_repeater import RepeaterClient
from cv_repeater.core.repeater import RepeaterAPI, compose
from cv_repeater.exceptions import DomainError, UsageError
from cv_repeater.models.config import Settings
from cv_repeater.models.link import EcParams, LinkMetrics
from cv_repeater.models.repeater import LOW_LOSS_ATTEN_DB_PER_KM, ChainMetrics, RepeaterChain


@pytest.fixture(scope="module")
def repeater(client: RepeaterClient) -> RepeaterAPI:
    return client.repeater


@pytest.fixture(scope="module")
def link() -> LinkMetrics:
    return LinkMetrics(fidelity=0.99, success_prob=1e-3, effective_gain=0.01**0.25)


# --- Composition ---


@pytest.mark.parametrize("m, levels, f_power, p_power", [(2, 0, 2, 1), (4, 1, 6, 2), (8, 2, 14, 3)])
def test_compose_scaling(link: LinkMetrics, m: int, levels: int, f_power: int, p_power: int):
    chain = compose(link, m)
    assert chain.link_count == m
    assert chain.levels == levels
    assert chain.composed.fidelity_bound == pytest.approx(0.99**f_power, rel=1e-14)
    assert chain.composed.success_prob == pytest.approx(1e-3**p_power, rel=1e-14)


def test_compose_single_link_is_unchanged(link: LinkMetrics):
    chain = compose(link, 1)
    assert chain.levels == 0
    assert chain.composed.fidelity_bound == link.fidelity
    assert chain.composed.success_prob == link.success_prob
    assert chain.composed.effective_transmission == pytest.approx(0.1, rel=1e-12)


def test_compose_keeps_tuned_transmission(link: LinkMetrics):
    """Pairs of sqrt(eta) links restore the channel transmission eta."""
    assert compose(link, 8).composed.effective_transmission == pytest.approx(0.01, rel=1e-12)


@pytest.mark.parametrize("m", [0, 3, 6, 12])
def test_compose_rejects_non_power_of_two(link: LinkMetrics, m: int):
    with pytest.raises(UsageError):
        compose(link, m)


def test_success_probability_power_law(link: LinkMetrics):
    for m in (2, 4, 8, 16):
        p_m = compose(link, m).composed.success_prob
        assert p_m == pytest.approx(m ** math.log2(link.success_prob), rel=1e-12)


def test_chain_model_rejects_inconsistent_levels(link: LinkMetrics):
    composed = ChainMetrics(fidelity_bound=0.9, success_prob=0.1, effective_transmission=0.1)
    with pytest.raises(ValidationError):
        RepeaterChain(link_count=4, levels=2, link_metrics=link, composed=composed)
    with pytest.raises(ValidationError):
        RepeaterChain(link_count=3, levels=0, link_metrics=link, composed=composed)


# --- Distance Table Chains ---


@pytest.mark.parametrize(
    "m, fidelity, success, p_rel",
    [(2, 0.98, 1.1e-3, 0.1), (4, 0.94, 1.2e-6, 0.1), (8, 0.87, 1.3e-9, 0.1)],
)
def test_one_scissor_chains(
    repeater: RepeaterAPI, one_scissor_link: EcParams, m: int, fidelity: float, success: float, p_rel: float
):
    chain = repeater.chain(one_scissor_link, m)
    assert chain.composed.fidelity_bound == pytest.approx(fidelity, abs=0.005)
    assert chain.composed.success_prob == pytest.approx(success, rel=p_rel)
    assert chain.composed.physical_transmission == pytest.approx(0.01**m, rel=1e-12)


def test_two_scissor_long_chain_deviates(repeater: RepeaterAPI, two_scissor_link: EcParams):
    """At chi = 0.1 the eight-link two-scissor bound sits near 0.956, below the published 0.97."""
    chain = repeater.chain(two_scissor_link, 8)
    assert chain.composed.fidelity_bound == pytest.approx(0.9563, abs=2e-3)
    assert chain.composed.success_prob == pytest.approx(1.3e-18, rel=0.1)


def test_chain_for_distance(repeater: RepeaterAPI, one_scissor_link: EcParams):
    chain = repeater.chain_for_distance(800.0, 8, one_scissor_link)
    assert chain.distance_km == 800.0
    assert chain.per_link is not None
    assert chain.per_link.eta == pytest.approx(0.01, rel=1e-12)
    assert chain.per_link.gain == one_scissor_link.gain
    assert chain.composed.fidelity_bound == pytest.approx(0.87, abs=0.005)


def test_chain_for_distance_rejects_odd_link_count(repeater: RepeaterAPI, one_scissor_link: EcParams):
    with pytest.raises(UsageError):
        repeater.chain_for_distance(300.0, 3, one_scissor_link)


# --- Fibre Conversions ---


def test_distance_to_transmission(repeater: RepeaterAPI):
    assert repeater.distance_to_transmission(100.0) == pytest.approx(0.01, rel=1e-12)
    assert repeater.distance_to_transmission(0.0) == 1.0
    assert repeater.transmission_to_distance(0.01) == pytest.approx(100.0, rel=1e-12)
    assert repeater.transmission_to_distance(repeater.distance_to_transmission(437.5)) == pytest.approx(437.5)


def test_full_transmission_is_zero_distance(repeater: RepeaterAPI):
    distance = repeater.transmission_to_distance(1.0)
    assert distance == 0.0
    assert math.copysign(1.0, distance) == 1.0
    assert f"{distance}" == "0.0"


def test_alternative_attenuation():
    repeater = RepeaterAPI(Settings(atten_db_per_km=LOW_LOSS_ATTEN_DB_PER_KM))
    assert repeater.distance_to_transmission(100.0) == pytest.approx(10**-0.2, rel=1e-12)


@pytest.mark.parametrize("eta", [0.0, -0.1, 1.5])
def test_transmission_to_distance_domain(repeater: RepeaterAPI, eta: float):
    with pytest.raises(DomainError) as exc_info:
        repeater.transmission_to_distance(eta)
    assert exc_info.value.field == "eta"


def test_negative_distance_raises(repeater: RepeaterAPI):
    with pytest.raises(DomainError):
        repeater.distance_to_transmission(-1.0)
