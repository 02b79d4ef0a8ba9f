import math

import numpy as np
import pytest

from cv_repeater import RepeaterClient
from cv_repeater.core.amplifier import AmplifierAPI, coefficient, coefficients, success_probability_bound
from cv_repeater.exceptions import ParameterError
from cv_repeater.models.amplifier import AmplifierModel


@pytest.fixture(scope="module")
def amplifier(client: RepeaterClient) -> AmplifierAPI:
    return client.amplifier


def test_single_scissor_coefficients(amplifier: AmplifierAPI):
    """One scissor maps |0> -> |0>/sqrt(1+g^2) and |1> -> g|1>/sqrt(1+g^2)."""
    g = 3.0
    model = amplifier.model("scissors", 1, g)
    t = amplifier.coefficients(model)
    np.testing.assert_allclose(t, [1 / math.sqrt(1 + g**2), g / math.sqrt(1 + g**2)], rtol=1e-14)


def test_two_scissor_coefficients():
    g = 2.5
    model = AmplifierModel(kind="scissors", order=2, gain=g)
    expected = [1 / (1 + g**2), g / (1 + g**2), g**2 / (2 * (1 + g**2))]
    np.testing.assert_allclose(coefficients(model), expected, rtol=1e-14)


@pytest.mark.parametrize(
    "gain, expected",
    [
        (2.0, [0.25, 0.5, 1.0]),
        (0.5, [1.0, 0.5, 0.25]),
        (1.0, [1.0, 1.0, 1.0]),
    ],
)
def test_optimal_coefficients(gain: float, expected: list[float]):
    """The ideal amplifier is t_n = g^(n - N) above unit gain and g^n below it."""
    model = AmplifierModel(kind="optimal", order=2, gain=gain)
    np.testing.assert_allclose(coefficients(model), expected, rtol=1e-14)


def test_coefficients_vanish_above_order():
    model = AmplifierModel(kind="scissors", order=3, gain=5.0)
    assert coefficient(model, 4) == 0.0
    assert coefficient(model, 40) == 0.0
    assert coefficients(model).shape == (4,)


def test_zero_gain_keeps_only_vacuum():
    model = AmplifierModel(kind="scissors", order=2, gain=0.0)
    np.testing.assert_array_equal(coefficients(model), [1.0, 0.0, 0.0])


def test_large_gain_is_finite():
    """Coefficients are built in log space, so large N and g stay finite."""
    model = AmplifierModel(kind="scissors", order=8, gain=1e6)
    t = coefficients(model)
    assert np.all(np.isfinite(t))
    assert 0 < t[0] < 1e-40
    assert t[-1] < 1


def test_coefficient_rejects_negative_photon_number():
    model = AmplifierModel(kind="scissors", order=1, gain=1.0)
    with pytest.raises(ParameterError) as exc_info:
        coefficient(model, -1)
    assert exc_info.value.field == "n"


@pytest.mark.parametrize(
    "kind, order, gain",
    [
        ("scissors", 0, 1.0),
        ("scissors", 9, 1.0),
        ("optimal", 2, -1.0),
        ("optimal", 2, math.inf),
        ("tritter", 1, 1.0),
    ],
)
def test_model_validation_raises_parameter_error(amplifier: AmplifierAPI, kind: str, order: int, gain: float):
    with pytest.raises(ParameterError):
        amplifier.model(kind, order, gain)  # type: ignore[arg-type]


def test_success_probability_bound():
    assert success_probability_bound(AmplifierModel(kind="optimal", order=2, gain=2.0)) == pytest.approx(1 / 16)
    assert success_probability_bound(AmplifierModel(kind="optimal", order=3, gain=0.5)) == 1.0


def test_optimal_coefficients_respect_bound():
    """|t_n|^2 <= 1 and the vacuum amplitude squared equals the g^(-2N) bound."""
    model = AmplifierModel(kind="optimal", order=3, gain=4.0)
    t = coefficients(model)
    assert np.all(t**2 <= 1 + 1e-15)
    assert t[0] ** 2 == pytest.approx(success_probability_bound(model), rel=1e-14)
