import math

import numpy as np
import pytest

from cv_repeater import RepeaterClient
from cv_repeater.core.ec_link import LinkAPI, gain_tuned, link_metrics, output_coefficient_poly
from cv_repeater.core.oracle import (
    OracleAPI,
    coherent_amplitudes,
    displacement_matrix,
    grid_tail,
    quadrature_metrics,
    simulate_link,
)
from cv_repeater.exceptions import CutoffError, QuadratureTailError
from cv_repeater.models.amplifier import AmplifierModel
from cv_repeater.models.link import EcParams
from cv_repeater.models.oracle import FockVector, QuadratureGrid


def _params(eta: float, chi: float, gain: float, order: int = 1) -> EcParams:
    return EcParams(eta=eta, chi=chi, amplifier=AmplifierModel(kind="scissors", order=order, gain=gain))


@pytest.fixture(scope="module")
def oracle(client: RepeaterClient) -> OracleAPI:
    return client.oracle


# --- Fock-Space Primitives ---


def test_coherent_state_is_normalised(oracle: OracleAPI):
    state = oracle.coherent_state(1.5 - 0.5j, n_max=40)
    assert state.norm_squared() == pytest.approx(1.0, abs=1e-12)


def test_displacement_of_vacuum_is_coherent():
    delta = 0.7 + 0.3j
    column = displacement_matrix(delta, 30)[:, 0]
    np.testing.assert_allclose(column, coherent_amplitudes(delta, 30), atol=1e-14)


def test_displacement_columns_are_orthonormal():
    matrix = displacement_matrix(0.7 + 0.3j, 60)[:, :20]
    gram = matrix.conj().T @ matrix
    np.testing.assert_allclose(gram, np.eye(20), atol=1e-8)


def test_displacement_inverse(oracle: OracleAPI):
    forward = oracle.displacement(0.4 - 0.2j, n_max=50)
    back = oracle.displacement(-0.4 + 0.2j, n_max=50)
    product = (back.matrix @ forward.matrix)[:10, :10]
    np.testing.assert_allclose(product, np.eye(10), atol=1e-10)


@pytest.mark.parametrize("mu", [0j, 0.5 + 0.5j, 2.0 - 1.0j, 4.0 + 0j])
def test_truncated_states_never_exceed_unit_norm(oracle: OracleAPI, mu: complex):
    assert oracle.coherent_state(mu, n_max=30).norm_squared() <= 1 + 1e-9
    fock = np.zeros(31)
    fock[2] = 1.0
    displaced = oracle.displacement(mu, n_max=30).apply(FockVector(cutoff=30, amplitudes=fock))
    assert displaced.norm_squared() <= 1 + 1e-9


# --- Single Outcome Simulation ---


def test_zero_chi_outcome_is_vacuum():
    """At chi = 0 and w = 0 only t_0 |0> / sqrt(pi) survives."""
    g = 3.0
    params = _params(0.4, 0.0, g)
    vector = simulate_link(params, 0j, 0j)
    expected = np.zeros(31)
    expected[0] = 1 / math.sqrt(1 + g**2) / math.sqrt(math.pi)
    np.testing.assert_allclose(vector.amplitudes, expected, atol=1e-15)


def test_simulated_norm_matches_canonical_integrand():
    params = _params(0.01, 0.1, 31.623, order=2)
    alpha, beta = 0.5 + 0j, 0.3 - 0.2j
    vector = simulate_link(params, alpha, beta)
    norm, _ = output_coefficient_poly(params)
    x = abs(np.conj(beta) + alpha) ** 2
    assert vector.norm_squared() == pytest.approx(float(norm.evaluate(x)), rel=1e-9)


def test_simulated_overlap_matches_canonical_integrand(oracle: OracleAPI):
    params = _params(0.25, 0.3, 2.0)
    alpha, beta = 0.2 - 0.1j, -0.4 + 0.6j
    vector = simulate_link(params, alpha, beta)
    target = oracle.coherent_state(params.effective_gain * alpha)
    _, overlap = output_coefficient_poly(params)
    x = abs(np.conj(beta) + alpha) ** 2
    assert abs(target.overlap(vector)) ** 2 == pytest.approx(float(overlap.evaluate(x)), rel=1e-9)


def test_simulation_is_converged_in_cutoff(oracle: OracleAPI):
    params = _params(0.25, 0.3, 2.0)
    alpha, beta = 0.2 - 0.1j, -0.4 + 0.6j
    coarse = simulate_link(params, alpha, beta, n_max=30)
    fine = simulate_link(params, alpha, beta, n_max=60)
    assert abs(fine.norm_squared() - coarse.norm_squared()) < 1e-10
    np.testing.assert_allclose(fine.amplitudes[:31], coarse.amplitudes, atol=1e-10)
    target = oracle.coherent_state(params.effective_gain * alpha, n_max=60)
    assert abs(abs(target.overlap(fine)) ** 2 - abs(target.overlap(coarse)) ** 2) < 1e-10


def test_small_cutoff_raises_cutoff_error():
    with pytest.raises(CutoffError) as exc_info:
        simulate_link(_params(0.25, 0.3, 2.0), 0j, 0.1j, n_max=5)
    assert exc_info.value.n_max == 5
    assert exc_info.value.suggested_n_max > 5
    assert "try n_max" in str(exc_info.value)


def test_large_amplitude_raises_cutoff_error():
    with pytest.raises(CutoffError) as exc_info:
        simulate_link(_params(0.25, 0.1, 2.0), 40 + 0j, 0j, n_max=20)
    assert exc_info.value.tail > 1e-10


# --- Quadrature ---


def test_narrow_grid_raises_tail_error():
    params = _params(0.25, 0.3, 2.0)
    grid = QuadratureGrid(half_width=1.0, points=41)
    with pytest.raises(QuadratureTailError) as exc_info:
        quadrature_metrics(params, grid=grid)
    assert exc_info.value.min_half_width > 1.0
    assert exc_info.value.tail == pytest.approx(grid_tail(grid, 1 - 0.09 + 0.25 * 0.09, 1), rel=1e-12)


def test_default_grid_contains_tail(oracle: OracleAPI):
    params = _params(0.25, 0.3, 2.0)
    grid = oracle.grid(params)
    assert grid.points == oracle.settings.grid_points
    assert grid_tail(grid, 1 - 0.09 + 0.25 * 0.09, 1) < oracle.settings.tail_tol


def test_quadrature_matches_closed_form(oracle: OracleAPI, links: LinkAPI):
    params = _params(0.25, 0.3, 2.0)
    brute = oracle.quadrature_metrics(params)
    closed = links.closed_form(params)
    assert brute.success_prob == pytest.approx(closed.success_prob, rel=1e-6)
    assert brute.fidelity == pytest.approx(closed.fidelity, rel=1e-6)


@pytest.mark.slow
def test_quadrature_is_converged_in_grid_points(oracle: OracleAPI):
    params = _params(0.1, 0.2, gain_tuned(0.1, 0.2), order=2)
    coarse = oracle.quadrature_metrics(params, grid=oracle.grid(params, points=201))
    fine = oracle.quadrature_metrics(params, grid=oracle.grid(params, points=401))
    assert abs(fine.success_prob - coarse.success_prob) < 1e-7
    assert abs(fine.fidelity - coarse.fidelity) < 1e-7


@pytest.mark.slow
@pytest.mark.dependency(depends=["closed_form_regression"], scope="session")
def test_quadrature_matches_engine_for_three_scissors():
    eta, chi = 0.1, 0.2
    params = _params(eta, chi, gain_tuned(eta, chi), order=3)
    brute = quadrature_metrics(params)
    engine = link_metrics(params)
    assert brute.success_prob == pytest.approx(engine.success_prob, rel=1e-6)
    assert brute.fidelity == pytest.approx(engine.fidelity, rel=1e-6)


@pytest.mark.slow
@pytest.mark.dependency(depends=["closed_form_regression"], scope="session")
def test_quadrature_is_alpha_independent():
    eta, chi = 0.1, 0.2
    params = _params(eta, chi, gain_tuned(eta, chi), order=2)
    at_origin = quadrature_metrics(params, 0j)
    shifted = quadrature_metrics(params, 1 + 0.5j)
    assert shifted.success_prob == pytest.approx(at_origin.success_prob, rel=1e-6)
    assert shifted.fidelity == pytest.approx(at_origin.fidelity, rel=1e-6)
