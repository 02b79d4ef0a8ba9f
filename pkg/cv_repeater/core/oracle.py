"""
Brute-force cross-checks for the moment engine.

The error-correction circuit is simulated step by step on a truncated Fock
space (EPR projection onto <beta|, pure loss, amplifier, feed-forward
displacement) and the resulting norm and target overlap are integrated over
the measurement outcome beta on a 2-D grid.
"""

import logging
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import trapezoid
from scipy.special import eval_genlaguerre, gammainccinv, gammaincc, gammaln
from scipy.stats import poisson

from cv_repeater.core.amplifier import coefficients
from cv_repeater.core.base import BaseAPI
from cv_repeater.core.ec_link import clip_unit
from cv_repeater.exceptions import CutoffError, QuadratureTailError
from cv_repeater.models.config import Settings
from cv_repeater.models.link import EcParams, LinkMetrics
from cv_repeater.models.oracle import FockOperator, FockVector, QuadratureGrid

logger = logging.getLogger(__name__)

# chi^n_max must fall below this for the EPR expansion to count as converged
EPR_TAIL_TOL = 1e-12


def coherent_amplitudes(mu: ArrayLike, n_max: int) -> NDArray[np.complex128]:
    """
    Number-basis amplitudes exp(-|mu|^2/2) mu^n / sqrt(n!) for n = 0..n_max.

    Broadcasts over `mu`; the photon-number axis is appended last.
    """
    mu_arr = np.asarray(mu, dtype=np.complex128)[..., None]
    n = np.arange(n_max + 1)
    radius = np.abs(mu_arr)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_mag = np.where(n == 0, 0.0, n * np.log(radius)) - 0.5 * gammaln(n + 1.0) - 0.5 * radius**2
    return np.exp(log_mag) * np.exp(1j * n * np.angle(mu_arr))


def displacement_matrix(delta: ArrayLike, n_max: int, n_cols: int | None = None) -> NDArray[np.complex128]:
    """
    Matrix elements <m|D(delta)|n> for m = 0..n_max and n = 0..n_cols-1.

    Uses the associated-Laguerre closed form
        m >= n: sqrt(n!/m!) delta^(m-n) exp(-|delta|^2/2) L_n^(m-n)(|delta|^2)
        m <  n: sqrt(m!/n!) (-delta*)^(n-m) exp(-|delta|^2/2) L_m^(n-m)(|delta|^2)
    with the factorial ratio and the power taken in log space. Broadcasts over `delta`.
    """
    n_cols = n_max + 1 if n_cols is None else n_cols
    d = np.asarray(delta, dtype=np.complex128)[..., None, None]
    m = np.arange(n_max + 1)[:, None]
    n = np.arange(n_cols)[None, :]
    lo = np.minimum(m, n)
    diff = np.abs(m - n)
    radius2 = np.abs(d) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        log_power = np.where(diff == 0, 0.0, diff * np.log(np.abs(d)))
    log_mag = 0.5 * (gammaln(lo + 1.0) - gammaln(np.maximum(m, n) + 1.0)) + log_power - 0.5 * radius2
    phase_angle = np.where(m >= n, np.angle(d), np.angle(-np.conj(d)))
    laguerre = eval_genlaguerre(lo, diff, radius2)
    return np.exp(log_mag) * np.exp(1j * diff * phase_angle) * laguerre


def _check_epr_tail(chi: float, n_max: int) -> None:
    if chi > 0 and chi**n_max >= EPR_TAIL_TOL:
        suggested = math.ceil(math.log(EPR_TAIL_TOL) / math.log(chi)) + 1
        raise CutoffError(
            "EPR expansion is not converged at this cutoff.", n_max=n_max, suggested_n_max=suggested, tail=chi**n_max
        )


def _suggest_cutoff(mean_photons: float, tail_tol: float, extra: int = 0) -> int:
    return int(poisson.isf(tail_tol, max(mean_photons, 1e-12))) + extra + 1


def _output_vectors(
    params: EcParams, alpha: complex, betas: NDArray[np.complex128], n_max: int
) -> NDArray[np.complex128]:
    """Un-normalised output amplitudes for a batch of outcomes, shape (len(betas), n_max + 1)."""
    eta, chi = params.eta, params.chi
    w = np.conj(betas) + alpha
    # <beta| D(-alpha*) |EPR>: a coherent state |chi w> with a Gaussian prefactor
    prefactor = math.sqrt((1 - chi**2) / math.pi) * np.exp(0.5 * np.abs(w) ** 2 * (chi**2 - 1))
    state = prefactor[:, None] * coherent_amplitudes(chi * w, n_max)

    # pure loss on a coherent state: |mu> -> |sqrt(eta) mu>, prefactor unchanged
    n = np.arange(n_max + 1)
    before = np.linalg.norm(state, axis=1)
    state = state * eta ** (n / 2)
    after = np.linalg.norm(state, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        state = state * np.where(after > 0, before / after, 0.0)[:, None]

    # amplifier: |n> -> t_n |n>, nothing above the truncation order survives
    t = coefficients(params.amplifier)
    n_keep = t.size
    amplified = state[:, :n_keep] * t

    delta = -params.effective_gain * np.conj(betas)
    return np.einsum("pmn,pn->pm", displacement_matrix(delta, n_max, n_keep), amplified)


def simulate_link(
    params: EcParams,
    alpha: complex,
    beta: complex,
    n_max: int = 30,
    tail_tol: float = 1e-10,
) -> FockVector:
    """
    Un-normalised heralded output of one link for dual-homodyne outcome `beta`.

    Raises:
        CutoffError: If the EPR expansion, the projected coherent state or the
            displaced output leaves more than `tail_tol` outside n_max.
    """
    _check_epr_tail(params.chi, n_max)
    w = complex(np.conj(beta) + alpha)
    mean = abs(params.chi * w) ** 2
    tail = float(poisson.sf(n_max, mean))
    if tail > tail_tol:
        raise CutoffError(
            "Projected coherent state is truncated.",
            n_max=n_max,
            suggested_n_max=_suggest_cutoff(mean, tail_tol),
            tail=tail,
        )

    vector = FockVector(cutoff=n_max, amplitudes=_output_vectors(params, alpha, np.array([beta]), n_max)[0])

    # the displacement is unitary; any norm missing from the truncated result is tail
    t = coefficients(params.amplifier)
    undisplaced = np.sum(np.abs(_pre_displacement(params, w, t.size)) ** 2)
    lost = 1.0 - vector.norm_squared() / undisplaced if undisplaced > 0 else 0.0
    if lost > tail_tol:
        delta = params.effective_gain * abs(beta)
        raise CutoffError(
            "Displaced output is truncated.",
            n_max=n_max,
            suggested_n_max=_suggest_cutoff((delta + math.sqrt(t.size - 1)) ** 2, tail_tol, t.size),
            tail=lost,
        )
    logger.debug("simulated beta=%s alpha=%s: |psi|^2=%.12g", beta, alpha, vector.norm_squared())
    return vector


def _pre_displacement(params: EcParams, w: complex, n_keep: int) -> NDArray[np.complex128]:
    chi, eta = params.chi, params.eta
    prefactor = math.sqrt((1 - chi**2) / math.pi) * math.exp(0.5 * abs(w) ** 2 * (chi**2 - 1 - eta * chi**2))
    mu = math.sqrt(eta) * chi * w
    amps = coherent_amplitudes(mu, n_keep - 1) * math.exp(0.5 * abs(mu) ** 2)
    return prefactor * amps * coefficients(params.amplifier)


def target_state(params: EcParams, alpha: complex, n_max: int, tail_tol: float = 1e-10) -> FockVector:
    """The coherent target |g sqrt(eta) chi alpha> on the truncated space."""
    mu = params.effective_gain * alpha
    tail = float(poisson.sf(n_max, abs(mu) ** 2))
    if tail > tail_tol:
        raise CutoffError(
            "Target coherent state is truncated.",
            n_max=n_max,
            suggested_n_max=_suggest_cutoff(abs(mu) ** 2, tail_tol),
            tail=tail,
        )
    return FockVector(cutoff=n_max, amplitudes=coherent_amplitudes(mu, n_max))


def decay_exponents(params: EcParams) -> tuple[float, float]:
    """Gaussian decay in |w|^2 of the norm and of the overlap integrand."""
    norm = 1 - params.chi**2 + params.eta * params.chi**2
    return norm, norm + params.effective_gain**2


def grid_tail(grid: QuadratureGrid, decay: float, degree: int) -> float:
    """
    Fraction of a degree-`degree` radial integrand lying outside the disk
    inscribed in the grid, Q(degree + 1, s L^2); an upper bound over all terms.
    """
    return float(gammaincc(degree + 1, decay * grid.half_width**2))


def default_grid(decay: float, settings: Settings) -> QuadratureGrid:
    return QuadratureGrid(half_width=settings.grid_sigmas / math.sqrt(decay), points=settings.grid_points)


def _check_grid(grid: QuadratureGrid, decay: float, degree: int, tol: float, name: str) -> None:
    tail = grid_tail(grid, decay, degree)
    if tail > tol:
        min_half_width = math.sqrt(float(gammainccinv(degree + 1, tol)) / decay)
        raise QuadratureTailError(
            f"Grid too narrow for the {name} integrand.", tail=tail, min_half_width=min_half_width
        )


def _integrate(values_for: "_RowEvaluator", grid: QuadratureGrid, centre: complex) -> float:
    nodes = grid.nodes()
    rows = np.empty(grid.points)
    for j, x in enumerate(nodes):
        betas = centre + x + 1j * nodes
        rows[j] = trapezoid(values_for(betas), nodes)
    return float(trapezoid(rows, nodes))


class _RowEvaluator:
    """Integrand values along one grid row of outcomes beta."""

    def __init__(self, params: EcParams, alpha: complex, n_max: int, target: FockVector, quantity: str):
        self._params = params
        self._alpha = alpha
        self._n_max = n_max
        self._target = np.conj(target.amplitudes)
        self._quantity = quantity

    def __call__(self, betas: NDArray[np.complex128]) -> NDArray[np.float64]:
        vectors = _output_vectors(self._params, self._alpha, betas, self._n_max)
        if self._quantity == "norm":
            return np.asarray(np.sum(np.abs(vectors) ** 2, axis=1), dtype=np.float64)
        return np.asarray(np.abs(vectors @ self._target) ** 2, dtype=np.float64)


def quadrature_metrics(
    params: EcParams,
    alpha: complex = 0j,
    grid: QuadratureGrid | None = None,
    *,
    n_max: int | None = None,
    settings: Settings | None = None,
) -> LinkMetrics:
    """
    Integrates the simulated norm and target overlap over beta on a grid
    centred at beta = -alpha*, where w = beta* + alpha vanishes.

    Without an explicit grid each integrand gets its own half-width
    `grid_sigmas / sqrt(s)` for its decay exponent s.

    Raises:
        QuadratureTailError: If a grid does not contain the Gaussian tail.
        CutoffError: If the cutoff is too small for the EPR state or the target.
    """
    settings = settings or Settings()
    n_max = settings.n_max if n_max is None else n_max
    _check_epr_tail(params.chi, n_max)
    order = params.amplifier.order
    norm_decay, overlap_decay = decay_exponents(params)
    norm_grid = grid or default_grid(norm_decay, settings)
    overlap_grid = grid or default_grid(overlap_decay, settings)
    _check_grid(norm_grid, norm_decay, order, settings.tail_tol, "norm")
    _check_grid(overlap_grid, overlap_decay, 2 * order, settings.tail_tol, "overlap")

    target = target_state(params, alpha, n_max, settings.tail_tol)
    centre = -complex(np.conj(alpha))
    logger.debug("quadrature: %d^2 nodes, half-widths %.4g / %.4g", norm_grid.points, norm_grid.half_width,
                 overlap_grid.half_width)
    success = _integrate(_RowEvaluator(params, alpha, n_max, target, "norm"), norm_grid, centre)
    overlap = _integrate(_RowEvaluator(params, alpha, n_max, target, "overlap"), overlap_grid, centre)
    fidelity = overlap / success
    return LinkMetrics(
        fidelity=clip_unit(fidelity, "fidelity"),
        success_prob=clip_unit(success, "success_prob"),
        effective_gain=params.effective_gain,
    )


class OracleAPI(BaseAPI):
    """
    Handler for the brute-force Fock-space simulation and quadrature used to
    certify the moment engine.
    """

    def simulate_link(self, params: EcParams, alpha: complex, beta: complex, n_max: int | None = None) -> FockVector:
        n_max = self._settings.n_max if n_max is None else n_max
        return simulate_link(params, alpha, beta, n_max, self._settings.tail_tol)

    def displacement(self, delta: complex, n_max: int | None = None) -> FockOperator:
        n_max = self._settings.n_max if n_max is None else n_max
        return FockOperator(cutoff=n_max, matrix=displacement_matrix(delta, n_max))

    def coherent_state(self, mu: complex, n_max: int | None = None) -> FockVector:
        n_max = self._settings.n_max if n_max is None else n_max
        return FockVector(cutoff=n_max, amplitudes=coherent_amplitudes(mu, n_max))

    def grid(self, params: EcParams, points: int | None = None) -> QuadratureGrid:
        """A grid wide enough for both integrands of `params`."""
        norm_decay, _ = decay_exponents(params)
        return self._validate(
            QuadratureGrid,
            half_width=self._settings.grid_sigmas / math.sqrt(norm_decay),
            points=points or self._settings.grid_points,
        )

    def quadrature_metrics(
        self, params: EcParams, alpha: complex = 0j, grid: QuadratureGrid | None = None, n_max: int | None = None
    ) -> LinkMetrics:
        return quadrature_metrics(params, alpha, grid, n_max=n_max, settings=self._settings)
