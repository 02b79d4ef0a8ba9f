import logging
import math
from collections.abc import Callable
from itertools import pairwise

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import bisect

from cv_repeater.core.base import BaseAPI
from cv_repeater.core.ec_link import gain_tuned, link_metrics
from cv_repeater.exceptions import ParameterError
from cv_repeater.models.amplifier import AmplifierSpec
from cv_repeater.models.config import Settings
from cv_repeater.models.link import EcParams, LinkMetrics
from cv_repeater.models.optimizer import DEFAULT_CURVES, FidelityOptimum, FixedFidelitySolution, SweepSpec

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """
    Golden-section search for the maximum of a unimodal f on [a, b].

    Returns the midpoint of the final bracket, whose width is <= tol.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        return (a + b) / 2

    # Required steps to achieve tolerance
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)

    for _ in range(n - 1):
        if yc > yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    if yc > yd:
        return (a + d) / 2
    return (c + b) / 2


def tuned_link(eta: float, spec: AmplifierSpec, chi: float) -> tuple[EcParams, LinkMetrics]:
    """A link at entanglement strength chi with the gain tuned to eta."""
    params = EcParams(eta=eta, chi=chi, amplifier=spec.with_gain(gain_tuned(eta, chi)))
    return params, link_metrics(params)


def _check_eta(eta: float) -> None:
    if not 0 < eta < 1:
        raise ParameterError("Effective transmission must lie in (0, 1).", field="eta", value=eta)


def _objective(eta: float, spec: AmplifierSpec, per_link: bool) -> Callable[[float], float]:
    def value(chi: float) -> float:
        f = tuned_link(eta, spec, chi)[1].fidelity
        return f if per_link else f * f

    return value


def _chi_grid(settings: Settings) -> NDArray[np.float64]:
    return np.geomspace(settings.chi_min, settings.chi_max, settings.scan_points)


def max_fidelity_two_links(eta: float, spec: AmplifierSpec, settings: Settings | None = None) -> FidelityOptimum:
    """
    Maximises the two-link fidelity F(eta, chi, g(chi))^2 over chi under gain tuning.

    A log-spaced scan over [chi_min, chi_max] locates the best node, golden-section
    search refines it between its neighbours, and ties within `tie_atol` go to the
    smallest chi. Suprema at the chi -> 0 edge are reported at chi_min.
    """
    settings = settings or Settings()
    _check_eta(eta)
    objective = _objective(eta, spec, per_link=False)
    chis = _chi_grid(settings)
    values = np.array([objective(float(c)) for c in chis])
    i = int(np.argmax(values))

    lo, hi = float(chis[max(i - 1, 0)]), float(chis[min(i + 1, chis.size - 1)])
    refined = golden_section_max(objective, lo, hi, settings.golden_xtol)
    candidates = [(float(c), float(v)) for c, v in zip(chis, values, strict=True)]
    candidates.append((refined, objective(refined)))

    best = max(v for _, v in candidates)
    argmax_chi = min(c for c, v in candidates if v >= best - settings.tie_atol)
    params, metrics = tuned_link(eta, spec, argmax_chi)
    logger.debug("max F^2 eta=%g %s -> %.12g at chi=%.6g", eta, spec.label, metrics.fidelity**2, argmax_chi)
    return FidelityOptimum(
        eta=eta,
        kind=spec.kind,
        order=spec.order,
        fidelity_two_link=metrics.fidelity**2,
        fidelity_link=metrics.fidelity,
        argmax_chi=argmax_chi,
        gain=params.gain,
        success_prob=metrics.success_prob,
    )


def success_at_fixed_fidelity(
    eta: float,
    spec: AmplifierSpec,
    f_target: float,
    *,
    per_link: bool = False,
    settings: Settings | None = None,
) -> FixedFidelitySolution:
    """
    Finds the entanglement strength at which the gain-tuned fidelity equals
    `f_target` (two-link composite unless `per_link`), and its success probability.

    Sign changes on the chi scan are bracketed and bisected; among several roots
    the one with the larger success probability wins. When the best achievable
    fidelity is below the target the result has status "infeasible".
    """
    settings = settings or Settings()
    _check_eta(eta)
    if not 0 < f_target < 1:
        raise ParameterError("Fidelity target must lie in (0, 1).", field="f_target", value=f_target)

    optimum = max_fidelity_two_links(eta, spec, settings)
    best = optimum.fidelity_link if per_link else optimum.fidelity_two_link
    common = {"eta": eta, "kind": spec.kind, "order": spec.order, "target_fidelity": f_target, "per_link": per_link}
    if best < f_target:
        logger.debug("eta=%g %s: max %.6g below target %.6g", eta, spec.label, best, f_target)
        return FixedFidelitySolution(status="infeasible", max_fidelity=best, **common)

    objective = _objective(eta, spec, per_link)

    def excess(chi: float) -> float:
        return objective(chi) - f_target

    chis = sorted({*(float(c) for c in _chi_grid(settings)), optimum.argmax_chi})
    excesses = [excess(c) for c in chis]
    roots = [c for c, h in zip(chis, excesses, strict=True) if h == 0]
    for (a, ha), (b, hb) in pairwise(zip(chis, excesses, strict=True)):
        if ha * hb < 0:
            roots.append(float(bisect(excess, a, b, xtol=settings.bisect_xtol)))
    if not roots:
        # the target holds on the whole interval; no crossing to pin down
        roots = [c for c, h in zip(chis, excesses, strict=True) if h >= 0]

    solutions = [tuned_link(eta, spec, chi) for chi in roots]
    params, metrics = max(solutions, key=lambda s: s[1].success_prob)
    return FixedFidelitySolution(
        status="ok",
        max_fidelity=best,
        chi=params.chi,
        gain=params.gain,
        success_prob=metrics.success_prob,
        fidelity_link=metrics.fidelity,
        **common,
    )


class OptimizerAPI(BaseAPI):
    """
    Handler for the two parameter problems behind the fidelity and
    success-probability figures, evaluated over sweep grids.
    """

    def max_fidelity_two_links(self, eta: float, spec: AmplifierSpec) -> FidelityOptimum:
        return max_fidelity_two_links(eta, spec, self._settings)

    def success_at_fixed_fidelity(
        self, eta: float, spec: AmplifierSpec, f_target: float, *, per_link: bool = False
    ) -> FixedFidelitySolution:
        return success_at_fixed_fidelity(eta, spec, f_target, per_link=per_link, settings=self._settings)

    def sweep_spec(
        self, etas: tuple[float, ...], f_target: float = 0.99, curves: tuple[AmplifierSpec, ...] = DEFAULT_CURVES
    ) -> SweepSpec:
        return self._validate(
            SweepSpec,
            effective_transmissions=etas,
            curves=curves,
            chi_min=self._settings.chi_min,
            chi_max=self._settings.chi_max,
            target_fidelity=f_target,
        )

    def _sweep_settings(self, sweep: SweepSpec) -> Settings:
        return self._settings.model_copy(update={"chi_min": sweep.chi_min, "chi_max": sweep.chi_max})

    def max_fidelity_sweep(self, sweep: SweepSpec) -> list[FidelityOptimum]:
        """Optima for every (curve, transmission) pair, grouped by transmission then curve."""
        settings = self._sweep_settings(sweep)
        points = [(eta, spec) for eta in sweep.effective_transmissions for spec in sweep.curves]
        logger.info("Maximising fidelity on %d points", len(points))
        return self._map_ordered(lambda p: max_fidelity_two_links(p[0], p[1], settings), points)

    def fixed_fidelity_sweep(self, sweep: SweepSpec, *, per_link: bool = False) -> list[FixedFidelitySolution]:
        settings = self._sweep_settings(sweep)
        points = [(eta, spec) for eta in sweep.effective_transmissions for spec in sweep.curves]
        logger.info("Solving fixed fidelity %.4g on %d points", sweep.target_fidelity, len(points))
        return self._map_ordered(
            lambda p: success_at_fixed_fidelity(
                p[0], p[1], sweep.target_fidelity, per_link=per_link, settings=settings
            ),
            points,
        )
