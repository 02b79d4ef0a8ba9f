import logging
from typing import Any, Literal

import polars as pl

from cv_repeater.core.base import BaseAPI
from cv_repeater.core.ec_link import LinkAPI
from cv_repeater.core.optimizer import OptimizerAPI
from cv_repeater.core.oracle import OracleAPI
from cv_repeater.core.repeater import RepeaterAPI
from cv_repeater.exceptions import ParameterError
from cv_repeater.models.amplifier import AmplifierSpec
from cv_repeater.models.common import AmplifierKind
from cv_repeater.models.config import GridSpec, Settings
from cv_repeater.models.figures import Fig3Row, Fig4Row, Fig5Row, LinkRow, Table1Row
from cv_repeater.models.link import EcParams, LinkMetrics
from cv_repeater.utils import format_float, frame_from_rows, grid_values

logger = logging.getLogger(__name__)

DEFAULT_ETA_GRID = GridSpec(start=0.001, stop=0.9, points=60, spacing="log")
FIG4_CURVES = tuple(AmplifierSpec(kind="scissors", order=n) for n in (1, 2, 3))
FIG5_LINKS = (2, 4, 8)

# --- Distance table: 100 km segments at chi = 0.1, published (F_M, P_M) per scissor count ---
TABLE1_CHI = 0.1
TABLE1_CHAINS = ((200.0, 2), (400.0, 4), (800.0, 8))
TABLE1_PUBLISHED: dict[int, tuple[tuple[float, float], ...]] = {
    1: ((0.98, 1e-3), (0.94, 1.2e-6), (0.87, 1.3e-9)),
    2: ((0.99, 1.1e-6), (0.98, 1.2e-12), (0.97, 1.3e-18)),
}


def table1_within_tolerance(
    scissors: int, links: int, fidelity: float, success: float, published: tuple[float, float]
) -> bool:
    """
    One scissor: F within 0.005, P within 10% (the two-link cell, quoted as
    0.001, accepts 1.0e-3 to 1.2e-3). Two scissors: F within 0.01, P within a factor of 2.
    """
    f_pub, p_pub = published
    if scissors == 1:
        if links == 2:
            p_ok = 1.0e-3 <= success <= 1.2e-3
        else:
            p_ok = abs(success / p_pub - 1) <= 0.1
        return abs(fidelity - f_pub) <= 0.005 and p_ok
    return abs(fidelity - f_pub) <= 0.01 and 0.5 <= success / p_pub <= 2


class FiguresAPI(BaseAPI):
    """
    Reproduces the fidelity, success-probability and chain figures, the
    distance table and custom sweeps as Polars DataFrames.
    """

    def __init__(self, settings: Settings):
        super().__init__(settings)
        self.links = LinkAPI(settings)
        self.optimizer = OptimizerAPI(settings)
        self.repeater = RepeaterAPI(settings)
        self.oracle = OracleAPI(settings)

    # --- Figures ---

    def fig3_rows(self, grid: GridSpec = DEFAULT_ETA_GRID) -> list[Fig3Row]:
        sweep = self.optimizer.sweep_spec(grid_values(grid))
        return [
            Fig3Row(
                eta_eff=opt.eta,
                kind=opt.kind,
                order=opt.order,
                fidelity_two_link_max=opt.fidelity_two_link,
                argmax_chi=opt.argmax_chi,
                success_prob=opt.success_prob,
                fidelity_link=opt.fidelity_link,
            )
            for opt in self.optimizer.max_fidelity_sweep(sweep)
        ]

    def fig3(self, grid: GridSpec = DEFAULT_ETA_GRID) -> pl.DataFrame:
        """Maximum two-link fidelity per transmission for one, two, three scissors and the optimal N=2 amplifier."""
        return frame_from_rows(self.fig3_rows(grid), Fig3Row)

    def fig4_rows(
        self, grid: GridSpec = DEFAULT_ETA_GRID, f_target: float = 0.99, *, per_link: bool = False
    ) -> list[Fig4Row]:
        sweep = self.optimizer.sweep_spec(grid_values(grid), f_target, curves=FIG4_CURVES)
        return [
            Fig4Row(
                eta_eff=sol.eta,
                kind=sol.kind,
                order=sol.order,
                f_target=sol.target_fidelity,
                success_prob=sol.success_prob,
                chi=sol.chi,
                status=sol.status,
            )
            for sol in self.optimizer.fixed_fidelity_sweep(sweep, per_link=per_link)
        ]

    def fig4(
        self, grid: GridSpec = DEFAULT_ETA_GRID, f_target: float = 0.99, *, per_link: bool = False
    ) -> pl.DataFrame:
        """Success probability at a fixed fidelity; infeasible cells keep an empty P."""
        return frame_from_rows(self.fig4_rows(grid, f_target, per_link=per_link), Fig4Row)

    def fig5_rows(
        self,
        grid: GridSpec = DEFAULT_ETA_GRID,
        chi: float = 0.1,
        order: int = 1,
        link_counts: tuple[int, ...] = FIG5_LINKS,
    ) -> list[Fig5Row]:
        def rows_at(eta: float) -> list[Fig5Row]:
            params = self.links.params(eta, chi, kind="scissors", order=order)
            metrics = self.links.metrics(params)
            rows = []
            for m in link_counts:
                chain = self.repeater.compose(metrics, m)
                rows.append(
                    Fig5Row(
                        eta_eff=eta,
                        links=m,
                        fidelity_link=metrics.fidelity,
                        fidelity_bound=chain.composed.fidelity_bound,
                        success_prob=chain.composed.success_prob,
                    )
                )
            return rows

        per_eta = self._map_ordered(rows_at, grid_values(grid))
        return [row for rows in per_eta for row in rows]

    def fig5(
        self,
        grid: GridSpec = DEFAULT_ETA_GRID,
        chi: float = 0.1,
        order: int = 1,
        link_counts: tuple[int, ...] = FIG5_LINKS,
    ) -> pl.DataFrame:
        """Chain fidelity bound against transmission at fixed entanglement strength."""
        return frame_from_rows(self.fig5_rows(grid, chi, order, link_counts), Fig5Row)

    # --- Distance table ---

    def table1_rows(self) -> list[Table1Row]:
        rows = []
        for i, (distance, m) in enumerate(TABLE1_CHAINS):
            eta_link = self.repeater.distance_to_transmission(distance / m)
            for scissors, published in TABLE1_PUBLISHED.items():
                reference = published[i]
                params = self.links.params(eta_link, TABLE1_CHI, kind="scissors", order=scissors)
                chain = self.repeater.chain_for_distance(distance, m, params)
                fidelity, success = chain.composed.fidelity_bound, chain.composed.success_prob
                within = table1_within_tolerance(scissors, m, fidelity, success, reference)
                if not within:
                    logger.warning(
                        "%g km, %d scissor(s): F_M=%.4f P_M=%.3e deviates from published (%g, %g)",
                        distance, scissors, fidelity, success, *reference,
                    )
                rows.append(
                    Table1Row(
                        distance_km=distance,
                        links=m,
                        scissors=scissors,
                        chi=TABLE1_CHI,
                        eta_link=eta_link,
                        fidelity_bound=fidelity,
                        success_prob=success,
                        published_fidelity=reference[0],
                        published_success_prob=reference[1],
                        within_tolerance=within,
                    )
                )
        return rows

    def table1(self) -> pl.DataFrame:
        """Fidelity bound and success probability for 200, 400 and 800 km with one and two scissors."""
        return frame_from_rows(self.table1_rows(), Table1Row)

    # --- Single links and custom sweeps ---

    def _link_row(
        self, params: EcParams, metrics: LinkMetrics, links: int, source: Literal["engine", "closed_form", "oracle"]
    ) -> LinkRow:
        chain = self.repeater.compose(metrics, links)
        return LinkRow(
            eta=params.eta,
            chi=params.chi,
            gain=params.gain,
            kind=params.amplifier.kind,
            order=params.amplifier.order,
            links=links,
            fidelity_link=metrics.fidelity,
            success_prob_link=metrics.success_prob,
            effective_gain=metrics.effective_gain,
            fidelity_bound=chain.composed.fidelity_bound,
            success_prob_chain=chain.composed.success_prob,
            source=source,
        )

    def link_rows(self, params: EcParams, links: int = 2, *, oracle: bool = False) -> list[LinkRow]:
        """
        The engine result for one link, followed by the analytic closed form when
        the amplifier is a single scissor and, with `oracle`, the quadrature result.
        """
        rows = [self._link_row(params, self.links.metrics(params), links, "engine")]
        if params.amplifier.kind == "scissors" and params.amplifier.order == 1:
            rows.append(self._link_row(params, self.links.closed_form(params), links, "closed_form"))
        if oracle:
            rows.append(self._link_row(params, self.oracle.quadrature_metrics(params), links, "oracle"))
        return rows

    def link(self, params: EcParams, links: int = 2, *, oracle: bool = False) -> pl.DataFrame:
        return frame_from_rows(self.link_rows(params, links, oracle=oracle), LinkRow)

    def sweep_rows(
        self,
        grid: GridSpec,
        *,
        sweep_over: Literal["eta", "chi"] = "eta",
        eta: float | None = None,
        chi: float | None = None,
        kind: AmplifierKind = "scissors",
        order: int = 1,
        gain: float | None = None,
        links: int = 2,
    ) -> list[LinkRow]:
        """
        Engine results along an eta or chi grid with the other one fixed. A
        missing `gain` means the gain is re-tuned at every grid point.

        Raises:
            ParameterError: If the parameter held fixed is missing.
        """
        fixed = chi if sweep_over == "eta" else eta
        if fixed is None:
            other = "chi" if sweep_over == "eta" else "eta"
            raise ParameterError(f"Sweeping over {sweep_over} needs a fixed {other}.", field=other, value=None)

        def row_at(value: float) -> LinkRow:
            point_eta, point_chi = (value, fixed) if sweep_over == "eta" else (fixed, value)
            params = self.links.params(point_eta, point_chi, kind=kind, order=order, gain=gain)
            return self._link_row(params, self.links.metrics(params), links, "engine")

        values = grid_values(grid)
        logger.info("Sweeping %s over %d points", sweep_over, len(values))
        return self._map_ordered(row_at, values)

    def sweep(self, grid: GridSpec, **kwargs: Any) -> pl.DataFrame:
        return frame_from_rows(self.sweep_rows(grid, **kwargs), LinkRow)


def render_table1(df: pl.DataFrame) -> str:
    """Formats the distance table for a terminal, one line per distance and scissor count."""
    header = f"{'distance':>9} {'M':>2} {'N':>2} {'F_M':>8} {'P_M':>10} {'F_pub':>6} {'P_pub':>8}  flag"
    lines = [header, "-" * len(header)]
    for row in df.iter_rows(named=True):
        flag = "ok" if row["within_tolerance"] else "DEVIATES"
        lines.append(
            f"{format_float(row['distance_km']):>6} km {row['M']:>2} {row['N']:>2} {row['F_M']:>8.4f} "
            f"{row['P_M']:>10.3e} {row['F_published']:>6.2f} {row['P_published']:>8.1e}  {flag}"
        )
    return "\n".join(lines)
