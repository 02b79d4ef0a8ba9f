from cv_repeater.core.amplifier import AmplifierAPI
from cv_repeater.core.ec_link import LinkAPI
from cv_repeater.core.figures import FiguresAPI
from cv_repeater.core.optimizer import OptimizerAPI
from cv_repeater.core.oracle import OracleAPI
from cv_repeater.core.repeater import RepeaterAPI
from cv_repeater.core.verify import VerifyAPI
from cv_repeater.models.config import Settings


class RepeaterClient:
    """
    The main entry point to the repeater models.

    This class holds the shared numerical settings and provides access to the
    computation handlers, each created on first access.
    """

    def __init__(self, settings: Settings | None = None):
        """
        Initializes the client.

        Args:
            settings: Tolerances, search controls and oracle defaults. The
                package defaults are used when omitted.
        """
        self.settings = settings or Settings()

        # Private attributes to cache the handler instances upon first access
        self._amplifier: AmplifierAPI | None = None
        self._links: LinkAPI | None = None
        self._repeater: RepeaterAPI | None = None
        self._optimizer: OptimizerAPI | None = None
        self._oracle: OracleAPI | None = None
        self._figures: FiguresAPI | None = None
        self._verify: VerifyAPI | None = None

    @property
    def amplifier(self) -> AmplifierAPI:
        """Amplifier models and their number-basis coefficients."""
        if self._amplifier is None:
            self._amplifier = AmplifierAPI(self.settings)
        return self._amplifier

    @property
    def links(self) -> LinkAPI:
        """Single error-correction links: gain tuning, moment engine and closed forms."""
        if self._links is None:
            self._links = LinkAPI(self.settings)
        return self._links

    @property
    def repeater(self) -> RepeaterAPI:
        """Chains of links and the fibre distance conversions."""
        if self._repeater is None:
            self._repeater = RepeaterAPI(self.settings)
        return self._repeater

    @property
    def optimizer(self) -> OptimizerAPI:
        if self._optimizer is None:
            self._optimizer = OptimizerAPI(self.settings)
        return self._optimizer

    @property
    def oracle(self) -> OracleAPI:
        """Fock-space simulation and quadrature cross-checks."""
        if self._oracle is None:
            self._oracle = OracleAPI(self.settings)
        return self._oracle

    @property
    def figures(self) -> FiguresAPI:
        if self._figures is None:
            self._figures = FiguresAPI(self.settings)
        return self._figures

    @property
    def verify(self) -> VerifyAPI:
        """The invariant suite behind `cv-repeater verify`."""
        if self._verify is None:
            self._verify = VerifyAPI(self.settings)
        return self._verify
