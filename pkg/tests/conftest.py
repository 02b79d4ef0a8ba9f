import pytest

from cv_repeater import RepeaterClient
from cv_repeater.core.ec_link import LinkAPI
from cv_repeater.models.config import GridSpec, Settings
from cv_repeater.models.link import EcParams

# --- Reference Parameters ---
# 100 km links at 0.2 dB/km, chi = 0.1, gain tuned: g = 0.01^(-1/4) / 0.1
TABLE1_ETA = 0.01
TABLE1_CHI = 0.1
TABLE1_GAIN = 31.6227766016838


@pytest.fixture(scope="session")
def client() -> RepeaterClient:
    """One client with default settings for the whole session."""
    print("\nCreating RepeaterClient with default settings...")
    return RepeaterClient()


@pytest.fixture(scope="session")
def links(client: RepeaterClient) -> LinkAPI:
    return client.links


@pytest.fixture(scope="session")
def one_scissor_link(links: LinkAPI) -> EcParams:
    """The one-scissor link of the distance table."""
    return links.params(TABLE1_ETA, TABLE1_CHI, kind="scissors", order=1)


@pytest.fixture(scope="session")
def two_scissor_link(links: LinkAPI) -> EcParams:
    """The two-scissor link of the distance table, at the same chi."""
    return links.params(TABLE1_ETA, TABLE1_CHI, kind="scissors", order=2)


@pytest.fixture(scope="session")
def coarse_grid() -> GridSpec:
    """A short transmission grid for sweeps that only check structure."""
    return GridSpec(start=0.01, stop=0.5, points=5, spacing="log")


@pytest.fixture(scope="session")
def fast_settings() -> Settings:
    """Settings with a shorter chi scan for sweep-heavy tests."""
    return Settings(scan_points=24)
