from pathlib import Path

import pytest

from cv_repeater.config import CONFIG_ENV_VAR, load_run_config, normalize_key, read_config_file
from cv_repeater.exceptions import ConfigError
from cv_repeater.models.config import Command, GridSpec


@pytest.fixture(autouse=True)
def no_env_config(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)


@pytest.fixture
def config_file(tmp_path: Path) -> Path:
    path = tmp_path / "repeater.env"
    path.write_text(
        "# link defaults\nETA=0.01\nchi=0.1\ngain-tuned=true\nORDER=2\nn_max=40\nworkers=2\n",
        encoding="utf-8",
    )
    return path


def test_normalize_key():
    assert normalize_key("--F-Target") == "f_target"
    assert normalize_key("ATTEN_DB_PER_KM") == "atten_db_per_km"


def test_read_config_file(config_file: Path):
    values = read_config_file(config_file)
    assert values == {"eta": "0.01", "chi": "0.1", "gain_tuned": "true", "order": "2", "n_max": "40", "workers": "2"}


def test_missing_file_raises(tmp_path: Path):
    with pytest.raises(ConfigError, match="not found"):
        read_config_file(tmp_path / "absent.env")


def test_unknown_key_raises(tmp_path: Path):
    path = tmp_path / "bad.env"
    path.write_text("eta=0.1\nwavelength=1550\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="wavelength"):
        read_config_file(path)


def test_key_without_value_raises(tmp_path: Path):
    path = tmp_path / "bad.env"
    path.write_text("eta\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="no value"):
        read_config_file(path)


# --- Run Configuration ---


def test_file_values_reach_run_and_settings(config_file: Path):
    config = load_run_config("link", {}, config_file)
    assert config.eta == 0.01
    assert config.gain_tuned
    assert config.order == 2
    assert config.settings.n_max == 40
    assert config.settings.workers == 2


def test_flags_override_file(config_file: Path):
    config = load_run_config("link", {"eta": 0.5, "order": None}, config_file)
    assert config.eta == 0.5
    assert config.order == 2


def test_gain_flag_replaces_tuned_file_value(config_file: Path):
    config = load_run_config("link", {"gain": 3.0}, config_file)
    assert config.gain == 3.0
    assert not config.gain_tuned


def test_env_var_names_the_file(config_file: Path, monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setenv(CONFIG_ENV_VAR, str(config_file))
    assert load_run_config("link").settings.n_max == 40


def test_grid_string_is_parsed():
    config = load_run_config("sweep", {"grid": "0.01:0.5:5", "chi": 0.1, "gain_tuned": True})
    assert config.grid == GridSpec(start=0.01, stop=0.5, points=5, spacing="log")


@pytest.mark.parametrize(
    "command, flags, message",
    [
        ("link", {"eta": 0.1, "chi": 0.1}, "needs --gain or --gain-tuned"),
        ("link", {"chi": 0.1, "gain": 2.0}, "needs --eta and --chi"),
        ("sweep", {"chi": 0.1, "gain_tuned": True}, "needs --grid"),
        ("sweep", {"grid": "0.1:0.5:3", "sweep_over": "chi", "gain_tuned": True}, "needs --eta"),
        ("fig5", {"links": 6}, "power of two"),
        ("fig3", {"eta": 1.5}, "eta"),
        ("fig3", {"n_max": 1}, "n_max"),
    ],
)
def test_invalid_combinations(command: Command, flags: dict, message: str):
    with pytest.raises(ConfigError, match=message):
        load_run_config(command, flags)


def test_unknown_flag_raises():
    with pytest.raises(ConfigError, match="colour"):
        load_run_config("fig3", {"colour": "blue"})
