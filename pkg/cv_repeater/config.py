import logging
import os
from collections.abc import Mapping
from pathlib import Path
from typing import Any

from dotenv import dotenv_values
from pydantic import ValidationError

from cv_repeater.exceptions import ConfigError
from cv_repeater.models.config import Command, RunConfig, Settings
from cv_repeater.utils import parse_grid, validation_message

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "CV_REPEATER_CONFIG"

RUN_KEYS = frozenset(RunConfig.model_fields) - {"command", "settings"}
SETTINGS_KEYS = frozenset(Settings.model_fields)
GAIN_KEYS = frozenset({"gain", "gain_tuned"})


def normalize_key(key: str) -> str:
    """`--F-Target`, `f-target` and `F_TARGET` all name the `f_target` flag."""
    return key.strip().lstrip("-").replace("-", "_").lower()


def read_config_file(path: Path | str) -> dict[str, str]:
    """
    Reads a flat KEY=VALUE file whose keys mirror the CLI long flags.

    Raises:
        ConfigError: If the file is missing, a key is unknown or has no value.
    """
    source = Path(path)
    if not source.is_file():
        raise ConfigError(f"Config file not found: {source}")

    values: dict[str, str] = {}
    for raw_key, raw_value in dotenv_values(source).items():
        key = normalize_key(raw_key)
        if key not in RUN_KEYS | SETTINGS_KEYS:
            raise ConfigError(f"Unknown key '{raw_key}' in config file {source}")
        if raw_value is None:
            raise ConfigError(f"Key '{raw_key}' in config file {source} has no value")
        values[key] = raw_value
    logger.debug("Read %d keys from %s", len(values), source)
    return values


def _config_path(explicit: Path | str | None) -> Path | None:
    if explicit is not None:
        return Path(explicit)
    from_env = os.environ.get(CONFIG_ENV_VAR)
    return Path(from_env) if from_env else None


def load_run_config(
    command: Command,
    flags: Mapping[str, Any] | None = None,
    config_path: Path | str | None = None,
) -> RunConfig:
    """
    Builds the validated configuration of one run.

    Values come from the config file (`config_path`, or the file named by
    `CV_REPEATER_CONFIG`), then from `flags`; flags set to None are treated as
    absent, so explicit flags always override the file.

    Raises:
        ConfigError: For unreadable files, unknown keys and invalid values or combinations.
    """
    merged: dict[str, Any] = {}
    path = _config_path(config_path)
    if path is not None:
        merged.update(read_config_file(path))

    explicit: dict[str, Any] = {}
    for key, value in (flags or {}).items():
        name = normalize_key(key)
        if name not in RUN_KEYS | SETTINGS_KEYS:
            raise ConfigError(f"Unknown option '{key}'")
        if value is not None:
            explicit[name] = value
    # --gain and --gain-tuned are one choice; a flag for either replaces the file's
    if explicit.keys() & GAIN_KEYS:
        for key in GAIN_KEYS:
            merged.pop(key, None)
    merged.update(explicit)

    if isinstance(merged.get("grid"), str):
        merged["grid"] = parse_grid(merged["grid"])

    run_values = {k: v for k, v in merged.items() if k in RUN_KEYS}
    settings_values = {k: v for k, v in merged.items() if k in SETTINGS_KEYS}
    try:
        settings = Settings(**settings_values)
        return RunConfig(command=command, settings=settings, **run_values)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {validation_message(e)}") from e
