from collections.abc import Sequence
from pathlib import Path

import numpy as np
import polars as pl
from pydantic import BaseModel, ValidationError

from cv_repeater.exceptions import ConfigError, OutputError
from cv_repeater.models.config import GridSpec

FLOAT_FORMAT = ".12g"


def format_float(value: float) -> str:
    """Formats a float with 12 significant digits, the fixed CSV number format."""
    return format(value, FLOAT_FORMAT)


def is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0


def parse_grid(text: str) -> GridSpec:
    """
    Parses a `start:stop:points:log|lin` grid description.

    The spacing may be omitted and defaults to `log`, e.g. `0.001:0.9:60`.
    """
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ConfigError(f"Grid '{text}' must look like start:stop:points[:log|lin].")
    try:
        return GridSpec(
            start=float(parts[0]),
            stop=float(parts[1]),
            points=int(parts[2]),
            spacing=parts[3] if len(parts) == 4 else "log",  # type: ignore[arg-type]
        )
    except ValueError as e:
        # pydantic's ValidationError is a ValueError too
        raise ConfigError(f"Invalid grid '{text}': {e}") from e


def grid_values(grid: GridSpec) -> tuple[float, ...]:
    """Grid nodes in ascending construction order."""
    if grid.spacing == "log":
        values = np.geomspace(grid.start, grid.stop, grid.points)
    else:
        values = np.linspace(grid.start, grid.stop, grid.points)
    return tuple(float(v) for v in values)


def frame_from_rows(rows: Sequence[BaseModel], model: type[BaseModel]) -> pl.DataFrame:
    """
    Converts row models into a Polars DataFrame whose columns are the model's
    aliases, in field order.
    """
    columns = [field.alias or name for name, field in model.model_fields.items()]
    if not rows:
        return pl.DataFrame({name: [] for name in columns})
    return pl.from_dicts([row.model_dump(by_alias=True) for row in rows], infer_schema_length=None).select(columns)


def _csv_ready(df: pl.DataFrame) -> pl.DataFrame:
    exprs = []
    for name, dtype in df.schema.items():
        if dtype.is_float():
            exprs.append(pl.col(name).map_elements(format_float, return_dtype=pl.String))
        else:
            exprs.append(pl.col(name))
    return df.select(exprs)


def to_csv_text(df: pl.DataFrame) -> str:
    """Renders a frame as deterministic CSV text: header first, '\\n' rows, empty nulls."""
    return _csv_ready(df).write_csv(line_terminator="\n", null_value="")


def write_csv(df: pl.DataFrame, path: Path | str) -> Path:
    """
    Writes a frame as deterministic CSV.

    Raises:
        OutputError: If the file or its directory cannot be written.
    """
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(to_csv_text(df), encoding="utf-8", newline="")
    except OSError as e:
        raise OutputError(f"Failed to write CSV ({e.strerror or e})", path=target) from e
    return target


def validation_message(error: ValidationError) -> str:
    """Joins pydantic error entries into one actionable line."""
    parts = []
    for entry in error.errors():
        loc = ".".join(str(p) for p in entry["loc"]) or "value"
        parts.append(f"{loc}: {entry['msg']}")
    return "; ".join(parts)
