from __future__ import annotations

import enum
import json
import math
import sys
from collections.abc import Callable, Iterable, Mapping, Sequence
from io import StringIO
from pathlib import Path
from typing import TYPE_CHECKING, Any, cast

import numpy as np
import pandas as pd
from async_lru import alru_cache

from .analysis import Distribution
from .core import ExportError, InvalidParameterError
from .io import read_text, write_text
from .typing import T

if TYPE_CHECKING:
    from typing_extensions import Self
else:
    Self = Any

FLOAT_FORMAT = "%.17g"
"""Float format of exported files, 17 significant digits round-trip every double exactly."""

DISTRIBUTION_COLUMNS = ("step", "position", "probability")
"""The columns every distribution file contains."""


def format_float(value: float) -> str:
    """Formats the given float with 17 significant digits, `inf`, `-inf`, or `nan`."""
    if math.isnan(value):
        return "nan"

    if math.isinf(value):
        return "inf" if value > 0 else "-inf"

    return FLOAT_FORMAT % value


def format_complex(value: complex) -> str:
    """Formats the given complex number as `<real>+<imag>j`."""
    sign = "-" if value.imag < 0 else "+"
    return f"{format_float(value.real)}{sign}{format_float(abs(value.imag))}j"


class ValueFormatter:
    """
    Formatter of metadata values and JSON report fields.

    The formatter of a value is looked up by its exact type, base classes are not checked.
    Enums are the exception: every enum member is formatted by its value.
    """

    __slots__ = ("_default_formatter", "_value_formatters")

    def __init__(self, *, default_formatter: Callable[[Any], str] = str) -> None:
        """
        Initialization.

        Arguments:
            default_formatter: The formatter to use if no formatter is registered for a type.
        """
        self._default_formatter = default_formatter
        self._value_formatters: dict[type, Callable[[Any], str]] = self._base_formatters()

    def add(self, key: type[T], formatter: Callable[[T], str]) -> Self:
        """Registers the given value formatter under the given key."""
        self._value_formatters[key] = formatter
        return self

    def format_value(self, value: Any) -> str:
        """Formats the given value."""
        if isinstance(value, enum.Enum):
            return self.format_value(value.value)

        fmt = self._value_formatters.get(type(value), self._default_formatter)
        return fmt(value)

    def format_metadata(self, command: str, metadata: Mapping[str, Any]) -> str:
        """Returns the `#`-prefixed metadata line (with line ending) of an export."""
        fields = " ".join(f"{key}={self.format_value(value)}" for key, value in metadata.items())
        return f"# stepcoin {command} {fields}".rstrip() + "\n"

    def json_value(self, value: Any) -> Any:
        """Converts the given value to a strict JSON value."""
        if isinstance(value, enum.Enum):
            return self.json_value(value.value)

        if isinstance(value, (float, np.floating)):
            value = float(value)
            return value if math.isfinite(value) else format_float(value)

        if isinstance(value, np.integer):
            return int(value)

        if isinstance(value, (list, tuple)):
            return [self.json_value(v) for v in value]

        if isinstance(value, Mapping):
            return {str(k): self.json_value(v) for k, v in value.items()}

        return value

    def _base_formatters(self) -> dict[type, Callable[[Any], str]]:
        """Factory that creates the default value formatter mapping."""
        return {
            bool: lambda v: "true" if v else "false",
            float: format_float,
            np.float64: lambda v: format_float(float(v)),
            complex: format_complex,
            type(None): lambda _: "none",
            tuple: lambda v: ";".join(self.format_value(i) for i in v),
            list: lambda v: ";".join(self.format_value(i) for i in v),
        }


default_formatter = ValueFormatter()
"""The default value formatter."""

# -- Tables


def distribution_rows(distributions: Iterable[Distribution], **constants: Any) -> list[dict[str, Any]]:
    """
    Returns the long-format rows of the given distributions.

    Arguments:
        distributions: Distributions with a known step.
        constants: Extra columns with a constant value, placed before the distribution columns.

    Raises:
        InvalidParameterError: If a distribution has no step.
    """
    extra = {key: default_formatter.json_value(value) for key, value in constants.items()}
    rows: list[dict[str, Any]] = []
    for dist in distributions:
        if dist.step is None:
            raise InvalidParameterError("Exported distributions need a step.")

        rows.extend({**extra, "step": dist.step, "position": n, "probability": p} for n, p in dist.items())

    return rows


def chessboard_rows(distributions: Sequence[Distribution], reach: int) -> list[dict[str, Any]]:
    """
    Returns the step by position probability matrix of the given distributions.

    Columns are `step` and the positions `-reach..reach`, unoccupied cells are zero.
    """
    positions = range(-reach, reach + 1)
    return [{"step": d.step, **{str(n): d.get(n, 0.0) for n in positions}} for d in distributions]


# -- Formats


def to_csv(
    rows: Sequence[Mapping[str, Any]],
    command: str,
    metadata: Mapping[str, Any],
    *,
    columns: Sequence[str] | None = None,
) -> str:
    """
    Returns the CSV export of the given rows with a `#`-prefixed metadata line.

    Arguments:
        rows: Flat records with the same keys.
        command: The name of the command that produced the rows.
        metadata: Parameters of the run, written to the metadata line.
        columns: Column order, the keys of the first row by default.
    """
    frame = pd.DataFrame(
        [{k: v.value if isinstance(v, enum.Enum) else v for k, v in r.items()} for r in rows],
        columns=None if columns is None else list(columns),
    )
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return default_formatter.format_metadata(command, metadata) + body


def to_json(rows: Sequence[Mapping[str, Any]]) -> str:
    """
    Returns the JSON export of the given flat records. Non-finite floats are written as strings.
    """
    return json.dumps([default_formatter.json_value(r) for r in rows], indent=2, allow_nan=False) + "\n"


def parse_distributions(text: str) -> dict[int, Distribution]:
    """
    Parses the distributions of a long-format CSV export.

    Returns:
        Step to distribution mapping.

    Raises:
        ExportError: If the text is not a distribution table.
        InvalidParameterError: If a distribution is invalid.
    """
    try:
        frame = pd.read_csv(StringIO(text), comment="#", float_precision="round_trip")
    except (ValueError, pd.errors.ParserError) as e:
        raise ExportError("Distribution table decoding failed.") from e

    if missing := set(DISTRIBUTION_COLUMNS) - set(frame.columns):
        raise ExportError(f"Missing distribution columns: {', '.join(sorted(missing))}.")

    if frame.duplicated(["step", "position"]).any():
        raise ExportError("The table contains more than one distribution per step.")

    result: dict[int, Distribution] = {}
    for step, group in frame.groupby("step", sort=True):
        positions = (int(n) for n in group["position"])
        probabilities = (float(p) for p in group["probability"])
        index = int(cast(int, step))
        result[index] = Distribution(dict(zip(positions, probabilities)), step=index)

    return result


# -- Files


async def write_output(path: Path | None, text: str) -> None:
    """
    Writes the given text to the given path, or to the standard output if `path` is `None`.

    Raises:
        ExportError: If the file can't be written.
    """
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return

    await write_text(path, text)


@alru_cache(8)
async def load_distribution_file(path: Path) -> Mapping[int, Distribution]:
    """
    Loads the distributions of an exported CSV file.

    Arguments:
        path: The path of the file.

    Returns:
        Step to distribution mapping.

    Raises:
        ExportError: If the file can't be read or decoded.
        InvalidParameterError: If a distribution is invalid.
    """
    return parse_distributions(await read_text(path))
