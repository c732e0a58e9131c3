from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, ClassVar, TypedDict, cast

from async_lru import alru_cache

from .core import ExportError, InvalidParameterError
from .io import read_text


class ClassifierThresholds(TypedDict, total=False):
    """Tunable thresholds of the walk classifier."""

    support_threshold: float
    """Probabilities below this value are neglected when occupied positions are counted."""

    splitting_max_support: int
    """Maximum number of occupied positions of re-localizing, periodically splitting walks."""

    residual_threshold: float
    """Largest median Gaussian fit residual of classical walks."""

    peak_prominence: float
    """Minimum prominence of a distribution peak."""

    peak_offset_limit: float
    """Largest mean offset (in standard deviations) of the global maximum of semi-classical walks."""

    window_fraction: float
    """The classifier aggregates the steps after `horizon * window_fraction`."""


_default_thresholds: ClassifierThresholds = {
    "support_threshold": 1e-4,
    "splitting_max_support": 3,
    "residual_threshold": 0.1,
    "peak_prominence": 0.02,
    "peak_offset_limit": 0.5,
    "window_fraction": 0.5,
}


class ClassifierConfig:
    """
    Walk classifier configuration: the default thresholds updated with the given overrides.
    """

    __slots__ = ("_thresholds",)

    _default: ClassVar[ClassifierConfig | None] = None
    """The default instance or `None` if one hasn't been created already."""

    @classmethod
    def default(cls) -> ClassifierConfig:
        """
        Returns the default instance.
        """
        if cls._default is None:
            cls._default = ClassifierConfig()

        return cls._default

    def __init__(self, thresholds: ClassifierThresholds | None = None) -> None:
        """
        Initialization.

        Arguments:
            thresholds: Threshold overrides.

        Raises:
            InvalidParameterError: If an override is unknown or has an invalid value.
        """
        merged = {**_default_thresholds, **(thresholds or {})}
        _check_thresholds(merged)
        self._thresholds = cast(ClassifierThresholds, merged)

    def __repr__(self) -> str:
        return f"ClassifierConfig({dict(self._thresholds)!r})"

    @property
    def thresholds(self) -> ClassifierThresholds:
        """A copy of the complete threshold mapping."""
        return cast(ClassifierThresholds, dict(self._thresholds))

    @property
    def support_threshold(self) -> float:
        """Smallest probability of a site that counts as occupied."""
        return self._thresholds["support_threshold"]

    @property
    def splitting_max_support(self) -> int:
        """Largest support of a walk with periodic splitting."""
        return self._thresholds["splitting_max_support"]

    @property
    def residual_threshold(self) -> float:
        """Largest median Gaussian residual of classical-like walks."""
        return self._thresholds["residual_threshold"]

    @property
    def peak_prominence(self) -> float:
        """Smallest prominence of a counted peak."""
        return self._thresholds["peak_prominence"]

    @property
    def peak_offset_limit(self) -> float:
        """Largest mean peak offset, in standard deviations, of semi-classical walks."""
        return self._thresholds["peak_offset_limit"]

    @property
    def window_fraction(self) -> float:
        """Fraction of the horizon skipped before the classification window."""
        return self._thresholds["window_fraction"]


def _check_thresholds(thresholds: dict[str, Any]) -> None:
    """
    Raises:
        InvalidParameterError: If a key is unknown or a value is invalid.
    """
    defaults = cast(dict[str, Any], _default_thresholds)
    if unknown := thresholds.keys() - defaults.keys():
        raise InvalidParameterError(f"Unknown classifier thresholds: {', '.join(sorted(unknown))}.")

    for key, value in thresholds.items():
        expected = type(defaults[key])
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidParameterError(f"Threshold {key} must be a number, got {value!r}.")

        if expected is int and not isinstance(value, int):
            raise InvalidParameterError(f"Threshold {key} must be an integer, got {value!r}.")

        if not math.isfinite(value) or value < 0:
            raise InvalidParameterError(f"Threshold {key} must be finite and >= 0, got {value!r}.")

    if not 0.0 <= thresholds["window_fraction"] < 1.0:
        raise InvalidParameterError("Threshold window_fraction must be in [0, 1).")

    if not 0.0 < thresholds["support_threshold"] <= 0.5:
        raise InvalidParameterError("Threshold support_threshold must be in (0, 0.5].")


@alru_cache(8)
async def load_classifier_config(path: Path) -> ClassifierConfig:
    """
    Loads classifier threshold overrides from the given JSON file.

    Arguments:
        path: The path of a JSON object file with a subset of the `ClassifierThresholds` keys.

    Returns:
        The loaded configuration.

    Raises:
        ExportError: If the file is not found or is not valid JSON.
        InvalidParameterError: If the content is not a valid threshold mapping.
    """
    content = await read_text(path)
    try:
        result = json.loads(content)
    except json.JSONDecodeError as e:
        raise ExportError("Classifier configuration decoding failed.") from e

    if not isinstance(result, dict):
        raise InvalidParameterError("The classifier configuration must be a JSON object.")

    return ClassifierConfig(cast(ClassifierThresholds, result))
