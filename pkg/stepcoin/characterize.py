from __future__ import annotations

import enum
import logging
import math
from functools import partial
from typing import TYPE_CHECKING, NamedTuple, overload

import numpy as np
from scipy.optimize import curve_fit
from scipy.signal import find_peaks
from scipy.stats import norm

from .analysis import Distribution, position_distribution, support_count
from .config import ClassifierConfig
from .core import (
    CoinSpec,
    DegenerateFitError,
    InitialSpec,
    InvalidParameterError,
    Limits,
    evolve,
    iter_evolution,
)
from .utils import parse_angle, run_in_threads

if TYPE_CHECKING:
    from .typing import FitMethod, RealArray

logger = logging.getLogger(__name__)

MIN_HORIZON = 12
"""The shortest horizon the classifier accepts."""

# -- Gaussian fits


@overload
def gaussian_pdf(x: float, mu: float, sigma: float) -> float: ...


@overload
def gaussian_pdf(x: RealArray, mu: float, sigma: float) -> RealArray: ...


def gaussian_pdf(x: float | RealArray, mu: float, sigma: float) -> float | RealArray:
    """
    Returns the normal probability density with mean `mu` and standard deviation `sigma` at `x`.

    Raises:
        InvalidParameterError: If `sigma` is not positive and finite.
    """
    if not (math.isfinite(sigma) and sigma > 0.0):
        raise InvalidParameterError(f"Sigma must be positive, got {sigma!r}.")

    values = norm.pdf(x, loc=mu, scale=sigma)
    return float(values) if np.ndim(values) == 0 else np.asarray(values, dtype=np.float64)


class GaussianFit(NamedTuple):
    """Gaussian fit of a position distribution."""

    mu: float
    """Mean in fit coordinates."""

    sigma: float
    """Standard deviation in fit coordinates."""

    residual: float
    """
    Root-mean-square deviation between the lattice-normalized fitted density and the distribution
    over the occupied span.
    """


def fit_coordinates(dist: Distribution) -> tuple[RealArray, RealArray]:
    """
    Returns the fit coordinates and probabilities of the occupied span of the distribution.

    Walk distributions (with a known step) live on every second site, so they are indexed by
    their sublattice index `(n + T) / 2 + 1`. Distributions without a step use plain positions.

    Raises:
        DegenerateFitError: If the distribution has less than two occupied positions.
    """
    support = dist.support()
    if len(support) < 2:
        raise DegenerateFitError("At least two occupied positions are required for a fit.")

    lo, hi = support[0], support[-1]
    if (step := dist.step) is None:
        return np.arange(lo, hi + 1, dtype=np.float64), dist.as_array(lo, hi)

    first = (lo + step) // 2 + 1
    probabilities = dist.as_array(lo, hi, 2)
    return np.arange(first, first + probabilities.size, dtype=np.float64), probabilities


def _lattice_density(coordinates: RealArray, mu: float, sigma: float) -> RealArray:
    """Returns the Gaussian density normalized over the given coordinates."""
    values = norm.pdf(coordinates, loc=mu, scale=sigma)
    total = float(np.sum(values))
    if not total > 0.0:
        raise DegenerateFitError(f"Vanishing fitted density, mu={mu!r}, sigma={sigma!r}.")

    return np.asarray(values / total, dtype=np.float64)


def fit_gaussian(dist: Distribution, *, method: FitMethod = "moments") -> GaussianFit:
    """
    Fits a Gaussian to the given distribution.

    Arguments:
        dist: The distribution to fit.
        method: `"moments"` matches the mean and standard deviation, `"least-squares"` refines
            the moment estimate by minimizing the residual.

    Returns:
        The fit in the coordinates of `fit_coordinates()`.

    Raises:
        DegenerateFitError: If the distribution has less than two occupied positions or the
            least-squares refinement fails.
        InvalidParameterError: For unknown fit methods.
    """
    coordinates, probabilities = fit_coordinates(dist)
    weights = probabilities / np.sum(probabilities)
    mu = float(coordinates @ weights)
    sigma = math.sqrt(float(((coordinates - mu) ** 2) @ weights))
    if method == "least-squares":
        mu, sigma = _least_squares(coordinates, probabilities, mu, sigma)
    elif method != "moments":
        raise InvalidParameterError(f"Unknown fit method: {method!r}")

    residual = _lattice_density(coordinates, mu, sigma) - probabilities
    return GaussianFit(mu, sigma, math.sqrt(float(np.mean(residual**2))))


def _least_squares(
    coordinates: RealArray,
    probabilities: RealArray,
    mu: float,
    sigma: float,
) -> tuple[float, float]:
    try:
        params, _ = curve_fit(
            _lattice_density,
            coordinates,
            probabilities,
            p0=(mu, sigma),
            bounds=((-np.inf, 1e-6), (np.inf, np.inf)),
        )
    except (RuntimeError, ValueError) as e:
        raise DegenerateFitError("Least-squares Gaussian fit failed.") from e

    return float(params[0]), float(params[1])


# -- Classification


class WalkClass(enum.Enum):
    """Walk classes with their display labels."""

    localized_free = "Localized: free"
    localized_bounded = "Localized: bounded"
    localized_periodic_splitting = "Localized: bounded with periodic splitting"
    compact_classical = "Compact classical like"
    classical = "Classical like"
    semi_classical_quantum = "Semi-classical/quantum like"
    quantum_like = "Quantum like"


class ReferenceAngle(NamedTuple):
    """Angle with a known walk class."""

    expression: str
    theta: float
    label: WalkClass


REFERENCE_CLASSES: tuple[ReferenceAngle, ...] = tuple(
    ReferenceAngle(expression, parse_angle(expression), label)
    for expression, label in (
        ("0", WalkClass.localized_free),
        ("pi/2", WalkClass.localized_bounded),
        ("pi/4", WalkClass.localized_periodic_splitting),
        ("pi/6", WalkClass.localized_periodic_splitting),
        ("pi/12", WalkClass.compact_classical),
        ("3.59pi/5", WalkClass.classical),
        ("pi/5", WalkClass.semi_classical_quantum),
        ("2pi/5", WalkClass.semi_classical_quantum),
        ("pi/3", WalkClass.quantum_like),
    )
)
"""Reference angles of every walk class, in class order."""


class ClassificationReport(NamedTuple):
    """Walk class of an angle with the features the decision was based on."""

    theta: float
    horizon: int
    label: WalkClass
    max_support: int
    relocalizes: bool
    median_peaks: float | None
    """Median number of prominent peaks in the aggregation window, if it was needed."""

    median_residual: float | None
    """Median Gaussian fit residual in the aggregation window, if it was needed."""

    peak_offset: float | None
    """Mean offset of the global maximum from the mean in standard deviations, if it was needed."""


def count_peaks(dist: Distribution, prominence: float) -> int:
    """
    Returns the number of peaks of the sublattice probabilities with at least the given prominence.

    The probabilities are zero-padded so peaks at the edges of the lattice are found too.
    """
    padded = np.concatenate(([0.0], dist.sublattice(), [0.0]))
    peaks, _ = find_peaks(padded, prominence=prominence)
    return int(len(peaks))


def peak_offset(dist: Distribution) -> float:
    """
    Returns the offset of the global maximum from the mean in standard deviations, measured on
    the sublattice.

    Raises:
        DegenerateFitError: For single-site distributions.
    """
    probabilities = dist.sublattice()
    indices = np.arange(probabilities.size, dtype=np.float64)
    weights = probabilities / np.sum(probabilities)
    mean = float(indices @ weights)
    sigma = math.sqrt(float(((indices - mean) ** 2) @ weights))
    if sigma == 0.0:
        raise DegenerateFitError("The distribution occupies a single site.")

    return (float(np.argmax(probabilities)) - mean) / sigma


def classify_report(
    theta: float,
    horizon: int = 30,
    *,
    config: ClassifierConfig | None = None,
    limits: Limits | None = None,
) -> ClassificationReport:
    """
    Classifies the step-dependent walk of the given angle that starts from `|0>`.

    Decision procedure:

    1. One occupied position at every step: free if every step visits a new site, bounded otherwise.
    2. The walk re-localizes to a single site and never occupies more than `splitting_max_support`
       positions: periodic splitting.
    3. In the window of steps after `horizon * window_fraction`, the median number of prominent
       peaks is at most 1 and the median Gaussian residual is at most `residual_threshold`:
       compact classical if the walk re-localizes, classical otherwise.
    4. The mean offset of the global maximum from the mean is at most `peak_offset_limit`
       standard deviations: semi-classical/quantum, quantum-like otherwise.

    Arguments:
        theta: The coin angle.
        horizon: The number of steps to evolve, at least `MIN_HORIZON`.
        config: The classifier configuration, `ClassifierConfig.default()` if not set.
        limits: Compute caps, `Limits.default()` if not set.

    Raises:
        InvalidParameterError: If an argument is invalid.
        ResourceLimitError: If `horizon` exceeds the step cap.
    """
    if horizon < MIN_HORIZON:
        raise InvalidParameterError(f"The horizon must be at least {MIN_HORIZON}, got {horizon}.")

    config = ClassifierConfig.default() if config is None else config
    distributions = [
        position_distribution(s)
        for s in iter_evolution(InitialSpec.zero(), CoinSpec.sdc(theta), horizon, limits=limits)
    ]
    supports = [support_count(d, config.support_threshold) for d in distributions]
    max_support = max(supports)
    relocalizes = 1 in supports[1:]

    def report(
        label: WalkClass,
        median_peaks: float | None = None,
        median_residual: float | None = None,
        offset: float | None = None,
    ) -> ClassificationReport:
        logger.debug(
            "theta=%r: %s (max support %d, relocalizes %s, peaks %s, residual %s, offset %s)",
            theta,
            label.name,
            max_support,
            relocalizes,
            median_peaks,
            median_residual,
            offset,
        )
        return ClassificationReport(
            theta, horizon, label, max_support, relocalizes, median_peaks, median_residual, offset
        )

    if all(count == 1 for count in supports):
        sites = [d.support(config.support_threshold)[0] for d in distributions]
        free = len(set(sites)) == len(sites)
        return report(WalkClass.localized_free if free else WalkClass.localized_bounded)

    if relocalizes and max_support <= config.splitting_max_support:
        return report(WalkClass.localized_periodic_splitting)

    window = [
        d
        for d in distributions[int(horizon * config.window_fraction) :]
        if support_count(d, config.support_threshold) >= 2
    ]
    if not window:
        # Spread early, localized for the whole window.
        return report(WalkClass.localized_periodic_splitting)

    median_peaks = float(np.median([count_peaks(d, config.peak_prominence) for d in window]))
    median_residual = float(np.median([fit_gaussian(d).residual for d in window]))
    if median_peaks <= 1 and median_residual <= config.residual_threshold:
        label = WalkClass.compact_classical if relocalizes else WalkClass.classical
        return report(label, median_peaks, median_residual)

    offset = float(np.mean([peak_offset(d) for d in window]))
    if abs(offset) <= config.peak_offset_limit:
        return report(WalkClass.semi_classical_quantum, median_peaks, median_residual, offset)

    return report(WalkClass.quantum_like, median_peaks, median_residual, offset)


def classify(
    theta: float,
    horizon: int = 30,
    *,
    config: ClassifierConfig | None = None,
    limits: Limits | None = None,
) -> WalkClass:
    """
    Returns the walk class of the step-dependent walk of the given angle.

    See `classify_report()` for the decision procedure.
    """
    return classify_report(theta, horizon, config=config, limits=limits).label


# -- Sweeps


class SweepResult(NamedTuple):
    """Distribution and walk class at one point of an angle sweep."""

    j: int
    theta: float
    distribution: Distribution
    label: WalkClass


def sweep_angle(theta_base: float, j: int) -> float:
    """
    Returns `theta_base * (1 + j / 10)`.

    Raises:
        InvalidParameterError: If `j` is not in `0..10`.
    """
    if isinstance(j, bool) or not isinstance(j, int) or not 0 <= j <= 10:
        raise InvalidParameterError(f"j must be an integer in 0..10, got {j!r}.")

    return theta_base * (1 + j / 10)


def sweep(
    theta_base: float,
    j: int,
    steps: int,
    *,
    horizon: int = 30,
    config: ClassifierConfig | None = None,
    limits: Limits | None = None,
) -> SweepResult:
    """
    Returns the distribution after `steps` steps and the walk class at `theta_base * (1 + j / 10)`.

    Raises:
        InvalidParameterError: If an argument is invalid.
        ResourceLimitError: If `steps` or `horizon` exceeds the step cap.
    """
    theta = sweep_angle(theta_base, j)
    state = evolve(InitialSpec.zero(), CoinSpec.sdc(theta), steps, limits=limits)
    distribution = position_distribution(state)
    return SweepResult(j, theta, distribution, classify(theta, horizon, config=config, limits=limits))


async def sweep_all(
    theta_base: float,
    steps: int,
    *,
    horizon: int = 30,
    config: ClassifierConfig | None = None,
    limits: Limits | None = None,
) -> tuple[SweepResult, ...]:
    """
    Runs `sweep()` for every `j` in `0..10` concurrently.
    """
    run = partial(sweep, horizon=horizon, config=config, limits=limits)
    return tuple(await run_in_threads([partial(run, theta_base, j, steps) for j in range(11)]))
