from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Mapping, Sequence
from typing import NamedTuple, TypeAlias

import numpy as np
from scipy.special import rel_entr
from scipy.stats import entropy

from .core import (
    CoinSpec,
    InitialSpec,
    InvalidParameterError,
    Limits,
    WalkerState,
    iter_evolution,
)
from .typing import Nats, Position, Probability, ProbabilityMapping, RealArray

logger = logging.getLogger(__name__)

DEFAULT_SUPPORT_THRESHOLD = 1e-4
"""Probabilities below this value are neglected when occupied positions are counted."""

KL_ZERO_THRESHOLD = 1e-300
"""Reference probabilities below this value are treated as zero by the KL divergence."""

# -- Distributions


class Distribution(Mapping[Position, Probability]):
    """
    Immutable, normalized position to probability mapping.

    Negative rounding noise (down to `-atol`) is clipped to zero on creation.
    """

    __slots__ = ("_probabilities", "_step")

    def __init__(
        self,
        probabilities: ProbabilityMapping,
        *,
        step: int | None = None,
        atol: float = 1e-10,
    ) -> None:
        """
        Initialization.

        Arguments:
            probabilities: Position to probability mapping.
            step: The step of the walk the distribution belongs to, if known.
            atol: Absolute tolerance of the normalization and sign checks.

        Raises:
            InvalidParameterError: If the probabilities are not a normalized distribution.
        """
        cleaned: dict[Position, Probability] = {}
        for position, raw in probabilities.items():
            p = float(raw)
            if not math.isfinite(p) or p < -atol:
                raise InvalidParameterError(f"Invalid probability {raw!r} at position {position}.")

            cleaned[int(position)] = max(p, 0.0)

        total = math.fsum(cleaned.values())
        if abs(total - 1.0) > atol:
            raise InvalidParameterError(f"Probabilities sum to {total!r} instead of 1.")

        if step is not None and step < 0:
            raise InvalidParameterError(f"The step can't be negative, got {step}.")

        self._probabilities = dict(sorted(cleaned.items()))
        self._step = step

    def __getitem__(self, position: Position) -> Probability:
        return self._probabilities[position]

    def __iter__(self) -> Iterator[Position]:
        return iter(self._probabilities)

    def __len__(self) -> int:
        return len(self._probabilities)

    def __repr__(self) -> str:
        return f"Distribution({self._probabilities!r}, step={self._step!r})"

    @property
    def step(self) -> int | None:
        """The step of the walk the distribution belongs to, if known."""
        return self._step

    def support(self, threshold: Probability = 0.0) -> tuple[Position, ...]:
        """
        Returns the positions whose probability is positive and at least `threshold`.
        """
        return tuple(n for n, p in self._probabilities.items() if p > 0.0 and p >= threshold)

    def as_array(self, lo: Position, hi: Position, stride: int = 1) -> RealArray:
        """
        Returns the probabilities of positions `lo, lo + stride, ..., hi` as an array.
        """
        return np.array([self._probabilities.get(n, 0.0) for n in range(lo, hi + 1, stride)])

    def sublattice(self) -> RealArray:
        """
        Returns the probabilities on the sites a walk can occupy at its step, that is positions
        `-T, -T + 2, ..., T`. Distributions without a step use the dense range between the
        extreme keys instead.
        """
        if self._step is None:
            positions = tuple(self._probabilities)
            return self.as_array(min(positions), max(positions)) if positions else np.zeros(0)

        return self.as_array(-self._step, self._step, 2)


class CoinMarginal(NamedTuple):
    """Probabilities of the two coin basis states."""

    p0: Probability
    p1: Probability


def position_distribution(state: WalkerState) -> Distribution:
    """
    Returns the position distribution of the given state, `P(n) = |a0(n)|^2 + |a1(n)|^2`.
    """
    weights = {n: s.weight() for n, s in state.amplitudes.items()}
    total = math.fsum(weights.values())
    return Distribution({n: w / total for n, w in weights.items()}, step=state.step)


def coin_marginal(state: WalkerState) -> CoinMarginal:
    """
    Returns the coin marginal of the given state, `p_i = sum_n |a_i(n)|^2`.
    """
    p0 = math.fsum(abs(s.a0) ** 2 for s in state.amplitudes.values())
    p1 = math.fsum(abs(s.a1) ** 2 for s in state.amplitudes.values())
    total = p0 + p1
    return CoinMarginal(p0 / total, p1 / total)


def _as_mapping(dist: Distribution | CoinMarginal) -> ProbabilityMapping:
    return {0: dist.p0, 1: dist.p1} if isinstance(dist, CoinMarginal) else dist


# -- Measures


def shannon_entropy(dist: Distribution | CoinMarginal) -> Nats:
    """
    Returns the Shannon entropy of the given distribution in nats, with `0 log 0 = 0`.
    """
    values = list(_as_mapping(dist).values())
    return float(entropy(values)) if values else 0.0


def kl_divergence(p: Distribution | CoinMarginal, q: Distribution | CoinMarginal) -> Nats:
    """
    Returns the Kullback-Leibler divergence `D(p || q)` in nats.

    Arguments:
        p: The measured distribution.
        q: The reference distribution.

    Returns:
        The divergence, or `math.inf` if `q` vanishes (below `KL_ZERO_THRESHOLD`) somewhere
        `p` is positive.
    """
    pm, qm = _as_mapping(p), _as_mapping(q)
    positions = [n for n, pn in pm.items() if pn > 0.0]
    if any(qm.get(n, 0.0) < KL_ZERO_THRESHOLD for n in positions):
        return math.inf

    terms = rel_entr([pm[n] for n in positions], [qm[n] for n in positions])
    return math.fsum(float(t) for t in terms)


def fidelity(p: Distribution, q: Distribution) -> float:
    """
    Returns the classical fidelity `(sum_n sqrt(p_n q_n))^2` over the union of supports.
    """
    positions = sorted(p.keys() | q.keys())
    pv, qv = np.array([p.get(n, 0.0) for n in positions]), np.array([q.get(n, 0.0) for n in positions])
    return min(1.0, float(np.sum(np.sqrt(pv * qv))) ** 2)


def support_count(dist: Distribution, threshold: Probability = DEFAULT_SUPPORT_THRESHOLD) -> int:
    """
    Returns the number of positions whose probability is at least `threshold`.

    Raises:
        InvalidParameterError: If the threshold is negative.
    """
    if threshold < 0.0:
        raise InvalidParameterError(f"The support threshold can't be negative, got {threshold!r}.")

    return len(dist.support(threshold))


class Moments(NamedTuple):
    """First and second central moments of a position distribution."""

    mean: float
    variance: float
    stddev: float


def moments(dist: Distribution) -> Moments:
    """Returns the mean, variance, and standard deviation of the given distribution."""
    positions = np.array(list(dist.keys()), dtype=np.float64)
    probabilities = np.array(list(dist.values()), dtype=np.float64)
    mean = float(positions @ probabilities)
    variance = max(0.0, float(((positions - mean) ** 2) @ probabilities))
    return Moments(mean, variance, math.sqrt(variance))


def smooth(dist: Distribution, epsilon: float, support: Sequence[Position] | None = None) -> Distribution:
    """
    Mixes the distribution with the uniform distribution over `support`.

    Only meant for plotting divergences, smoothing makes infinite divergences finite.

    Arguments:
        dist: The distribution to smooth.
        epsilon: Weight of the uniform distribution, in `[0, 1)`.
        support: Positions of the uniform distribution, the keys of `dist` by default.

    Raises:
        InvalidParameterError: If `epsilon` or `support` is invalid.
    """
    if not 0.0 <= epsilon < 1.0:
        raise InvalidParameterError(f"Epsilon must be in [0, 1), got {epsilon!r}.")

    positions = sorted(set(dist.keys() if support is None else support) | dist.keys())
    share = epsilon / len(positions)
    return Distribution(
        {n: (1.0 - epsilon) * dist.get(n, 0.0) + share for n in positions},
        step=dist.step,
    )


# -- Series


class EntropyRecord(NamedTuple):
    """Position and coin entropy of one step."""

    step: int
    position_entropy: Nats
    coin_entropy: Nats


EntropySeries: TypeAlias = tuple[EntropyRecord, ...]
"""Per-step entropy records."""


class DivergenceRecord(NamedTuple):
    """Position and coin divergence between step-dependent and step-independent walks at one step."""

    step: int
    position_divergence: Nats
    coin_divergence: Nats


DivergenceSeries: TypeAlias = tuple[DivergenceRecord, ...]
"""Per-step divergence records."""


def _check_series_steps(max_steps: int) -> None:
    if max_steps < 1:
        raise InvalidParameterError(f"Series need at least one step, got {max_steps}.")


def series(
    init: InitialSpec,
    spec: CoinSpec,
    max_steps: int,
    *,
    limits: Limits | None = None,
) -> EntropySeries:
    """
    Returns the position and coin entropy of the walk at every step `0..max_steps`.

    Raises:
        InvalidParameterError: If an argument is invalid.
        ResourceLimitError: If `max_steps` exceeds the step cap.
    """
    _check_series_steps(max_steps)
    return tuple(
        EntropyRecord(
            state.step,
            shannon_entropy(position_distribution(state)),
            shannon_entropy(coin_marginal(state)),
        )
        for state in iter_evolution(init, spec, max_steps, limits=limits)
    )


def divergence_series(
    init: InitialSpec,
    theta: float,
    max_steps: int,
    *,
    epsilon: float | None = None,
    limits: Limits | None = None,
) -> DivergenceSeries:
    """
    Returns the divergence of the step-dependent walk from the step-independent one with the same
    angle at every step `0..max_steps`. The two walks are evolved in lockstep.

    Arguments:
        init: The initial coin state of both walks.
        theta: The coin angle of both walks.
        max_steps: The last step.
        epsilon: Optional smoothing weight, see `smooth()`.
        limits: Compute caps, `Limits.default()` if not set.

    Raises:
        InvalidParameterError: If an argument is invalid.
        ResourceLimitError: If `max_steps` exceeds the step cap.
    """
    _check_series_steps(max_steps)
    records: list[DivergenceRecord] = []
    for sdc, sic in zip(
        iter_evolution(init, CoinSpec.sdc(theta), max_steps, limits=limits),
        iter_evolution(init, CoinSpec.sic(theta), max_steps, limits=limits),
        strict=True,
    ):
        p, q = position_distribution(sdc), position_distribution(sic)
        if epsilon is not None:
            union = sorted(p.keys() | q.keys())
            p, q = smooth(p, epsilon, union), smooth(q, epsilon, union)

        coin_divergence = kl_divergence(coin_marginal(sdc), coin_marginal(sic))
        records.append(DivergenceRecord(sdc.step, kl_divergence(p, q), coin_divergence))

    return tuple(records)


class OrderingViolation(NamedTuple):
    """Adjacent pair of an angle chain whose divergences don't strictly increase."""

    theta: float
    next_theta: float
    divergence: Nats
    next_divergence: Nats


class OrderingReport(NamedTuple):
    """Position divergences of an ordered angle chain at one step."""

    step: int
    thetas: tuple[float, ...]
    divergences: tuple[Nats, ...]
    violations: tuple[OrderingViolation, ...]

    @property
    def holds(self) -> bool:
        """Whether the divergences strictly increase along the chain."""
        return not self.violations


def divergence_ordering(
    thetas: Sequence[float],
    step: int,
    init: InitialSpec | None = None,
    *,
    limits: Limits | None = None,
) -> OrderingReport:
    """
    Checks whether the position divergence between step-dependent and step-independent walks
    strictly increases along the given angle chain at the given step.

    Arguments:
        thetas: The angle chain in expected increasing divergence order.
        step: The step to compare at.
        init: The initial coin state, `|0>` by default.
        limits: Compute caps, `Limits.default()` if not set.

    Returns:
        The divergences and every adjacent pair that violates the ordering.

    Raises:
        InvalidParameterError: If `step` is negative.
    """
    if step < 0:
        raise InvalidParameterError(f"The step can't be negative, got {step}.")

    init = InitialSpec.zero() if init is None else init
    divergences = tuple(
        divergence_series(init, theta, max(step, 1), limits=limits)[step].position_divergence
        for theta in thetas
    )
    violations = tuple(
        OrderingViolation(thetas[i], thetas[i + 1], divergences[i], divergences[i + 1])
        for i in range(len(divergences) - 1)
        if not divergences[i] < divergences[i + 1]
    )
    if violations:
        logger.info("Divergence ordering at step %d has %d violation(s)", step, len(violations))

    return OrderingReport(step, tuple(thetas), divergences, violations)
