from __future__ import annotations

import cmath
import enum
import logging
import math
import os
from collections import defaultdict, deque
from collections.abc import Iterator, Mapping
from types import MappingProxyType
from typing import ClassVar, NamedTuple

import numpy as np

from .typing import ComplexArray, Position

logger = logging.getLogger(__name__)

PRUNE_THRESHOLD = 1e-15
"""Amplitudes with a smaller magnitude are dropped from the sparse state."""

# -- Errors


class StepCoinError(Exception): ...


class InvalidParameterError(StepCoinError, ValueError): ...


class ResourceLimitError(StepCoinError): ...


class DegenerateFitError(StepCoinError): ...


class ExportError(StepCoinError): ...


# -- Limits


class Limits:
    """
    Compute caps for pure and dense (density matrix) walks.

    The default instance takes the `STEPCOIN_MAX_STEPS` and `STEPCOIN_MAX_DENSITY_STEPS`
    environment variables into account.
    """

    __slots__ = ("_max_steps", "_max_density_steps")

    max_steps_variable: ClassVar[str] = "STEPCOIN_MAX_STEPS"
    """Environment variable that overrides the pure walk step cap."""

    max_density_steps_variable: ClassVar[str] = "STEPCOIN_MAX_DENSITY_STEPS"
    """Environment variable that overrides the dense walk step cap."""

    _default: ClassVar[Limits | None] = None
    """The default instance or `None` if one hasn't been created already."""

    def __init__(self, *, max_steps: int = 10_000, max_density_steps: int = 100) -> None:
        """
        Initialization.

        Arguments:
            max_steps: The maximum number of steps of a pure, sparse walk.
            max_density_steps: The maximum number of steps of walks that use dense operators.

        Raises:
            InvalidParameterError: If one of the caps is not a positive integer.
        """
        for name, value in (("max_steps", max_steps), ("max_density_steps", max_density_steps)):
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise InvalidParameterError(f"{name} must be a positive integer, got {value!r}.")

        self._max_steps = max_steps
        self._max_density_steps = max_density_steps

    def __repr__(self) -> str:
        return f"Limits(max_steps={self._max_steps}, max_density_steps={self._max_density_steps})"

    @classmethod
    def default(cls) -> Limits:
        """
        Returns the default instance, created from the environment on first use.
        """
        if cls._default is None:
            cls._default = cls.from_env()

        return cls._default

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None) -> Limits:
        """
        Creates a new instance using the overrides in the given environment.

        Arguments:
            environ: The environment to use, `os.environ` by default.

        Raises:
            InvalidParameterError: If an override is not a positive integer.
        """
        environ = os.environ if environ is None else environ
        overrides: dict[str, int] = {}
        for key, variable in (
            ("max_steps", cls.max_steps_variable),
            ("max_density_steps", cls.max_density_steps_variable),
        ):
            if (raw := environ.get(variable)) is None:
                continue

            try:
                overrides[key] = int(raw)
            except ValueError as e:
                raise InvalidParameterError(f"{variable} must be an integer, got {raw!r}.") from e

        return cls(**overrides)

    @property
    def max_steps(self) -> int:
        """The maximum number of steps of a pure, sparse walk."""
        return self._max_steps

    @property
    def max_density_steps(self) -> int:
        """The maximum number of steps of walks that use dense operators."""
        return self._max_density_steps

    def check_steps(self, steps: int) -> None:
        """
        Raises:
            ResourceLimitError: If `steps` exceeds the pure walk cap.
        """
        if steps > self._max_steps:
            raise ResourceLimitError(f"{steps} steps exceed the cap of {self._max_steps}.")

    def check_density_steps(self, steps: int) -> None:
        """
        Raises:
            ResourceLimitError: If `steps` exceeds the dense walk cap.
        """
        if steps > self._max_density_steps:
            raise ResourceLimitError(
                f"{steps} steps exceed the dense operator cap of {self._max_density_steps}."
            )


# -- Coins


class CoinMode(enum.Enum):
    """Coin angle schedule."""

    sdc = "sdc"
    """Step-dependent coin: the coin of step `T` rotates by `T * theta`."""

    sic = "sic"
    """Step-independent coin: every step rotates by `theta`."""


class CoinSpec(NamedTuple):
    """Coin specification: rotation angle (radians) and angle schedule."""

    theta: float
    mode: CoinMode = CoinMode.sdc

    @classmethod
    def sdc(cls, theta: float) -> CoinSpec:
        """Returns a step-dependent coin specification."""
        return cls(theta, CoinMode.sdc)

    @classmethod
    def sic(cls, theta: float) -> CoinSpec:
        """Returns a step-independent coin specification."""
        return cls(theta, CoinMode.sic)

    def angle(self, step: int) -> float:
        """
        Returns the effective rotation angle of the coin applied during the transition from
        step `step - 1` to step `step`.
        """
        # No mod 2pi folding, step * theta is exact enough at the supported scale.
        return step * self.theta if self.mode is CoinMode.sdc else self.theta


class Spinor(NamedTuple):
    """Coin-space amplitudes of a single position."""

    a0: complex
    """Coefficient of the coin basis state 0 (moves right)."""

    a1: complex
    """Coefficient of the coin basis state 1 (moves left)."""

    def weight(self) -> float:
        """Returns `|a0|^2 + |a1|^2`, the probability carried by the spinor."""
        return abs(self.a0) ** 2 + abs(self.a1) ** 2


class CoinMatrix(NamedTuple):
    """Two by two coin operator."""

    c00: complex
    c01: complex
    c10: complex
    c11: complex

    @classmethod
    def rotation(cls, alpha: float) -> CoinMatrix:
        """Returns the `[[cos a, sin a], [sin a, -cos a]]` coin."""
        c, s = complex(math.cos(alpha)), complex(math.sin(alpha))
        return cls(c, s, s, -c)

    def apply(self, spinor: Spinor) -> Spinor:
        """Returns the result of applying the coin to the given spinor."""
        a0, a1 = spinor
        return Spinor(self.c00 * a0 + self.c01 * a1, self.c10 * a0 + self.c11 * a1)

    def as_array(self) -> ComplexArray:
        """Returns the coin as a numpy array."""
        return np.array([[self.c00, self.c01], [self.c10, self.c11]], dtype=np.complex128)


def build_coin(spec: CoinSpec, step: int) -> CoinMatrix:
    """
    Builds the coin that is applied during the transition from step `step - 1` to `step`.

    Arguments:
        spec: The coin specification.
        step: The (1-based) index of the step.

    Returns:
        The coin matrix with effective angle `step * theta` for step-dependent coins and
        `theta` for step-independent ones.

    Raises:
        InvalidParameterError: If theta is not finite or `step` is not positive.
    """
    check_theta(spec.theta)
    if step < 1:
        raise InvalidParameterError(f"Coin steps are 1-based, got {step}.")

    return CoinMatrix.rotation(spec.angle(step))


def check_theta(theta: float) -> None:
    """
    Raises:
        InvalidParameterError: If the given angle is not a finite real number.
    """
    if isinstance(theta, complex) or not math.isfinite(theta):
        raise InvalidParameterError(f"Theta must be a finite real number, got {theta!r}.")


# -- States


class InitialSpec(NamedTuple):
    """Coin state of the walker at the origin before the first step."""

    a: complex
    b: complex

    @classmethod
    def zero(cls) -> InitialSpec:
        """The `|0>` coin state."""
        return cls(1 + 0j, 0j)

    @classmethod
    def one(cls) -> InitialSpec:
        """The `|1>` coin state."""
        return cls(0j, 1 + 0j)

    @classmethod
    def normalized(cls, a: complex, b: complex) -> InitialSpec:
        """
        Returns the normalized version of the given coin state.

        Raises:
            InvalidParameterError: If both amplitudes are zero or not finite.
        """
        a, b = complex(a), complex(b)
        if not (cmath.isfinite(a) and cmath.isfinite(b)):
            raise InvalidParameterError("Initial amplitudes must be finite.")

        norm = math.hypot(abs(a), abs(b))
        if norm == 0.0:
            raise InvalidParameterError("The initial coin state must not be zero.")

        return cls(a / norm, b / norm)


class EndpointStart(enum.Enum):
    """Basis states for which the extreme amplitudes are known in closed form."""

    zero = "zero"
    one = "one"


class WalkerState:
    """
    Immutable, sparse walker state: the step counter and the spinor of every occupied position.
    """

    __slots__ = ("_step", "_amplitudes")

    def __init__(self, step: int, amplitudes: Mapping[Position, Spinor]) -> None:
        """
        Initialization.

        Arguments:
            step: The number of steps that produced the state.
            amplitudes: Position to spinor mapping of the occupied positions.

        Raises:
            InvalidParameterError: If `step` is negative.
        """
        if step < 0:
            raise InvalidParameterError(f"The step counter can't be negative, got {step}.")

        self._step = step
        self._amplitudes: Mapping[Position, Spinor] = MappingProxyType(dict(sorted(amplitudes.items())))

    def __repr__(self) -> str:
        return f"WalkerState(step={self._step}, occupied={len(self._amplitudes)})"

    @property
    def step(self) -> int:
        """The number of steps that produced the state."""
        return self._step

    @property
    def amplitudes(self) -> Mapping[Position, Spinor]:
        """Read-only position to spinor mapping, ordered by position."""
        return self._amplitudes

    @property
    def occupied(self) -> tuple[Position, ...]:
        """The occupied positions in increasing order."""
        return tuple(self._amplitudes)

    def amplitude(self, position: Position) -> Spinor:
        """Returns the spinor at the given position, zero for unoccupied positions."""
        return self._amplitudes.get(position, Spinor(0j, 0j))

    def norm(self) -> float:
        """Returns the total probability of the state."""
        return math.fsum(s.weight() for s in self._amplitudes.values())

    def validate(self, atol: float = 1e-12) -> None:
        """
        Checks the normalization, support, parity, and occupation count of the state.

        Arguments:
            atol: Absolute tolerance of the normalization check.

        Raises:
            InvalidParameterError: If the state is invalid.
        """
        step = self._step
        if abs(self.norm() - 1.0) > atol:
            raise InvalidParameterError(f"State norm {self.norm()!r} differs from 1.")

        for position in self._amplitudes:
            if abs(position) > step:
                raise InvalidParameterError(f"Position {position} is unreachable in {step} steps.")

            if (position - step) % 2 != 0:
                raise InvalidParameterError(f"Position {position} has the wrong parity at step {step}.")

        if len(self._amplitudes) > step + 1:
            raise InvalidParameterError(f"{len(self._amplitudes)} positions are occupied at step {step}.")


def initial_state(init: InitialSpec) -> WalkerState:
    """
    Creates the step 0 state with the given coin state at the origin.

    Arguments:
        init: The initial coin state. Its norm must be 1 within `1e-9`.

    Returns:
        The renormalized initial walker state.

    Raises:
        InvalidParameterError: If the coin state is zero, not finite, or not normalized.
    """
    a, b = complex(init.a), complex(init.b)
    if not (cmath.isfinite(a) and cmath.isfinite(b)):
        raise InvalidParameterError("Initial amplitudes must be finite.")

    weight = abs(a) ** 2 + abs(b) ** 2
    if weight == 0.0:
        raise InvalidParameterError("The initial coin state must not be zero.")

    if abs(weight - 1.0) > 1e-9:
        raise InvalidParameterError(
            f"The initial coin state has norm {weight!r}, use InitialSpec.normalized() to fix it."
        )

    scale = 1.0 / math.sqrt(weight)
    return WalkerState(0, {0: Spinor(a * scale, b * scale)})


# -- Evolution


def prune(amplitude: complex) -> complex:
    """Returns zero for amplitudes below `PRUNE_THRESHOLD`, the amplitude itself otherwise."""
    return amplitude if abs(amplitude) >= PRUNE_THRESHOLD else 0j


def apply_step(state: WalkerState, spec: CoinSpec) -> WalkerState:
    """
    Applies one coin-then-shift step to the given state.

    The 0 component of every coined spinor moves to `n + 1`, the 1 component to `n - 1`.

    Arguments:
        state: The current state.
        spec: The coin specification, the coin of step `state.step + 1` is applied.

    Returns:
        The new state.
    """
    coin = build_coin(spec, state.step + 1)
    right: defaultdict[Position, complex] = defaultdict(complex)
    left: defaultdict[Position, complex] = defaultdict(complex)
    for position, spinor in state.amplitudes.items():
        a0, a1 = coin.apply(spinor)
        right[position + 1] += a0
        left[position - 1] += a1

    amplitudes: dict[Position, Spinor] = {}
    for position in right.keys() | left.keys():
        a0, a1 = prune(right.get(position, 0j)), prune(left.get(position, 0j))
        if a0 or a1:
            amplitudes[position] = Spinor(a0, a1)

    return WalkerState(state.step + 1, amplitudes)


def iter_evolution(
    init: InitialSpec,
    spec: CoinSpec,
    steps: int,
    *,
    limits: Limits | None = None,
) -> Iterator[WalkerState]:
    """
    Returns an iterator over the states of the walk at every step from 0 to `steps`.

    Arguments:
        init: The initial coin state.
        spec: The coin specification.
        steps: The number of steps.
        limits: Compute caps, `Limits.default()` if not set.

    Raises:
        InvalidParameterError: If an argument is invalid.
        ResourceLimitError: If `steps` exceeds the step cap.
    """
    check_theta(spec.theta)
    if steps < 0:
        raise InvalidParameterError(f"The number of steps can't be negative, got {steps}.")

    (Limits.default() if limits is None else limits).check_steps(steps)
    return _iter_evolution(initial_state(init), spec, steps)


def _iter_evolution(state: WalkerState, spec: CoinSpec, steps: int) -> Iterator[WalkerState]:
    yield state
    for _ in range(steps):
        state = apply_step(state, spec)
        yield state

    logger.debug(
        "Evolved %d steps at theta=%r (%s), %d positions occupied",
        steps,
        spec.theta,
        spec.mode.value,
        len(state.amplitudes),
    )


def evolve(
    init: InitialSpec,
    spec: CoinSpec,
    steps: int,
    *,
    limits: Limits | None = None,
) -> WalkerState:
    """
    Evolves the walk for the given number of steps.

    Arguments:
        init: The initial coin state.
        spec: The coin specification.
        steps: The number of steps.
        limits: Compute caps, `Limits.default()` if not set.

    Returns:
        The state after `steps` steps.

    Raises:
        InvalidParameterError: If an argument is invalid.
        ResourceLimitError: If `steps` exceeds the step cap.
    """
    return deque(iter_evolution(init, spec, steps, limits=limits), maxlen=1)[0]


def endpoint_amplitudes(spec: CoinSpec, steps: int, start: EndpointStart) -> tuple[complex, complex]:
    """
    Returns the closed-form amplitudes at the two ends of the lattice of a step-dependent walk.

    At `+T` only the 0 component and at `-T` only the 1 component can be nonzero. The `-T`
    coefficient of the zero start contains `prod(cos(n * theta)) / cos(theta)`, which is evaluated
    as the product over `n >= 2` to stay finite at `theta = pi / 2`.

    Arguments:
        spec: Step-dependent coin specification.
        steps: The number of steps, at least 1.
        start: The basis coin state of the walk.

    Returns:
        The `a0` amplitude at `+steps` and the `a1` amplitude at `-steps`.

    Raises:
        InvalidParameterError: For step-independent coins or a non-positive number of steps.
    """
    check_theta(spec.theta)
    if spec.mode is not CoinMode.sdc:
        raise InvalidParameterError("Closed-form endpoints require a step-dependent coin.")

    if steps < 1:
        raise InvalidParameterError(f"At least one step is required, got {steps}.")

    theta = spec.theta
    tail = math.prod(math.cos(n * theta) for n in range(2, steps + 1))
    full = math.cos(theta) * tail
    sin = math.sin(theta)
    if start is EndpointStart.zero:
        return complex(full), complex((-1) ** (steps + 1) * tail * sin)

    return complex(tail * sin), complex((-1) ** steps * full)
