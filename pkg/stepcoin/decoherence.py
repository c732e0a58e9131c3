from __future__ import annotations

import logging
import math
from collections import deque
from collections.abc import Iterator
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .analysis import Distribution
from .core import (
    CoinSpec,
    InitialSpec,
    InvalidParameterError,
    Limits,
    ResourceLimitError,
    check_theta,
    initial_state,
)
from .typing import ComplexArray, Position, RealArray
from .walker.baseline import dense_vector, dimension, walk_operator

logger = logging.getLogger(__name__)

DIAGONAL_FLOOR = 1e-30
"""Diagonal entries below this value are left out of position distributions."""


class DecoherenceParams(NamedTuple):
    """Per-step probabilities of a projective coin (`q`) and position (`s`) measurement."""

    q: float = 0.0
    s: float = 0.0

    def validate(self) -> None:
        """
        Raises:
            InvalidParameterError: If the rates are not finite, negative, or sum to more than 1.
        """
        q, s = self.q, self.s
        if not (math.isfinite(q) and math.isfinite(s)) or q < 0.0 or s < 0.0 or q + s > 1.0 + 1e-12:
            raise InvalidParameterError(f"Invalid decoherence rates q={q!r}, s={s!r}.")


class DensityMatrix:
    """
    Density operator over the composite `{coin} x {position}` basis of positions `-reach..reach`.

    The basis order is the one of the dense baseline walker. The wrapped matrix is read-only.
    """

    __slots__ = ("_matrix", "_reach")

    def __init__(self, matrix: ComplexArray, reach: int) -> None:
        """
        Initialization.

        Arguments:
            matrix: The density matrix.
            reach: The lattice covers positions `-reach..reach`.

        Raises:
            InvalidParameterError: If the shape of the matrix doesn't match `reach`.
        """
        size = dimension(reach)
        if matrix.shape != (size, size):
            raise InvalidParameterError(f"Expected a {size}x{size} matrix, got {matrix.shape}.")

        self._matrix = np.array(matrix, dtype=np.complex128)
        self._matrix.flags.writeable = False
        self._reach = reach

    def __repr__(self) -> str:
        return f"DensityMatrix(reach={self._reach}, trace={self.trace():.12g})"

    @classmethod
    def pure(cls, init: InitialSpec, reach: int) -> DensityMatrix:
        """
        Returns the `|psi><psi|` density matrix of the given initial coin state at the origin.

        Raises:
            InvalidParameterError: If the initial state or `reach` is invalid.
        """
        if reach < 0:
            raise InvalidParameterError(f"The reach can't be negative, got {reach}.")

        vector = dense_vector(initial_state(init), reach)
        return cls(np.outer(vector, vector.conj()), reach)

    @property
    def matrix(self) -> ComplexArray:
        """The read-only density matrix."""
        return self._matrix

    @property
    def reach(self) -> int:
        """The lattice covers positions `-reach..reach`."""
        return self._reach

    def trace(self) -> float:
        """Returns the real part of the trace."""
        return float(np.trace(self._matrix).real)

    def purity(self) -> float:
        """Returns `tr(rho^2)`."""
        return float(np.vdot(self._matrix, self._matrix).real)

    def hermiticity_error(self) -> float:
        """Returns the largest entry of `|rho - rho^dagger|`."""
        return float(np.max(np.abs(self._matrix - self._matrix.conj().T)))

    def min_eigenvalue(self) -> float:
        """Returns the smallest eigenvalue of the Hermitian part of the matrix."""
        hermitian = (self._matrix + self._matrix.conj().T) / 2
        return float(np.linalg.eigvalsh(hermitian)[0])

    def coin_block(self, coin: int, other: int) -> ComplexArray:
        """Returns the `<coin| rho |other>` block over positions."""
        size = 2 * self._reach + 1
        return self._matrix[coin * size : (coin + 1) * size, other * size : (other + 1) * size]

    def diagonal(self) -> RealArray:
        """Returns the position marginal of the diagonal over positions `-reach..reach`."""
        return np.real(np.diag(self.coin_block(0, 0)) + np.diag(self.coin_block(1, 1)))

    def position_distribution(self, step: int | None = None) -> Distribution:
        """
        Returns the position distribution of the state.

        Arguments:
            step: The step of the walk the state belongs to, if known.
        """
        diagonal = self.diagonal()
        probabilities: dict[Position, float] = {
            n: float(p)
            for n, p in zip(range(-self._reach, self._reach + 1), diagonal, strict=True)
            if p > DIAGONAL_FLOOR
        }
        total = math.fsum(probabilities.values())
        return Distribution({n: p / total for n, p in probabilities.items()}, step=step)

    def validate(self, atol: float = 1e-10, *, check_positivity: bool = False) -> None:
        """
        Checks the trace and hermiticity of the matrix, and optionally its positivity.

        Positivity requires an eigendecomposition, it's meant for debugging and tests.

        Raises:
            InvalidParameterError: If the matrix is not a valid density matrix.
        """
        if abs(self.trace() - 1.0) > atol:
            raise InvalidParameterError(f"Trace {self.trace()!r} differs from 1.")

        if self.hermiticity_error() > atol:
            raise InvalidParameterError("The density matrix is not Hermitian.")

        if check_positivity and self.min_eigenvalue() < -1e-8:
            raise InvalidParameterError("The density matrix is not positive semidefinite.")


@lru_cache(maxsize=32)
def dephasing_mask(reach: int, q: float, s: float) -> RealArray:
    """
    Returns the elementwise factor of the dephasing channel.

    Averaging over complete projective coin (position) measurements scales the entries of
    `rho` that connect different coin (position) states by `1 - q` (`1 - s`), and entries
    that differ in both by `1 - q - s`.
    """
    size = 2 * reach + 1
    coins = np.repeat(np.arange(2), size)
    positions = np.tile(np.arange(size), 2)
    same_coin = np.equal.outer(coins, coins)
    same_position = np.equal.outer(positions, positions)
    mask = (1.0 - q - s) + q * same_coin + s * same_position
    mask.flags.writeable = False
    return mask


def decoherent_step(
    rho: DensityMatrix,
    spec: CoinSpec,
    step: int,
    params: DecoherenceParams,
) -> DensityMatrix:
    """
    Applies one step of the decoherent walk.

    With `U` the walk operator of the given step and `R = U rho U^dagger`, the new state is
    `(1 - q - s) R + q sum_c P_c R P_c + s sum_n P_n R P_n`, where `P_c` and `P_n` project onto
    coin and position basis states.

    Arguments:
        rho: The current state.
        spec: The coin specification.
        step: The (1-based) index of the step.
        params: The decoherence rates.

    Raises:
        InvalidParameterError: If an argument is invalid.
        ResourceLimitError: If the lattice of `rho` can't hold the state after the step.
    """
    params.validate()
    if step > rho.reach:
        raise ResourceLimitError(f"A density matrix of reach {rho.reach} can't hold step {step}.")

    u = walk_operator(spec, step, rho.reach)
    evolved = u @ rho.matrix @ u.conj().T
    result = DensityMatrix(evolved * dephasing_mask(rho.reach, params.q, params.s), rho.reach)
    drift = abs(result.trace() - 1.0)
    if drift > 1e-10:
        logger.warning("Trace drift of %.3g after step %d", drift, step)
    else:
        logger.debug("Decoherent step %d, trace drift %.3g", step, drift)

    return result


def iter_decoherent(
    init: InitialSpec,
    spec: CoinSpec,
    params: DecoherenceParams,
    steps: int,
    *,
    limits: Limits | None = None,
) -> Iterator[DensityMatrix]:
    """
    Returns an iterator over the density matrices of steps `0..steps`.

    Raises:
        InvalidParameterError: If an argument is invalid.
        ResourceLimitError: If `steps` exceeds the dense operator cap.
    """
    check_theta(spec.theta)
    params.validate()
    if steps < 0:
        raise InvalidParameterError(f"The number of steps can't be negative, got {steps}.")

    (Limits.default() if limits is None else limits).check_density_steps(steps)
    return _iter_decoherent(DensityMatrix.pure(init, steps), spec, params, steps)


def _iter_decoherent(
    rho: DensityMatrix,
    spec: CoinSpec,
    params: DecoherenceParams,
    steps: int,
) -> Iterator[DensityMatrix]:
    yield rho
    for step in range(1, steps + 1):
        rho = decoherent_step(rho, spec, step, params)
        yield rho


def decoherent_walk(
    init: InitialSpec,
    spec: CoinSpec,
    params: DecoherenceParams,
    steps: int,
    *,
    limits: Limits | None = None,
) -> Distribution:
    """
    Returns the position distribution of the decoherent walk after the given number of steps.

    Raises:
        InvalidParameterError: If an argument is invalid.
        ResourceLimitError: If `steps` exceeds the dense operator cap.
    """
    rho = deque(iter_decoherent(init, spec, params, steps, limits=limits), maxlen=1)[0]
    return rho.position_distribution(steps)


class DecoherenceRecord(NamedTuple):
    """Position distribution and purity of the decoherent walk at one step."""

    step: int
    distribution: Distribution
    purity: float


def decoherent_series(
    init: InitialSpec,
    spec: CoinSpec,
    params: DecoherenceParams,
    steps: int,
    *,
    limits: Limits | None = None,
) -> tuple[DecoherenceRecord, ...]:
    """
    Returns the position distribution and purity of the decoherent walk at every step `0..steps`.

    Raises:
        InvalidParameterError: If an argument is invalid.
        ResourceLimitError: If `steps` exceeds the dense operator cap.
    """
    return tuple(
        DecoherenceRecord(step, rho.position_distribution(step), rho.purity())
        for step, rho in enumerate(iter_decoherent(init, spec, params, steps, limits=limits))
    )
