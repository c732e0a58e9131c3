from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from stepcoin.core import (
    InvalidParameterError,
    Limits,
    Spinor,
    WalkerState,
    build_coin,
    check_theta,
    initial_state,
    prune,
)

if TYPE_CHECKING:
    from stepcoin.core import CoinSpec, InitialSpec
    from stepcoin.typing import ComplexArray, Position

logger = logging.getLogger(__name__)


class Walker:
    """
    The baseline, dense walker.

    The full state vector over the composite coin-position basis is multiplied by the explicitly
    built walk operator `U = S (C x I)` in every step. Because of this, the walker is the easiest to
    reason about. It is useful for validating the default walker, and its operators drive the
    decoherent walk.

    Memory and time grow quadratically with the number of steps, so the walker is subject to the
    dense operator cap of `Limits`.
    """

    __slots__ = ("_spec", "_limits")

    def __init__(self, spec: CoinSpec, *, limits: Limits | None = None) -> None:
        """
        Initialization.

        Arguments:
            spec: The coin specification of the walk.
            limits: Compute caps, `Limits.default()` if not set.
        """
        self._spec = spec
        self._limits = limits

    @property
    def spec(self) -> CoinSpec:
        """The coin specification of the walk."""
        return self._spec

    def evolve(self, init: InitialSpec, steps: int) -> WalkerState:
        """
        Returns the walker state after the given number of steps.

        Raises:
            InvalidParameterError: If an argument is invalid.
            ResourceLimitError: If `steps` exceeds the dense operator cap.
        """
        check_theta(self._spec.theta)
        if steps < 0:
            raise InvalidParameterError(f"The number of steps can't be negative, got {steps}.")

        (Limits.default() if self._limits is None else self._limits).check_density_steps(steps)
        vector = dense_vector(initial_state(init), steps)
        for step in range(1, steps + 1):
            vector = walk_operator(self._spec, step, steps) @ vector

        logger.debug("Dense evolution of %d steps, dimension %d", steps, vector.size)
        return sparse_state(vector, steps, steps)


def dimension(reach: int) -> int:
    """Returns the dimension of the composite space over positions `-reach..reach`."""
    return 2 * (2 * reach + 1)


def basis_index(coin: int, position: Position, reach: int) -> int:
    """
    Returns the index of the `|coin> x |position>` basis state.

    The basis is coin-major: all positions of coin state 0 precede those of coin state 1.
    """
    return coin * (2 * reach + 1) + position + reach


def shift_operator(reach: int) -> ComplexArray:
    """
    Returns the conditional shift over positions `-reach..reach`.

    Coin state 0 moves right and coin state 1 moves left. Amplitude leaving the lattice is
    dropped, so the operator is only unitary on states that can't reach the boundary.
    """
    size = 2 * reach + 1
    right = np.eye(size, k=-1, dtype=np.complex128)
    left = np.eye(size, k=1, dtype=np.complex128)
    return np.kron(np.diag([1.0, 0.0]), right) + np.kron(np.diag([0.0, 1.0]), left)


def walk_operator(spec: CoinSpec, step: int, reach: int) -> ComplexArray:
    """
    Returns the dense operator of the given step.

    Arguments:
        spec: The coin specification.
        step: The (1-based) index of the step.
        reach: The lattice covers positions `-reach..reach`.
    """
    coin = build_coin(spec, step).as_array()
    return shift_operator(reach) @ np.kron(coin, np.eye(2 * reach + 1, dtype=np.complex128))


def dense_vector(state: WalkerState, reach: int) -> ComplexArray:
    """
    Returns the state vector of the given sparse state over positions `-reach..reach`.

    Raises:
        InvalidParameterError: If an occupied position is out of reach.
    """
    vector = np.zeros(dimension(reach), dtype=np.complex128)
    for position, (a0, a1) in state.amplitudes.items():
        if abs(position) > reach:
            raise InvalidParameterError(f"Position {position} is out of reach {reach}.")

        vector[basis_index(0, position, reach)] = a0
        vector[basis_index(1, position, reach)] = a1

    return vector


def sparse_state(vector: ComplexArray, step: int, reach: int) -> WalkerState:
    """
    Returns the sparse state of the given state vector.

    Amplitudes are pruned the same way as in the default walker.
    """
    amplitudes: dict[Position, Spinor] = {}
    for position in range(-reach, reach + 1):
        a0 = prune(complex(vector[basis_index(0, position, reach)]))
        a1 = prune(complex(vector[basis_index(1, position, reach)]))
        if a0 or a1:
            amplitudes[position] = Spinor(a0, a1)

    return WalkerState(step, amplitudes)
