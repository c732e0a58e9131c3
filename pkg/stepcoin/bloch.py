from __future__ import annotations

import math
from typing import TYPE_CHECKING, NamedTuple

from .analysis import DEFAULT_SUPPORT_THRESHOLD
from .core import InvalidParameterError

if TYPE_CHECKING:
    from .core import Spinor, WalkerState
    from .typing import Position

MIN_SPINOR_WEIGHT = 1e-20
"""Spinors with a smaller weight have no Bloch vector."""


class BlochVector(NamedTuple):
    """Bloch vector of a normalized coin state."""

    x: float
    y: float
    z: float

    def dot(self, other: BlochVector) -> float:
        """Returns the scalar product of the two vectors."""
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        """Returns the Euclidean length of the vector."""
        return math.sqrt(self.dot(self))


def bloch_vector(spinor: Spinor) -> BlochVector | None:
    """
    Returns the Bloch vector of the normalized spinor.

    With `(a0, a1)` normalized: `x = 2 Re(a0 conj(a1))`, `y = 2 Im(conj(a0) a1)`,
    `z = |a0|^2 - |a1|^2`.

    Returns:
        The Bloch vector, or `None` if the weight of the spinor is below `MIN_SPINOR_WEIGHT`.
    """
    weight = spinor.weight()
    if weight <= MIN_SPINOR_WEIGHT:
        return None

    scale = 1.0 / math.sqrt(weight)
    a0, a1 = spinor.a0 * scale, spinor.a1 * scale
    return BlochVector(
        2.0 * (a0 * a1.conjugate()).real,
        2.0 * (a0.conjugate() * a1).imag,
        abs(a0) ** 2 - abs(a1) ** 2,
    )


def bloch_map(
    state: WalkerState, threshold: float = DEFAULT_SUPPORT_THRESHOLD
) -> dict[Position, BlochVector]:
    """
    Returns the Bloch vectors of the positions whose probability is at least `threshold`.

    Raises:
        InvalidParameterError: If the threshold is negative.
    """
    if threshold < 0.0:
        raise InvalidParameterError(f"The threshold can't be negative, got {threshold!r}.")

    result: dict[Position, BlochVector] = {}
    for position, spinor in state.amplitudes.items():
        if spinor.weight() < threshold or (vector := bloch_vector(spinor)) is None:
            continue

        result[position] = vector

    return result


def state_overlap(u: BlochVector, v: BlochVector) -> float:
    """
    Returns `|<u|v>|^2` of the two pure coin states, `(1 + u.v) / 2`.

    Orthogonal states have antipodal Bloch vectors and zero overlap.
    """
    return min(1.0, max(0.0, (1.0 + u.dot(v)) / 2.0))


def edge_vectors(state: WalkerState, threshold: float = 0.0) -> tuple[BlochVector, BlochVector]:
    """
    Returns the Bloch vectors of the leftmost and rightmost positions of the state.

    Arguments:
        state: The walker state.
        threshold: Positions with a smaller probability are ignored. By default every
            occupied position counts.

    Raises:
        InvalidParameterError: If no position passes the threshold.
    """
    vectors = bloch_map(state, threshold)
    if not vectors:
        raise InvalidParameterError("No position passes the threshold.")

    positions = sorted(vectors)
    return vectors[positions[0]], vectors[positions[-1]]


def edge_overlap(state: WalkerState, threshold: float = 0.0) -> float:
    """
    Returns the overlap of the coin states at the two edges of the walk.

    Spread walks reach their edges with pure `|1>` (left) and `|0>` (right) components, so
    the overlap is zero. Single-site states have overlap 1.
    """
    return state_overlap(*edge_vectors(state, threshold))
