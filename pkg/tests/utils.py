from pathlib import Path

from stepcoin import CoinSpec, Distribution, InitialSpec, evolve, position_distribution

tests_root = Path(__file__).parent


def distribution(spec: CoinSpec, steps: int, init: InitialSpec | None = None) -> Distribution:
    """Returns the position distribution of the given walk after `steps` steps."""
    return position_distribution(evolve(InitialSpec.zero() if init is None else init, spec, steps))
