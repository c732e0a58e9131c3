import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stepcoin import (
    CoinMatrix,
    CoinMode,
    CoinSpec,
    EndpointStart,
    InitialSpec,
    InvalidParameterError,
    Limits,
    ResourceLimitError,
    Spinor,
    WalkerState,
    apply_step,
    build_coin,
    endpoint_amplitudes,
    evolve,
    initial_state,
    iter_evolution,
)

angles = st.floats(min_value=-2 * math.pi, max_value=2 * math.pi, allow_nan=False)
amplitudes = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize(
    ("spec", "step", "angle"),
    (
        (CoinSpec.sdc(0.3), 1, 0.3),
        (CoinSpec.sdc(0.3), 4, 1.2),
        (CoinSpec.sic(0.3), 1, 0.3),
        (CoinSpec.sic(0.3), 4, 0.3),
    ),
)
def test_coin_angle(spec: CoinSpec, step: int, angle: float) -> None:
    assert spec.angle(step) == pytest.approx(angle)
    assert build_coin(spec, step) == CoinMatrix.rotation(spec.angle(step))


@settings(max_examples=50, deadline=None)
@given(theta=angles, step=st.integers(min_value=1, max_value=500))
def test_coin_is_unitary(theta: float, step: int) -> None:
    coin = build_coin(CoinSpec.sdc(theta), step).as_array()
    product = coin @ coin.conj().T
    assert abs(product[0, 0] - 1) < 1e-12
    assert abs(product[1, 1] - 1) < 1e-12
    assert abs(product[0, 1]) < 1e-12
    assert abs(product[1, 0]) < 1e-12


@settings(max_examples=50, deadline=None)
@given(theta=angles, mode=st.sampled_from(CoinMode), step=st.integers(min_value=1, max_value=200))
def test_coin_is_an_involution(theta: float, mode: CoinMode, step: int) -> None:
    coin = build_coin(CoinSpec(theta, mode), step).as_array()
    assert np.max(np.abs(coin @ coin - np.eye(2))) <= 1e-12


@pytest.mark.parametrize(
    ("theta", "step"),
    (
        (math.nan, 1),
        (math.inf, 1),
        (0.1, 0),
        (0.1, -3),
    ),
)
def test_build_coin_errors(theta: float, step: int) -> None:
    with pytest.raises(InvalidParameterError):
        build_coin(CoinSpec.sdc(theta), step)


def test_initial_state() -> None:
    state = initial_state(InitialSpec.zero())
    assert state.step == 0
    assert state.occupied == (0,)
    assert state.amplitude(0) == Spinor(1, 0)
    assert state.amplitude(5) == Spinor(0, 0)


@pytest.mark.parametrize(
    "init",
    (
        InitialSpec(0j, 0j),
        InitialSpec(2 + 0j, 0j),
        InitialSpec(complex(math.nan, 0), 1 + 0j),
    ),
)
def test_initial_state_errors(init: InitialSpec) -> None:
    with pytest.raises(InvalidParameterError):
        initial_state(init)


def test_normalized_initial_spec() -> None:
    init = InitialSpec.normalized(3, 4j)
    assert init.a == pytest.approx(0.6)
    assert init.b == pytest.approx(0.8j)
    with pytest.raises(InvalidParameterError):
        InitialSpec.normalized(0, 0)


@pytest.mark.parametrize("theta", (0.0, 0.4, math.pi / 3, math.pi / 2))
def test_first_step(theta: float) -> None:
    spec = CoinSpec.sdc(theta)
    c, s = math.cos(theta), math.sin(theta)

    from_zero = apply_step(initial_state(InitialSpec.zero()), spec)
    assert from_zero.amplitude(1).a0 == pytest.approx(c)
    assert from_zero.amplitude(-1).a1 == pytest.approx(s)
    assert from_zero.amplitude(1).a1 == 0
    assert from_zero.amplitude(-1).a0 == 0

    from_one = apply_step(initial_state(InitialSpec.one()), spec)
    assert from_one.amplitude(1).a0 == pytest.approx(s)
    assert from_one.amplitude(-1).a1 == pytest.approx(-c)


def test_zero_steps_returns_the_initial_state() -> None:
    init = InitialSpec.normalized(1, 1j)
    state = evolve(init, CoinSpec.sdc(0.7), 0)
    assert state.step == 0
    assert state.occupied == (0,)
    assert state.amplitude(0).a0 == pytest.approx(init.a)
    assert state.amplitude(0).a1 == pytest.approx(init.b)


@pytest.mark.parametrize("steps", (1, 5, 17))
def test_free_walk(steps: int) -> None:
    assert evolve(InitialSpec.zero(), CoinSpec.sdc(0.0), steps).occupied == (steps,)
    assert evolve(InitialSpec.one(), CoinSpec.sdc(0.0), steps).occupied == (-steps,)


def test_quarter_turn_walk_cycles() -> None:
    positions = [s.occupied for s in iter_evolution(InitialSpec.zero(), CoinSpec.sdc(math.pi / 2), 8)]
    assert positions == [(0,), (-1,), (-2,), (-1,), (0,), (-1,), (-2,), (-1,), (0,)]


@settings(max_examples=40, deadline=None)
@given(
    theta=angles,
    mode=st.sampled_from(CoinMode),
    a=amplitudes,
    b=amplitudes,
    steps=st.integers(min_value=0, max_value=25),
)
def test_state_invariants(theta: float, mode: CoinMode, a: complex, b: complex, steps: int) -> None:
    if abs(a) ** 2 + abs(b) ** 2 < 1e-6:
        a = 1 + 0j

    for state in iter_evolution(InitialSpec.normalized(a, b), CoinSpec(theta, mode), steps):
        state.validate()


@pytest.mark.parametrize("k", range(61))
def test_state_invariants_on_an_angle_grid(k: int) -> None:
    for state in iter_evolution(InitialSpec.zero(), CoinSpec.sdc(k * math.pi / 60), 200):
        state.validate(atol=1e-10)


@pytest.mark.parametrize("theta", (0.3, math.pi / 5, math.pi / 3, 2 * math.pi / 5, 1.9))
@pytest.mark.parametrize("start", tuple(EndpointStart))
@pytest.mark.parametrize("steps", (1, 2, 5, 9))
def test_endpoint_amplitudes_match_evolution(theta: float, start: EndpointStart, steps: int) -> None:
    init = InitialSpec.zero() if start is EndpointStart.zero else InitialSpec.one()
    state = evolve(init, CoinSpec.sdc(theta), steps)
    right, left = endpoint_amplitudes(CoinSpec.sdc(theta), steps, start)
    assert state.amplitude(steps).a0 == pytest.approx(right, abs=1e-12)
    assert state.amplitude(-steps).a1 == pytest.approx(left, abs=1e-12)
    assert state.amplitude(steps).a1 == 0
    assert state.amplitude(-steps).a0 == 0


@settings(max_examples=20, deadline=None)
@given(
    theta=st.floats(min_value=0.0, max_value=math.pi, allow_nan=False),
    start=st.sampled_from(EndpointStart),
)
def test_endpoint_amplitudes_along_a_long_walk(theta: float, start: EndpointStart) -> None:
    init = InitialSpec.zero() if start is EndpointStart.zero else InitialSpec.one()
    spec = CoinSpec.sdc(theta)
    for state in iter_evolution(init, spec, 50):
        steps = state.step
        if steps == 0:
            continue

        right, left = endpoint_amplitudes(spec, steps, start)
        assert state.amplitude(steps).a0 == pytest.approx(right, abs=1e-10)
        assert state.amplitude(-steps).a1 == pytest.approx(left, abs=1e-10)


def test_endpoint_amplitude_values() -> None:
    right, _ = endpoint_amplitudes(CoinSpec.sdc(math.pi / 5), 4, EndpointStart.zero)
    assert right == pytest.approx(0.0625)

    right, left = endpoint_amplitudes(CoinSpec.sdc(math.pi / 2), 3, EndpointStart.zero)
    assert right == pytest.approx(0, abs=1e-15)
    assert left == pytest.approx(0, abs=1e-15)

    _, left = endpoint_amplitudes(CoinSpec.sdc(0.4), 1, EndpointStart.one)
    assert left == pytest.approx(-math.cos(0.4))


@pytest.mark.parametrize(
    ("spec", "steps"),
    (
        (CoinSpec.sic(0.4), 3),
        (CoinSpec.sdc(0.4), 0),
        (CoinSpec.sdc(math.nan), 3),
    ),
)
def test_endpoint_amplitude_errors(spec: CoinSpec, steps: int) -> None:
    with pytest.raises(InvalidParameterError):
        endpoint_amplitudes(spec, steps, EndpointStart.zero)


def test_evolution_errors() -> None:
    with pytest.raises(InvalidParameterError):
        evolve(InitialSpec.zero(), CoinSpec.sdc(0.1), -1)

    with pytest.raises(InvalidParameterError):
        iter_evolution(InitialSpec.zero(), CoinSpec.sdc(math.nan), 3)

    with pytest.raises(ResourceLimitError):
        evolve(InitialSpec.zero(), CoinSpec.sdc(0.1), 11, limits=Limits(max_steps=10))


def test_state_validation() -> None:
    with pytest.raises(InvalidParameterError):
        WalkerState(-1, {})

    with pytest.raises(InvalidParameterError):
        WalkerState(1, {1: Spinor(0.5, 0)}).validate()

    with pytest.raises(InvalidParameterError):
        WalkerState(1, {0: Spinor(1, 0)}).validate()

    with pytest.raises(InvalidParameterError):
        WalkerState(1, {3: Spinor(1, 0)}).validate()

    WalkerState(1, {1: Spinor(0.6, 0), -1: Spinor(0, 0.8)}).validate()


def test_limits_from_env() -> None:
    limits = Limits.from_env({"STEPCOIN_MAX_STEPS": "50", "STEPCOIN_MAX_DENSITY_STEPS": "7"})
    assert limits.max_steps == 50
    assert limits.max_density_steps == 7
    assert Limits.from_env({}).max_steps == 10_000

    limits.check_steps(50)
    with pytest.raises(ResourceLimitError):
        limits.check_steps(51)

    with pytest.raises(ResourceLimitError):
        limits.check_density_steps(8)


@pytest.mark.parametrize(
    "environ",
    (
        {"STEPCOIN_MAX_STEPS": "many"},
        {"STEPCOIN_MAX_STEPS": "0"},
        {"STEPCOIN_MAX_DENSITY_STEPS": "-4"},
    ),
)
def test_limits_from_env_errors(environ: dict[str, str]) -> None:
    with pytest.raises(InvalidParameterError):
        Limits.from_env(environ)
