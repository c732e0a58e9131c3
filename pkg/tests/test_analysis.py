from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stepcoin import (
    CoinMarginal,
    CoinSpec,
    Distribution,
    InitialSpec,
    InvalidParameterError,
    coin_marginal,
    divergence_ordering,
    divergence_series,
    evolve,
    fidelity,
    iter_evolution,
    kl_divergence,
    moments,
    position_distribution,
    series,
    shannon_entropy,
    smooth,
    support_count,
)

from .utils import distribution


def test_distribution() -> None:
    dist = Distribution({1: 0.25, -1: 0.75, 3: -1e-12}, step=1)
    assert list(dist) == [-1, 1, 3]
    assert dist[3] == 0.0
    assert dist.support() == (-1, 1)
    assert dist.step == 1
    assert list(dist.sublattice()) == [0.75, 0.25]
    assert list(dist.as_array(-1, 1)) == [0.75, 0.0, 0.25]


@pytest.mark.parametrize(
    "probabilities",
    (
        {0: 0.5},
        {0: 0.5, 1: 0.6},
        {0: 1.1, 1: -0.1},
        {0: math.nan},
    ),
)
def test_distribution_errors(probabilities: dict[int, float]) -> None:
    with pytest.raises(InvalidParameterError):
        Distribution(probabilities)


def test_first_step_distribution() -> None:
    dist = distribution(CoinSpec.sdc(math.pi / 3), 1)
    assert dist == pytest.approx({-1: 0.75, 1: 0.25})
    assert moments(dist).mean == pytest.approx(-0.5)
    assert moments(dist).variance == pytest.approx(0.75)
    assert shannon_entropy(dist) == pytest.approx(0.562335, abs=1e-6)


def test_shannon_entropy() -> None:
    assert shannon_entropy(Distribution({0: 1.0})) == 0.0
    assert shannon_entropy(Distribution({0: 0.5, 2: 0.5, 4: 0.0})) == pytest.approx(math.log(2))
    assert shannon_entropy(CoinMarginal(0.25, 0.75)) == pytest.approx(0.562335, abs=1e-6)
    assert shannon_entropy(CoinMarginal(1.0, 0.0)) == 0.0


def test_kl_divergence() -> None:
    p = Distribution({0: 0.5, 2: 0.5})
    assert kl_divergence(p, p) == 0.0
    assert kl_divergence(p, Distribution({0: 1.0})) == math.inf
    assert kl_divergence(Distribution({0: 1.0}), p) == pytest.approx(math.log(2))
    assert kl_divergence(CoinMarginal(0.5, 0.5), CoinMarginal(0.25, 0.75)) == pytest.approx(
        0.5 * math.log(2) + 0.5 * math.log(2 / 3)
    )


def test_fidelity() -> None:
    p = Distribution({0: 0.5, 2: 0.5})
    q = Distribution({2: 0.5, 4: 0.5})
    assert fidelity(p, p) == pytest.approx(1.0)
    assert fidelity(p, q) == pytest.approx(0.25)
    assert fidelity(q, p) == fidelity(p, q)
    assert fidelity(Distribution({0: 1.0}), Distribution({2: 1.0})) == 0.0


def test_support_count_of_the_quarter_turn_walk() -> None:
    spec = CoinSpec.sdc(math.pi / 4)
    assert [support_count(distribution(spec, t)) for t in range(9)] == [1, 2, 1, 1, 1, 2, 1, 1, 1]
    with pytest.raises(InvalidParameterError):
        support_count(distribution(spec, 1), -0.1)


def test_support_count_threshold() -> None:
    dist = Distribution({0: 0.99995, 2: 0.00005})
    assert support_count(dist) == 1
    assert support_count(dist, 0.0) == 2


@pytest.mark.parametrize("steps", range(10, 31))
def test_step_dependent_walk_spreads_at_least_as_wide(steps: int) -> None:
    sdc = support_count(distribution(CoinSpec.sdc(math.pi / 3), steps))
    sic = support_count(distribution(CoinSpec.sic(math.pi / 3), steps))
    assert sdc >= sic


@pytest.mark.parametrize("steps", range(2, 13))
def test_step_dependent_variance_of_two_fifths_pi(steps: int) -> None:
    sdc = moments(distribution(CoinSpec.sdc(2 * math.pi / 5), steps)).variance
    sic = moments(distribution(CoinSpec.sic(2 * math.pi / 5), steps)).variance
    assert sdc > sic


def test_smooth() -> None:
    dist = Distribution({0: 1.0}, step=2)
    smoothed = smooth(dist, 0.1, (-2, 0, 2))
    assert smoothed.step == 2
    assert smoothed == pytest.approx({-2: 0.1 / 3, 0: 0.9 + 0.1 / 3, 2: 0.1 / 3})
    assert smooth(dist, 0.0) == dist

    for epsilon in (-0.1, 1.0):
        with pytest.raises(InvalidParameterError):
            smooth(dist, epsilon)


def test_entropy_series_of_the_quarter_turn_walk() -> None:
    records = series(InitialSpec.zero(), CoinSpec.sdc(math.pi / 4), 2)
    assert [r.step for r in records] == [0, 1, 2]
    assert records[0].position_entropy == 0.0
    assert records[1].position_entropy == pytest.approx(math.log(2))
    assert records[2].position_entropy < records[1].position_entropy


@pytest.mark.parametrize("theta", (math.pi / 3, math.pi / 5, math.pi / 12))
def test_step_independent_entropy_never_decreases(theta: float) -> None:
    records = series(InitialSpec.zero(), CoinSpec.sic(theta), 30)
    for previous, current in zip(records, records[1:]):
        assert current.position_entropy >= previous.position_entropy - 1e-12


def test_series_errors() -> None:
    with pytest.raises(InvalidParameterError):
        series(InitialSpec.zero(), CoinSpec.sdc(0.3), 0)

    with pytest.raises(InvalidParameterError):
        divergence_series(InitialSpec.zero(), 0.3, 0)


@pytest.mark.parametrize("theta", (math.pi / 4, math.pi / 3, 0.7))
def test_divergence_vanishes_after_one_step(theta: float) -> None:
    records = divergence_series(InitialSpec.zero(), theta, 1)
    assert [r.step for r in records] == [0, 1]
    for record in records:
        assert record.position_divergence == pytest.approx(0.0, abs=1e-15)
        assert record.coin_divergence == pytest.approx(0.0, abs=1e-15)


def test_coin_divergence() -> None:
    init = InitialSpec.normalized(1, 1j)
    records = divergence_series(init, 2 * math.pi / 5, 6)
    sdc = coin_marginal(evolve(init, CoinSpec.sdc(2 * math.pi / 5), 6))
    sic = coin_marginal(evolve(init, CoinSpec.sic(2 * math.pi / 5), 6))
    assert records[-1].coin_divergence == pytest.approx(kl_divergence(sdc, sic))


def test_smoothed_divergence_is_finite() -> None:
    # The quarter turn walk re-localizes while the Hadamard walk spreads.
    raw = divergence_series(InitialSpec.zero(), math.pi / 4, 8)
    smoothed = divergence_series(InitialSpec.zero(), math.pi / 4, 8, epsilon=1e-3)
    assert all(math.isfinite(r.position_divergence) for r in smoothed)
    assert any(r.position_divergence > 0.0 for r in raw)


def test_divergence_ordering() -> None:
    thetas = (
        math.pi / 3,
        2 * math.pi / 5,
        math.pi / 5,
        3.59 * math.pi / 5,
        math.pi / 12,
        math.pi / 4,
    )
    report = divergence_ordering(thetas, 20)
    assert report.step == 20
    assert report.thetas == thetas
    assert report.divergences == pytest.approx((0.3324, 0.8700, 1.4626, 2.1299, 4.2532, 3.4972), abs=5e-3)
    assert not report.holds
    assert [(v.theta, v.next_theta) for v in report.violations] == [(math.pi / 12, math.pi / 4)]

    assert divergence_ordering(thetas[:4], 20).holds


@pytest.mark.parametrize("step", (-1, -5))
def test_divergence_ordering_rejects_negative_steps(step: int) -> None:
    with pytest.raises(InvalidParameterError):
        divergence_ordering((math.pi / 3, math.pi / 5), step)


@settings(max_examples=30, deadline=None)
@given(
    theta=st.floats(min_value=0.0, max_value=math.pi, allow_nan=False),
    steps=st.integers(min_value=0, max_value=30),
)
def test_entropy_bounds(theta: float, steps: int) -> None:
    state = evolve(InitialSpec.zero(), CoinSpec.sdc(theta), steps)
    dist = position_distribution(state)
    assert shannon_entropy(coin_marginal(state)) <= math.log(2) + 1e-9
    assert -1e-12 <= shannon_entropy(dist) <= math.log(len(dist)) + 1e-12
    assert math.fsum(dist.values()) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(("steps", "position"), ((3, -1), (6, -2)))
def test_quarter_turn_walk_relocalizes(steps: int, position: int) -> None:
    dist = distribution(CoinSpec.sdc(math.pi / 4), steps)
    assert dist[position] == pytest.approx(1.0, abs=1e-10)
    assert shannon_entropy(dist) == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(theta=st.floats(min_value=0.0, max_value=math.pi, allow_nan=False))
def test_mirror_angles_give_identical_measurements(theta: float) -> None:
    init = InitialSpec.zero()
    walks = zip(
        iter_evolution(init, CoinSpec.sdc(theta), 30),
        iter_evolution(init, CoinSpec.sdc(math.pi - theta), 30),
        strict=True,
    )
    for state, mirrored in walks:
        p, q = position_distribution(state), position_distribution(mirrored)
        for position in set(p) | set(q):
            assert p.get(position, 0.0) == pytest.approx(q.get(position, 0.0), abs=1e-10)

        assert shannon_entropy(p) == pytest.approx(shannon_entropy(q), abs=1e-8)
        assert shannon_entropy(coin_marginal(state)) == pytest.approx(
            shannon_entropy(coin_marginal(mirrored)), abs=1e-8
        )
        assert moments(p).mean == pytest.approx(moments(q).mean, abs=1e-8)
        assert moments(p).variance == pytest.approx(moments(q).variance, abs=1e-8)
        assert support_count(p) == support_count(q)
