import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moscal.scalarizing import (
    Scalarizer,
    ScalarizerSpec,
    WeightVector,
    as_point,
    draw_random_weight,
    evaluate_chebycheff,
    evaluate_linear,
    evaluate_mixed,
    generate_uniform_weights,
    granularity_for_count,
    uniform_weight_count,
)


def test_weight_vector_invariants():
    w = WeightVector((0.25, 0.75))
    assert len(w) == 2 and w[1] == 0.75
    with pytest.raises(ValueError):
        WeightVector((0.5, 0.6))
    with pytest.raises(ValueError):
        WeightVector((-0.1, 1.1))
    with pytest.raises(ValueError):
        WeightVector((1.0,))
    # within tolerance 1e-9 is accepted
    WeightVector((0.5, 0.5 + 5e-10))


def test_as_point_validation():
    assert as_point([1, 2.5]) == (1.0, 2.5)
    with pytest.raises(ValueError):
        as_point([1.0])
    with pytest.raises(ValueError):
        as_point([1.0, float("nan")])
    with pytest.raises(ValueError):
        as_point([1.0, float("inf")])


def test_uniform_weights_j2_h4_exact_enumeration():
    vs = [w.lambdas for w in generate_uniform_weights(2, 4)]
    assert vs == [(0.0, 1.0), (0.25, 0.75), (0.5, 0.5), (0.75, 0.25), (1.0, 0.0)]


def test_uniform_weight_counts():
    # closed-form C(H+J-1, J-1), checked against the explicit enumeration
    for j, h in [(2, 1), (2, 7), (3, 4), (3, 9), (4, 3)]:
        assert len(generate_uniform_weights(j, h)) == uniform_weight_count(j, h) == math.comb(h + j - 1, j - 1)
    # the two counts used by the experiment presets
    assert uniform_weight_count(2, 100) == 101
    assert uniform_weight_count(3, 81) == 3403


def test_uniform_weights_lexicographic_and_valid():
    vs = generate_uniform_weights(3, 5)
    tuples = [w.lambdas for w in vs]
    assert tuples == sorted(tuples)
    assert len(set(tuples)) == len(tuples)
    for w in vs:
        assert abs(sum(w.lambdas) - 1.0) <= 1e-9


def test_granularity_for_count():
    assert granularity_for_count(2, 101) == 100
    assert granularity_for_count(2, 301) == 300
    assert granularity_for_count(3, 3403) == 81
    with pytest.raises(ValueError):
        granularity_for_count(3, 3404)


def test_random_weights_uniform_on_simplex():
    # oracle: marginal mean of each coordinate is 1/J; P(lambda_1 > 0.5) = (1/2)^(J-1)
    rng = np.random.default_rng(7)
    draws2 = np.array([draw_random_weight(2, rng).lambdas for _ in range(100_000)])
    assert abs(draws2[:, 0].mean() - 0.5) < 0.01
    rng = np.random.default_rng(11)
    draws3 = np.array([draw_random_weight(3, rng).lambdas for _ in range(100_000)])
    frac = (draws3[:, 0] > 0.5).mean()
    assert abs(frac - 0.25) < 0.01
    assert np.all(draws3 >= 0.0)
    assert np.allclose(draws3.sum(axis=1), 1.0, atol=1e-9)


def test_linear_examples():
    assert evaluate_linear((10.0, 1.0), (0.1, 0.9)) == pytest.approx(1.9)
    assert evaluate_linear((4.0, 4.0, 4.0), (1 / 3, 1 / 3, 1 / 3)) == pytest.approx(4.0)


def test_chebycheff_examples():
    assert evaluate_chebycheff((10.0, 1.0), (0.1, 0.9), (0.0, 0.0)) == pytest.approx(1.0)
    assert evaluate_chebycheff((5.0, 5.0), (0.5, 0.5), (5.0, 5.0)) == 0.0
    # zero-weight objective contributes nothing no matter how bad it is
    assert evaluate_chebycheff((1e9, 2.0), (0.0, 1.0), (0.0, 0.0)) == pytest.approx(2.0)


def test_mixed_example():
    spec = ScalarizerSpec("mixed", reference_point=(0.0, 0.0), w_linear=0.001, w_cheby=0.999)
    z, lam = (10.0, 1.0), (0.1, 0.9)
    expected = 0.001 * 1.9 + 0.999 * 1.0
    assert evaluate_mixed(z, lam, spec) == pytest.approx(expected)


def test_mixed_extremes_bit_match_pure_evaluators():
    rng = np.random.default_rng(3)
    for _ in range(200):
        z = tuple(rng.uniform(-5, 20, size=3))
        lam = draw_random_weight(3, rng)
        ref = tuple(rng.uniform(-5, 5, size=3))
        pure_lin = evaluate_linear(z, lam)
        pure_che = evaluate_chebycheff(z, lam, ref)
        lin_spec = ScalarizerSpec("mixed", ref, w_linear=1.0, w_cheby=0.0)
        che_spec = ScalarizerSpec("mixed", ref, w_linear=0.0, w_cheby=1.0)
        assert evaluate_mixed(z, lam, lin_spec) == pure_lin
        assert evaluate_mixed(z, lam, che_spec) == pure_che


def test_scalarizer_spec_validation():
    with pytest.raises(ValueError):
        ScalarizerSpec("nonsense")
    with pytest.raises(ValueError):
        ScalarizerSpec("mixed", (0.0, 0.0), w_linear=0.7, w_cheby=0.7)
    with pytest.raises(ValueError):
        Scalarizer((0.5, 0.5), ScalarizerSpec("chebycheff"))  # missing reference
    with pytest.raises(ValueError):
        Scalarizer((0.5, 0.5), ScalarizerSpec("chebycheff", (0.0, 0.0, 0.0)))
    s = Scalarizer((0.5, 0.5), ScalarizerSpec("linear"))
    with pytest.raises(ValueError):
        s((1.0, 2.0, 3.0))


def test_scalarizer_batch_matches_scalar_calls():
    rng = np.random.default_rng(5)
    pts = rng.uniform(0, 10, size=(40, 2))
    for spec in [
        ScalarizerSpec("linear"),
        ScalarizerSpec("chebycheff", (0.0, 0.0)),
        ScalarizerSpec("mixed", (0.0, 0.0), w_linear=0.001, w_cheby=0.999),
    ]:
        s = Scalarizer((0.3, 0.7), spec)
        batch = s.value(pts)
        assert batch.shape == (40,)
        for row, val in zip(pts, batch):
            assert s(tuple(row)) == pytest.approx(val)


def test_scalarizer_transform_applies_before_scalarizing():
    lows = np.array([10.0, -4.0])
    spans = np.array([5.0, 2.0])
    s = Scalarizer(
        (0.5, 0.5),
        ScalarizerSpec("chebycheff", (0.0, 0.0)),
        transform=lambda z: (z - lows) / spans,
    )
    assert s((15.0, -2.0)) == pytest.approx(0.5)
    assert not s.is_plain_linear


@st.composite
def weight_params(draw):
    j = draw(st.integers(min_value=2, max_value=4))
    h = draw(st.integers(min_value=1, max_value=12))
    return j, h


@given(weight_params())
@settings(max_examples=60, deadline=None)
def test_uniform_weight_properties(params):
    j, h = params
    vs = generate_uniform_weights(j, h)
    assert len(vs) == uniform_weight_count(j, h)
    tuples = [w.lambdas for w in vs]
    assert tuples == sorted(tuples)
    # the unit vectors are always on the lattice
    for unit in np.eye(j):
        assert tuple(unit) in tuples


@given(
    st.lists(st.floats(min_value=-100, max_value=100), min_size=2, max_size=4),
    st.integers(min_value=0, max_value=2**32 - 1),
)
@settings(max_examples=80, deadline=None)
def test_chebycheff_dominance_monotone(z, seed):
    rng = np.random.default_rng(seed)
    j = len(z)
    lam = draw_random_weight(j, rng)
    ref = tuple(rng.uniform(-50, 50, size=j))
    z = tuple(z)
    better = tuple(v - rng.uniform(0, 10) for v in z)
    assert evaluate_chebycheff(better, lam, ref) <= evaluate_chebycheff(z, lam, ref) + 1e-12
    assert evaluate_linear(better, lam) <= evaluate_linear(z, lam) + 1e-12
