import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from spaces.measure_space import (
    MeasureSpace,
    function,
    functional,
    pairing,
    random_function,
    random_functional,
    random_space,
)
from spaces.norms import SpaceModel, dual_norm, norm
from spaces.young import exponential_young, mixed_power_young, power_young
from services.duality import (
    central_difference,
    dual_norm_gradient,
    duality_map,
    gateaux_fd_check,
    hyperplane_oracle,
    mazur_inverse,
    mazur_map,
    norm_gradient,
    operator_norm_estimate,
    projected_descent,
    reflexivity_witness,
    riesz_represent,
    second_dual_action,
    strict_maximality_margin,
)
from utils.errors import DomainError, GradientUndefinedError, UndefinedDirectionError, UnsupportedModelError
from utils.errors import UnsupportedYoungError

CUBE_ROOT_TWO = 2.0 ** (1.0 / 3.0)


def test_hilbert_gradient_and_duality(plane):
    model = SpaceModel.hilbert(plane)
    np.testing.assert_allclose(norm_gradient(model, function(plane, [0.6, 0.8])).values, [0.6, 0.8])
    result = duality_map(model, functional(plane, [0.6, 0.8]))
    np.testing.assert_allclose(result.point.values, [0.6, 0.8])
    assert result.residual <= 1e-12


def test_lebesgue_duality_example(plane):
    model = SpaceModel.lebesgue(plane, 3.0)
    y = functional(plane, [2.0 ** (-2.0 / 3.0)] * 2)
    result = duality_map(model, y)
    np.testing.assert_allclose(result.point.values, [1.0 / CUBE_ROOT_TWO] * 2, rtol=1e-12)
    assert result.scale == pytest.approx(1.0)
    np.testing.assert_allclose(result.functional.values, y.values, rtol=1e-12)


def test_duality_round_trip(models, rng):
    for model in models:
        for _ in range(10):
            y = random_functional(model.space, rng)
            result = duality_map(model, y)
            assert result.residual <= 1e-7
            assert norm(model, result.point) == pytest.approx(1.0, abs=1e-9)
            assert pairing(model.space, y, result.point) == pytest.approx(dual_norm(model, y), rel=1e-9)


def test_gradient_is_a_unit_norming_functional(models, rng):
    for model in models:
        x = random_function(model.space, rng, scale=3.0)
        gradient = norm_gradient(model, x)
        assert dual_norm(model, gradient) == pytest.approx(1.0, rel=1e-9)
        assert pairing(model.space, gradient, x / norm(model, x)) == pytest.approx(1.0, rel=1e-9)
        back = duality_map(model, gradient).point - x / norm(model, x)
        assert back.is_zero() or norm(model, back) <= 1e-7


def test_gradient_matches_finite_differences(models, rng):
    for model in models:
        for _ in range(5):
            x, u = random_function(model.space, rng), random_function(model.space, rng)
            x = x / norm(model, x)
            slope = pairing(model.space, norm_gradient(model, x), u)
            assert central_difference(model, x, u) == pytest.approx(slope, abs=1e-6 * norm(model, u))


def test_dual_norm_gradient_matches_finite_differences(weighted_space, rng):
    model = SpaceModel.lebesgue(weighted_space, 3.0)
    g, v = random_functional(weighted_space, rng), random_functional(weighted_space, rng)
    step = 1e-6
    difference = (dual_norm(model, g + v * step) - dual_norm(model, g - v * step)) / (2.0 * step)
    assert pairing(weighted_space, v, dual_norm_gradient(model, g)) == pytest.approx(difference, abs=1e-6)


def test_gateaux_residual_vanishes_faster_than_the_step(weighted_space, rng):
    model = SpaceModel.lebesgue(weighted_space, 3.0)
    x, u = random_function(weighted_space, rng), random_function(weighted_space, rng)
    profile = gateaux_fd_check(model, x, u, [1e-1, 1e-2, 1e-3, 0.0])
    assert profile.residuals[-1] == 0.0
    assert profile.ratios[0] > profile.ratios[1] > profile.ratios[2]
    assert profile.to_json()["steps"] == [1e-1, 1e-2, 1e-3, 0.0]


def test_zero_arguments_are_rejected(plane):
    model = SpaceModel.lebesgue(plane, 3.0)
    with pytest.raises(GradientUndefinedError):
        norm_gradient(model, function(plane, [0.0, 0.0]))
    with pytest.raises(UndefinedDirectionError):
        duality_map(model, functional(plane, [0.0, 0.0]))


def test_non_delta2_models_are_rejected(plane):
    model = SpaceModel.orlicz(plane, exponential_young())
    with pytest.raises(UnsupportedYoungError):
        duality_map(model, functional(plane, [1.0, 2.0]))
    with pytest.raises(UnsupportedYoungError):
        norm_gradient(model, function(plane, [1.0, 2.0]))


def test_riesz_representation(models, rng):
    for model in models:
        y = random_functional(model.space, rng)
        density = riesz_represent(model, y, seed=int(rng.integers(2**31)), trials=20)
        np.testing.assert_allclose(density.values, y.values, rtol=1e-7, atol=1e-8)


def test_riesz_representation_is_seeded(models, rng):
    for model in models:
        y = random_functional(model.space, rng, scale=100.0)
        first = riesz_represent(model, y, seed=9, trials=10)
        second = riesz_represent(model, y, seed=9, trials=10)
        assert first.values.tolist() == second.values.tolist()
        for _ in range(10):
            f = random_function(model.space, rng)
            defect = abs(pairing(model.space, first, f) - pairing(model.space, y, f))
            assert defect <= 1e-8 * norm(model, f)


def test_reflexivity_witness(weighted_space, rng):
    for model in (SpaceModel.hilbert(weighted_space), SpaceModel.lebesgue(weighted_space, 3.0)):
        phi = random_functional(weighted_space, rng)
        x = reflexivity_witness(model, phi)
        for _ in range(5):
            probe = random_functional(weighted_space, rng)
            assert pairing(weighted_space, probe, x) == pytest.approx(second_dual_action(phi, probe), abs=1e-8)


def test_reflexivity_needs_a_supported_dual(weighted_space, rng):
    model = SpaceModel.orlicz(weighted_space, power_young(3.0))
    with pytest.raises(UnsupportedModelError):
        reflexivity_witness(model, random_functional(weighted_space, rng))


def test_hyperplane_oracle_agrees_with_duality_map(rng):
    space = MeasureSpace([0.5, 1.0, 1.5])
    model = SpaceModel.lebesgue(space, 3.0)
    y = random_functional(space, rng)
    oracle = hyperplane_oracle(model, y)
    assert norm(model, oracle - duality_map(model, y).point) <= 1e-7


@pytest.mark.parametrize("young", [power_young(3.0, normalized=False), mixed_power_young(2.0, 4.0)],
                         ids=["cube", "mixed"])
def test_hyperplane_oracle_on_eight_atom_orlicz_spaces(young):
    rng = np.random.default_rng(1)
    model = SpaceModel.orlicz(random_space(8, rng), young)
    for _ in range(5):
        y = random_functional(model.space, rng)
        gap = hyperplane_oracle(model, y) - duality_map(model, y).point
        assert norm(model, gap) <= 1e-6


def test_hyperplane_oracle_needs_a_nonzero_functional(plane):
    with pytest.raises(UndefinedDirectionError):
        hyperplane_oracle(SpaceModel.hilbert(plane), functional(plane, [0.0, 0.0]))


def test_projected_descent_solves_a_quadratic_on_a_hyperplane():
    # min |v|² on v₀ + v₁ + v₂ = 1 is v = (1/3, 1/3, 1/3)
    point, size, iterations = projected_descent(lambda v: 2.0 * v, np.array([1.0, 0.0, 0.0]),
                                                np.ones(3), tolerance=1e-12)
    np.testing.assert_allclose(point, [1.0 / 3.0] * 3, atol=1e-12)
    assert size <= 1e-12
    assert iterations >= 1


def test_projected_descent_without_a_constraint():
    target = np.array([1.0, -2.0])
    point, size, _ = projected_descent(lambda v: np.array([4.0, 1.0]) * (v - target), np.array([3.0, 3.0]),
                                       tolerance=1e-12)
    np.testing.assert_allclose(point, target, atol=1e-11)


def test_bisection_and_closed_form_duality_maps_agree(weighted_space, rng):
    for p in (1.5, 3.0, 4.0):
        lebesgue = SpaceModel.lebesgue(weighted_space, p)
        orlicz = SpaceModel.orlicz(weighted_space, power_young(p, normalized=False))
        for _ in range(10):
            y = random_functional(weighted_space, rng)
            closed = duality_map(lebesgue, y)
            bisected = duality_map(orlicz, y)
            np.testing.assert_allclose(bisected.point.values, closed.point.values, rtol=1e-8, atol=1e-10)
            assert bisected.scale == pytest.approx(closed.scale, rel=1e-10)


def test_strict_maximality(models, rng):
    for model in models:
        assert strict_maximality_margin(model, random_functional(model.space, rng), 50, rng) > 0.0


def test_operator_norm_estimate(plane, rng):
    for model in (SpaceModel.hilbert(plane), SpaceModel.lebesgue(plane, 3.0)):
        g = functional(plane, [1.0, -2.0])
        assert operator_norm_estimate(model, g, rng) == pytest.approx(dual_norm(model, g), rel=1e-6)


def test_mazur_example():
    space = MeasureSpace([1.0, 1.0])
    np.testing.assert_allclose(mazur_map(4.0, function(space, [2.0, 0.0])).values, [8.0, 0.0])


def test_mazur_domain(plane):
    with pytest.raises(DomainError):
        mazur_map(1.0, function(plane, [1.0, 1.0]))
    with pytest.raises(DomainError):
        mazur_inverse(float("inf"), function(plane, [1.0, 1.0]))


@settings(max_examples=40, deadline=None)
@given(values=arrays(float, 3, elements=st.floats(min_value=-100.0, max_value=100.0)),
       p=st.sampled_from([1.25, 1.5, 2.0, 3.0, 6.0]))
def test_mazur_round_trip_and_norm_identity(values, p):
    space = MeasureSpace([0.5, 1.0, 2.0])
    q = p / (p - 1.0)
    h = function(space, values)
    image = mazur_map(p, h)
    np.testing.assert_allclose(mazur_inverse(p, image).values, values, rtol=1e-10, atol=1e-10)
    expected = norm(SpaceModel.lebesgue(space, p), h) ** (p / q)
    assert norm(SpaceModel.lebesgue(space, q), image) == pytest.approx(expected, rel=1e-9, abs=1e-12)
