import math
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from spaces.measure_space import MeasureSpace, function, functional, random_function, random_functional
from spaces.norms import (
    SpaceModel,
    amemiya_norm,
    dual_model,
    dual_norm,
    holder_check,
    kkt_point,
    luxemburg_norm,
    luxemburg_solve,
    model_from_json,
    norm,
    norm_rows,
    operator_value,
    orlicz_norm,
    orlicz_norm_by_ascent,
    uniform_convexity_check,
)
from spaces.young import exponential_young, mixed_power_young, power_young, rho_estimate
from utils.errors import DomainError, StructuralError, UnsupportedModelError

SPACE = MeasureSpace([0.4, 1.0, 1.7, 0.9])
MODELS = [
    SpaceModel.hilbert(SPACE),
    SpaceModel.lebesgue(SPACE, 1.5),
    SpaceModel.lebesgue(SPACE, 4.0),
    SpaceModel.orlicz(SPACE, mixed_power_young(2.0, 3.0)),
]
coordinate = st.floats(min_value=-50.0, max_value=50.0).map(lambda v: 0.0 if abs(v) < 1e-6 else v)
entries = arrays(float, 4, elements=coordinate)


def test_luxemburg_examples(plane):
    f = function(plane, [3.0, 4.0])
    assert luxemburg_norm(SpaceModel.orlicz(plane, power_young(2.0, normalized=False)), f) == pytest.approx(5.0)
    assert luxemburg_norm(SpaceModel.orlicz(plane, power_young(2.0)), f) == pytest.approx(5.0 / math.sqrt(2.0))


def test_orlicz_norm_examples(plane):
    g = functional(plane, [3.0, 4.0])
    assert orlicz_norm(SpaceModel.orlicz(plane, power_young(2.0, normalized=False)), g) == pytest.approx(5.0)
    assert orlicz_norm(SpaceModel.orlicz(plane, power_young(2.0)), g) == pytest.approx(5.0 * math.sqrt(2.0))


def test_closed_form_norms(plane):
    assert norm(SpaceModel.hilbert(plane), function(plane, [3.0, 4.0])) == pytest.approx(5.0)
    assert norm(SpaceModel.lebesgue(plane, 3.0), function(plane, [1.0, 1.0])) == pytest.approx(2.0 ** (1.0 / 3.0))
    assert dual_norm(SpaceModel.lebesgue(plane, 3.0), functional(plane, [1.0, 1.0])) == pytest.approx(2.0 ** (2.0 / 3.0))


def test_zero_has_zero_norm(models):
    for model in models:
        assert norm(model, function(model.space, np.zeros(model.space.dimension))) == 0.0
        assert dual_norm(model, functional(model.space, np.zeros(model.space.dimension))) == 0.0


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
def test_luxemburg_of_power_matches_lebesgue(weighted_space, rng, p):
    lebesgue = SpaceModel.lebesgue(weighted_space, p)
    orlicz = SpaceModel.orlicz(weighted_space, power_young(p, normalized=False))
    for _ in range(20):
        f = random_function(weighted_space, rng, scale=float(np.exp(rng.uniform(-3.0, 3.0))))
        assert luxemburg_norm(orlicz, f) == pytest.approx(norm(lebesgue, f), rel=1e-10)
        g = random_functional(weighted_space, rng)
        assert orlicz_norm(orlicz, g) == pytest.approx(dual_norm(lebesgue, g), rel=1e-10)


def test_luxemburg_diagnostics(weighted_space, rng):
    model = SpaceModel.orlicz(weighted_space, mixed_power_young(2.0, 4.0))
    solution = luxemburg_solve(model, random_function(weighted_space, rng))
    lo, hi = solution.bracket
    assert lo <= solution.value <= hi
    assert solution.iterations > 0
    assert solution.to_json()["value"] == solution.value


def test_orlicz_cross_checks(weighted_space, rng):
    model = SpaceModel.orlicz(weighted_space, mixed_power_young(2.0, 4.0))
    for _ in range(5):
        g = random_functional(weighted_space, rng)
        kkt = orlicz_norm(model, g)
        assert amemiya_norm(model, g) == pytest.approx(kkt, rel=1e-8)
        assert orlicz_norm_by_ascent(model, g, rng) == pytest.approx(kkt, rel=1e-5)


def test_holder_inequality_and_equality(weighted_space, rng):
    model = SpaceModel.orlicz(weighted_space, power_young(3.0, normalized=False))
    for _ in range(20):
        f, g = random_function(weighted_space, rng), random_functional(weighted_space, rng)
        assert holder_check(model, f, g) >= -1e-9
    g = random_functional(weighted_space, rng)
    h, solution = kkt_point(model, g)
    assert abs(holder_check(model, function(weighted_space, h), g)) <= 1e-8
    assert solution.multiplier > 0


@settings(max_examples=25, deadline=None)
@given(f=entries, h=entries, scale=st.floats(min_value=-20.0, max_value=20.0))
def test_norm_axioms(f, h, scale):
    for model in MODELS:
        F, H = function(SPACE, f), function(SPACE, h)
        size_f, size_h = norm(model, F), norm(model, H)
        assert size_f >= 0.0
        assert norm(model, F * scale) == pytest.approx(abs(scale) * size_f, rel=1e-9, abs=1e-9)
        assert norm(model, F + H) <= size_f + size_h + 1e-9 * (1.0 + size_f + size_h)


def test_norm_rows_matches_norm(models, rng):
    rows = rng.standard_normal((6, 5))
    rows[2] = 0.0
    for model in models:
        expected = [norm(model, function(model.space, row)) for row in rows]
        np.testing.assert_allclose(norm_rows(model, rows), expected, rtol=1e-12)
    with pytest.raises(StructuralError):
        norm_rows(models[0], np.ones((2, 3)))


def test_uniform_convexity_implication(plane):
    model = SpaceModel.orlicz(plane, power_young(2.0))
    f = function(plane, [1.0, 1.0])
    check = uniform_convexity_check(model, f, f, 0.5, 0.25, 4.0)
    assert check.premise
    assert check.slack == pytest.approx(4.0)
    far = uniform_convexity_check(model, f, -f, 0.5, 0.25, 4.0)
    assert not far.premise


UNIT_PAIR_MODELS = [SpaceModel.hilbert(SPACE), SpaceModel.lebesgue(SPACE, 3.0), SpaceModel.lebesgue(SPACE, 4.0)]
CUBE = power_young(3.0, normalized=False)
CUBE_MODEL = SpaceModel.orlicz(SPACE, CUBE)


def clarkson_modulus(p: float, eps: float) -> float:
    """Lower bound for the modulus of convexity of L^p, p ≥ 2 (exact for p = 2)"""
    return 1.0 - (1.0 - (eps / 2.0) ** p) ** (1.0 / p)


def inside_unit_ball(f):
    return f / (norm(CUBE_MODEL, f) * (1.0 + 1e-9))


@lru_cache(maxsize=None)
def cube_rho(eps: float) -> float:
    return rho_estimate(CUBE, eps)


@settings(max_examples=60, deadline=None)
@given(x=entries, y=entries, index=st.integers(min_value=0, max_value=len(UNIT_PAIR_MODELS) - 1))
def test_separated_unit_pairs_have_short_midpoints(x, y, index):
    model = UNIT_PAIR_MODELS[index]
    f, g = function(SPACE, x), function(SPACE, y)
    assume(not f.is_zero() and not g.is_zero())
    f, g = f / norm(model, f), g / norm(model, g)
    eps = min(norm(model, f - g), 2.0)
    assume(eps > 1e-3)
    p = 2.0 if model.kind == "hilbert" else model.structure.p
    assert norm(model, (f + g) / 2.0) <= 1.0 - clarkson_modulus(p, eps) + 1e-12


@settings(max_examples=40, deadline=None)
@given(x=entries, direction=entries, size=st.floats(min_value=0.0, max_value=0.05),
       eps=st.sampled_from([0.2, 0.4, 0.6]))
def test_uniform_convexity_implication_on_random_pairs(x, direction, size, eps):
    f = function(SPACE, x)
    assume(not f.is_zero())
    f = inside_unit_ball(f)
    g = f + function(SPACE, direction) * size
    assume(not g.is_zero())
    g = inside_unit_ball(g)
    check = uniform_convexity_check(CUBE_MODEL, f, g, eps, 0.99 * cube_rho(eps), 8.0)
    assert not check.premise or check.slack >= -1e-9


def test_uniform_convexity_premise_holds_for_close_pairs():
    rng = np.random.default_rng(3)
    held = 0
    for _ in range(20):
        f = inside_unit_ball(random_function(SPACE, rng))
        g = inside_unit_ball(f + random_function(SPACE, rng) * 1e-3)
        check = uniform_convexity_check(CUBE_MODEL, f, g, 0.4, 0.99 * cube_rho(0.4), 8.0)
        held += check.premise
        assert not check.premise or check.slack >= -1e-9
    assert held == 20


@pytest.mark.parametrize("model", [
    SpaceModel.orlicz(SPACE, mixed_power_young(2.0, 3.0)),
    SpaceModel.orlicz(SPACE, power_young(1.5)),
], ids=["mixed", "power-1.5"])
def test_orlicz_midpoints_of_separated_unit_pairs_are_inside_the_ball(model):
    rng = np.random.default_rng(11)
    for _ in range(30):
        f, g = random_function(SPACE, rng), random_function(SPACE, rng)
        f, g = f / norm(model, f), g / norm(model, g)
        if norm(model, f - g) >= 0.25:
            assert norm(model, (f + g) / 2.0) < 1.0 - 1e-6


def test_operator_value(plane):
    model = SpaceModel.hilbert(plane)
    assert operator_value(model, functional(plane, [3.0, 4.0]), function(plane, [3.0, 4.0])) == pytest.approx(5.0)


def test_model_from_json():
    model = model_from_json({"weights": [1.0, 2.0], "structure": {"kind": "lebesgue", "p": 3}})
    assert model.kind == "lebesgue"
    assert model.structure.q == pytest.approx(1.5)
    assert model_from_json({"weights": [1.0]}).kind == "hilbert"
    orlicz = model_from_json({"weights": [1.0], "structure": {"kind": "orlicz", "young": {"family": "mixed",
                                                                                            "p": 2, "r": 3}}})
    assert orlicz.young.family == "mixed"
    assert model_from_json(orlicz.to_json()) == orlicz
    with pytest.raises(StructuralError):
        model_from_json({"weights": [1.0], "structure": {"kind": "sobolev"}})
    with pytest.raises(DomainError):
        model_from_json({"weights": [1.0], "structure": {"kind": "lebesgue", "p": 1.0}})
    with pytest.raises(DomainError):
        model_from_json({"weights": [1.0], "structure": {"kind": "lebesgue"}})


def test_dual_model(plane):
    assert dual_model(SpaceModel.hilbert(plane)).kind == "hilbert"
    assert dual_model(SpaceModel.lebesgue(plane, 3.0)).structure.p == pytest.approx(1.5)
    with pytest.raises(UnsupportedModelError):
        dual_model(SpaceModel.orlicz(plane, power_young(3.0)))


def test_exponential_model_still_has_a_luxemburg_norm(plane):
    model = SpaceModel.orlicz(plane, exponential_young())
    assert luxemburg_norm(model, function(plane, [1.0, -2.0])) > 0.0


def test_norm_of_foreign_function_is_rejected(plane, weighted_space):
    with pytest.raises(StructuralError):
        norm(SpaceModel.hilbert(plane), function(weighted_space, np.ones(5)))
