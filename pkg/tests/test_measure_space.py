import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from spaces.measure_space import (
    DualFunctional,
    MeasureSpace,
    RealFunction,
    function,
    function_from_json,
    functional,
    indicator,
    integrate,
    pairing,
    random_space,
    space_from_json,
    to_function,
    to_functional,
)
from utils.errors import StructuralError

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)


@pytest.mark.parametrize("weights, values, expected", [
    ([1.0, 2.0], [3.0, -1.0], 1.0),
    ([0.5, 0.5], [2.0, 2.0], 2.0),
])
def test_integrate_examples(weights, values, expected):
    space = MeasureSpace(weights)
    assert integrate(space, function(space, values)) == pytest.approx(expected)


@pytest.mark.parametrize("weights, g, f, expected", [
    ([1.0, 1.0], [1.0, 0.0], [5.0, 7.0], 5.0),
    ([2.0, 1.0], [1.0, 1.0], [1.0, 3.0], 5.0),
])
def test_pairing_examples(weights, g, f, expected):
    space = MeasureSpace(weights)
    assert pairing(space, functional(space, g), function(space, f)) == pytest.approx(expected)


@pytest.mark.parametrize("weights", [[], [1.0, 0.0], [1.0, -2.0], [float("inf")]])
def test_invalid_weights(weights):
    with pytest.raises(StructuralError):
        MeasureSpace(weights)


def test_dimension_mismatch():
    space = MeasureSpace([1.0, 1.0])
    other = MeasureSpace([1.0, 1.0, 1.0])
    with pytest.raises(StructuralError):
        RealFunction([1.0, 2.0, 3.0], space)
    with pytest.raises(StructuralError):
        integrate(space, function(other, [1.0, 1.0, 1.0]))
    with pytest.raises(StructuralError):
        pairing(space, functional(space, [1.0, 1.0]), function(other, [1.0, 1.0, 1.0]))


def test_cannot_mix_functions_and_functionals(plane):
    with pytest.raises(StructuralError):
        function(plane, [1.0, 2.0]) + functional(plane, [1.0, 2.0])
    with pytest.raises(StructuralError):
        pairing(plane, function(plane, [1.0, 2.0]), function(plane, [1.0, 2.0]))


def test_equal_weights_define_the_same_space():
    a = MeasureSpace([1.0, 2.0])
    b = MeasureSpace([1.0, 2.0])
    assert a == b
    assert hash(a) == hash(b)
    total = function(a, [1.0, 1.0]) + function(b, [2.0, 3.0])
    assert list(total.values) == [3.0, 4.0]


def test_vector_arithmetic(plane):
    f = function(plane, [1.0, -2.0])
    assert list((2 * f).values) == [2.0, -4.0]
    assert list((f / 2).values) == [0.5, -1.0]
    assert list((-f).values) == [-1.0, 2.0]
    assert (f - f).is_zero()
    assert to_function(to_functional(f)).values.tolist() == f.values.tolist()


@settings(max_examples=30, deadline=None)
@given(values=arrays(float, 4, elements=finite))
def test_indicator_pairing_is_integration(values):
    space = MeasureSpace([0.5, 1.0, 1.5, 2.0])
    f = function(space, values)
    assert pairing(space, indicator(space), f) == pytest.approx(integrate(space, f), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(f=arrays(float, 3, elements=finite), h=arrays(float, 3, elements=finite),
       g=arrays(float, 3, elements=finite), a=finite, b=finite)
def test_pairing_is_linear_in_the_function(f, h, g, a, b):
    space = MeasureSpace([0.3, 1.0, 2.5])
    G = functional(space, g)
    F, H = function(space, f), function(space, h)
    combined = pairing(space, G, F * a + H * b)
    separate = a * pairing(space, G, F) + b * pairing(space, G, H)
    scale = np.sum(np.abs(g) * (np.abs(a * f) + np.abs(b * h)) * space.weights)
    assert abs(combined - separate) <= 1e-12 * (1.0 + scale)


def test_long_sums_are_compensated():
    space = MeasureSpace(np.ones(5000))
    values = np.tile([1e16, 1.0, -1e16, 1.0], 1250)
    assert integrate(space, function(space, values)) == 2500.0


def test_json_readers(rng):
    space = random_space(3, rng)
    assert space_from_json(space.to_json()) == space
    f = function_from_json(space, {"values": [1.0, 2.0, 3.0]})
    assert f.values.tolist() == [1.0, 2.0, 3.0]
    with pytest.raises(StructuralError):
        space_from_json({"mass": [1.0]})
    with pytest.raises(StructuralError):
        function_from_json(space, [1.0, 2.0, 3.0])


def test_values_are_immutable(plane):
    g = DualFunctional([1.0, 2.0], plane)
    with pytest.raises(ValueError):
        g.values[0] = 3.0
