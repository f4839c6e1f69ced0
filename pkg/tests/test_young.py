import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spaces.young import (
    YoungFunction,
    check_young,
    conjugate,
    conjugate_young,
    delta2_constant,
    exponential_young,
    fenchel_young_gap,
    growth_bound_slack,
    inverse_derivative,
    inverse_value,
    mcshane_check,
    mixed_power_young,
    power_young,
    rho_estimate,
    young_from_json,
)
from utils.errors import DomainError, InfeasibleError


@pytest.mark.parametrize("p, v, expected", [
    (2.0, 3.0, 4.5),
    (3.0, 1.0, 2.0 / 3.0),
    (2.0, 0.0, 0.0),
    (3.0, 0.0, 0.0),
])
def test_conjugate_examples(p, v, expected):
    assert conjugate(power_young(p), v) == pytest.approx(expected, rel=1e-12, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(p=st.sampled_from([1.5, 2.0, 3.0, 4.0]), v=st.floats(min_value=-20.0, max_value=20.0))
def test_conjugate_matches_closed_form(p, v):
    q = p / (p - 1.0)
    assert conjugate(power_young(p), v) == pytest.approx(abs(v) ** q / q, rel=1e-8, abs=1e-12)


def test_conjugate_is_vectorized():
    grid = np.linspace(-3.0, 3.0, 13)
    values = conjugate(power_young(2.0), grid)
    assert values.shape == grid.shape
    np.testing.assert_allclose(values, grid ** 2 / 2.0, rtol=1e-10, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(u=st.floats(min_value=-10.0, max_value=10.0), v=st.floats(min_value=-10.0, max_value=10.0))
def test_fenchel_young_inequality(u, v):
    P = mixed_power_young(2.0, 3.0)
    assert fenchel_young_gap(P, u, v) >= -1e-9 * (1.0 + abs(u * v))


def test_fenchel_young_equality_on_the_derivative_graph():
    P = mixed_power_young(1.5, 4.0)
    u = np.array([0.1, 0.7, 2.0, 5.0])
    assert np.max(np.abs(fenchel_young_gap(P, u, P.prime(u)))) <= 1e-8 * float(np.max(P(u)))


def test_inverses():
    P = power_young(3.0, normalized=False)
    assert inverse_derivative(P, 12.0) == pytest.approx(2.0, rel=1e-12)
    assert inverse_derivative(P, -12.0) == pytest.approx(-2.0, rel=1e-12)
    assert inverse_value(P, 8.0) == pytest.approx(2.0, rel=1e-12)
    with pytest.raises(DomainError):
        inverse_value(P, -1.0)


def test_conjugate_young_derivative_inverts_the_original():
    P = mixed_power_young(2.0, 4.0)
    Q = conjugate_young(P)
    u = np.array([0.25, 1.0, 3.0])
    np.testing.assert_allclose(Q.prime(P.prime(u)), u, rtol=1e-11)


@pytest.mark.parametrize("p, expected", [(2.0, 4.0), (3.0, 8.0), (4.0, 16.0)])
def test_delta2_constant_of_powers(p, expected):
    assert delta2_constant(power_young(p)) == pytest.approx(expected, rel=1e-9)
    assert delta2_constant(power_young(p, normalized=False)) == pytest.approx(expected, rel=1e-9)


def test_delta2_constant_of_exponential_blows_up():
    assert delta2_constant(exponential_young(), u_max=500.0) > 1e100


def test_rho_estimate_example():
    assert rho_estimate(power_young(2.0), 1.0) == pytest.approx(0.5, abs=1e-9)


def test_rho_estimate_domain():
    P = power_young(2.0)
    with pytest.raises(DomainError):
        rho_estimate(P, 0.0)
    with pytest.raises(InfeasibleError):
        rho_estimate(P, 1.5)


def test_rho_estimate_grows_with_epsilon():
    P = power_young(3.0)
    estimates = [rho_estimate(P, eps) for eps in (0.1, 0.5, 0.9)]
    assert all(0.0 < value <= 1.0 for value in estimates)
    assert estimates == sorted(estimates)


def test_mcshane_example():
    assert mcshane_check(power_young(2.0), 0.5, 0.1, 1.0, -1.0) == pytest.approx(4.75)


def test_mcshane_holds_with_estimated_rho(rng):
    P = power_young(3.0)
    for eps in (0.25, 0.75):
        rho = rho_estimate(P, eps)
        u = rng.standard_normal(2000) * np.exp(rng.uniform(-3.0, 3.0, 2000))
        v = rng.standard_normal(2000) * np.exp(rng.uniform(-3.0, 3.0, 2000))
        slack = mcshane_check(P, eps, rho, u, v)
        scale = P(u) + P(v)
        assert np.all(slack >= -1e-9 * (1.0 + scale))


@pytest.mark.parametrize("eps", [0.0, 1.0, 1.5])
def test_mcshane_rejects_epsilon_outside_unit_interval(eps):
    with pytest.raises(DomainError):
        mcshane_check(power_young(2.0), eps, 0.1, 1.0, 2.0)


def test_growth_bound():
    P = power_young(3.0)
    assert growth_bound_slack(P, delta2_constant(P)) >= -1e-9


@pytest.mark.parametrize("P", [power_young(1.5), power_young(4.0, normalized=False),
                               mixed_power_young(2.0, 5.0), exponential_young()])
def test_admissible_families(P):
    check = check_young(P, enforce=True)
    assert check.admissible
    assert check.failures() == []


def test_linear_function_is_not_admissible():
    linear = YoungFunction("|u|", lambda u: np.abs(u), lambda u: np.sign(u), strict_derivative=False)
    check = check_young(linear)
    assert not check.admissible
    assert "superlinear_at_infinity" in check.failures()
    with pytest.raises(DomainError):
        check_young(linear, enforce=True)


def test_power_requires_exponent_above_one():
    with pytest.raises(DomainError):
        power_young(1.0)
    with pytest.raises(DomainError):
        mixed_power_young(2.0, math.inf)


def test_young_from_json():
    P = young_from_json({"family": "power", "p": 3, "normalized": False})
    assert P.exponent == 3.0 and not P.normalized
    assert young_from_json({"family": "mixed", "p": 2, "r": 4}).family == "mixed"
    assert not young_from_json({"family": "exponential"}).delta2
    with pytest.raises(DomainError):
        young_from_json({"family": "mixed", "p": 2})
    with pytest.raises(DomainError):
        young_from_json({"family": "cosh"})
    with pytest.raises(DomainError):
        young_from_json({"family": "power", "p": 0.5})
