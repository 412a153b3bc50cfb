import math

import numpy as np
import pytest

from radial.errors import DegenerateDenominator, NegativeInput, ZeroFunction
from radial.functionals import (duality_map, energy_p, functional_I, functional_J, grad_I, grad_J, grad_norm_p,
                                lambda_of, nehari_integral, nehari_residual, restricted_J, sigma,
                                sobolev_metric, sobolev_norm_p)
from radial.grid import RadialFn, ball_measure
from radial.protocol import WeightKind, WeightSpec
from tests.conftest import cone_samples, constant_weight_spec, make_spec


def _banded_to_dense(banded):
    return np.diag(banded[1]) + np.diag(banded[0, 1:], 1) + np.diag(banded[2, :-1], -1)


def _directional_derivative(func, u, v, eps=1e-6):
    return (func(u.with_values(u.values + eps * v)) - func(u.with_values(u.values - eps * v))) / (2.0 * eps)


def test_constant_function_energy(constant_spec):
    u = constant_spec.grid().sample(np.ones_like)
    for p in (1.5, 2.0, 3.0):
        assert energy_p(u, p) == pytest.approx(ball_measure(3), rel=1e-12)
    # J(1) = |B| (1/2 - 1/4) = pi / 3
    assert functional_J(u, constant_spec) == pytest.approx(math.pi / 3.0, abs=1e-12)


def test_duality_map_is_odd_and_finite_at_zero():
    s = np.array([-2.0, 0.0, 2.0])
    np.testing.assert_allclose(duality_map(s, 1.5), [-math.sqrt(2.0), 0.0, math.sqrt(2.0)])
    np.testing.assert_allclose(duality_map(s, 3.0), [-4.0, 0.0, 4.0])


def test_grad_norm_is_stiffness_plus_mass_for_p2(henon_spec):
    u = henon_spec.grid().sample(lambda r: 1.0 + r ** 2 + 0.3 * np.sin(5.0 * r))
    dense = _banded_to_dense(sobolev_metric(u, 2.0))
    np.testing.assert_allclose(grad_norm_p(u, 2.0).values, dense @ u.values, rtol=1e-10, atol=1e-12)
    assert np.dot(u.values, dense @ u.values) == pytest.approx(energy_p(u, 2.0), rel=1e-12)


@pytest.mark.parametrize("p", [2.0, 3.0, 4.5])
def test_grad_norm_matches_finite_differences(henon_spec, p):
    u = henon_spec.grid().sample(lambda r: 1.0 + r ** 2)
    v = np.cos(np.pi * henon_spec.grid().nodes)
    analytic = float(np.dot(grad_norm_p(u, p).values, v))
    numeric = _directional_derivative(lambda w: energy_p(w, p) / p, u, v)
    assert analytic == pytest.approx(numeric, rel=1e-6)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_grad_norm_euler_identity(henon_spec, p):
    u = henon_spec.grid().sample(lambda r: 0.5 + r)
    assert np.dot(grad_norm_p(u, p, regularize=False).values, u.values) == pytest.approx(energy_p(u, p), rel=1e-12)


def test_grad_I_and_grad_J_match_finite_differences(henon_spec):
    u = henon_spec.grid().sample(lambda r: 1.0 + r)
    v = henon_spec.grid().nodes ** 2
    assert np.dot(grad_I(u, henon_spec).values, v) == pytest.approx(
        _directional_derivative(lambda w: functional_I(w, henon_spec), u, v), rel=1e-7)
    assert np.dot(grad_J(u, henon_spec).values, v) == pytest.approx(
        _directional_derivative(lambda w: functional_J(w, henon_spec), u, v), rel=1e-6)


def test_functional_I_rejects_negative_values(henon_spec):
    u = henon_spec.grid().sample(lambda r: r - 0.5)
    with pytest.raises(NegativeInput):
        functional_I(u, henon_spec)


def test_lambda_of_zero_function_is_degenerate(henon_spec):
    with pytest.raises(DegenerateDenominator):
        lambda_of(henon_spec.grid().sample(np.zeros_like), henon_spec)


@pytest.mark.parametrize("weight", [WeightSpec(kind=WeightKind.POWER, alpha=2.0),
                                    WeightSpec(kind=WeightKind.EXP, beta=1.5)])
def test_functional_I_is_monotone_in_u(weight):
    spec = make_spec(weight=weight)
    grid = spec.grid()
    rng = np.random.default_rng(19)
    for values in cone_samples(grid, 40, seed=19):
        bump = rng.exponential(scale=rng.uniform(1e-3, 1.0), size=grid.n + 1)
        bump[rng.uniform(size=grid.n + 1) < 0.5] = 0.0
        lower = RadialFn(grid, values)
        upper = lower.with_values(values + bump)
        assert functional_I(lower, spec) <= functional_I(upper, spec)


def test_doubling_the_weight_halves_lambda_exactly():
    single = constant_weight_spec(weight=WeightSpec(kind=WeightKind.CONSTANT, c=1.0))
    double = constant_weight_spec(weight=WeightSpec(kind=WeightKind.CONSTANT, c=2.0))
    grid = single.grid()
    for values in cone_samples(grid, 25, seed=23):
        u = RadialFn(grid, values)
        assert lambda_of(u, double) == 0.5 * lambda_of(u, single)


def test_sigma_and_nehari_forms(henon_spec):
    u = henon_spec.grid().sample(lambda r: 1.0 + r)
    norm_p, integral = energy_p(u, 2.0), nehari_integral(u, henon_spec)
    t0 = (norm_p / integral) ** (1.0 / (4.0 - 2.0))
    assert sigma(u, 0.0, henon_spec) == 0.0
    assert abs(sigma(u, t0, henon_spec)) <= 1e-12 * t0 ** 2 * norm_p
    assert sigma(u, 0.5 * t0, henon_spec) > 0.0 > sigma(u, 2.0 * t0, henon_spec)

    on_set = u.scaled(t0)
    assert nehari_residual(on_set, henon_spec) <= 1e-12
    assert restricted_J(on_set, henon_spec) == pytest.approx(functional_J(on_set, henon_spec), rel=1e-10)
    with pytest.raises(ValueError):
        sigma(u, -1.0, henon_spec)
    with pytest.raises(ZeroFunction):
        sigma(henon_spec.grid().sample(np.zeros_like), 1.0, henon_spec)


def test_sobolev_norm_is_homogeneous():
    spec = make_spec(p=3.0)
    u = spec.grid().sample(lambda r: 2.0 + np.sin(r))
    assert sobolev_norm_p(u.scaled(3.0), 3.0) == pytest.approx(3.0 * sobolev_norm_p(u, 3.0), rel=1e-12)


def test_metric_is_symmetric_positive_definite_for_p_not_two():
    spec = constant_weight_spec(p=1.5, nonlin={"q": 2.0})
    u = spec.grid().sample(lambda r: 1.0 + 0.2 * r)
    dense = _banded_to_dense(sobolev_metric(u, 1.5))
    np.testing.assert_allclose(dense, dense.T)
    assert np.all(np.linalg.eigvalsh(dense) > 0.0)
