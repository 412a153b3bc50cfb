import math

import numpy as np
import pytest

from analysis.verify import feasible_direction_gap, min_interior_slope, weak_residual_vector
from radial.cone import is_member, normalize_sphere
from radial.errors import InadmissibleProblem
from radial.functionals import energy_p, functional_I, nehari_integral
from radial.protocol import SolveMode
from solvers.ascent import LineSearchSettings, ProjectedLineSearch
from solvers.eigen_solver import eigen_to_fixed, solve_eigen, sphere_gradient, sphere_objective
from tests.conftest import constant_weight_spec, make_spec


@pytest.fixture(scope="module")
def henon_eigen():
    spec = make_spec(grid_n=128)
    return spec, solve_eigen(spec)


def test_eigen_run_converges(henon_eigen):
    _, result = henon_eigen
    assert result.converged
    assert result.lam > 0.0
    assert np.all(np.diff(result.history) >= 0.0)


def test_constraint_identities(henon_eigen):
    spec, result = henon_eigen
    assert abs(energy_p(result.u, spec.p) - 1.0) <= 1e-10
    assert abs(result.lam * nehari_integral(result.u, spec) - 1.0) <= 1e-10
    assert result.S == pytest.approx(functional_I(result.u, spec), rel=1e-14)


def test_solution_is_positive_and_increasing(henon_eigen):
    _, result = henon_eigen
    assert is_member(result.u, 0.0)
    assert np.min(result.u.values) > 0.0
    assert min_interior_slope(result.u) > 0.0


def test_constrained_critical_point(henon_eigen):
    spec, result = henon_eigen
    assert feasible_direction_gap(result.u, result.lam, spec) >= -1e-5


def test_second_start_reaches_same_maximum(henon_eigen):
    spec, result = henon_eigen
    other = solve_eigen(spec, u0=spec.grid().sample(lambda r: 1.0 + r ** 3))
    assert other.S == pytest.approx(result.S, rel=1e-6)
    assert other.u.distance_inf(result.u) <= 1e-3


def test_rescaled_eigen_solution_solves_unit_lambda_problem(henon_eigen):
    spec, result = henon_eigen
    fixed = eigen_to_fixed(result, spec)
    c = fixed.values[-1] / result.u.values[-1]
    assert c == pytest.approx(result.lam ** (1.0 / (spec.nonlin.q - spec.p + 1.0)), rel=1e-12)
    np.testing.assert_allclose(weak_residual_vector(fixed, 1.0, spec),
                               c ** (spec.p - 1.0) * weak_residual_vector(result.u, result.lam, spec),
                               rtol=1e-8, atol=1e-12)


def test_sphere_objective_is_scale_invariant():
    spec = make_spec()
    u = spec.grid().sample(lambda r: 1.0 + r)
    assert sphere_objective(u.scaled(3.0), spec) == pytest.approx(sphere_objective(u, spec), rel=1e-13)
    # the ray direction is a null direction of the gradient
    assert np.dot(sphere_gradient(u, spec), u.values) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("mode", [SolveMode.FIXED, SolveMode.VERIFY, SolveMode.SHOOT])
def test_non_eigen_modes_are_rejected(mode):
    with pytest.raises(InadmissibleProblem):
        solve_eigen(make_spec(mode=mode))


def _eigen_search(spec):
    return ProjectedLineSearch(
        objective=lambda u: sphere_objective(u, spec),
        gradient=lambda u: sphere_gradient(u, spec),
        p=spec.p,
        settings=LineSearchSettings.from_spec(spec),
    )


def test_projected_step_vanishes_only_at_critical_points():
    constant = constant_weight_spec()
    search = _eigen_search(constant)
    flat = normalize_sphere(constant.grid().sample(lambda r: np.ones_like(r)), constant.p)
    direction = search._direction(flat, sphere_gradient(flat, constant))
    assert search.stationarity(flat, direction) <= 1e-10

    henon = make_spec()
    search = _eigen_search(henon)
    start = normalize_sphere(henon.grid().sample(lambda r: 1.0 + r), henon.p)
    direction = search._direction(start, sphere_gradient(start, henon))
    assert search.stationarity(start, direction) > math.sqrt(henon.tol)


def test_constant_weight_maximizer_is_reported_converged():
    spec = constant_weight_spec()
    result = solve_eigen(spec)
    assert result.converged
    assert np.ptp(result.u.values) <= 1e-6 * result.u.values[-1]
