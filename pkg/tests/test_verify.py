import math

import numpy as np
import pytest

from analysis.verify import (comparison_residuals, simon_gap, smooth_weak_residual, subsolution_check, verify_solution,
                             weak_residual)
from radial.errors import ZeroBoundaryValue
from radial.protocol import SolveMode
from solvers.nehari_solver import solve_fixed
from tests.conftest import constant_weight_spec, make_spec


@pytest.fixture(scope="module")
def coarse_solution():
    spec = make_spec(mode=SolveMode.FIXED, grid_n=64)
    return spec, solve_fixed(spec)


def test_constant_solution_has_zero_residual():
    spec = constant_weight_spec(grid_n=64)
    u = spec.grid().sample(np.ones_like)
    assert weak_residual(u, 1.0, spec) <= 1e-12
    assert smooth_weak_residual(u, 1.0, spec) <= 1e-12


def test_residual_is_independent_of_basis_scale(coarse_solution):
    spec, result = coarse_solution
    assert weak_residual(result.u, 1.0, spec, basis_scale=2.0) == pytest.approx(
        weak_residual(result.u, 1.0, spec), rel=1e-12)


def test_perturbation_increases_residual(coarse_solution):
    spec, result = coarse_solution
    perturbed = result.u.with_values(result.u.values + 0.01 * spec.grid().nodes)
    assert weak_residual(perturbed, 1.0, spec) > weak_residual(result.u, 1.0, spec)
    assert weak_residual(result.u, 1.0, spec) <= 1e-3


def test_exponential_comparison_margin_is_zero():
    spec = make_spec(grid_n=64)
    u = spec.grid().sample(np.exp)
    assert subsolution_check(u, spec) == pytest.approx(0.0, abs=1e-14)


def test_zero_boundary_value():
    spec = make_spec(grid_n=8)
    with pytest.raises(ZeroBoundaryValue):
        subsolution_check(spec.grid().sample(lambda r: 1.0 - r), spec)


@pytest.mark.parametrize("dim, p", [(3, 2.0), (3, 1.2), (4, 3.0), (5, 1.5)])
def test_comparison_integrand_is_negative(dim, p):
    spec = make_spec(dim=dim, p=p)
    residuals = comparison_residuals(spec, centers=(0.1, 0.5, 0.9), half_width=0.1)
    assert max(residuals) < 0.0


def test_comparison_hat_at_one_half():
    # 4 pi int e^r r (-2) psi(r) dr for the hat of half width 1/2 centred at 1/2
    spec = make_spec()
    (value,) = comparison_residuals(spec, centers=(0.5,), half_width=0.5)
    expected = -8.0 * math.pi * (6.0 * math.exp(0.5) - 4.0 - 2.0 * math.e)
    assert value < 0.0
    assert value == pytest.approx(expected, rel=1e-10)


def test_verify_report_on_solver_output(coarse_solution):
    spec, result = coarse_solution
    report = verify_solution(result.u, 1.0, spec)
    assert report.weak_residual_max <= 1e-3
    assert report.min_value > 0.0
    assert report.min_interior_slope > 0.0
    assert report.lambda_consistency <= 1e-10
    assert report.subsolution_margin >= 0.0
    assert report.linf_ratio == pytest.approx(result.u.values[-1] / result.norm_p ** 0.5, rel=1e-12)
    assert all(np.isfinite(v) for v in report.details.values())


def test_simon_gap_examples():
    assert simon_gap(np.array([1.0, 0.0]), np.array([0.0, 0.0]), 2.0) == 1.0
    x = np.array([0.3, -0.7])
    assert simon_gap(x, x, 1.5) == 0.0
    y = np.array([-1.1, 0.2])
    assert simon_gap(x, y, 2.0) == pytest.approx(float(np.dot(x - y, x - y)), rel=1e-15)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_simon_gap_is_positive_and_symmetric(p):
    rng = np.random.default_rng(int(10 * p))
    worst_ratio = np.inf
    for _ in range(10_000):
        x, y = rng.uniform(-1.0, 1.0, size=(2, 2))
        gap = simon_gap(x, y, p)
        assert gap > 0.0
        assert gap == pytest.approx(simon_gap(y, x, p), rel=1e-12)
        if p == 3.0 and np.linalg.norm(x) <= 1.0 and np.linalg.norm(y) <= 1.0:
            worst_ratio = min(worst_ratio, gap / np.linalg.norm(x - y) ** 3)
    if p == 3.0:
        assert worst_ratio >= 0.2
