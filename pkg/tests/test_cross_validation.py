import numpy as np
import pytest

from analysis.verify import smooth_weak_residual, subsolution_check, weak_residual
from radial.protocol import SolveMode
from solvers.nehari_solver import solve_fixed
from solvers.shooting import flux_identity_error, shoot
from tests.conftest import make_spec

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def henon_fixed_fine():
    spec = make_spec(mode=SolveMode.FIXED, grid_n=1025)
    return spec, solve_fixed(spec)


def _shoot_near(spec, variational):
    d = float(variational.u.values[0])
    return shoot(spec.with_overrides(mode=SolveMode.SHOOT), 1.0, (0.8 * d, 1.2 * d))


def test_nehari_and_shooting_profiles_agree(henon_fixed_fine):
    spec, variational = henon_fixed_fine
    assert variational.converged
    shot = _shoot_near(spec, variational)
    assert shot.profile.distance_inf(variational.u) <= 5e-3
    # strictly increasing solution: the flux is positive inside the ball
    assert np.all(shot.trajectory.w[1:-1] > 0.0)
    assert flux_identity_error(shot.trajectory, spec, 1.0) <= 1e-5


def test_nehari_and_shooting_profiles_agree_for_p3():
    spec = make_spec(mode=SolveMode.FIXED, p=3.0, grid_n=1025)
    variational = solve_fixed(spec)
    assert variational.converged
    shot = _shoot_near(spec, variational)
    assert shot.profile.distance_inf(variational.u) <= 1e-2


def test_weak_residual_refinement(henon_fixed_fine):
    fine_spec, fine = henon_fixed_fine
    coarse_spec = fine_spec.with_overrides(grid_n=513)
    coarse = solve_fixed(coarse_spec)

    assert coarse.converged
    assert weak_residual(coarse.u, 1.0, coarse_spec) <= 1e-3
    assert weak_residual(fine.u, 1.0, fine_spec) <= 1e-3
    # the hat residual sits at the optimizer floor on both grids; the smooth one tracks h
    assert smooth_weak_residual(fine.u, 1.0, fine_spec) <= 1e-3
    ratio = smooth_weak_residual(coarse.u, 1.0, coarse_spec) / smooth_weak_residual(fine.u, 1.0, fine_spec)
    assert ratio >= 1.8


def test_fine_solution_dominates_exponential(henon_fixed_fine):
    spec, variational = henon_fixed_fine
    assert subsolution_check(variational.u, spec) >= 0.0
