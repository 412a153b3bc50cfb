"""Discrete functionals of the radial problem and their exact node gradients.

Every integral is a quadrature over the grid from `radial.grid`, including the
factor |S^{N-1}|, so the values compare directly with integrals over the ball.
The gradient term treats u as piecewise linear: on cell i the slope is
D_i = (u_{i+1} - u_i) / h and |D_i|^p is integrated exactly over the shell.
"""
import numpy as np

from config.config import appConfig as config
from radial.errors import DegenerateDenominator, NegativeInput, ZeroFunction
from radial.grid import RadialFn, quad
from radial.protocol import ProblemSpec


def _require_nonnegative(u: RadialFn, what: str = "u") -> None:
    if np.any(u.values < 0.0):
        bad = int(np.flatnonzero(u.values < 0.0)[0])
        raise NegativeInput(f"{what} is negative at node {bad} (r={u.grid.nodes[bad]:.6g}); F is defined on [0, inf)")


def _require_nonzero(u: RadialFn) -> None:
    if not np.any(u.values != 0.0):
        raise ZeroFunction("function vanishes identically")


def duality_map(s: np.ndarray, p: float) -> np.ndarray:
    """s -> |s|^{p-2} s, finite at s = 0 for every p > 1."""
    return np.sign(s) * np.abs(s) ** (p - 1.0)


def _flux(slopes: np.ndarray, p: float, regularize: bool) -> np.ndarray:
    if regularize and p < 2.0:
        eps = config.GRADIENT_REGULARIZATION
        return slopes * (slopes * slopes + eps * eps) ** ((p - 2.0) / 2.0)
    return duality_map(slopes, p)


def weight_values(u: RadialFn, spec: ProblemSpec) -> np.ndarray:
    return spec.weight(u.grid.nodes)


def energy_p(u: RadialFn, p: float) -> float:
    """||u||^p = int |u'|^p + |u|^p."""
    grid = u.grid
    gradient_part = float(np.dot(grid.cell_measures, np.abs(u.slopes) ** p))
    return gradient_part + quad(grid, np.abs(u.values) ** p)


def sobolev_norm_p(u: RadialFn, p: float) -> float:
    return energy_p(u, p) ** (1.0 / p)


def functional_I(u: RadialFn, spec: ProblemSpec) -> float:
    _require_nonnegative(u)
    return quad(u.grid, weight_values(u, spec) * spec.nonlin.F(u.values))


def functional_J(u: RadialFn, spec: ProblemSpec) -> float:
    return energy_p(u, spec.p) / spec.p - functional_I(u, spec)


def nehari_integral(u: RadialFn, spec: ProblemSpec) -> float:
    """int a f(u) u."""
    _require_nonnegative(u)
    return quad(u.grid, weight_values(u, spec) * spec.nonlin.f_times_s(u.values))


def restricted_J(u: RadialFn, spec: ProblemSpec) -> float:
    """J written in its Nehari-set form (1/p) int a f(u)u - int a F(u)."""
    return nehari_integral(u, spec) / spec.p - functional_I(u, spec)


def nehari_residual(u: RadialFn, spec: ProblemSpec) -> float:
    norm_p = energy_p(u, spec.p)
    if norm_p <= 0.0:
        raise ZeroFunction("Nehari residual of the zero function")
    return abs(norm_p - nehari_integral(u, spec)) / norm_p


def lambda_of(u: RadialFn, spec: ProblemSpec) -> float:
    denominator = nehari_integral(u, spec)
    if denominator <= 1e-300:
        raise DegenerateDenominator(f"int a f(u) u = {denominator:.3e}")
    return 1.0 / denominator


def sigma(u: RadialFn, t: float, spec: ProblemSpec) -> float:
    """sigma(t) = t^p ||u||^p - int a f(tu) tu."""
    if t < 0.0:
        raise ValueError(f"sigma is defined for t >= 0, got t={t}")
    _require_nonnegative(u)
    _require_nonzero(u)
    if t == 0.0:
        return 0.0
    return t ** spec.p * energy_p(u, spec.p) - nehari_integral(u.scaled(t), spec)


def grad_I(u: RadialFn, spec: ProblemSpec) -> RadialFn:
    _require_nonnegative(u)
    grid = u.grid
    return RadialFn(grid, grid.weights * weight_values(u, spec) * spec.nonlin.f(u.values))


def grad_norm_p(u: RadialFn, p: float, regularize: bool = True) -> RadialFn:
    """Node gradient of ||u||^p / p.

    Paired with a node vector v it gives the discrete
    int |u'|^{p-2} u' v' + |u|^{p-2} u v; for p = 2 this is (K + M) u.
    """
    grid = u.grid
    cell_flux = grid.cell_measures * _flux(u.slopes, p, regularize) * grid.n

    gradient = grid.weights * duality_map(u.values, p)
    gradient[:-1] -= cell_flux
    gradient[1:] += cell_flux
    return RadialFn(grid, gradient)


def grad_J(u: RadialFn, spec: ProblemSpec) -> RadialFn:
    return RadialFn(u.grid, grad_norm_p(u, spec.p).values - grad_I(u, spec).values)


def sobolev_metric(u: RadialFn, p: float) -> np.ndarray:
    """Banded (3, n+1) form of the linearized p-energy, for scipy.linalg.solve_banded.

    For p = 2 this is exactly K + M.  Otherwise slopes and values are
    floored at a small fraction of their scale before raising to p - 2.
    """
    grid = u.grid
    slopes = np.abs(u.slopes)
    values = np.abs(u.values)
    scale = max(float(np.max(slopes)), float(np.max(values)), 1.0)
    floor = config.METRIC_FLOOR * scale

    stiff = (p - 1.0) * np.maximum(slopes, floor) ** (p - 2.0) * grid.cell_measures * grid.n ** 2
    mass = (p - 1.0) * np.maximum(values, floor) ** (p - 2.0) * grid.weights

    banded = np.zeros((3, grid.n + 1))
    banded[1] = mass
    banded[1, :-1] += stiff
    banded[1, 1:] += stiff
    banded[0, 1:] = -stiff
    banded[2, :-1] = -stiff
    return banded
