"""Post-hoc certification of candidate solutions.

Comparison with e^{|x|}: for phi(r) = e^r,

    r^{N-1} (-Delta_p phi + phi^{p-1}) = e^{(p-1) r} r^{N-2} (1 - N + (2 - p) r),

because (r^{N-1} e^{(p-1) r})' = r^{N-2} e^{(p-1) r} (N - 1 + (p - 1) r).  For
N >= 3 and 1 < p the bracket is at most 1 - N + max(0, 2 - p) < 0 on [0, 1],
so phi is a strict weak subsolution against nonnegative test functions that
vanish at r = 1.
"""
from typing import Iterable, List, Optional

import bittensor as bt
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad as reference_quad

from radial.cone import linf_ratio
from radial.errors import NonFiniteInput, ZeroBoundaryValue
from radial.functionals import duality_map, energy_p, grad_I, grad_norm_p, nehari_integral
from radial.grid import RadialFn, RadialGrid, sphere_measure
from radial.protocol import ProblemSpec, VerifyReport

INTERIOR_WINDOW = (0.05, 0.95)


def _hat_norms(grid: RadialGrid, p: float) -> np.ndarray:
    """W^{1,p} norm of every nodal hat function."""
    slope_part = grid.cell_measures * grid.n ** p
    norms_p = grid.weights.copy()  # |v_j|^p = v_j at the nodes, quadrature picks w_j
    norms_p[:-1] += slope_part
    norms_p[1:] += slope_part
    return norms_p ** (1.0 / p)


def weak_residual_vector(u: RadialFn, lam: float, spec: ProblemSpec) -> np.ndarray:
    """<|Du|^{p-2}Du, Dv_j> + <u^{p-1}, v_j> - lambda <a f(u), v_j> for every hat v_j."""
    return grad_norm_p(u, spec.p, regularize=False).values - lam * grad_I(u, spec).values


def weak_residual(u: RadialFn, lam: float, spec: ProblemSpec, basis_scale: float = 1.0) -> float:
    """Max over the hat basis of the normalized weak residual."""
    residual = basis_scale * weak_residual_vector(u, lam, spec)
    if not np.all(np.isfinite(residual)):
        raise NonFiniteInput("weak residual is not finite")
    scale = max(1.0, energy_p(u, spec.p) ** ((spec.p - 1.0) / spec.p))
    return float(np.max(np.abs(residual) / (abs(basis_scale) * _hat_norms(u.grid, spec.p))) / scale)


def smooth_weak_residual(u: RadialFn, lam: float, spec: ProblemSpec, modes: int = 8, points: int = 4) -> float:
    """Normalized weak residual of the piecewise linear u against v_k(r) = cos(k pi r).

    The integrals use Gauss-Legendre points on every cell, so the value does
    not share the node quadrature of the discrete functionals and shrinks
    with the consistency error of the discretization.
    """
    grid, N, p = u.grid, spec.dim, spec.p
    x, gauss_weights = leggauss(points)
    t = 0.5 * (x + 1.0)

    r = grid.nodes[:-1, None] + grid.h * t[None, :]
    measure = sphere_measure(N) * 0.5 * grid.h * gauss_weights[None, :] * r ** (N - 1)
    u_at = u.values[:-1, None] + np.diff(u.values)[:, None] * t[None, :]
    flux = duality_map(u.slopes, p)[:, None]
    reaction = duality_map(u_at, p) - lam * spec.weight(r) * spec.nonlin.f(u_at)

    worst = 0.0
    for k in range(modes):
        v = np.cos(k * np.pi * r)
        dv = -k * np.pi * np.sin(k * np.pi * r)
        residual = float(np.sum(measure * (flux * dv + reaction * v)))
        norm = float(np.sum(measure * (np.abs(dv) ** p + np.abs(v) ** p))) ** (1.0 / p)
        worst = max(worst, abs(residual) / norm)

    if not np.isfinite(worst):
        raise NonFiniteInput("smooth weak residual is not finite")
    return worst / max(1.0, energy_p(u, p) ** ((p - 1.0) / p))


def feasible_direction_gap(u: RadialFn, lam: float, spec: ProblemSpec,
                           directions: Optional[Iterable[np.ndarray]] = None) -> float:
    """Smallest <grad_norm_p(u), v> - lambda <a f(u), v> over feasible directions v.

    v = u and nonnegative nondecreasing v keep u + s v in the cone for s > 0.
    A constrained critical point makes every entry >= 0 up to discretization.
    """
    r = u.grid.nodes
    if directions is None:
        directions = [u.values, np.ones_like(r), r, r ** 2, np.clip(2.0 * r - 1.0, 0.0, None)]
    residual = weak_residual_vector(u, lam, spec)
    return min(float(np.dot(residual, v)) for v in directions)


def comparison_integrand(r: np.ndarray, spec: ProblemSpec) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    N, p = spec.dim, spec.p
    return np.exp((p - 1.0) * r) * r ** (N - 2) * (1.0 - N + (2.0 - p) * r)


def comparison_residuals(spec: ProblemSpec, centers: Iterable[float], half_width: float) -> List[float]:
    """int_0^1 of the comparison integrand against hats psi centered in (0, 1)."""
    residuals = []
    for center in centers:
        lo, hi = max(center - half_width, 0.0), min(center + half_width, 1.0)

        def against_hat(r, c=center):
            return float(comparison_integrand(r, spec)) * max(0.0, 1.0 - abs(r - c) / half_width)

        value, _ = reference_quad(against_hat, lo, hi, points=[center])
        residuals.append(sphere_measure(spec.dim) * value)
    return residuals


def subsolution_check(u: RadialFn, spec: ProblemSpec) -> float:
    """min_i (u_i - kappa e^{r_i}) with kappa = u(1)/e."""
    boundary = float(u.values[-1])
    if boundary <= 0.0:
        raise ZeroBoundaryValue(f"u(1) = {boundary:.3e}; the comparison needs u(1) > 0")

    residuals = comparison_residuals(spec, centers=(0.25, 0.5, 0.75), half_width=0.25)
    if max(residuals) >= 0.0:
        raise ValueError(f"e^r failed to be a strict subsolution: {residuals}")

    # kappa e^r = u(1) e^{r-1}, exact at r = 1
    comparison = boundary * np.exp(u.grid.nodes - 1.0)
    return float(np.min(u.values - comparison))


def min_interior_slope(u: RadialFn, window=INTERIOR_WINDOW) -> float:
    r = u.grid.nodes
    inside = (r[:-1] >= window[0]) & (r[1:] <= window[1])
    return float(np.min(u.slopes[inside]))


def simon_gap(x: np.ndarray, y: np.ndarray, p: float) -> float:
    """<|x|^{p-2}x - |y|^{p-2}y, x - y>, positive for x != y."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))

    def duality(v):
        norm = np.linalg.norm(v)
        return v * norm ** (p - 2.0) if norm > 0.0 else np.zeros_like(v)

    return float(np.dot(duality(x) - duality(y), x - y))


def verify_solution(u: RadialFn, lam: float, spec: ProblemSpec) -> VerifyReport:
    norm_p = energy_p(u, spec.p)
    report = VerifyReport(
        weak_residual_max=weak_residual(u, lam, spec),
        min_value=float(np.min(u.values)),
        min_interior_slope=min_interior_slope(u),
        lambda_consistency=abs(lam * nehari_integral(u, spec) - norm_p) / norm_p,
        subsolution_margin=subsolution_check(u, spec),
        linf_ratio=linf_ratio(u, spec.p),
        details={
            "boundary_value": float(u.values[-1]),
            "feasible_direction_gap": feasible_direction_gap(u, lam, spec),
            "smooth_weak_residual": smooth_weak_residual(u, lam, spec),
            "flux_max": float(np.max(np.abs(duality_map(u.slopes, spec.p)))),
        },
    )
    bt.logging.info(f"🔍 verify: residual={report.weak_residual_max:.3e}, min={report.min_value:.6g}, "
                    f"slope={report.min_interior_slope:.3e}, margin={report.subsolution_margin:.3e}")
    return report
