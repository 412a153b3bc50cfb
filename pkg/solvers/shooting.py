"""Shooting oracle for the radial ODE.

With the flux w = r^{N-1} |u'|^{p-2} u' the radial equation reads

    u' = sign(w) (|w| r^{1-N})^{1/(p-1)}
    w' = r^{N-1} (|u|^{p-2} u - lambda a(r) f(u))

with w(0) = 0 and u(0) = d.  The Neumann condition is w(1) = 0, which is
solved for d by Brent's method.  The origin is singular, so integration
starts at r_start = 1/(4n) from the series obtained by freezing u = d in
the right-hand side.

The stepper advances the slope flux z = r^{1-N} w = |u'|^{p-2} u', for which

    z' = |u|^{p-2} u - lambda a(r) f(u) - (N - 1) z / r.

Errors made in z near the origin decay like r^{1-N}, so a start at r_start ~ h
keeps the fourth order on smooth cases.
"""
import math
from typing import Tuple

import bittensor as bt
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

from config.config import appConfig as config
from radial.errors import BlowUp, NoSignChange, NonFiniteInput, NotConverged
from radial.functionals import duality_map
from radial.grid import RadialFn
from radial.protocol import ProblemSpec, ShootResult, ShootTrajectory

_GAUSS_NODES, _GAUSS_WEIGHTS = leggauss(12)


def _gauss(func, a: float, b: float) -> float:
    x = 0.5 * (b - a) * _GAUSS_NODES + 0.5 * (b + a)
    return 0.5 * (b - a) * float(np.dot(_GAUSS_WEIGHTS, func(x)))


def slope_from_flux(r, w, spec: ProblemSpec):
    """Invert w = r^{N-1} |u'|^{p-2} u'; w = 0 maps to u' = 0 exactly."""
    # duality map with the conjugate exponent p/(p-1) is s -> sign(s)|s|^{1/(p-1)}
    return duality_map(w * np.asarray(r, dtype=float) ** (1 - spec.dim), spec.p / (spec.p - 1.0))


def series_flux(spec: ProblemSpec, lam: float, d: float, r: float) -> float:
    """int_0^r s^{N-1} (d^{p-1} - lambda a(s) f(d)) ds."""
    N = spec.dim
    mass = float(duality_map(np.array(d), spec.p)) * r ** N / N
    forcing = float(spec.nonlin.f(np.array(d)))
    moment = spec.weight.moment(N - 1.0, r)
    if moment is None:
        moment = _gauss(lambda s: s ** (N - 1) * spec.weight(s), 0.0, r)
    return mass - lam * forcing * moment


def series_start(spec: ProblemSpec, lam: float, d: float, r_start: float) -> Tuple[float, float]:
    w0 = series_flux(spec, lam, d, r_start)
    rise = _gauss(lambda s: slope_from_flux(s, np.array([series_flux(spec, lam, d, x) for x in s]), spec),
                  0.0, r_start)
    return d + rise, w0


def _rhs(r: float, u: float, z: float, spec: ProblemSpec, lam: float) -> Tuple[float, float]:
    # z = w r^{1-N}; the conjugate exponent p/(p-1) inverts the duality map
    du = float(duality_map(np.array(z), spec.p / (spec.p - 1.0)))
    reaction = float(duality_map(np.array(u), spec.p)) - lam * float(spec.weight(r)) * float(spec.nonlin.f(np.array(u)))
    return du, reaction - (spec.dim - 1) * z / r


def integrate_ivp(spec: ProblemSpec, lam: float, d: float, n: int = None) -> ShootTrajectory:
    """Classical RK4 with n fixed steps from r_start = 1/(4n) to 1."""
    if not d > 0.0 or not lam > 0.0:
        raise ValueError(f"shooting needs d > 0 and lambda > 0, got d={d}, lambda={lam}")
    n = n or spec.grid_n

    r_start = 1.0 / (4.0 * n)
    h = (1.0 - r_start) / n
    r = r_start + h * np.arange(n + 1)
    r[-1] = 1.0
    u = np.empty(n + 1)
    z = np.empty(n + 1)
    u[0], w0 = series_start(spec, lam, d, r_start)
    z[0] = w0 * r_start ** (1 - spec.dim)

    blowup = config.SHOOT_BLOWUP
    for i in range(n):
        ri, ui, zi = r[i], u[i], z[i]
        k1u, k1z = _rhs(ri, ui, zi, spec, lam)
        k2u, k2z = _rhs(ri + 0.5 * h, ui + 0.5 * h * k1u, zi + 0.5 * h * k1z, spec, lam)
        k3u, k3z = _rhs(ri + 0.5 * h, ui + 0.5 * h * k2u, zi + 0.5 * h * k2z, spec, lam)
        k4u, k4z = _rhs(ri + h, ui + h * k3u, zi + h * k3z, spec, lam)
        u[i + 1] = ui + h * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
        z[i + 1] = zi + h * (k1z + 2.0 * k2z + 2.0 * k3z + k4z) / 6.0

        if not (math.isfinite(u[i + 1]) and math.isfinite(z[i + 1])):
            raise NonFiniteInput(f"trajectory became non-finite at r={r[i + 1]:.6g} (d={d:.6g})")
        if abs(u[i + 1]) > blowup:
            raise BlowUp(f"|u| exceeded {blowup:.0e} at r={r[i + 1]:.6g} (d={d:.6g})")

    return ShootTrajectory(
        r=np.concatenate([[0.0], r]),
        u=np.concatenate([[d], u]),
        w=np.concatenate([[0.0], z * r ** (spec.dim - 1)]),
    )


def terminal_flux(spec: ProblemSpec, lam: float, d: float) -> float:
    return integrate_ivp(spec, lam, d).terminal_flux


def shoot(spec: ProblemSpec, lam: float = 1.0,
          bracket: Tuple[float, float] = (config.SHOOT_BRACKET_LO, config.SHOOT_BRACKET_HI)) -> ShootResult:
    """Find u(0) = d with w(1) = 0 inside the bracket."""
    d_lo, d_hi = bracket
    flux_lo = terminal_flux(spec, lam, d_lo)
    flux_hi = terminal_flux(spec, lam, d_hi)
    if flux_lo == 0.0:
        return _shoot_result(spec, lam, d_lo, 0)
    if flux_hi == 0.0:
        return _shoot_result(spec, lam, d_hi, 0)
    if np.sign(flux_lo) == np.sign(flux_hi):
        raise NoSignChange(f"w(1) has the same sign at d={d_lo:.6g} ({flux_lo:.3e}) and d={d_hi:.6g} ({flux_hi:.3e})")

    d, info = brentq(
        lambda x: terminal_flux(spec, lam, x),
        d_lo, d_hi,
        xtol=1e-15, rtol=4.0 * np.finfo(float).eps,
        maxiter=config.SHOOT_MAX_ITER,
        full_output=True, disp=False,
    )
    result = _shoot_result(spec, lam, d, info.iterations)

    if abs(result.terminal_flux) > config.SHOOT_TOL:
        bt.logging.warning(f"⚠️ shoot: |w(1)|={abs(result.terminal_flux):.3e} above {config.SHOOT_TOL:.1e} after {info.iterations} iterations")
        raise NotConverged(f"terminal flux {result.terminal_flux:.3e} above tolerance", best=result)

    bt.logging.info(f"🎯 shoot: d={d:.12g}, w(1)={result.terminal_flux:.3e}, iterations={info.iterations}")
    return result


def _shoot_result(spec: ProblemSpec, lam: float, d: float, iterations: int) -> ShootResult:
    trajectory = integrate_ivp(spec, lam, d)
    grid = spec.grid()
    profile = RadialFn(grid, np.interp(grid.nodes, trajectory.r, trajectory.u))
    return ShootResult(
        d=float(d),
        terminal_flux=trajectory.terminal_flux,
        profile=profile,
        rootfind_iterations=iterations,
        trajectory=trajectory,
    )


def flux_identity_error(trajectory: ShootTrajectory, spec: ProblemSpec, lam: float) -> float:
    """max_r |w(r) - int_0^r s^{N-1} (u^{p-1} - lambda a f(u)) ds| with trapezoid integration."""
    r, u = trajectory.r, trajectory.u
    integrand = r ** (spec.dim - 1) * (duality_map(u, spec.p) - lam * spec.weight(r) * spec.nonlin.f(u))
    integral = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(r) * (integrand[1:] + integrand[:-1]))])
    return float(np.max(np.abs(trajectory.w - integral)))


def richardson_order(spec: ProblemSpec, lam: float, d: float, n: int) -> float:
    """Observed order from u(1) at n, 2n and 4n steps."""
    coarse, medium, fine = (integrate_ivp(spec, lam, d, m).u[-1] for m in (n, 2 * n, 4 * n))
    return math.log2(abs(coarse - medium) / abs(medium - fine))
