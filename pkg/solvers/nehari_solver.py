"""Minimization of J over the Nehari set intersected with the cone (lambda = 1).

Every u != 0 in the cone has exactly one t0(u) > 0 with t0(u) u on the Nehari
set, so the problem is solved on the cone sphere for E(u) = J(t0(u) u).
Since d/dt J(tu) = sigma(t) / t vanishes at t0, the gradient of E is
t0 * grad J(t0 u).
"""
from typing import List, Optional

import bittensor as bt
import numpy as np

from config.config import appConfig as config
from radial.errors import BracketFailure, GradientInconsistency, InadmissibleProblem, NotConverged, ZeroFunction
from radial.functionals import energy_p, functional_J, grad_J, nehari_integral, sigma
from radial.grid import RadialFn
from radial.protocol import NehariResult, ProblemProtocol, ProblemSpec, SolveMode
from solvers.ascent import LineSearchSettings, ProjectedLineSearch, retract
from solvers.eigen_solver import initial_guess

T0_BRACKET = (1e-30, 1e30)


def _t0_closed_form(u: RadialFn, spec: ProblemSpec) -> float:
    norm_p = energy_p(u, spec.p)
    integral = nehari_integral(u, spec)
    if norm_p == 0.0 or integral == 0.0:
        raise ZeroFunction("the scaling map is undefined at u = 0")
    return (norm_p / integral) ** (1.0 / (spec.nonlin.gamma - spec.p))


def t0_bisect(u: RadialFn, spec: ProblemSpec, rel_tol: float = config.T0_CROSSCHECK_TOL) -> float:
    """Root of sigma(u, .) by bisection, bracketed by doubling from t = 1."""
    lo_limit, hi_limit = T0_BRACKET

    def sign_at(t: float) -> float:
        try:
            return np.sign(sigma(u, t, spec))
        except ValueError as e:
            raise BracketFailure(f"sigma not evaluable at t={t:.3e}: {e}") from e

    start = sign_at(1.0)
    if start == 0.0:
        return 1.0

    # sigma > 0 below the root and < 0 above it
    lo, hi = 1.0, 1.0
    if start > 0:
        while sign_at(hi) > 0:
            lo, hi = hi, hi * 2.0
            if hi > hi_limit:
                raise BracketFailure(f"no sign change of sigma in [1, {hi_limit:.0e}]")
    else:
        while sign_at(lo) < 0:
            lo, hi = lo / 2.0, lo
            if lo < lo_limit:
                raise BracketFailure(f"no sign change of sigma in [{lo_limit:.0e}, 1]")

    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        s = sign_at(mid)
        if s == 0.0:
            return mid
        if s > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def t0_map(u: RadialFn, spec: ProblemSpec, crosscheck: bool = True) -> float:
    """Unique t > 0 with t u on the Nehari set."""
    if not np.any(u.values != 0.0):
        raise ZeroFunction("the scaling map is undefined at u = 0")

    t0 = _t0_closed_form(u, spec)
    if crosscheck:
        bisected = t0_bisect(u, spec)
        if abs(bisected - t0) > 10.0 * config.T0_CROSSCHECK_TOL * t0:
            bt.logging.warning(f"⚠️ t0 closed form {t0:.15g} and bisection {bisected:.15g} disagree")
    return t0


def scaled_energy(u: RadialFn, spec: ProblemSpec) -> float:
    """E(u) = J(t0(u) u)."""
    return functional_J(u.scaled(_t0_closed_form(u, spec)), spec)


def scaled_energy_gradient(u: RadialFn, spec: ProblemSpec) -> np.ndarray:
    t0 = _t0_closed_form(u, spec)
    return t0 * grad_J(u.scaled(t0), spec).values


def check_envelope_gradient(u: RadialFn, spec: ProblemSpec, h: float = 1e-6) -> float:
    """Compare <grad E, v> with central differences of E along a few smooth directions."""
    r = u.grid.nodes
    directions = [r, r ** 2, np.cos(np.pi * r)]
    gradient = scaled_energy_gradient(u, spec)
    scale = u.sup_norm()

    worst = 0.0
    for v in directions:
        step = h * scale
        plus = scaled_energy(u.with_values(u.values + step * v), spec)
        minus = scaled_energy(u.with_values(u.values - step * v), spec)
        finite_difference = (plus - minus) / (2.0 * step)
        analytic = float(np.dot(gradient, v))
        denominator = max(abs(finite_difference), abs(analytic), 1e-8)
        worst = max(worst, abs(finite_difference - analytic) / denominator)

    if worst > config.GRADIENT_CHECK_TOL:
        raise GradientInconsistency(f"envelope gradient relative error {worst:.3e} exceeds {config.GRADIENT_CHECK_TOL:.1e}")
    bt.logging.debug(f"envelope gradient check passed, relative error {worst:.3e}")
    return worst


def solve_fixed(spec: ProblemSpec, u0: Optional[RadialFn] = None) -> NehariResult:
    """Minimize J on the Nehari set inside the cone."""
    if spec.mode != SolveMode.FIXED:
        raise InadmissibleProblem(f"solve_fixed needs fixed mode, got {spec.mode.value}")

    initial = u0 if u0 is not None else initial_guess(spec)
    start = retract(initial.values, initial, spec.p)
    check_envelope_gradient(start, spec)

    norms: List[float] = []

    def record(u: RadialFn, _: float) -> None:
        norms.append(_t0_closed_form(u, spec))

    search = ProjectedLineSearch(
        objective=lambda u: scaled_energy(u, spec),
        gradient=lambda u: scaled_energy_gradient(u, spec),
        p=spec.p,
        settings=LineSearchSettings.from_spec(spec),
        maximize=False,
        label="nehari",
        on_accept=record,
    )

    try:
        outcome = search.run(start)
    except NotConverged as e:
        partial = e.best
        e.best = _result(partial.u, spec, partial.iterations, False, partial.history, norms)
        raise

    result = _result(outcome.u, spec, outcome.iterations, outcome.converged, outcome.history, norms)
    bt.logging.info(f"📊 nehari: c0={result.c0:.12g}, t0={result.t0_last:.12g}, iterations={result.iterations}")
    return result


def _result(unit: RadialFn, spec: ProblemSpec, iterations: int, converged: bool,
            history, norms: List[float]) -> NehariResult:
    t0 = t0_map(unit, spec)
    u = unit.scaled(t0)
    norm_p = energy_p(u, spec.p)
    return NehariResult(
        u=u,
        c0=functional_J(u, spec),
        t0_last=t0,
        iterations=iterations,
        converged=converged,
        norm_p=norm_p,
        energy_floor=ProblemProtocol.energy_floor(spec, norm_p),
        # iterates live on the unit sphere, so ||t0 u|| = t0
        min_norm=min(norms) if norms else norm_p ** (1.0 / spec.p),
        history=list(history),
    )
