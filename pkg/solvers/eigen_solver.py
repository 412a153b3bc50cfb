from typing import Optional

import bittensor as bt
import numpy as np

from radial.errors import InadmissibleProblem, NotConverged
from radial.functionals import functional_I, grad_I, grad_norm_p, lambda_of, sobolev_norm_p
from radial.grid import RadialFn
from radial.protocol import EigenResult, ProblemSpec, SolveMode
from solvers.ascent import LineSearchSettings, ProjectedLineSearch


def initial_guess(spec: ProblemSpec) -> RadialFn:
    """u0(r) = 1 + r: strictly positive and strictly increasing."""
    return spec.grid().sample(lambda r: 1.0 + r)


def sphere_objective(u: RadialFn, spec: ProblemSpec) -> float:
    """Phi(u) = I(u / ||u||), constant along rays."""
    return functional_I(u.scaled(1.0 / sobolev_norm_p(u, spec.p)), spec)


def sphere_gradient(u: RadialFn, spec: ProblemSpec) -> np.ndarray:
    norm = sobolev_norm_p(u, spec.p)
    unit = u.scaled(1.0 / norm)
    g = grad_I(unit, spec).values
    # remove the radial component: <grad I, u> is the multiplier 1 / lambda
    return (g - np.dot(g, unit.values) * grad_norm_p(unit, spec.p).values) / norm


def solve_eigen(spec: ProblemSpec, u0: Optional[RadialFn] = None) -> EigenResult:
    """Maximize I over the cone sphere; the multiplier is lambda = 1 / int a f(u) u."""
    if spec.mode != SolveMode.EIGEN:
        raise InadmissibleProblem(f"solve_eigen needs eigen mode, got {spec.mode.value}")

    search = ProjectedLineSearch(
        objective=lambda u: sphere_objective(u, spec),
        gradient=lambda u: sphere_gradient(u, spec),
        p=spec.p,
        settings=LineSearchSettings.from_spec(spec),
        maximize=True,
        label="eigen",
    )

    try:
        outcome = search.run(u0 if u0 is not None else initial_guess(spec))
    except NotConverged as e:
        partial = e.best
        e.best = _result(partial.u, spec, partial.iterations, False, partial.history)
        raise

    result = _result(outcome.u, spec, outcome.iterations, outcome.converged, outcome.history)
    bt.logging.info(f"📊 eigen: S={result.S:.12g}, lambda={result.lam:.12g}, iterations={result.iterations}")
    return result


def _result(u: RadialFn, spec: ProblemSpec, iterations: int, converged: bool, history) -> EigenResult:
    return EigenResult(
        u=u,
        lam=lambda_of(u, spec),
        S=functional_I(u, spec),
        iterations=iterations,
        converged=converged,
        history=list(history),
    )


def eigen_to_fixed(result: EigenResult, spec: ProblemSpec) -> RadialFn:
    """Rescale an eigen pair (u, lambda) to a solution with lambda = 1.

    For f(s) = s^q, v = c u solves the lambda = 1 problem when
    c^{p-1} lambda = c^q, i.e. c = lambda^{1/(q-p+1)}.
    """
    exponent = 1.0 / (spec.nonlin.q - spec.p + 1.0)
    return result.u.scaled(result.lam ** exponent)
