"""Projected line search on the unit sphere of the cone.

Both variational solvers optimize a scale invariant objective over
{u in cone, ||u|| = 1}.  One iteration:

    d     = A(u)^{-1} grad            (Sobolev gradient, A banded)
    trial = normalize(project(u + s d))
    accept when gain(trial) >= gain(u) + c * <grad, trial - u>

where gain is the objective (ascent) or its negative (descent).  The step s
halves on rejection and grows by 1.5 after every accepted iterate.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import bittensor as bt
import numpy as np
from scipy.linalg import solve_banded

from config.config import appConfig as config
from radial.cone import normalize_sphere, project_cone
from radial.errors import NotConverged, ZeroFunction
from radial.functionals import sobolev_metric
from radial.grid import RadialFn
from radial.protocol import ProblemSpec

Objective = Callable[[RadialFn], float]
Gradient = Callable[[RadialFn], np.ndarray]


@dataclass
class LineSearchSettings:
    tol: float
    max_iter: int
    armijo: float = config.ARMIJO_CONSTANT
    shrink: float = config.STEP_SHRINK
    growth: float = config.STEP_GROWTH
    step_initial: float = config.STEP_INITIAL
    step_min: float = config.STEP_MIN
    stall_window: int = config.STALL_WINDOW

    @classmethod
    def from_spec(cls, spec: ProblemSpec) -> "LineSearchSettings":
        return cls(tol=spec.tol, max_iter=spec.max_iter)


@dataclass
class LineSearchOutcome:
    u: RadialFn
    value: float
    iterations: int
    converged: bool
    stalled: bool = False
    last_step_inf: float = math.inf
    stationarity: float = math.inf
    history: List[float] = field(default_factory=list)


def retract(values: np.ndarray, like: RadialFn, p: float) -> RadialFn:
    """Project onto the cone, then scale onto the unit sphere."""
    projected, _ = project_cone(like.with_values(values))
    return normalize_sphere(projected, p)


class ProjectedLineSearch:
    """Armijo projected gradient method for a scale invariant objective on the cone sphere."""

    def __init__(self, objective: Objective, gradient: Gradient, p: float,
                 settings: LineSearchSettings, maximize: bool = True, label: str = "solver",
                 on_accept: Optional[Callable[[RadialFn, float], None]] = None):
        self.objective = objective
        self.gradient = gradient
        self.p = p
        self.settings = settings
        self.sign = 1.0 if maximize else -1.0
        self.label = label
        self.on_accept = on_accept

    def _gain(self, u: RadialFn) -> float:
        return self.sign * self.objective(u)

    def _direction(self, u: RadialFn, grad: np.ndarray) -> np.ndarray:
        return solve_banded((1, 1), sobolev_metric(u, self.p), grad, check_finite=False)

    def stationarity(self, u: RadialFn, direction: np.ndarray) -> float:
        """Sup-norm length of the projected unit step from u; zero at constrained critical points."""
        try:
            moved = retract(u.values + self.settings.step_initial * direction, u, self.p)
        except ZeroFunction:
            return math.inf
        return moved.distance_inf(u)

    def run(self, u0: RadialFn) -> LineSearchOutcome:
        settings = self.settings
        u = retract(u0.values, u0, self.p)
        value = self._gain(u)
        history = [self.sign * value]
        if self.on_accept:
            self.on_accept(u, self.sign * value)

        step = settings.step_initial
        quiet_iterations = 0
        last_step_inf = math.inf

        bt.logging.info(f"🚀 {self.label}: start, n={u.grid.n}, objective={history[0]:.12g}")

        for iteration in range(1, settings.max_iter + 1):
            grad = self.sign * self.gradient(u)
            direction = self._direction(u, grad)

            trial, trial_value = None, None
            while step >= settings.step_min:
                try:
                    candidate = retract(u.values + step * direction, u, self.p)
                except ZeroFunction:
                    step *= settings.shrink
                    continue

                candidate_value = self._gain(candidate)
                predicted = float(np.dot(grad, candidate.values - u.values))
                if predicted > 0.0 and candidate_value >= value + settings.armijo * predicted:
                    trial, trial_value = candidate, candidate_value
                    break
                step *= settings.shrink

            if trial is None:
                stationarity = self.stationarity(u, direction)
                converged = stationarity < math.sqrt(settings.tol)
                log = bt.logging.info if converged else bt.logging.warning
                log(f"⚠️ {self.label}: line search stalled at iteration {iteration}, "
                    f"projected step {stationarity:.3e}, converged={converged}")
                return LineSearchOutcome(u, self.sign * value, iteration - 1, converged, True, last_step_inf,
                                         stationarity, history)

            improvement = (trial_value - value) / max(abs(value), np.finfo(float).tiny)
            last_step_inf = trial.distance_inf(u)
            u, value = trial, trial_value
            history.append(self.sign * value)
            if self.on_accept:
                self.on_accept(u, self.sign * value)

            step *= settings.growth
            quiet_iterations = quiet_iterations + 1 if improvement < settings.tol else 0

            if iteration % 100 == 0:
                bt.logging.debug(f"{self.label}: it={iteration} objective={history[-1]:.14g} "
                                 f"step={step:.3e} dx={last_step_inf:.3e}")

            if quiet_iterations >= settings.stall_window and last_step_inf < settings.tol:
                bt.logging.success(f"✅ {self.label}: converged in {iteration} iterations, objective={history[-1]:.12g}")
                return LineSearchOutcome(u, self.sign * value, iteration, True, False, last_step_inf, history=history)

        outcome = LineSearchOutcome(u, self.sign * value, settings.max_iter, False, False, last_step_inf, history=history)
        if quiet_iterations >= settings.stall_window:
            bt.logging.warning(f"⚠️ {self.label}: iteration cap hit with stagnant objective; step {last_step_inf:.3e}")
            return outcome

        raise NotConverged(f"{self.label} hit max_iter={settings.max_iter}", best=outcome)
