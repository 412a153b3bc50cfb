from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from radial.errors import InadmissibleProblem
from radial.grid import RadialFn, RadialGrid


class SolveMode(str, Enum):
    EIGEN = "eigen"
    FIXED = "fixed"
    SHOOT = "shoot"
    VERIFY = "verify"


class WeightKind(str, Enum):
    POWER = "power"
    AFFINE = "affine"
    EXP = "exp"
    CONSTANT = "constant"


class NonlinKind(str, Enum):
    POWER = "power"


class WeightSpec(BaseModel):
    """Radial coefficient a(r): r^alpha, 1 + beta r, e^{beta r} or c."""
    model_config = ConfigDict(frozen=True)

    kind: WeightKind = Field(WeightKind.POWER, description="Weight family")
    alpha: float = Field(2.0, ge=0.0, description="Exponent of the power (Henon) weight")
    beta: float = Field(1.0, gt=0.0, description="Slope of the affine / exponential weight")
    c: float = Field(1.0, gt=0.0, description="Value of the constant weight")

    def __call__(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.kind == WeightKind.POWER:
            return np.power(r, self.alpha)
        if self.kind == WeightKind.AFFINE:
            return 1.0 + self.beta * r
        if self.kind == WeightKind.EXP:
            return np.exp(self.beta * r)
        return np.full_like(r, self.c)

    @property
    def is_constant(self) -> bool:
        return self.kind == WeightKind.CONSTANT or (self.kind == WeightKind.POWER and self.alpha == 0.0)

    def moment(self, power: float, r: float) -> Optional[float]:
        """Closed form of int_0^r s^power a(s) ds when one exists."""
        if self.kind == WeightKind.POWER:
            return r ** (power + 1.0 + self.alpha) / (power + 1.0 + self.alpha)
        if self.kind == WeightKind.AFFINE:
            return r ** (power + 1.0) / (power + 1.0) + self.beta * r ** (power + 2.0) / (power + 2.0)
        if self.kind == WeightKind.CONSTANT:
            return self.c * r ** (power + 1.0) / (power + 1.0)
        return None


class NonlinSpec(BaseModel):
    """Nonlinearity f(s) = s^q with primitive F(s) = s^{q+1}/(q+1)."""
    model_config = ConfigDict(frozen=True)

    kind: NonlinKind = Field(NonlinKind.POWER, description="Nonlinearity family")
    q: float = Field(3.0, gt=0.0, description="Exponent of the power nonlinearity")

    @property
    def gamma(self) -> float:
        return self.q + 1.0

    def f(self, s: np.ndarray) -> np.ndarray:
        # odd extension; the variational code only ever passes s >= 0
        s = np.asarray(s, dtype=float)
        return np.sign(s) * np.abs(s) ** self.q

    def F(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return np.abs(s) ** self.gamma / self.gamma

    def f_times_s(self, s: np.ndarray) -> np.ndarray:
        return np.abs(np.asarray(s, dtype=float)) ** self.gamma


class ProblemSpec(BaseModel):
    """Full instance definition of the radial Neumann problem."""
    model_config = ConfigDict(frozen=True)

    dim: int = Field(3, ge=1, description="Space dimension N")
    p: float = Field(2.0, description="Exponent of the p-Laplacian")
    weight: WeightSpec = Field(default_factory=WeightSpec, description="Coefficient a(|x|)")
    nonlin: NonlinSpec = Field(default_factory=NonlinSpec, description="Nonlinearity f")
    mode: SolveMode = Field(SolveMode.EIGEN, description="What to compute")
    grid_n: int = Field(512, description="Number of grid intervals")
    tol: float = Field(1e-8, description="Convergence tolerance")
    max_iter: int = Field(20000, description="Iteration cap of the optimizers")
    allow_constant_weight: bool = Field(False, description="Admit weights violating the non-constancy part of (A)")

    @model_validator(mode="after")
    def _check_admissible(self) -> "ProblemSpec":
        errors = ProblemProtocol.admissibility_errors(self)
        if errors:
            raise InadmissibleProblem("; ".join(errors))
        return self

    def grid(self) -> RadialGrid:
        return RadialGrid(self.grid_n, self.dim)

    def with_overrides(self, **overrides: Any) -> "ProblemSpec":
        data = self.model_dump()
        data.update(overrides)
        return ProblemSpec(**data)


class ProblemProtocol:

    @staticmethod
    def admissibility_errors(spec: ProblemSpec) -> List[str]:
        errors = []

        if not spec.p > 1.0:
            errors.append(f"exponent p must satisfy 1 < p < inf, got p={spec.p}")
        if spec.dim < 3:
            errors.append(f"dimension must satisfy N >= 3, got N={spec.dim}")
        if spec.grid_n < 3:
            errors.append(f"grid needs at least 3 intervals, got n={spec.grid_n}")
        if not spec.tol > 0.0:
            errors.append(f"tol must be positive, got {spec.tol}")
        if spec.max_iter <= 0:
            errors.append(f"max_iter must be positive, got {spec.max_iter}")

        if spec.weight.is_constant and not spec.allow_constant_weight:
            errors.append("assumption (A) requires a non-constant radially increasing weight; "
                          "set allow_constant_weight to use a constant weight")

        if errors:
            return errors

        q, p = spec.nonlin.q, spec.p
        if not q > p - 1.0:
            errors.append(f"assumption (F) requires f(t)/t^(p-1) strictly increasing, i.e. q > p-1; "
                          f"got q={q}, p={p}")
        elif spec.mode == SolveMode.FIXED:
            errors.extend(ProblemProtocol.fixed_mode_errors(spec))

        return errors

    @staticmethod
    def fixed_mode_errors(spec: ProblemSpec) -> List[str]:
        """(F') and (F'') for the power nonlinearity."""
        q, p = spec.nonlin.q, spec.p
        errors = []
        # f(t) = o(t^{p-1}) at 0, f'(t)t - (p-1)f(t) = (q-p+1)t^q > 0, f(t)t = gamma F(t)
        if not q > p - 1.0:
            errors.append(f"assumption (F') requires f(t)=o(t^(p-1)) at 0, i.e. q > p-1; got q={q}")
        if not spec.nonlin.gamma > p:
            errors.append(f"assumption (F') requires gamma = q+1 > p; got gamma={spec.nonlin.gamma}, p={p}")
        return errors

    @staticmethod
    def energy_floor(spec: ProblemSpec, norm_p: float) -> float:
        """Lower bound (1/p - 1/gamma) ||u||^p of J on the Nehari set."""
        return (1.0 / spec.p - 1.0 / spec.nonlin.gamma) * norm_p


@dataclass
class EigenResult:
    """Maximizer of I on the cone sphere and its multiplier."""
    u: RadialFn
    lam: float
    S: float
    iterations: int
    converged: bool
    history: List[float] = field(default_factory=list)


@dataclass
class NehariResult:
    """Minimizer of J on the Nehari set, already scaled onto it."""
    u: RadialFn
    c0: float
    t0_last: float
    iterations: int
    converged: bool
    norm_p: float = 0.0
    energy_floor: float = 0.0
    min_norm: float = 0.0
    history: List[float] = field(default_factory=list)


@dataclass
class ShootTrajectory:
    r: np.ndarray
    u: np.ndarray
    w: np.ndarray

    @property
    def terminal_flux(self) -> float:
        return float(self.w[-1])


@dataclass
class ShootResult:
    d: float
    terminal_flux: float
    profile: RadialFn
    rootfind_iterations: int
    trajectory: Optional[ShootTrajectory] = None


@dataclass
class VerifyReport:
    weak_residual_max: float
    min_value: float
    min_interior_slope: float
    lambda_consistency: float
    subsolution_margin: float
    linf_ratio: float = 0.0
    details: Dict[str, Any] = field(default_factory=dict)
