"""Uniform radial grids, node functions and the weighted quadrature.

Integrals over the unit ball of a radial integrand reduce to
|S^{N-1}| * int_0^1 g(r) r^{N-1} dr.  The node weights integrate the
piecewise linear interpolant of g against r^{N-1} exactly on every cell,
so constants (and the total measure |S^{N-1}|/N) are reproduced to
rounding, and smooth integrands converge like O(n^-2).
"""
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

from radial.errors import NonFiniteInput


def sphere_measure(dim: int) -> float:
    """Surface measure of the unit sphere S^{dim-1}."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def ball_measure(dim: int) -> float:
    return sphere_measure(dim) / dim


def _require_finite(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise NonFiniteInput(f"{what} has a non-finite entry at node {bad}")


@dataclass(frozen=True)
class RadialGrid:
    n: int
    dim: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"grid needs at least one interval, got n={self.n}")
        if self.dim < 1:
            raise ValueError(f"dimension must be positive, got {self.dim}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @cached_property
    def nodes(self) -> np.ndarray:
        r = np.arange(self.n + 1, dtype=float) / self.n
        r.setflags(write=False)
        return r

    @cached_property
    def cell_measures(self) -> np.ndarray:
        """Measure of every spherical shell {r_i < |x| < r_{i+1}}."""
        r = self.nodes
        N = self.dim
        c = sphere_measure(N) * (r[1:] ** N - r[:-1] ** N) / N
        c.setflags(write=False)
        return c

    @cached_property
    def weights(self) -> np.ndarray:
        r = self.nodes
        N = self.dim
        h = self.h
        left, right = r[:-1], r[1:]
        m0 = (right ** N - left ** N) / N
        m1 = (right ** (N + 1) - left ** (N + 1)) / (N + 1)

        w = np.zeros(self.n + 1)
        # hat functions restricted to one cell, integrated against r^{N-1}
        w[:-1] += (right * m0 - m1) / h
        w[1:] += (m1 - left * m0) / h
        w *= sphere_measure(N)
        w.setflags(write=False)
        return w

    @property
    def total_measure(self) -> float:
        return ball_measure(self.dim)

    def sample(self, func) -> "RadialFn":
        """Evaluate a vectorized callable of r on the nodes."""
        return RadialFn(self, np.asarray(func(self.nodes), dtype=float))


@dataclass(frozen=True)
class RadialFn:
    """Values of a radial function u(r) on the grid nodes."""

    grid: RadialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.shape != (self.grid.n + 1,):
            raise ValueError(f"expected {self.grid.n + 1} node values, got shape {values.shape}")
        _require_finite(values, "radial function")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def with_values(self, values: np.ndarray) -> "RadialFn":
        return RadialFn(self.grid, values)

    def scaled(self, c: float) -> "RadialFn":
        return RadialFn(self.grid, c * self.values)

    @property
    def slopes(self) -> np.ndarray:
        """Forward difference quotient on every cell."""
        return np.diff(self.values) * self.grid.n

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def distance_inf(self, other: Union["RadialFn", np.ndarray]) -> float:
        other_values = other.values if isinstance(other, RadialFn) else np.asarray(other)
        return float(np.max(np.abs(self.values - other_values)))


def quad(grid: RadialGrid, g: np.ndarray) -> float:
    """Weighted quadrature of a node-sampled integrand over the unit ball."""
    g = np.asarray(g, dtype=float)
    if g.shape != (grid.n + 1,):
        raise ValueError(f"integrand must be sampled on all {grid.n + 1} nodes")
    _require_finite(g, "integrand")
    return float(np.dot(grid.weights, g))
