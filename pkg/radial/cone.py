"""Projection onto the discrete cone of nonnegative nondecreasing radial functions.

The projection minimizes sum_i m_i (x_i - v_i)^2 over x_0 <= x_1 <= ... <= x_n,
x_0 >= 0, with the quadrature weights as masses m_i.  It is computed as a
weighted pool-adjacent-violators fit followed by a clamp at zero.

Clamping is exact here.  Let y be the isotonic fit and x = max(y, 0).  The
blocks of y with negative value form a prefix (y is nondecreasing).  On that
prefix the constraint x >= 0 is active and, since the lower bound is the same
constant for every node, merging those blocks into one block at level 0
satisfies the optimality conditions of the bounded problem: every partial
sum of m_i (x_i - v_i) from the right end of the prefix is nonnegative
because each negative block mean lies below 0.  The remaining blocks keep
their isotonic optimality conditions unchanged.
"""
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from radial.errors import ZeroFunction
from radial.functionals import sobolev_norm_p
from radial.grid import RadialFn


@dataclass(frozen=True)
class ConeCertificate:
    """Evidence that `subject` lies in the cone: both minima are >= 0 exactly."""
    subject: RadialFn
    min_value: float
    min_forward_difference: float
    blocks: int

    @property
    def holds(self) -> bool:
        return self.min_value >= 0.0 and self.min_forward_difference >= 0.0


class _Block:
    """Contiguous run of nodes sharing one fitted value."""

    __slots__ = ("value", "weight_sum", "weighted_sum", "count")

    def __init__(self, value: float, weight: float):
        self.value = value
        self.weight_sum = weight
        self.weighted_sum = value * weight
        self.count = 1

    def absorb(self, right: "_Block") -> None:
        self.weight_sum += right.weight_sum
        self.weighted_sum += right.weighted_sum
        self.count += right.count
        self.value = self.weighted_sum / self.weight_sum


def isotonic_fit(values: np.ndarray, masses: np.ndarray) -> Tuple[np.ndarray, int]:
    """Weighted nondecreasing least-squares fit; returns the fit and its block count."""
    blocks: List[_Block] = []
    for value, mass in zip(values, masses):
        current = _Block(float(value), float(mass))

        # merge backwards while the previous block sits strictly above
        while blocks and blocks[-1].value > current.value:
            previous = blocks.pop()
            previous.absorb(current)
            current = previous

        blocks.append(current)

    fitted = np.repeat([b.value for b in blocks], [b.count for b in blocks])
    return fitted, len(blocks)


def certify(u: RadialFn, blocks: int = 0) -> ConeCertificate:
    values = u.values
    diffs = np.diff(values)
    return ConeCertificate(
        subject=u,
        min_value=float(np.min(values)),
        min_forward_difference=float(np.min(diffs)) if diffs.size else 0.0,
        blocks=blocks or int(np.count_nonzero(diffs)) + 1,
    )


def project_values(values: np.ndarray, masses: np.ndarray) -> Tuple[np.ndarray, int]:
    """Cone projection of a plain vector under arbitrary positive masses."""
    values = np.asarray(values, dtype=float)
    diffs = np.diff(values)
    if values.size and values[0] >= 0.0 and np.all(diffs >= 0.0):
        return values.copy(), int(np.count_nonzero(diffs)) + 1

    fitted, blocks = isotonic_fit(values, np.asarray(masses, dtype=float))
    return np.maximum(fitted, 0.0), blocks


def project_cone(v: RadialFn) -> Tuple[RadialFn, ConeCertificate]:
    projected_values, blocks = project_values(v.values, v.grid.weights)
    projected = RadialFn(v.grid, projected_values)
    certificate = certify(projected, blocks)
    return projected, certificate


def is_member(u: RadialFn, tol: float = 0.0) -> bool:
    values = u.values
    if np.min(values) < -tol:
        return False
    return bool(np.all(np.diff(values) >= -tol))


def normalize_sphere(u: RadialFn, p: float) -> RadialFn:
    norm = sobolev_norm_p(u, p)
    if norm == 0.0:
        raise ZeroFunction("cannot normalize the zero function onto the sphere")
    return u.scaled(1.0 / norm)


def linf_ratio(u: RadialFn, p: float) -> float:
    """||u||_inf / ||u||; on the cone the sup is the boundary value u(1)."""
    norm = sobolev_norm_p(u, p)
    if norm == 0.0:
        raise ZeroFunction("L-infinity ratio of the zero function")
    return u.sup_norm() / norm
