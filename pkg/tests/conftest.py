import numpy as np
import pytest

from radial.protocol import NonlinSpec, ProblemSpec, SolveMode, WeightKind, WeightSpec


def make_spec(**overrides) -> ProblemSpec:
    data = dict(dim=3, p=2.0, weight=WeightSpec(kind=WeightKind.POWER, alpha=2.0),
                nonlin=NonlinSpec(q=3.0), mode=SolveMode.EIGEN, grid_n=64)
    data.update(overrides)
    return ProblemSpec(**data)


def constant_weight_spec(**overrides) -> ProblemSpec:
    data = dict(weight=WeightSpec(kind=WeightKind.CONSTANT, c=1.0), allow_constant_weight=True)
    data.update(overrides)
    return make_spec(**data)


def cone_samples(grid, count: int, seed: int = 7):
    """Deterministic strictly positive nondecreasing node vectors."""
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(count):
        increments = rng.exponential(size=grid.n) * grid.h
        start = rng.uniform(0.1, 2.0)
        samples.append(start + np.concatenate([[0.0], np.cumsum(increments)]))
    return samples


@pytest.fixture
def henon_spec() -> ProblemSpec:
    return make_spec()


@pytest.fixture
def constant_spec() -> ProblemSpec:
    return constant_weight_spec()
