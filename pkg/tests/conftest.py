"""Shared fixtures and helpers for the test suite.

The heterogeneous reference case used throughout is the 1-D model

    a(x) = 1.05 + 0.05 cos(pi x / L),  b = 0.05,  r = 0,  mu = 1,  d1 = d2 = 1

on [0, 10] with 101 nodes, which satisfies both the standing hypothesis
(b < a_min/a_max = 10/11) and the global-stability condition with a wide
margin.  Long runs of it are expensive enough to share, so the three
reference trajectories and the converged steady state are session fixtures.
"""

import numpy as np
import pytest

from htpde import (CoefficientSpec, Grid, KineticParams, ModelSpec, State,
                   StepperConfig, build_coefficient, simulate, solve_quadruple,
                   steady_by_relaxation)

HET_L = 10.0
HET_NODES = 101


def make_het_model(counts: int = HET_NODES) -> ModelSpec:
    """The heterogeneous reference model on a grid with ``counts`` nodes."""
    grid = Grid(extents=(HET_L,), counts=(counts,))
    return ModelSpec(
        params=KineticParams(b=0.05, r=0.0, mu=1.0),
        a=build_coefficient(CoefficientSpec.cosine(1.05, 0.05, (1,)), grid),
        d1=build_coefficient(CoefficientSpec.constant(1.0), grid),
        d2=build_coefficient(CoefficientSpec.constant(1.0), grid),
    )


def make_homogeneous_model(a: float = 1.0, b: float = 0.5, r: float = 1.0,
                           mu: float = 1.0, counts: int = HET_NODES) -> ModelSpec:
    """Spatially constant model (a, d1, d2 all constant) on [0, 10]."""
    grid = Grid(extents=(HET_L,), counts=(counts,))
    return ModelSpec(
        params=KineticParams(b=b, r=r, mu=mu),
        a=build_coefficient(CoefficientSpec.constant(a), grid),
        d1=build_coefficient(CoefficientSpec.constant(1.0), grid),
        d2=build_coefficient(CoefficientSpec.constant(1.0), grid),
    )


def het_initials(grid: Grid) -> dict[str, State]:
    """The three reference initial states: two constants, one seeded random."""
    rng = np.random.default_rng(20240811)
    return {
        "const-low": State.constant(grid, 0.2, 0.2),
        "const-high": State.constant(grid, 1.5, 1.5),
        "random": State.from_arrays(grid,
                                    rng.uniform(0.1, 2.0, grid.shape),
                                    rng.uniform(0.1, 2.0, grid.shape)),
    }


def random_admissible(rng: np.random.Generator, r: float | None = None):
    """One random (a_min, a_max, params) triple satisfying b < a_min/a_max.

    ``r`` fixes the saturation constant; None draws it from [0.05, 3].
    The predation strength is drawn strictly inside the admissible interval
    (10 to 80 percent of the threshold), so the hypothesis always holds.
    """
    a_min = rng.uniform(0.5, 1.5)
    a_max = a_min * (1.0 + rng.uniform(0.0, 1.0))
    b = rng.uniform(0.1, 0.8) * a_min / a_max
    mu = rng.uniform(0.5, 2.0)
    if r is None:
        r = rng.uniform(0.05, 3.0)
    return a_min, a_max, KineticParams(b=b, r=r, mu=mu)


@pytest.fixture(scope="session")
def het_model() -> ModelSpec:
    return make_het_model()


@pytest.fixture(scope="session")
def het_quadruple(het_model):
    a_min, a_max = het_model.a_extremes
    return solve_quadruple(a_min, a_max, het_model.params)


@pytest.fixture(scope="session")
def het_traces(het_model) -> dict:
    """Three t_end = 200 trajectories with stored states (box attraction runs)."""
    stepper = StepperConfig(t_end=200.0, record_every=250)
    return {name: simulate(het_model, init, stepper)
            for name, init in het_initials(het_model.grid).items()}


@pytest.fixture(scope="session")
def het_steady(het_model, het_traces):
    """Converged steady state of the reference case (tight tolerance)."""
    return steady_by_relaxation(het_model, het_traces["const-low"].final_state,
                                tol=1e-11)
