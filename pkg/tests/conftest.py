"""Session-scoped fixtures: converged waves reused across test modules."""

import numpy as np
import pytest

from waveforce.background import build_primitive, parameter_for_froude, solve_background
from waveforce.solver import solve_solitary

IRROT = build_primitive([0.0], kind="polynomial")
ROT03 = build_primitive([0.3], kind="polynomial")


@pytest.fixture(scope="session")
def solitary_f11():
    """Irrotational solitary wave at F = 1.1, workhorse resolution."""
    d = 1.1 ** (-2.0 / 3.0)
    flow = solve_background(IRROT, s=1.0 / (2 * d * d), n_p=41)
    return solve_solitary(flow, L=25.0, n_q=669)


@pytest.fixture(scope="session")
def solitary_f11_fine():
    """Same wave on the grid used for tight flow-force diagnostics."""
    d = 1.1 ** (-2.0 / 3.0)
    flow = solve_background(IRROT, s=1.0 / (2 * d * d), n_p=101)
    return solve_solitary(flow, L=25.0, n_q=1335)


@pytest.fixture(scope="session")
def solitary_f11_refined():
    """Both spacings of the workhorse grid halved, for order checks."""
    d = 1.1 ** (-2.0 / 3.0)
    flow = solve_background(IRROT, s=1.0 / (2 * d * d), n_p=81)
    return solve_solitary(flow, L=25.0, n_q=1337)


@pytest.fixture(scope="session")
def rotational_wave_pair():
    """Rotational (omega = 0.3) F = 1.1 wave at two matched resolutions."""
    s11 = parameter_for_froude(ROT03, 1.1)
    waves = []
    for n_p, n_q in ((41, 521), (81, 1041)):
        flow = solve_background(ROT03, s11, n_p=n_p)
        waves.append(solve_solitary(flow, L=26.0, n_q=n_q))
    return tuple(waves)


@pytest.fixture(scope="session")
def random_smooth_field():
    """Deterministic smooth non-solution field on the d=2 background."""
    from waveforce.solver import BoundaryCondition, StripGrid, WaveField

    flow = solve_background(IRROT, s=0.125, n_p=51)
    q = np.linspace(-15.0, 15.0, 301)
    rng = np.random.default_rng(42)
    modes = rng.standard_normal((4, 2))
    Q, P = np.meshgrid(q, flow.p, indexing="ij")
    w = np.zeros_like(Q)
    for k, (aq, ap) in enumerate(modes):
        w += (
            aq
            * np.exp(-((Q / (4.0 + k)) ** 2))
            * np.sin((k + 1) * np.pi * P / 2.0)
            * np.cos((k + 1) * Q / 2.0)
        )
    w *= 0.2 * flow.d / np.max(np.abs(w))
    w[:, 0] = 0.0
    grid = StripGrid(q, flow.p, 15.0)
    return WaveField(grid, flow, BoundaryCondition("decay"), w)
