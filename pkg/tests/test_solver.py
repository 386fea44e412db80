import numpy as np
import pytest

from waveforce.background import build_primitive, solve_background
from waveforce.dispersion import sl_spectrum
from waveforce.errors import (
    ConvergenceError,
    DomainError,
    TailNotResolved,
    UnidirectionalityViolation,
)
from waveforce.fdiff import interior_sup
from waveforce.solver import (
    BoundaryCondition,
    StripGrid,
    WaveField,
    _Discretization,
    check_jacobian,
    residual,
    residual_divergence,
    solve_periodic,
    solve_solitary,
    subcritical_probe,
)

IRROT = build_primitive([0.0], kind="polynomial")


def _irrotational_depth(d, n_p=41):
    return solve_background(IRROT, s=1.0 / (2 * d * d), n_p=n_p)


def _smooth_test_field(grid, flow, scale):
    # smooth, compactly supported in q, vanishing on the bed
    Q, P = np.meshgrid(grid.q, grid.p, indexing="ij")
    w = scale * np.exp(-((Q / 3.0) ** 2)) * np.sin(0.5 * np.pi * P) * (1 + 0.3 * P)
    w[:, 0] = 0.0
    return w


def _assert_quadratic(increments, floor=1e-13):
    steps = [x for x in increments if x > floor]
    assert len(steps) >= 3, "too few Newton steps to judge convergence"
    for a, b in zip(steps[-3:-1], steps[-2:]):
        assert b <= 100.0 * max(a * a, floor)


def test_jacobian_fd_gate_all_closures():
    flow = solve_background(build_primitive([0.3], kind="polynomial"), 0.4, n_p=31)
    rng = np.random.default_rng(3)
    wu = 1e-2 * np.outer(
        np.exp(-np.linspace(-2, 2, 41) ** 2), np.linspace(0, 1, flow.n_p - 1)
    )
    wu += 1e-3 * rng.standard_normal(wu.shape).cumsum(axis=0) / 41
    for kind in ("decay", "periodic", "even-symmetric"):
        disc = _Discretization(flow, 0.1, flow.p[1] - flow.p[0], 41, kind)
        assert check_jacobian(disc, wu) < 1e-6


def test_trivial_field_has_zero_residual():
    flow = _irrotational_depth(1.5)
    q = np.linspace(-5, 5, 21)
    grid = StripGrid(q, flow.p, 5.0)
    fieldv = WaveField(grid, flow, BoundaryCondition("decay"),
                       np.zeros((21, flow.n_p)))
    interior, top = residual(fieldv)
    assert np.max(np.abs(interior)) == 0.0
    assert np.max(np.abs(top)) == 0.0


def test_small_field_residual_scales_linearly():
    flow = _irrotational_depth(1.5)
    q = np.linspace(-8, 8, 41)
    grid = StripGrid(q, flow.p, 8.0)
    sups = []
    for eps in (1e-3, 1e-6):
        w = _smooth_test_field(grid, flow, eps)
        fieldv = WaveField(grid, flow, BoundaryCondition("decay"), w)
        interior, top = residual(fieldv)
        sups.append(max(np.max(np.abs(interior)), np.max(np.abs(top))))
    assert sups[0] / sups[1] == pytest.approx(1e3, rel=0.2)


def test_expanded_and_divergence_codings_agree():
    # the two residual codings of the same height equation differ by
    # discretization error only: their mismatch drops at second order
    flow_fine = solve_background(build_primitive([0.3], kind="polynomial"), 0.4, 81)
    mism = []
    for n_q, n_p in ((81, 41), (161, 81)):
        flow = solve_background(build_primitive([0.3], kind="polynomial"), 0.4, n_p)
        q = np.linspace(-8, 8, n_q)
        grid = StripGrid(q, flow.p, 8.0)
        w = _smooth_test_field(grid, flow, 0.05)
        fieldv = WaveField(grid, flow, BoundaryCondition("decay"), w)
        interior, _ = residual(fieldv)
        div = residual_divergence(fieldv)
        mism.append(interior_sup(interior + div, collar=2))
    assert mism[0] / mism[1] > 3.2


def test_periodic_zero_amplitude_returns_trivial_branch():
    flow = _irrotational_depth(2.0, n_p=31)
    wave = solve_periodic(flow, amplitude=0.0, n_q=32)
    assert np.max(np.abs(wave.w)) < 1e-12


def test_periodic_small_amplitude_matches_linear_mode():
    flow = _irrotational_depth(2.0, n_p=51)
    a = 1e-3
    wave = solve_periodic(flow, amplitude=a, n_q=64)
    assert wave.newton.residual_inf < 1e-10
    assert abs(np.max(wave.eta) - a) <= 0.1 * a
    spec = sl_spectrum(flow, n_modes=1, shoot_check=False)
    lin = a * np.cos(spec.tau0 * wave.grid.q)[:, None] * (
        spec.phis[0] / spec.phis[0][-1]
    )[None, :]
    assert np.max(np.abs(wave.w - lin)) / a < 0.05
    _assert_quadratic(wave.newton.increment_norms + (wave.newton.residual_inf,))


def test_periodic_requires_subcritical():
    flow = _irrotational_depth(0.8, n_p=31)
    with pytest.raises(DomainError):
        solve_periodic(flow, amplitude=1e-3, n_q=32)


def test_periodic_large_amplitude_fails_loudly():
    flow = _irrotational_depth(2.0, n_p=31)
    with pytest.raises((ConvergenceError, UnidirectionalityViolation)):
        solve_periodic(flow, amplitude=1.0, n_q=32, max_iter=12)


def test_solitary_converges_with_expected_amplitude(solitary_f11):
    wave = solitary_f11
    assert wave.newton.converged
    a0 = (1.1 ** 2 - 1.0) * wave.flow.d
    assert 0.7 * a0 <= wave.amplitude <= 1.3 * a0


def test_solitary_surface_positive_even_monotone(solitary_f11):
    # truncation columns carry the imposed w = 0, so positivity and
    # monotonicity are claims about the open strip
    eta = solitary_f11.eta
    n_half = (eta.size - 1) // 2
    assert np.all(eta[1:-1] > 0.0)
    assert np.allclose(eta, eta[::-1], rtol=0, atol=1e-15)
    assert np.all(np.diff(eta[n_half:]) < 0.0)


def test_solitary_field_positive_above_bed(solitary_f11):
    assert np.min(solitary_f11.w[1:-1, 1:]) > 0.0


def test_solitary_newton_quadratic(solitary_f11):
    _assert_quadratic(solitary_f11.newton.increment_norms)


def test_solitary_divergence_residual_second_order():
    d = 1.1 ** (-2.0 / 3.0)
    sups = []
    for n_p, n_q in ((31, 335), (61, 669)):
        flow = _irrotational_depth(d, n_p=n_p)
        wave = solve_solitary(flow, L=25.0, n_q=n_q)
        sups.append(interior_sup(residual_divergence(wave), collar=2))
    assert sups[0] / sups[1] > 3.2


def test_froude_continuation_matches_direct_solve():
    from waveforce.solver import _continue_in_froude

    F = 1.25
    d = F ** (-2.0 / 3.0)
    flow = _irrotational_depth(d, n_p=41)
    direct = solve_solitary(flow, L=18.0, n_q=481)
    m = (481 + 1) // 2
    q_half = np.linspace(0.0, 18.0, m)
    wu, rep, visited = _continue_in_froude(
        flow, q_half, q_half[1] - q_half[0], flow.p[1] - flow.p[0],
        m, 1e-11, 50, None,
    )
    assert rep.converged and len(visited) >= 2
    assert abs(wu[0, -1] - direct.amplitude) < 1e-8


def test_solitary_rejects_critical_flow():
    flow = solve_background(IRROT, s=0.5, n_p=31)
    with pytest.raises(DomainError):
        solve_solitary(flow, L=10.0, n_q=201)


def test_solitary_tail_must_be_resolved():
    d = 1.1 ** (-2.0 / 3.0)
    flow = _irrotational_depth(d, n_p=31)
    with pytest.raises(TailNotResolved):
        solve_solitary(flow, L=6.0, n_q=161)


def test_wavefield_enforces_bed_condition():
    flow = _irrotational_depth(1.5, n_p=31)
    q = np.linspace(-5, 5, 21)
    w = np.full((21, flow.n_p), 1e-3)
    with pytest.raises(ValueError):
        WaveField(StripGrid(q, flow.p, 5.0), flow, BoundaryCondition("decay"), w)


def test_wavefield_enforces_unidirectionality():
    flow = _irrotational_depth(1.5, n_p=31)
    q = np.linspace(-5, 5, 21)
    grid = StripGrid(q, flow.p, 5.0)
    w = _smooth_test_field(grid, flow, -3.0)  # w_p < -H_p near the bed
    with pytest.raises(UnidirectionalityViolation):
        WaveField(grid, flow, BoundaryCondition("decay"), w)


def test_probe_zero_seed_is_trivial():
    flow = _irrotational_depth(2.0, n_p=31)
    rep = subcritical_probe(flow, 0.0, n_q=201, L=15.0)
    assert rep.outcome == "converged-to-trivial"


def test_probe_requires_subcritical():
    flow = _irrotational_depth(0.8, n_p=31)
    with pytest.raises(DomainError):
        subcritical_probe(flow, 0.05, n_q=201, L=15.0)


def test_ringing_wavelength_detector():
    # the tail detector must read off the wavelength of a boundary-to-
    # boundary oscillation, the signature of generalized solitary waves
    from waveforce.solver import _crossing_wavelength

    tau0 = 3.7
    q = np.linspace(-20, 20, 2001)
    eta = 1e-3 * np.cos(tau0 * q)
    lam = _crossing_wavelength(q, eta, 20.0)
    assert abs(lam - 2 * np.pi / tau0) < 0.01 * (2 * np.pi / tau0)


def test_probe_never_finds_decaying_nontrivial():
    flow = _irrotational_depth(2.0, n_p=41)
    for a0 in (0.02, 0.05, 0.1):
        rep = subcritical_probe(flow, a0, n_q=401, L=20.0)
        if rep.outcome == "converged-to-nontrivial":
            assert not rep.tail_decays
            assert abs(rep.tail_wavelength - rep.linear_wavelength) <= (
                0.1 * rep.linear_wavelength
            )
        else:
            assert rep.outcome in ("converged-to-trivial", "diverged")
