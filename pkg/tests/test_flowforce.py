import numpy as np
import pytest

from waveforce.background import build_primitive, solve_background
from waveforce.dispersion import sl_spectrum
from waveforce.fdiff import interior_sup
from waveforce.flowforce import (
    background_flow_force,
    boundary_identity,
    diagnostics,
    elliptic_coefficients,
    elliptic_residuals,
    flow_force,
    flux_function,
    flux_q_identity,
    positivity_scan,
    resolved_wp_squared,
    wp_identities,
)
from waveforce.solver import BoundaryCondition, StripGrid, WaveField, solve_periodic

IRROT = build_primitive([0.0], kind="polynomial")


def _trivial_field(flow, n_q=41, L=8.0):
    q = np.linspace(-L, L, n_q)
    grid = StripGrid(q, flow.p, L)
    return WaveField(grid, flow, BoundaryCondition("decay"),
                     np.zeros((n_q, flow.n_p)))


def test_background_flow_force_closed_forms():
    # d=1, R=1.5: integral of (1/2 - p + 3/2) dp = 3/2
    flow = solve_background(IRROT, s=0.5, n_p=2001)
    assert background_flow_force(flow) == pytest.approx(1.5, abs=1e-12)
    # d=2, R=2.125: integral of (1/8 - 2p + 2.125) * 2 dp = 5/2
    deep = solve_background(IRROT, s=0.125, n_p=2001)
    assert background_flow_force(deep) == pytest.approx(2.5, abs=1e-12)


def test_trivial_field_reproduces_background_force():
    flow = solve_background(IRROT, s=0.5, n_p=101)
    fieldv = _trivial_field(flow)
    S = flow_force(fieldv)
    Sp = background_flow_force(flow)
    assert np.max(np.abs(S - Sp)) < 1e-14
    assert flow_force(fieldv, j=3) == pytest.approx(Sp, abs=1e-14)


def test_trivial_field_has_zero_flux_and_residuals():
    flow = solve_background(IRROT, s=0.5, n_p=101)
    fieldv = _trivial_field(flow)
    Phi = flux_function(fieldv)
    assert np.max(np.abs(Phi)) == 0.0
    assert np.max(np.abs(flux_q_identity(fieldv, Phi))) == 0.0
    assert np.max(np.abs(boundary_identity(fieldv, Phi))) < 1e-14
    for r in wp_identities(fieldv, Phi):
        assert np.max(np.abs(r)) == 0.0
    inhom, hom = elliptic_residuals(fieldv, Phi)
    assert np.max(np.abs(inhom)) == 0.0 and np.max(np.abs(hom)) == 0.0
    min_val, _, sign_map = positivity_scan(Phi)
    assert min_val == 0.0 and not sign_map.any()


def test_columnwise_perturbation_gives_monotone_flux():
    flow = solve_background(IRROT, s=0.5, n_p=201)
    n_q = 21
    q = np.linspace(-4, 4, n_q)
    w = np.tile(0.05 * np.sin(np.pi * flow.p / 2.0), (n_q, 1))
    w[:, 0] = 0.0
    fieldv = WaveField(StripGrid(q, flow.p, 4.0), flow,
                       BoundaryCondition("decay"), w)
    Phi = flux_function(fieldv)
    assert np.all(np.diff(Phi[10]) >= -1e-16)
    assert np.max(np.abs(flux_q_identity(fieldv, Phi))) < 1e-13


def test_solitary_flow_force_constant(solitary_f11_fine):
    diag = diagnostics(solitary_f11_fine)
    assert diag.S_variation < 1e-6
    assert abs(diag.S - diag.S_plus) < 1e-6 * abs(diag.S)


def test_random_field_flow_force_not_constant(random_smooth_field):
    S = flow_force(random_smooth_field)
    assert (S.max() - S.min()) / abs(S.mean()) > 1e-2


def test_flux_q_identity_negative_control(random_smooth_field):
    Phi = flux_function(random_smooth_field)
    resid = flux_q_identity(random_smooth_field, Phi)
    assert interior_sup(resid) > 1e-3


def test_solitary_positivity(solitary_f11_fine):
    diag = diagnostics(solitary_f11_fine)
    assert diag.min_Phi_interior >= -1e-8
    assert not diag.sign_change_map.any()


def test_solitary_boundary_identity(solitary_f11_fine):
    diag = diagnostics(solitary_f11_fine)
    # solitary form: Phi(q,1) = eta^2 with S = S_plus
    assert np.max(np.abs(diag.bc_residual)) < 5e-6


def test_periodic_boundary_identity_with_offset():
    flow = solve_background(IRROT, s=0.125, n_p=101)
    wave = solve_periodic(flow, amplitude=5e-3, n_q=128)
    Phi = flux_function(wave)
    S = float(np.mean(flow_force(wave)))
    Sp = background_flow_force(wave.flow)
    resid = boundary_identity(wave, Phi, S=S, S_plus=Sp)
    naive = boundary_identity(wave, Phi, assume_equal=True)
    # cumulative-trapezoid floor for the top value of Phi at n_p=101
    assert np.max(np.abs(resid)) < 5e-7
    # the 2(S - S_plus) constant genuinely matters for periodic waves
    assert np.max(np.abs(naive)) > 10.0 * np.max(np.abs(resid))


def test_resolved_wp_squared_nonnegative(solitary_f11):
    Phi = flux_function(solitary_f11)
    wp2 = resolved_wp_squared(solitary_f11, Phi)
    assert np.min(wp2) >= -1e-12


def test_elliptic_coefficients_bounded(solitary_f11):
    Phi = flux_function(solitary_f11)
    coeffs = elliptic_coefficients(solitary_f11, Phi)
    hq_sup = np.max(np.abs(solitary_f11.h_q))
    hp_sup = np.max(solitary_f11.h_p)
    assert np.max(np.abs(coeffs.B1)) <= (1.0 + hq_sup) * hp_sup + 1e-12
    assert np.min(coeffs.B2) >= 0.0
    assert np.max(coeffs.B2) <= 2.0 + hq_sup + 1e-12


def test_irrotational_elliptic_forms_coincide(solitary_f11):
    # H_pp = 0 makes the source and first-order terms vanish identically
    Phi = flux_function(solitary_f11)
    inhom, hom = elliptic_residuals(solitary_f11, Phi)
    assert np.max(np.abs(inhom - hom)) < 1e-14


def test_flux_reconstruction_from_q_identity(solitary_f11, solitary_f11_refined):
    # integrating the Phi_q identity from the quiescent right boundary
    # must reproduce the defining p-quadrature at discretization order
    from waveforce.flowforce import flux_from_q_identity

    gaps = []
    for lev, wave in enumerate((solitary_f11, solitary_f11_refined)):
        c = 2 * (2 ** lev)
        gap = flux_function(wave) - flux_from_q_identity(wave)
        gaps.append(float(np.max(np.abs(gap[c:-c, c:-c]))))
    assert gaps[0] < 1e-4
    assert gaps[0] / gaps[1] > 3.2


def test_rotational_identity_suite_second_order(rotational_wave_pair):
    base, fine = rotational_wave_pair
    sups = []
    for lev, wave in enumerate((base, fine)):
        diag = diagnostics(wave)
        c = 2 * (2 ** lev)  # matched physical collar
        sups.append([
            float(np.max(np.abs(diag.Phi_q_residual[c:-c, c:-c]))),
            float(np.max(np.abs(diag.bc_residual[c:-c]))),
            float(np.max(np.abs(diag.wp_residuals[0][c:-c, c:-c]))),
            float(np.max(np.abs(diag.wp_residuals[1][c:-c, c:-c]))),
            float(np.max(np.abs(diag.wp_residuals[2][c:-c, c:-c]))),
            float(np.max(np.abs(diag.elliptic_residual_inhom[c:-c, c:-c]))),
            float(np.max(np.abs(diag.elliptic_residual_hom[c:-c, c:-c]))),
        ])
    ratios = np.array(sups[0]) / np.array(sups[1])
    assert np.all(ratios >= 3.5) and np.all(ratios <= 4.5)


def test_synthetic_excited_mode_flux_changes_sign():
    # a standing-wave tail built from the sign-changing first excited
    # eigenfunction: its flux profile changes sign within some columns,
    # which is the mechanism violating positivity for slow waves
    flow = solve_background(IRROT, s=0.125, n_p=201)
    spec = sl_spectrum(flow, n_modes=2, shoot_check=False)
    tau1 = np.sqrt(spec.lambdas[1])
    q = np.linspace(-6.0, 6.0, 241)
    w = 1e-3 * np.sin(tau1 * q)[:, None] * spec.phis[1][None, :]
    w[:, 0] = 0.0
    fieldv = WaveField(StripGrid(q, flow.p, 6.0), flow,
                       BoundaryCondition("decay"), w)
    Phi = flux_function(fieldv)
    _, _, sign_map = positivity_scan(Phi)
    assert sign_map.any()
