"""Acceptance suite: one test per release criterion.

Each test prints a single PASS/FAIL line (run with `pytest -s` to see
them); tolerances are fixed here and nowhere else.  Criteria that need
converged waves reuse the session fixtures from conftest.
"""

import filecmp
import os
from contextlib import contextmanager

import numpy as np
import pytest
from scipy.optimize import brentq

from waveforce.asymptotics import decay_rate_fit, flux_tail_expansion
from waveforce.background import (
    build_primitive,
    critical_parameter,
    parameter_for_froude,
    solve_background,
)
from waveforce.cli import RunConfig, run_pipeline
from waveforce.dispersion import sl_spectrum
from waveforce.flowforce import diagnostics, flow_force, flux_function
from waveforce.physical import physical_laplacian_sup
from waveforce.solver import subcritical_probe

IRROT = build_primitive([0.0], kind="polynomial")
ROT03 = build_primitive([0.3], kind="polynomial")


@contextmanager
def _criterion(number, title):
    try:
        yield
    except BaseException:
        print("ACCEPTANCE %02d FAIL: %s" % (number, title))
        raise
    print("ACCEPTANCE %02d PASS: %s" % (number, title))


def test_criterion_01_background_closed_forms():
    with _criterion(1, "irrotational closed forms and critical parameters"):
        for d in (0.8, 1.0, 1.6, 2.0):
            flow = solve_background(IRROT, s=1.0 / (2 * d * d), n_p=2001)
            assert abs(flow.F - d ** -1.5) < 1e-10
        s_c = critical_parameter(IRROT, n_p=2001)
        assert abs(s_c - 0.5) < 1e-10
        flow_c = solve_background(IRROT, s=s_c, n_p=2001)
        assert abs(flow_c.R - 1.5) < 1e-10
        assert abs(flow_c.F - 1.0) < 1e-10


def test_criterion_02_dispersion_oracle():
    with _criterion(2, "eigenvalues against scalar root-finding oracles"):
        kappa = brentq(lambda k: np.tanh(k) - k / 8.0, 1e-8, 40.0, xtol=1e-14)
        lam0_exact = -((kappa / 2.0) ** 2)
        deep = solve_background(IRROT, s=0.125, n_p=2001)
        spec_deep = sl_spectrum(deep, n_modes=6)
        assert abs(spec_deep.lambdas[0] - lam0_exact) < 1e-5 * abs(lam0_exact)

        k1 = brentq(lambda k: np.tan(k) - k, np.pi + 1e-9,
                    1.5 * np.pi - 1e-9, xtol=1e-14)
        lam1_exact = k1 ** 2
        unit = solve_background(IRROT, s=0.5, n_p=2001)
        spec_unit = sl_spectrum(unit, n_modes=6)
        assert abs(spec_unit.lambdas[1] - lam1_exact) < 1e-5 * lam1_exact

        for spec in (spec_deep, spec_unit):
            assert list(spec.zero_counts) == [0, 1, 2, 3, 4, 5]


def test_criterion_03_criticality_biconditional():
    # lambda_0 < 0 exactly when F < 1, i.e. sign(lambda_0) = sign(F - 1)
    with _criterion(3, "lambda_0 < 0 iff F < 1 across vorticity sweep"):
        profiles = {
            "zero": IRROT,
            "pos": ROT03,
            "neg": build_primitive([-0.3], kind="polynomial"),
            "linear": build_primitive([0.0, 1.0], kind="polynomial"),
        }
        for name, prof in profiles.items():
            s_c = critical_parameter(prof, n_p=1001)
            for s in s_c * np.linspace(0.75, 1.30, 20):
                flow = solve_background(prof, s, n_p=1001)
                spec = sl_spectrum(flow, n_modes=2, shoot_check=False)
                assert np.sign(spec.lambdas[0]) == np.sign(flow.F - 1.0), (
                    name, s, flow.F, spec.lambdas[0],
                )
                if flow.F < 1.0:
                    assert spec.lambdas[1] > 0.0


def test_criterion_04_solitary_wave_reproduction(solitary_f11):
    with _criterion(4, "supercritical solitary wave at F = 1.1"):
        wave = solitary_f11
        assert wave.newton.converged
        assert wave.newton.residual_inf < 1e-11
        a0 = (wave.flow.F ** 2 - 1.0) * wave.flow.d
        assert 0.7 * a0 <= wave.amplitude <= 1.3 * a0
        eta = wave.eta
        n_half = (eta.size - 1) // 2
        assert np.all(eta[1:-1] > 0.0)
        assert np.allclose(eta, eta[::-1], rtol=0, atol=1e-15)
        assert np.all(np.diff(eta[n_half:]) < 0.0)


def test_criterion_05_flow_force_invariance(solitary_f11_fine,
                                            random_smooth_field):
    with _criterion(5, "flow force constant on solutions, not off them"):
        diag = diagnostics(solitary_f11_fine)
        assert diag.S_variation < 1e-6
        S = flow_force(random_smooth_field)
        assert (S.max() - S.min()) / abs(S.mean()) > 1e-2


def test_criterion_06_identity_suite_second_order(rotational_wave_pair):
    with _criterion(6, "flux identities converge at second order"):
        sups = []
        for lev, wave in enumerate(rotational_wave_pair):
            diag = diagnostics(wave)
            c = 2 * (2 ** lev)  # identical physical collar on both grids
            sups.append(np.array([
                np.max(np.abs(diag.Phi_q_residual[c:-c, c:-c])),
                np.max(np.abs(diag.bc_residual[c:-c])),
                np.max(np.abs(diag.wp_residuals[0][c:-c, c:-c])),
                np.max(np.abs(diag.wp_residuals[1][c:-c, c:-c])),
                np.max(np.abs(diag.wp_residuals[2][c:-c, c:-c])),
                np.max(np.abs(diag.elliptic_residual_inhom[c:-c, c:-c])),
                np.max(np.abs(diag.elliptic_residual_hom[c:-c, c:-c])),
            ]))
        ratios = sups[0] / sups[1]
        assert np.all(ratios >= 3.5), ratios
        assert np.all(ratios <= 4.5), ratios


def test_criterion_07_flux_positivity(solitary_f11_fine):
    with _criterion(7, "flux function positive for supercritical waves"):
        diag = diagnostics(solitary_f11_fine)
        assert diag.min_Phi_interior >= -1e-8
        assert not diag.sign_change_map.any()


def test_criterion_08_irrotational_harmonicity(solitary_f11,
                                               solitary_f11_refined):
    with _criterion(8, "physical-variable Laplacian of Phi at order 2"):
        sups = [
            physical_laplacian_sup(w, flux_function(w), collar=3 * (2 ** lev))
            for lev, w in enumerate((solitary_f11, solitary_f11_refined))
        ]
        assert sups[0] / sups[1] >= 3.25, sups


def test_criterion_09_tail_asymptotics(solitary_f11_fine):
    with _criterion(9, "exponential tails match the dispersion problem"):
        wave = solitary_f11_fine
        spec = sl_spectrum(wave.flow, n_modes=1, shoot_check=False)
        tau_sl = float(np.sqrt(spec.lambdas[0]))
        fit = decay_rate_fit(wave)
        assert abs(fit.tau - tau_sl) <= 0.02 * tau_sl
        phi_hat = spec.phis[0] / spec.phis[0][-1]
        assert np.max(np.abs(fit.profile - phi_hat)) <= 0.02
        report = flux_tail_expansion(wave, flux_function(wave), fit, spec)
        assert report["sup_rel_deviation"] <= 0.10
        assert report["profile_nonnegative"]


def test_criterion_10_nonexistence_probe():
    with _criterion(10, "no decaying subcritical wave is ever produced"):
        cases = [
            (solve_background(IRROT, s=0.125, n_p=41), 501, 20.0),
            (solve_background(ROT03, parameter_for_froude(ROT03, 0.5), n_p=41),
             801, 20.0),
        ]
        for flow, n_q, L in cases:
            assert flow.F < 1.0
            for a0 in (0.02, 0.05, 0.1):
                rep = subcritical_probe(flow, a0, n_q=n_q, L=L)
                if rep.outcome == "converged-to-nontrivial":
                    assert not rep.tail_decays, (flow.F, a0)
                    assert abs(rep.tail_wavelength - rep.linear_wavelength) <= (
                        0.1 * rep.linear_wavelength
                    ), (flow.F, a0)
                else:
                    assert rep.outcome in ("converged-to-trivial", "diverged")


ACCEPT_INI = """\
[background]
vorticity.kind = polynomial
vorticity.values = 0.0
s = 0.56775406350100199
n_p = 1001

[solver]
bc = even-symmetric
n_p = 31
n_q = 401
L = 25.0

[diagnostics]
negative_control = true

[probe]
subcritical = false

[output]
seed = 11
"""


def test_criterion_11_determinism(tmp_path):
    with _criterion(11, "byte-identical reruns of the full pipeline"):
        cfg = RunConfig.from_ini(ACCEPT_INI)
        a, b = tmp_path / "a", tmp_path / "b"
        ma = run_pipeline(cfg, out_dir=str(a))
        mb = run_pipeline(cfg, out_dir=str(b))
        assert ma.ok and mb.ok
        names = sorted(os.listdir(a))
        assert names == sorted(os.listdir(b))
        for name in names:
            if name == "manifest.json":  # wall-clock times differ by design
                continue
            assert filecmp.cmp(a / name, b / name, shallow=False), name
