#!/usr/bin/env python3
"""Hunting for subcritical solitary waves (and never finding one).

Runs Newton on subcritical flows from decaying sech^2 seeds of several
sizes.  The iteration either collapses to the trivial flow, diverges,
or lands on a truncation artifact that rings all the way to the
boundary at the linear wavelength 2 pi / tau_0; a decaying nontrivial
wave never appears.
"""

import numpy as np

from waveforce import (
    build_primitive,
    parameter_for_froude,
    sl_spectrum,
    solve_background,
    subcritical_probe,
)

cases = []
irrot = build_primitive([0.0], kind="polynomial")
cases.append(("irrotational d=2", solve_background(irrot, s=0.125, n_p=41),
              501, 20.0))
rot = build_primitive([0.3], kind="polynomial")
cases.append(("omega=0.3, F=0.5",
              solve_background(rot, parameter_for_froude(rot, 0.5), n_p=41),
              801, 20.0))

for name, flow, n_q, L in cases:
    spec = sl_spectrum(flow, n_modes=1, shoot_check=False)
    lam_wave = 2 * np.pi / spec.tau0
    print("%s  (F = %.4f, linear wavelength %.4f):" % (name, flow.F, lam_wave))
    for a0 in (0.01, 0.02, 0.05, 0.1, 0.2):
        rep = subcritical_probe(flow, a0, n_q=n_q, L=L)
        line = "  a0 = %-5g -> %-23s" % (a0, rep.outcome)
        if rep.outcome == "converged-to-nontrivial":
            line += " sup|w| = %.2e, tail decays: %s, ring wavelength %.4f" % (
                rep.sup_w, rep.tail_decays, rep.tail_wavelength)
        elif rep.outcome == "converged-to-trivial":
            line += " sup|w| = %.2e" % rep.sup_w
        print(line)
    print()

print("any decaying nontrivial outcome above would contradict the")
print("nonexistence of subcritical solitary waves; none is ever seen.")
