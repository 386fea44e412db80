"""Exponential tail asymptotics of decaying waves.

A decaying wave behaves like a e^{-tau q} phi(p) far from the crest,
where lambda = tau^2 is an eigenvalue of the dispersion problem and phi
the matching eigenfunction.  The decay rate and amplitude are fitted
log-linearly on the surface trace over a window away from both the
crest and the truncation boundary; the p-profile is validated rather
than jointly fitted.

The flux function inherits the squared tail

    Phi(q, p) = a^2 phi(p) phi_p(p) / H_p^3 e^{-2 tau q} + smaller,

whose p-profile is sign-definite exactly when phi is zero-free: this
is what distinguishes supercritical tails (ground mode, positive
profile) from the sign-changing profiles forced on hypothetical
subcritical waves.  The coefficient is pinned by the surface identity
Phi(q, 1) = eta(q)^2 together with the Robin condition
phi_p(1)/H_p^3(1) = phi(1), which fix the profile value at p = 1 to
phi(1)^2.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import FitError, TailNotResolved
from .fdiff import d1

DEFAULT_WINDOW = (0.4, 0.8)


@dataclass(frozen=True)
class DecayFit:
    """Fitted exponential tail of a decaying wave.

    The surface trace is modeled as a e^{-tau q}; profile is the
    normalized column shape at the window start (surface value 1), and
    remainder_norm is the sup over the window of w e^{tau q} minus the
    fitted leading term.
    """

    tau: float
    a: float
    fit_window: tuple
    profile: np.ndarray = field(repr=False)
    r_squared: float = 0.0
    remainder_norm: float = 0.0


def decay_rate_fit(fieldv, window=DEFAULT_WINDOW, min_r2=0.999):
    """Log-linear least-squares fit of the surface tail decay."""
    grid = fieldv.grid
    eta = fieldv.eta
    amp = np.max(np.abs(eta))
    tail = abs(eta[-2]) if grid.n_q > 2 else abs(eta[-1])
    if amp > 0 and tail > 1e-6 * amp:
        raise TailNotResolved(
            "surface tail %.3e not resolved relative to amplitude %.3e"
            % (tail, amp)
        )
    q1, q2 = window[0] * grid.L, window[1] * grid.L
    sel = (grid.q >= q1) & (grid.q <= q2)
    qs, es = grid.q[sel], eta[sel]
    if qs.size < 8:
        raise FitError("fit window [%g, %g] contains too few columns" % (q1, q2))
    if np.any(es <= 0.0):
        raise FitError("sign-changing surface tail; not a decaying elevation wave")
    if np.any(np.diff(es) >= 0.0):
        raise FitError("non-monotone surface tail on the fit window")
    slope, intercept = np.polyfit(qs, np.log(es), 1)
    tau = -float(slope)
    a = float(np.exp(intercept))
    pred = intercept + slope * qs
    ss_res = float(np.sum((np.log(es) - pred) ** 2))
    ss_tot = float(np.sum((np.log(es) - np.mean(np.log(es))) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    if r2 < min_r2:
        raise FitError("log-linear fit rejected: R^2 = %.6f" % r2)
    if (q2 - q1) * tau < 3.0:
        raise FitError("fit window shorter than 3/tau")
    j1 = int(np.argmax(sel))
    col = fieldv.w[j1]
    profile = col / col[-1]
    remainder = fieldv.w[sel] * np.exp(tau * qs)[:, None] - a * profile[None, :]
    remainder_norm = float(np.max(np.abs(remainder)))
    return DecayFit(tau, a, (float(q1), float(q2)), profile, r2, remainder_norm)


def classical_decay_crosscheck(flow, fit, tol=0.01):
    """Irrotational identity tan(tau d)/(tau d) = F^2 from the fitted rate."""
    x = fit.tau * flow.d
    lhs = float(np.tan(x) / x)
    rhs = float(flow.F ** 2)
    rel_gap = abs(lhs - rhs) / abs(rhs)
    return {
        "tan_ratio": lhs,
        "froude_squared": rhs,
        "rel_gap": rel_gap,
        "within_tol": bool(rel_gap < tol),
    }


def flux_tail_expansion(fieldv, Phi, fit, spectrum, mode=0, profile_guard=-1e-10):
    """Compare the flux tail against its eigenfunction prediction.

    Evaluates Phi e^{2 tau q} on the fit window against
    a^2 phi(p) phi_p(p) / H_p^3 with phi normalized by its surface
    value, and reports the sup deviation relative to the profile peak.
    For zero-free (ground-mode) tails the predicted profile must be
    nonnegative; sign changes are reported, not asserted, since they
    are exactly what rules out slow decaying waves.
    """
    flow = fieldv.flow
    grid = fieldv.grid
    q1, q2 = fit.fit_window
    sel = (grid.q >= q1) & (grid.q <= q2)
    phi_hat = spectrum.phis[mode] / spectrum.phis[mode][-1]
    phi_hat_p = d1(phi_hat, grid.dp)
    predicted = fit.a ** 2 * phi_hat * phi_hat_p / flow.H_p ** 3
    scaled = Phi[sel] * np.exp(2.0 * fit.tau * grid.q[sel])[:, None]
    peak = float(np.max(np.abs(predicted)))
    gap = float(np.max(np.abs(scaled - predicted[None, :])))
    sup_rel = gap / peak if peak > 0.0 else gap
    profile_min = float(np.min(phi_hat * phi_hat_p))
    return {
        "sup_rel_deviation": sup_rel,
        "predicted_profile": predicted,
        "profile_min": profile_min,
        "profile_nonnegative": bool(profile_min >= profile_guard),
        "window_columns": int(np.sum(sel)),
    }
