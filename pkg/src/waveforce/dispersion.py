"""Dispersion of linear waves on a background shear flow.

Linearizing the height-function problem about a background flow and
separating variables leads to the weighted Sturm-Liouville problem

    -(phi_p / H_p^3)_p = lambda phi / H_p      on 0 < p < 1,
    phi(0) = 0,
    -phi_p / H_p^3 + phi = 0                   at p = 1.

Its eigenvalues are simple and increasing; the j-th eigenfunction has
exactly j interior zeros.  The lowest eigenvalue is negative exactly
when the flow is subcritical (F < 1), in which case sqrt(-lambda_0) is
the wavenumber of the bounded linear modes and lambda_1 > 0.

The discrete eigenproblem uses a flux-based second-order scheme whose
Robin closure keeps the matrix pencil symmetric definite; the lowest
eigenvalue is cross-checked by Pruefer-angle shooting plus bisection,
which integrates the exact coefficient formulas rather than the grid
values and is therefore an independent estimate.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .errors import DomainError, InvariantViolation, SolverError
from .fdiff import d1
from .quadrature import cumulative, trapezoid_weights


@dataclass(frozen=True)
class SLSpectrum:
    """Lowest eigenpairs of the dispersion problem on a flow's grid.

    Eigenfunctions have unit norm in L^2(0,1; H_p^{-1}) and positive
    slope at the bed.  tau0 is sqrt(-lambda_0) when lambda_0 < 0 and
    None otherwise.
    """

    flow: object = field(repr=False)
    lambdas: np.ndarray
    phis: np.ndarray = field(repr=False)
    zero_counts: np.ndarray
    lambda0_shooting: float

    @property
    def tau0(self):
        lam0 = self.lambdas[0]
        return float(np.sqrt(-lam0)) if lam0 < 0.0 else None


def _pencil(flow):
    """Tridiagonal stiffness and diagonal mass for the unknowns p_1..p_1."""
    n = flow.n_p
    dp = flow.p[1] - flow.p[0]
    a = 1.0 / flow.H_p ** 3
    a_mid = 0.5 * (a[:-1] + a[1:])
    w = trapezoid_weights(n, dp)

    diag = np.empty(n - 1)
    diag[:-1] = (a_mid[:-1] + a_mid[1:]) / dp
    diag[-1] = a_mid[-1] / dp - 1.0  # Robin flux at the surface
    off = -a_mid[1:] / dp
    mass = w[1:] / flow.H_p[1:]
    return diag, off, mass


def sl_spectrum(flow, n_modes=6, shoot_check=True):
    """Lowest n_modes eigenpairs of the dispersion problem.

    The generalized symmetric-definite pencil is reduced to a standard
    symmetric tridiagonal problem through the diagonal mass matrix, so
    the returned eigenfunctions are exactly orthonormal in the weighted
    discrete inner product.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    diag, off, mass = _pencil(flow)
    rm = 1.0 / np.sqrt(mass)
    c_diag = diag * rm * rm
    c_off = off * rm[:-1] * rm[1:]
    try:
        lam, Y = eigh_tridiagonal(
            c_diag, c_off, select="i", select_range=(0, n_modes - 1)
        )
    except Exception as exc:  # pragma: no cover - LAPACK failure is exotic
        raise SolverError("tridiagonal eigensolver failed: %s" % exc) from exc

    n = flow.n_p
    phis = np.zeros((n_modes, n))
    for j in range(n_modes):
        phi = Y[:, j] * rm
        if phi[0] < 0.0:
            phi = -phi
        phis[j, 1:] = phi

    zero_counts = np.array([_interior_zeros(phis[j]) for j in range(n_modes)])

    lam0_shoot = np.nan
    if shoot_check:
        lam0_shoot = pruefer_lowest(flow, lam[0])
        if abs(lam0_shoot - lam[0]) > 1e-2 * max(1.0, abs(lam[0])):
            raise SolverError(
                "matrix and shooting estimates of lambda_0 disagree: "
                "%.8g vs %.8g" % (lam[0], lam0_shoot)
            )
    return SLSpectrum(flow, lam, phis, zero_counts, float(lam0_shoot))


def _interior_zeros(phi, guard=1e-12):
    """Sign changes of the grid values on the open interval (0, 1)."""
    v = phi[1:-1]
    s = np.sign(v[np.abs(v) > guard])
    return int(np.sum(s[1:] != s[:-1]))


def _pruefer_theta_end(lam, Hp3, invHp, h):
    """Integrate the Pruefer angle ODE theta' = H_p^3 cos^2 + lam sin^2 / H_p.

    Hp3 and invHp are sampled at the 2n+1 half-step points of an RK4
    sweep from p=0 to p=1; theta(0)=0.
    """
    theta = 0.0
    n = (Hp3.size - 1) // 2
    for k in range(n):
        a0, am, a1 = Hp3[2 * k], Hp3[2 * k + 1], Hp3[2 * k + 2]
        b0, bm, b1 = invHp[2 * k], invHp[2 * k + 1], invHp[2 * k + 2]

        def rhs(t, A, B):
            c = np.cos(t)
            s = np.sin(t)
            return A * c * c + lam * B * s * s

        k1 = rhs(theta, a0, b0)
        k2 = rhs(theta + 0.5 * h * k1, am, bm)
        k3 = rhs(theta + 0.5 * h * k2, am, bm)
        k4 = rhs(theta + h * k3, a1, b1)
        theta += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return theta


def pruefer_lowest(flow, lam_guess, n_steps=800):
    """Lowest eigenvalue by shooting on the Pruefer angle.

    The Robin condition pins theta(1) = pi/4 for the ground state; the
    end angle is strictly increasing in lambda, so bracketing around the
    guess and root-finding is robust.
    """
    ps = np.linspace(0.0, 1.0, 2 * n_steps + 1)
    Hp = flow.H_p_at(ps)
    Hp3 = Hp ** 3
    invHp = 1.0 / Hp
    h = 1.0 / n_steps
    target = np.pi / 4.0

    def gap(lam):
        return _pruefer_theta_end(lam, Hp3, invHp, h) - target

    span = max(1.0, 0.5 * abs(lam_guess))
    lo, hi = lam_guess - span, lam_guess + span
    for _ in range(60):
        if gap(lo) < 0.0:
            break
        lo -= span
        span *= 2.0
    else:
        raise SolverError("no lower shooting bracket for lambda_0")
    span = max(1.0, 0.5 * abs(lam_guess))
    for _ in range(60):
        if gap(hi) > 0.0:
            break
        hi += span
        span *= 2.0
    else:
        raise SolverError("no upper shooting bracket for lambda_0")
    return float(brentq(gap, lo, hi, xtol=1e-12 * max(1.0, abs(lam_guess)), rtol=1e-14))


def criticality_check(flow, spectrum, boundary_tol=1e-5):
    """Check that lambda_0 < 0 exactly when F < 1 (and then lambda_1 > 0).

    Returns a report dict; raises InvariantViolation when the
    biconditional fails away from the critical boundary.
    """
    lam = spectrum.lambdas
    subcritical = flow.F < 1.0
    boundary = abs(lam[0]) < boundary_tol or abs(flow.F - 1.0) < boundary_tol
    report = {
        "F": flow.F,
        "lambda0": float(lam[0]),
        "lambda1": float(lam[1]) if lam.size > 1 else None,
        "subcritical": bool(subcritical),
        "lambda0_negative": bool(lam[0] < 0.0),
        "lambda1_positive": bool(lam[1] > 0.0) if lam.size > 1 else None,
        "boundary_case": bool(boundary),
    }
    if not boundary:
        if subcritical != (lam[0] < 0.0):
            raise InvariantViolation(
                "criticality biconditional failed: F=%.10g, lambda0=%.10g"
                % (flow.F, lam[0])
            )
        if subcritical and lam.size > 1 and not lam[1] > 0.0:
            raise InvariantViolation(
                "subcritical flow with lambda1=%.10g <= 0" % lam[1]
            )
    return report


def sl_integral_identity(flow, phi, lam, p=None):
    """Both sides of the eigenpair integral identity.

    For an eigenpair with lambda = tau^2 > 0,

        int_0^p (phi_p^2/H_p^3 - tau^2 phi^2/H_p) dp'
            = phi(p) phi_p(p) / H_p^3(p),

    which follows from multiplying the equation by phi and integrating.
    Returns (lhs, rhs) on the whole grid, or the pair of values at a
    single p when one is given.
    """
    if lam <= 0.0:
        raise DomainError("identity requires a positive eigenvalue, got %g" % lam)
    dp = flow.p[1] - flow.p[0]
    phi = np.asarray(phi, dtype=float)
    phi_p = d1(phi, dp)
    integrand = phi_p ** 2 / flow.H_p ** 3 - lam * phi ** 2 / flow.H_p
    lhs = cumulative(integrand, dp)
    rhs = phi * phi_p / flow.H_p ** 3
    if p is None:
        return lhs, rhs
    i = int(round(float(p) / dp))
    return float(lhs[i]), float(rhs[i])
