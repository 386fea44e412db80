"""Flow force and the flow-force flux function.

The flow force

    S(q) = int_0^1 [ (1 - h_q^2)/(2 h_p^2) - h - Omega(p) + Omega(1) + R ] h_p dp

is constant in q for solutions of the height equation; S_plus is its
value on the background.  The flux function

    Phi(q, p) = int_0^p [ w_p^2/(h_p H_p^2) - w_q^2/h_p ] dp'

measures the flow-force surplus below the streamline p and vanishes on
the bed.  On solutions it satisfies a family of pointwise identities:

  * Phi_q = -w_q ((1 + w_q^2)/h_p^2 - 1/H_p^2)
  * Phi(q, 1) = w(q, 1)^2 + 2 (S - S_plus)
  * w_p^2 = H_p^2 w_q^2 + H_p^2 h_p Phi_p
  * w_p w_q = (H_p h_p / 2)(h_p Phi_q - h_q Phi_p)
  * w_p^2 = (H_p^2 h_p / 2)(B1 Phi_q + B2 Phi_p)

and a linear elliptic equation in both an inhomogeneous form (source
proportional to w_p^2) and a homogeneous form with bounded first-order
coefficients, which is what makes the maximum principle applicable.
Everything here evaluates those identities on discrete fields and
reports residual grids; derivatives of Phi are centered differences on
the Phi grid.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import UnidirectionalityViolation
from .fdiff import d1, d2
from .quadrature import cumulative, integrate

DEGENERATE_FLOOR = 1e-14


def _column_rule(n_p):
    # Simpson needs an even interval count; solver grids are odd-sized
    return "simpson" if n_p % 2 == 1 else "trapezoid"


def _phi_integrand(fieldv):
    Hp = fieldv.flow.H_p[None, :]
    hp = fieldv.h_p
    if np.min(hp) <= 0.0:
        raise UnidirectionalityViolation("h_p <= 0 in flux integrand")
    return fieldv.w_p ** 2 / (hp * Hp ** 2) - fieldv.w_q ** 2 / hp


def flow_force(fieldv, j=None, rule=None):
    """Flow force per q-column (all columns, or a single index j)."""
    flow = fieldv.flow
    hp = fieldv.h_p
    if np.min(hp) <= 0.0:
        raise UnidirectionalityViolation("h_p <= 0 in flow force")
    rule = rule or _column_rule(flow.n_p)
    Om = flow.Omega(flow.p)[None, :]
    h = fieldv.h
    integrand = (
        (1.0 - fieldv.h_q ** 2) / (2.0 * hp ** 2) - h - Om + Om[0, -1] + flow.R
    ) * hp
    dp = flow.p[1] - flow.p[0]
    S = integrate(integrand, dp, rule, axis=1)
    return float(S[j]) if j is not None else S


def background_flow_force(flow, rule=None):
    """Flow force of the background state (h = H)."""
    rule = rule or _column_rule(flow.n_p)
    Om = flow.Omega(flow.p)
    integrand = (
        1.0 / (2.0 * flow.H_p ** 2) - flow.H - Om + Om[-1] + flow.R
    ) * flow.H_p
    dp = flow.p[1] - flow.p[0]
    return float(integrate(integrand, dp, rule))


def flux_function(fieldv):
    """Phi(q, p) by cumulative column quadrature; Phi(., 0) = 0."""
    dp = fieldv.grid.dp
    return cumulative(_phi_integrand(fieldv), dp, axis=1)


def flux_q_identity(fieldv, Phi):
    """Residual of the first-derivative identity for Phi_q."""
    Hp = fieldv.flow.H_p[None, :]
    hp = fieldv.h_p
    Phi_q = fieldv._dq(Phi)
    return Phi_q + fieldv.w_q * ((1.0 + fieldv.w_q ** 2) / hp ** 2 - 1.0 / Hp ** 2)


def flux_from_q_identity(fieldv):
    """Phi rebuilt by integrating its q-derivative identity from q = +L.

    For decaying fields Phi vanishes at the right truncation boundary,
    so integrating -w_q ((1+w_q^2)/h_p^2 - 1/H_p^2) backwards in q
    recovers the flux independently of the defining p-quadrature.
    """
    Hp = fieldv.flow.H_p[None, :]
    hp = fieldv.h_p
    Phi_q = -fieldv.w_q * ((1.0 + fieldv.w_q ** 2) / hp ** 2 - 1.0 / Hp ** 2)
    dq = fieldv.grid.dq
    tail_to_q = cumulative(Phi_q[::-1], dq, axis=0)[::-1]
    return -tail_to_q


def boundary_identity(fieldv, Phi, S=None, S_plus=None, assume_equal=False):
    """Residual of the surface condition Phi = w^2 + 2(S - S_plus) on p=1.

    With assume_equal=True the flow-force difference is dropped, which
    is the exact statement for decaying (solitary-type) fields.
    """
    eta = fieldv.w[:, -1]
    if assume_equal:
        return Phi[:, -1] - eta ** 2
    if S_plus is None:
        S_plus = background_flow_force(fieldv.flow)
    if S is None:
        S = float(np.mean(flow_force(fieldv)))
    return Phi[:, -1] - eta ** 2 - 2.0 * (S - S_plus)


@dataclass(frozen=True)
class EllipticCoefficients:
    """Bounded coefficients closing the homogeneous elliptic equation.

    B1 and B2 resolve w_p^2 as a combination of Phi_q and Phi_p; they
    contain 0/0 where both Phi_p and the cross-combination vanish, and
    are set to the (0, 1) limit there with the cell flagged.
    """

    B1: np.ndarray = field(repr=False)
    B2: np.ndarray = field(repr=False)
    b1: np.ndarray = field(repr=False)
    b2: np.ndarray = field(repr=False)
    degenerate: np.ndarray = field(repr=False)


def elliptic_coefficients(fieldv, Phi):
    """B1, B2 and the first-order coefficients b1, b2 of the closure.

    The combination B1 Phi_q + B2 Phi_p reproduces
    Phi_p + sqrt(Phi_p^2 + (Phi_p h_q - Phi_q h_p)^2) algebraically
    wherever the common denominator |Phi_p| + |Phi_p h_q - Phi_q h_p|
    is nonzero.
    """
    Hp = fieldv.flow.H_p[None, :]
    Hpp = fieldv.flow.H_pp[None, :]
    hp, hq = fieldv.h_p, fieldv.h_q
    Phi_p = d1(Phi, fieldv.grid.dp, axis=1)
    Phi_q = fieldv._dq(Phi)
    cross = Phi_p * hq - Phi_q * hp
    root = np.sqrt(Phi_p ** 2 + cross ** 2)
    den = np.abs(Phi_p) + np.abs(cross)
    degenerate = den < DEGENERATE_FLOOR
    t = np.where(degenerate, 0.0, root / np.where(degenerate, 1.0, den))
    B1 = np.where(degenerate, 0.0, -np.sign(cross) * t * hp)
    B2 = np.where(degenerate, 1.0, 1.0 + (np.sign(Phi_p) + np.sign(cross) * hq) * t)
    b1 = -2.0 * (Hpp / (Hp ** 2 * hp)) * B1
    b2 = -(
        Hpp * (fieldv.w_p - Hp) / (Hp ** 3 * hp)
        + 2.0 * (Hpp / (Hp ** 2 * hp)) * B2
    )
    return EllipticCoefficients(B1, B2, b1, b2, degenerate)


def wp_identities(fieldv, Phi, coeffs=None):
    """Residual grids of the three slope-elimination identities.

    Returns (r_slope, r_mixed, r_resolved): the linear-combination
    identities for w_p^2 and w_p w_q, and the resolved form through the
    bounded coefficients B1, B2.
    """
    Hp = fieldv.flow.H_p[None, :]
    hp, hq = fieldv.h_p, fieldv.h_q
    Phi_p = d1(Phi, fieldv.grid.dp, axis=1)
    Phi_q = fieldv._dq(Phi)
    wp, wq = fieldv.w_p, fieldv.w_q
    r_slope = wp ** 2 - Hp ** 2 * wq ** 2 - Hp ** 2 * hp * Phi_p
    r_mixed = wp * wq - 0.5 * Hp * hp * (hp * Phi_q - hq * Phi_p)
    if coeffs is None:
        coeffs = elliptic_coefficients(fieldv, Phi)
    resolved = 0.5 * Hp ** 2 * hp * (coeffs.B1 * Phi_q + coeffs.B2 * Phi_p)
    r_resolved = wp ** 2 - resolved
    return r_slope, r_mixed, r_resolved


def resolved_wp_squared(fieldv, Phi, coeffs=None):
    """w_p^2 recovered from Phi alone via the resolved identity."""
    Hp = fieldv.flow.H_p[None, :]
    hp = fieldv.h_p
    Phi_p = d1(Phi, fieldv.grid.dp, axis=1)
    Phi_q = fieldv._dq(Phi)
    if coeffs is None:
        coeffs = elliptic_coefficients(fieldv, Phi)
    return 0.5 * Hp ** 2 * hp * (coeffs.B1 * Phi_q + coeffs.B2 * Phi_p)


def elliptic_residuals(fieldv, Phi, coeffs=None):
    """Residual grids of both elliptic forms satisfied by Phi.

    Returns (inhomogeneous, homogeneous).  The second-order principal
    part is shared; the inhomogeneous form carries the w_p^2 source and
    the homogeneous form the b1, b2 first-order terms.
    """
    Hp = fieldv.flow.H_p[None, :]
    Hpp = fieldv.flow.H_pp[None, :]
    hp, hq = fieldv.h_p, fieldv.h_q
    dp, dq = fieldv.grid.dp, fieldv.grid.dq
    Phi_p = d1(Phi, dp, axis=1)
    Phi_q = fieldv._dq(Phi)
    Phi_pp = d2(Phi, dp, axis=1)
    Phi_qq = fieldv._dqq(Phi)
    Phi_qp = d1(Phi_q, dp, axis=1)
    principal = (
        (1.0 + hq ** 2) / hp ** 2 * Phi_pp - 2.0 * (hq / hp) * Phi_qp + Phi_qq
    )
    inhom = (
        principal
        - (Hpp * (fieldv.w_p - Hp) / (Hp ** 3 * hp)) * Phi_p
        - 4.0 * Hpp * fieldv.w_p ** 2 / (Hp ** 4 * hp ** 2)
    )
    if coeffs is None:
        coeffs = elliptic_coefficients(fieldv, Phi)
    hom = principal + coeffs.b1 * Phi_q + coeffs.b2 * Phi_p
    return inhom, hom


def positivity_scan(Phi, guard=1e-12):
    """Minimum of Phi over the open strip and per-column sign changes."""
    core = Phi[1:-1, 1:-1]
    k = int(np.argmin(core))
    jmin, imin = np.unravel_index(k, core.shape)
    min_val = float(core[jmin, imin])
    cols = Phi[:, 1:]
    sign_change = (cols.min(axis=1) < -guard) & (cols.max(axis=1) > guard)
    return min_val, (int(jmin + 1), int(imin + 1)), sign_change


@dataclass(frozen=True)
class FluxDiagnostics:
    """All flow-force diagnostics of one wave field."""

    S_of_q: np.ndarray = field(repr=False)
    S_plus: float = 0.0
    Phi: np.ndarray = field(repr=False, default=None)
    Phi_q_residual: np.ndarray = field(repr=False, default=None)
    bc_residual: np.ndarray = field(repr=False, default=None)
    wp_residuals: tuple = field(repr=False, default=None)
    elliptic_residual_inhom: np.ndarray = field(repr=False, default=None)
    elliptic_residual_hom: np.ndarray = field(repr=False, default=None)
    coeffs: EllipticCoefficients = field(repr=False, default=None)
    min_Phi_interior: float = 0.0
    min_Phi_location: tuple = (0, 0)
    sign_change_map: np.ndarray = field(repr=False, default=None)

    @property
    def S(self):
        return float(np.mean(self.S_of_q))

    @property
    def S_variation(self):
        S = self.S_of_q
        scale = max(abs(float(np.mean(S))), 1e-300)
        return float((S.max() - S.min()) / scale)


def diagnostics(fieldv, assume_equal=None):
    """Assemble the full flux-diagnostics bundle for a wave field."""
    if assume_equal is None:
        assume_equal = fieldv.bc.kind in ("decay", "even-symmetric")
    S_of_q = flow_force(fieldv)
    S_plus = background_flow_force(fieldv.flow)
    Phi = flux_function(fieldv)
    coeffs = elliptic_coefficients(fieldv, Phi)
    inhom, hom = elliptic_residuals(fieldv, Phi, coeffs)
    min_phi, loc, sign_map = positivity_scan(Phi)
    return FluxDiagnostics(
        S_of_q=S_of_q,
        S_plus=S_plus,
        Phi=Phi,
        Phi_q_residual=flux_q_identity(fieldv, Phi),
        bc_residual=boundary_identity(fieldv, Phi, assume_equal=assume_equal),
        wp_residuals=wp_identities(fieldv, Phi, coeffs),
        elliptic_residual_inhom=inhom,
        elliptic_residual_hom=hom,
        coeffs=coeffs,
        min_Phi_interior=min_phi,
        min_Phi_location=loc,
        sign_change_map=sign_map,
    )
