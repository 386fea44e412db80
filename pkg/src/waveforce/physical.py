"""Reconstruction of physical-variable fields from height solutions.

The semi-Lagrangian unknowns live on (q, p); the physical fields are
recovered through

    x = q,  y = h(q, p),  u - c = 1/h_p,  v = h_q/h_p,  psi = p,

with the pressure from Bernoulli's law.  Verification happens on a
Cartesian sub-grid: each column is re-sampled in y through cubic
splines (the streamline map y -> p is strictly monotone), which keeps
the interpolation error two orders below the finite-difference
stencils applied afterwards.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import UnidirectionalityViolation
from .fdiff import d1
from .flowforce import flow_force
from .quadrature import integrate


@dataclass(frozen=True)
class PhysicalField:
    """Physical fields sampled on the (q, p) tensor grid."""

    fieldv: object = field(repr=False)
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    rel_u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    P: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)

    @property
    def surface(self):
        return self.y[:, -1]


def reconstruct(fieldv):
    """Physical fields of a wave; P_atm is zero in these units."""
    flow = fieldv.flow
    hp = fieldv.h_p
    if np.min(hp) <= 0.0:
        raise UnidirectionalityViolation("cannot invert a stagnating column")
    hq = fieldv.h_q
    Om = flow.Omega(flow.p)[None, :]
    rel_u = 1.0 / hp
    v = hq / hp
    P = flow.R - 0.5 * (rel_u ** 2 + v ** 2) - fieldv.h - Om + Om[0, -1]
    return PhysicalField(
        fieldv=fieldv,
        x=fieldv.grid.q.copy(),
        y=fieldv.h,
        rel_u=rel_u,
        v=v,
        P=P,
        psi=np.tile(flow.p, (fieldv.grid.n_q, 1)),
    )


def _columns_to_cartesian(pf, names, n_y, y_frac=0.95):
    """Re-sample named fields onto x = q columns and a common y grid.

    The y grid spans [0, y_frac * min surface height] so every node of
    every column lies strictly inside the fluid.
    """
    fieldv = pf.fieldv
    p = fieldv.flow.p
    y_top = y_frac * float(np.min(pf.surface))
    ys = np.linspace(0.0, y_top, n_y)
    out = {name: np.empty((pf.x.size, n_y)) for name in names}
    for j in range(pf.x.size):
        p_of_y = CubicSpline(pf.y[j], p)
        ps = np.clip(p_of_y(ys), 0.0, 1.0)
        for name in names:
            out[name][j] = CubicSpline(p, getattr(pf, name)[j])(ps)
    return ys, out


def euler_residuals(pf, n_y=None, collar=2):
    """Sup norms of the divergence-form momentum residuals.

    Evaluates (P + (u-c)^2)_x + ((u-c) v)_y and
    ((u-c) v)_x + (P + v^2 + y)_y on a Cartesian sub-grid, plus the
    per-column mass flux, which must equal one.
    """
    fieldv = pf.fieldv
    if n_y is None:
        n_y = fieldv.flow.n_p
    ys, f = _columns_to_cartesian(pf, ("rel_u", "v", "P"), n_y)
    dx = float(pf.x[1] - pf.x[0])
    dy = float(ys[1] - ys[0])
    mom_x = f["P"] + f["rel_u"] ** 2
    shear = f["rel_u"] * f["v"]
    mom_y = f["P"] + f["v"] ** 2 + ys[None, :]
    r1 = d1(mom_x, dx, axis=0) + d1(shear, dy, axis=1)
    r2 = d1(shear, dx, axis=0) + d1(mom_y, dy, axis=1)
    c = collar
    mass = _mass_flux(pf)
    return {
        "momentum_x_sup": float(np.max(np.abs(r1[c:-c, c:-c]))),
        "momentum_y_sup": float(np.max(np.abs(r2[c:-c, c:-c]))),
        "mass_flux_error": float(np.max(np.abs(mass - 1.0))),
    }


def _mass_flux(pf, n_y=201):
    """Per-column integral of u - c over depth, by y-quadrature."""
    fieldv = pf.fieldv
    p = fieldv.flow.p
    n_y = n_y if n_y % 2 == 1 else n_y + 1
    flux = np.empty(pf.x.size)
    for j in range(pf.x.size):
        ys = np.linspace(0.0, pf.y[j, -1], n_y)
        p_of_y = CubicSpline(pf.y[j], p)
        vals = CubicSpline(p, pf.rel_u[j])(np.clip(p_of_y(ys), 0.0, 1.0))
        flux[j] = integrate(vals, ys[1] - ys[0], "simpson")
    return flux


def physical_flow_force(pf, j=None, n_y=201):
    """Flow force from the physical fields, column by column.

    Integrates P + (u-c)^2 over depth with the surface as the upper
    limit; must agree with the height-variable evaluation.
    """
    fieldv = pf.fieldv
    p = fieldv.flow.p
    n_y = n_y if n_y % 2 == 1 else n_y + 1
    cols = list(range(pf.x.size)) if j is None else [j]
    out = np.empty(len(cols))
    for k, jj in enumerate(cols):
        ys = np.linspace(0.0, pf.y[jj, -1], n_y)
        p_of_y = CubicSpline(pf.y[jj], p)
        ps = np.clip(p_of_y(ys), 0.0, 1.0)
        integrand = (
            CubicSpline(p, pf.P[jj])(ps) + CubicSpline(p, pf.rel_u[jj])(ps) ** 2
        )
        out[k] = integrate(integrand, ys[1] - ys[0], "simpson")
    return float(out[0]) if j is not None else out


def flow_force_consistency(fieldv, n_y=201):
    """Relative gap between physical and height-variable flow force."""
    pf = reconstruct(fieldv)
    j0 = int(np.argmin(np.abs(fieldv.grid.q)))
    s_phys = physical_flow_force(pf, j=j0, n_y=n_y)
    s_height = flow_force(fieldv, j=j0)
    return abs(s_phys - s_height) / abs(s_height)


def reconstructed_vorticity_error(pf, n_y=None, collar=2):
    """Sup gap between v_x - u_y on the Cartesian grid and omega(psi)."""
    fieldv = pf.fieldv
    flow = fieldv.flow
    if n_y is None:
        n_y = flow.n_p
    ys, f = _columns_to_cartesian(pf, ("rel_u", "v", "psi"), n_y)
    dx = float(pf.x[1] - pf.x[0])
    dy = float(ys[1] - ys[0])
    omega_grid = d1(f["v"], dx, axis=0) - d1(f["rel_u"], dy, axis=1)
    omega_expected = flow.profile.omega(np.clip(f["psi"], 0.0, 1.0))
    c = collar
    return float(np.max(np.abs((omega_grid - omega_expected)[c:-c, c:-c])))


def physical_laplacian_sup(fieldv, Phi, n_y=None, collar=3):
    """Sup of the five-point Laplacian of Phi in physical variables.

    For irrotational flows Phi is harmonic in (x, y), so this measures
    pure discretization error and must shrink at second order when the
    wave grids are refined.
    """
    pf = reconstruct(fieldv)
    p = fieldv.flow.p
    if n_y is None:
        n_y = fieldv.flow.n_p
    y_top = 0.95 * float(np.min(pf.surface))
    ys = np.linspace(0.0, y_top, n_y)
    vals = np.empty((pf.x.size, n_y))
    for j in range(pf.x.size):
        p_of_y = CubicSpline(pf.y[j], p)
        vals[j] = CubicSpline(p, Phi[j])(np.clip(p_of_y(ys), 0.0, 1.0))
    dx = float(pf.x[1] - pf.x[0])
    dy = float(ys[1] - ys[0])
    lap = (
        (vals[2:, 1:-1] - 2 * vals[1:-1, 1:-1] + vals[:-2, 1:-1]) / dx ** 2
        + (vals[1:-1, 2:] - 2 * vals[1:-1, 1:-1] + vals[1:-1, :-2]) / dy ** 2
    )
    c = collar
    return float(np.max(np.abs(lap[c:-c, c:-c])))
