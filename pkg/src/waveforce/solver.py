"""Nonlinear steady waves on a truncated strip.

Waves are computed as the deviation w(q, p) of the height function from
its background, solving

    (w_p / H_p^3)_p + (w_q / H_p)_q = N1(w)     in the strip,
    -w_p / H_p^3 + w = N2(w)                    on p = 1,
    w = 0                                       on p = 0,

by damped Newton iteration on a tensor grid with an analytically
assembled sparse Jacobian and direct LU solves.  The interior equation
is evaluated in fully expanded non-divergence form; an independent
divergence-form coding of the same height equation is provided as a
cross-check.

Periodic waves bifurcate from the subcritical linear modes
cos(tau_0 q) phi_0(p); solitary waves are supercritical and are seeded
with a sech^2 surface profile lifted through the ground eigenfunction.
A probe routine runs the same machinery on subcritical flows, where
decaying nontrivial solutions should never be found.
"""

import time
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import bmat, coo_matrix
from scipy.sparse.linalg import splu

from .background import parameter_for_froude, solve_background
from .dispersion import sl_spectrum
from .errors import (
    ConvergenceError,
    DomainError,
    SolverError,
    TailNotResolved,
    UnidirectionalityViolation,
)
from .fdiff import d1, d2

BC_KINDS = ("decay", "periodic", "even-symmetric")


@dataclass(frozen=True)
class BoundaryCondition:
    """Horizontal closure of the truncated strip.

    decay:          w = 0 at q = -L and q = +L
    periodic:       w(q + 2L) = w(q)
    even-symmetric: w_q = 0 at q = 0, w = 0 at q = L (crest at q = 0)
    """

    kind: str = "decay"

    def __post_init__(self):
        if self.kind not in BC_KINDS:
            raise ValueError("unknown boundary condition %r" % self.kind)


@dataclass(frozen=True)
class StripGrid:
    """Uniform tensor grid on [-L, L] x [0, 1].

    Periodic grids omit the duplicate right endpoint.  Even-in-q grids
    have an odd number of columns so the crest lies on a node.
    """

    q: np.ndarray = field(repr=False)
    p: np.ndarray = field(repr=False)
    L: float
    symmetry: str = "none"

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("truncation half-length must be positive")
        if self.symmetry == "even-in-q" and self.q.size % 2 == 0:
            raise ValueError("even-in-q grids need an odd number of columns")

    @property
    def n_q(self):
        return self.q.size

    @property
    def n_p(self):
        return self.p.size

    @property
    def dq(self):
        return self.q[1] - self.q[0]

    @property
    def dp(self):
        return self.p[1] - self.p[0]


@dataclass(frozen=True)
class NewtonReport:
    converged: bool
    iterations: int
    residual_inf: float
    increment_norms: tuple
    continuation: tuple = ()
    wall_time: float = 0.0


@dataclass(frozen=True)
class WaveField:
    """A wave deviation field on a strip grid, with derivative fields."""

    grid: StripGrid
    flow: object = field(repr=False)
    bc: BoundaryCondition = BoundaryCondition("decay")
    w: np.ndarray = field(repr=False, default=None)
    newton: NewtonReport = None

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.shape != (self.grid.n_q, self.grid.n_p):
            raise ValueError("field shape %s does not match grid" % (w.shape,))
        if np.max(np.abs(w[:, 0])) != 0.0:
            raise ValueError("w must vanish identically on the bed p=0")
        object.__setattr__(self, "w", w)
        if np.min(self.h_p) <= 0.0:
            raise UnidirectionalityViolation(
                "h_p reaches %.3e; wave field stagnates" % np.min(self.h_p)
            )

    def _dq(self, f):
        if self.bc.kind == "periodic":
            return (np.roll(f, -1, axis=0) - np.roll(f, 1, axis=0)) / (2 * self.grid.dq)
        return d1(f, self.grid.dq, axis=0)

    def _dqq(self, f):
        if self.bc.kind == "periodic":
            return (
                np.roll(f, -1, axis=0) - 2 * f + np.roll(f, 1, axis=0)
            ) / self.grid.dq ** 2
        return d2(f, self.grid.dq, axis=0)

    @cached_property
    def w_q(self):
        return self._dq(self.w)

    @cached_property
    def w_p(self):
        return d1(self.w, self.grid.dp, axis=1)

    @cached_property
    def w_qq(self):
        return self._dqq(self.w)

    @cached_property
    def w_qp(self):
        return d1(self.w_q, self.grid.dp, axis=1)

    @cached_property
    def w_pp(self):
        return d2(self.w, self.grid.dp, axis=1)

    @property
    def h_p(self):
        return self.flow.H_p[None, :] + self.w_p

    @property
    def h_q(self):
        return self.w_q

    @property
    def h(self):
        return self.flow.H[None, :] + self.w

    @property
    def eta(self):
        return self.w[:, -1]

    @property
    def amplitude(self):
        """Surface deviation above the crest column q = 0."""
        j0 = int(np.argmin(np.abs(self.grid.q)))
        return float(self.w[j0, -1])


def residual(fieldv):
    """Interior and top-boundary residuals of the wave system.

    Returns (interior, top): the fully expanded non-divergence form of
    the height equation written in w, and the Bernoulli condition
    -w_p/H_p^3 + w - N2(w) on p = 1, both second-order accurate on the
    full grid.
    """
    Hp = fieldv.flow.H_p[None, :]
    Hpp = fieldv.flow.H_pp[None, :]
    u1, u2 = fieldv.w_q, fieldv.w_p
    hp = Hp + u2
    if np.min(hp) <= 0.0:
        raise UnidirectionalityViolation("h_p <= 0 inside residual evaluation")
    interior = (
        (1.0 + u1 ** 2) * fieldv.w_pp / hp ** 3
        - 2.0 * u1 * fieldv.w_qp / hp ** 2
        + fieldv.w_qq / hp
        - Hpp / Hp ** 3
        + Hpp * (1.0 + u1 ** 2) / hp ** 3
    )
    Hp1 = fieldv.flow.H_p[-1]
    u1t = u1[:, -1]
    u2t = u2[:, -1]
    hpt = hp[:, -1]
    n2 = -(Hp1 ** 3 * u1t ** 2 + (2 * u2t + 3 * Hp1) * u2t ** 2) / (
        2 * Hp1 ** 3 * hpt ** 2
    )
    top = -u2t / Hp1 ** 3 + fieldv.w[:, -1] - n2
    return interior, top


def residual_divergence(fieldv):
    """Independent divergence-form residual of the height equation.

    Evaluates d/dp[(1+h_q^2)/(2h_p^2) + Omega] - d/dq[h_q/h_p] by
    differencing the composite fluxes; equals minus the expanded
    residual up to discretization error.
    """
    hq, hp = fieldv.h_q, fieldv.h_p
    if np.min(hp) <= 0.0:
        raise UnidirectionalityViolation("h_p <= 0 inside residual evaluation")
    omega = fieldv.flow.profile.omega(fieldv.grid.p)[None, :]
    flux_p = (1.0 + hq ** 2) / (2.0 * hp ** 2)
    flux_q = hq / hp
    term_p = d1(flux_p, fieldv.grid.dp, axis=1) + omega
    if fieldv.bc.kind == "periodic":
        term_q = (np.roll(flux_q, -1, axis=0) - np.roll(flux_q, 1, axis=0)) / (
            2 * fieldv.grid.dq
        )
    else:
        term_q = d1(flux_q, fieldv.grid.dq, axis=0)
    return term_p - term_q


class _Discretization:
    """Residual vector and Jacobian on the active unknown block.

    Unknowns are w at all active columns and rows p_1..p_1(top); the
    bottom row is eliminated by the Dirichlet condition.  The immersed
    boundary columns depend on the closure:

      decay           active = interior columns, zero end columns
      periodic        active = all columns, wrapped neighbors
      even-symmetric  active = half strip [0, L) with reflection ghost
    """

    def __init__(self, flow, dq, dp, n_active, bc_kind):
        self.flow = flow
        self.dq = dq
        self.dp = dp
        self.na = n_active
        self.npu = flow.n_p - 1
        self.bc_kind = bc_kind
        self.Hp = flow.H_p
        self.Hpp = flow.H_pp
        self.hp_floor = 0.05 * np.min(flow.H_p)
        # neighbor maps: active column index of j-1 and j+1, -1 = fixed zero
        j = np.arange(n_active)
        if bc_kind == "decay":
            self.jm = np.where(j > 0, j - 1, -1)
            self.jp = np.where(j < n_active - 1, j + 1, -1)
        elif bc_kind == "periodic":
            self.jm = (j - 1) % n_active
            self.jp = (j + 1) % n_active
        elif bc_kind == "even-symmetric":
            self.jm = np.where(j > 0, j - 1, 1)
            self.jp = np.where(j < n_active - 1, j + 1, -1)
        else:  # pragma: no cover
            raise ValueError(bc_kind)

    def _augment(self, wu):
        """Active block plus one neighbor column on each side."""
        W = np.zeros((self.na + 2, self.npu + 1))
        W[1:-1, 1:] = wu
        if self.bc_kind == "periodic":
            W[0] = W[-2]
            W[-1] = W[1]
        elif self.bc_kind == "even-symmetric":
            W[0] = W[2]  # reflection across the crest
        return W

    def _kinematics(self, wu):
        A = self._augment(wu)
        dq, dp = self.dq, self.dp
        C = A[1:-1]
        u1 = (A[2:] - A[:-2]) / (2 * dq)
        u11 = (A[2:] - 2 * C + A[:-2]) / dq ** 2
        u2 = np.empty_like(C)
        u2[:, 1:-1] = (C[:, 2:] - C[:, :-2]) / (2 * dp)
        u2[:, 0] = (C[:, 1] - 0.0) / (2 * dp)  # bed row, unused
        u2[:, -1] = (3 * C[:, -1] - 4 * C[:, -2] + C[:, -3]) / (2 * dp)
        u22 = np.zeros_like(C)
        u22[:, 1:-1] = (C[:, 2:] - 2 * C[:, 1:-1] + C[:, :-2]) / dp ** 2
        u12 = np.zeros_like(C)
        u12[:, 1:-1] = (
            A[2:, 2:] - A[2:, :-2] - A[:-2, 2:] + A[:-2, :-2]
        ) / (4 * dq * dp)
        return C, u1, u2, u11, u12, u22

    def residual_vec(self, wu):
        """Residual on the active block; None when h_p dips too low."""
        C, u1, u2, u11, u12, u22 = self._kinematics(wu)
        Hp = self.Hp[None, :]
        Hpp = self.Hpp[None, :]
        hp = Hp + u2
        if np.min(hp[:, 1:]) <= self.hp_floor:
            return None
        r = np.empty((self.na, self.npu))
        ii = slice(1, self.npu)  # interior p rows 1..n_p-2
        r[:, :-1] = (
            (1.0 + u1[:, ii] ** 2) * u22[:, ii] / hp[:, ii] ** 3
            - 2.0 * u1[:, ii] * u12[:, ii] / hp[:, ii] ** 2
            + u11[:, ii] / hp[:, ii]
            - Hpp[:, ii] / Hp[:, ii] ** 3
            + Hpp[:, ii] * (1.0 + u1[:, ii] ** 2) / hp[:, ii] ** 3
        )
        Hp1 = self.Hp[-1]
        u1t, u2t, hpt = u1[:, -1], u2[:, -1], hp[:, -1]
        n2 = -(Hp1 ** 3 * u1t ** 2 + (2 * u2t + 3 * Hp1) * u2t ** 2) / (
            2 * Hp1 ** 3 * hpt ** 2
        )
        r[:, -1] = -u2t / Hp1 ** 3 + C[:, -1] - n2
        return r.ravel()

    def jacobian(self, wu):
        C, u1, u2, u11, u12, u22 = self._kinematics(wu)
        Hp = self.Hp[None, :]
        Hpp = self.Hpp[None, :]
        hp = Hp + u2
        dq, dp = self.dq, self.dp
        na, npu = self.na, self.npu

        ii = slice(1, self.npu)
        one_u1sq = 1.0 + u1[:, ii] ** 2
        hpi = hp[:, ii]
        c22 = one_u1sq / hpi ** 3
        c12 = -2.0 * u1[:, ii] / hpi ** 2
        c11 = 1.0 / hpi
        c1 = (
            2.0 * u1[:, ii] * (u22[:, ii] + Hpp[:, ii]) / hpi ** 3
            - 2.0 * u12[:, ii] / hpi ** 2
        )
        c2 = (
            -3.0 * one_u1sq * u22[:, ii] / hpi ** 4
            + 4.0 * u1[:, ii] * u12[:, ii] / hpi ** 3
            - u11[:, ii] / hpi ** 2
            - 3.0 * Hpp[:, ii] * one_u1sq / hpi ** 4
        )

        rows, cols, vals = [], [], []
        jj = np.arange(na)
        iloc = np.arange(npu - 1)  # local row index of p rows 1..n_p-2

        def add(jcol_map, di, val):
            # di: offset of the p row of the contributing unknown
            J, I = np.meshgrid(jj, iloc, indexing="ij")
            target_i = I + di
            valid = (target_i >= 0) & (target_i < npu)
            jcol = jcol_map[J]
            valid &= jcol >= 0
            rows.append((J * npu + I)[valid])
            cols.append((jcol * npu + target_i)[valid])
            vals.append(val[valid])

        jself = jj.copy()
        diag = -2.0 * c22 / dp ** 2 - 2.0 * c11 / dq ** 2
        add(jself, 0, diag)
        add(jself, +1, c22 / dp ** 2 + c2 / (2 * dp))
        add(jself, -1, c22 / dp ** 2 - c2 / (2 * dp))
        add(self.jp, 0, c11 / dq ** 2 + c1 / (2 * dq))
        add(self.jm, 0, c11 / dq ** 2 - c1 / (2 * dq))
        cross = c12 / (4 * dq * dp)
        add(self.jp, +1, cross)
        add(self.jp, -1, -cross)
        add(self.jm, +1, -cross)
        add(self.jm, -1, cross)

        # top boundary rows
        Hp1 = self.Hp[-1]
        u1t, u2t, hpt = u1[:, -1], u2[:, -1], hp[:, -1]
        Tnum = Hp1 ** 3 * u1t ** 2 + 2 * u2t ** 3 + 3 * Hp1 * u2t ** 2
        dT_du1 = u1t / hpt ** 2
        dT_du2 = 3.0 * u2t * (u2t + Hp1) / (Hp1 ** 3 * hpt ** 2) - Tnum / (
            Hp1 ** 3 * hpt ** 3
        )
        dr_du2 = -1.0 / Hp1 ** 3 + dT_du2
        top_rows = jj * npu + (npu - 1)

        def add_top(jcol, icol_local, val):
            valid = jcol >= 0
            rows.append(top_rows[valid])
            cols.append((jcol * npu + icol_local)[valid])
            vals.append(val[valid] if val.ndim else np.full(valid.sum(), val))

        ones = np.ones(na)
        add_top(jself, npu - 1, ones + dr_du2 * 3.0 / (2 * dp))
        add_top(jself, npu - 2, dr_du2 * (-4.0) / (2 * dp))
        add_top(jself, npu - 3, dr_du2 * 1.0 / (2 * dp))
        add_top(self.jp, npu - 1, dT_du1 / (2 * dq))
        add_top(self.jm, npu - 1, -dT_du1 / (2 * dq))

        n = na * npu
        return coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, n),
        ).tocsc()


def check_jacobian(disc, wu, eps=1e-7, tol=1e-6, seed=0):
    """Directional finite-difference gate for the analytic Jacobian."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(wu.shape)
    v /= np.max(np.abs(v))
    r_plus = disc.residual_vec(wu + eps * v)
    r_minus = disc.residual_vec(wu - eps * v)
    if r_plus is None or r_minus is None:
        raise SolverError("jacobian check stepped outside the admissible set")
    fd = (r_plus - r_minus) / (2 * eps)
    jv = disc.jacobian(wu) @ v.ravel()
    err = np.max(np.abs(jv - fd)) / max(np.max(np.abs(fd)), 1e-30)
    if err > tol:
        raise SolverError("analytic Jacobian fails FD check: rel err %.3e" % err)
    return err


def _newton(disc, wu0, tol=1e-11, max_iter=50, gate_jacobian=True):
    """Damped Newton with step halving on residual increase."""
    wu = wu0.copy()
    r = disc.residual_vec(wu)
    if r is None:
        raise UnidirectionalityViolation("initial guess stagnates")
    if gate_jacobian:
        check_jacobian(disc, wu)
    rn = float(np.max(np.abs(r)))
    increments = []
    t0 = time.perf_counter()
    for it in range(max_iter):
        if rn < tol:
            return wu, NewtonReport(
                True, it, rn, tuple(increments), wall_time=time.perf_counter() - t0
            )
        J = disc.jacobian(wu)
        try:
            step = splu(J).solve(-r).reshape(wu.shape)
        except RuntimeError as exc:
            raise SolverError("sparse LU failed: %s" % exc) from exc
        alpha = 1.0
        for _ in range(40):
            wu_try = wu + alpha * step
            r_try = disc.residual_vec(wu_try)
            if r_try is not None:
                rn_try = float(np.max(np.abs(r_try)))
                if rn_try < rn or rn_try < tol:
                    break
            alpha *= 0.5
        else:
            raise ConvergenceError(
                "line search stalled at iteration %d (residual %.3e)" % (it, rn)
            )
        wu, r, rn = wu_try, r_try, rn_try
        increments.append(float(alpha * np.max(np.abs(step))))
    raise ConvergenceError(
        "Newton did not reach tol=%.1e in %d iterations (residual %.3e)"
        % (tol, max_iter, rn)
    )


def _field_from_half(flow, wu, L, bc_kind):
    """Mirror a converged half-strip block onto the full [-L, L] grid."""
    m = wu.shape[0] + 1  # half-grid columns incl. fixed q=L
    half = np.zeros((m, flow.n_p))
    half[:-1, 1:] = wu
    w_full = np.vstack([half[:0:-1], half])
    q = np.linspace(-L, L, 2 * m - 1)
    grid = StripGrid(q, flow.p, L, symmetry="even-in-q")
    return w_full, grid


def default_truncation(tau, depth):
    """Half-length making the expected e^{-tau L} tail negligible."""
    return max(30.0 / tau, 40.0 * depth)


def solve_periodic(flow, amplitude, n_q=128, L=None, tol=1e-11, max_iter=50):
    """Small-amplitude periodic wave on a subcritical flow.

    The period is fixed to the linear wavelength 2 pi / tau_0 and the
    initial guess is amplitude * cos(tau_0 q) phi_0(p) with the ground
    eigenfunction normalized by its surface value.

    At fixed background the trivial solution is isolated, so the crest
    amplitude is pinned and the flow parameter s is freed instead: the
    bordered Newton system adjusts the Bernoulli constant along the
    branch, as in classical fixed-wavelength wave computations.  The
    returned field references the adjusted background.
    """
    if not flow.F < 1.0:
        raise DomainError("periodic branch requires F < 1, got F=%.6g" % flow.F)
    if n_q % 2 != 0:
        raise ValueError("n_q must be even so the crest q=0 lies on a node")
    spec = sl_spectrum(flow, n_modes=1, shoot_check=False)
    tau0 = spec.tau0
    if L is None:
        L = np.pi / tau0
    q = -L + (2.0 * L / n_q) * np.arange(n_q)
    j0 = n_q // 2  # q = 0
    dq = q[1] - q[0]
    dp = flow.p[1] - flow.p[0]
    phi_hat = spec.phis[0] / spec.phis[0][-1]
    w0 = amplitude * np.cos(tau0 * q)[:, None] * phi_hat[None, :]

    prof = flow.profile
    n_p = flow.n_p

    def disc_at(s):
        return _Discretization(solve_background(prof, s, n_p), dq, dp, n_q, "periodic")

    wu = w0[:, 1:].copy()
    s = flow.s
    disc = disc_at(s)
    r = disc.residual_vec(wu)
    if r is None:
        raise UnidirectionalityViolation("initial guess stagnates")
    check_jacobian(disc, wu)
    n = wu.size
    con = wu[j0, -1] - amplitude
    rn = max(float(np.max(np.abs(r))), abs(con))
    increments = []
    t0 = time.perf_counter()
    for it in range(max_iter):
        if rn < tol:
            fl = disc.flow
            w = np.zeros((n_q, n_p))
            w[:, 1:] = wu
            grid = StripGrid(q, fl.p, L, symmetry="none")
            report = NewtonReport(True, it, rn, tuple(increments),
                                  wall_time=time.perf_counter() - t0)
            return WaveField(grid, fl, BoundaryCondition("periodic"), w, report)
        J = disc.jacobian(wu)
        hs = 1e-7 * max(1.0, abs(s))
        dr_ds = (disc_at(s + hs).residual_vec(wu) -
                 disc_at(s - hs).residual_vec(wu)) / (2 * hs)
        con_row = np.zeros(n)
        con_row[j0 * disc.npu + disc.npu - 1] = 1.0
        J_ext = bmat(
            [[J, dr_ds.reshape(-1, 1)], [con_row.reshape(1, -1), None]]
        ).tocsc()
        try:
            step = splu(J_ext).solve(-np.concatenate([r, [con]]))
        except RuntimeError as exc:
            raise SolverError("sparse LU failed: %s" % exc) from exc
        dw, ds = step[:-1].reshape(wu.shape), step[-1]
        alpha = 1.0
        for _ in range(40):
            wu_try = wu + alpha * dw
            s_try = s + alpha * ds
            disc_try = disc_at(s_try)
            r_try = disc_try.residual_vec(wu_try)
            if r_try is not None:
                con_try = wu_try[j0, -1] - amplitude
                rn_try = max(float(np.max(np.abs(r_try))), abs(con_try))
                if rn_try < rn or rn_try < tol:
                    break
            alpha *= 0.5
        else:
            raise ConvergenceError(
                "periodic line search stalled at iteration %d" % it
            )
        wu, s, disc, r, con, rn = wu_try, s_try, disc_try, r_try, con_try, rn_try
        increments.append(float(alpha * max(np.max(np.abs(dw)), abs(ds))))
    raise ConvergenceError(
        "periodic Newton did not reach tol=%.1e in %d iterations" % (tol, max_iter)
    )


def _sech2_seed(flow, a0, q):
    """KdV-informed initializer lifted through the ground eigenfunction."""
    spec = sl_spectrum(flow, n_modes=1, shoot_check=False)
    lam0 = spec.lambdas[0]
    tau = np.sqrt(abs(lam0))
    gamma = 0.5 * tau
    phi_hat = spec.phis[0] / spec.phis[0][-1]
    seed = a0 / np.cosh(gamma * q)[:, None] ** 2 * phi_hat[None, :]
    return seed, tau, spec


def solve_solitary(flow, n_q=None, L=None, tol=1e-11, max_iter=50,
                   continuation_steps=None):
    """Solitary wave of elevation on a supercritical flow.

    Solves on the half strip [0, L] with even reflection at the crest
    and w = 0 at q = L, then mirrors onto the full grid so the surface
    profile is even exactly.  Natural continuation in F (rebuilding the
    background at intermediate Froude numbers) with step halving covers
    targets that the sech^2 seed alone cannot reach.
    """
    if not flow.F > 1.0:
        raise DomainError("solitary branch requires F > 1, got F=%.6g" % flow.F)
    spec = sl_spectrum(flow, n_modes=1, shoot_check=False)
    if spec.lambdas[0] <= 0:
        raise SolverError("supercritical flow with nonpositive lambda_0")
    tau = float(np.sqrt(spec.lambdas[0]))
    if L is None:
        L = default_truncation(tau, flow.d)
    if n_q is None:
        n_q = 2 * int(round(L / 0.075)) + 1
    if n_q % 2 == 0:
        raise ValueError("n_q must be odd for an even-symmetric solve")
    m = (n_q + 1) // 2
    q_half = np.linspace(0.0, L, m)
    dq = q_half[1] - q_half[0]
    dp = flow.p[1] - flow.p[0]

    def attempt(fl, guess):
        disc = _Discretization(fl, dq, dp, m - 1, "even-symmetric")
        return _newton(disc, guess, tol=tol, max_iter=max_iter)

    a0 = (flow.F ** 2 - 1.0) * flow.d
    seed, _, _ = _sech2_seed(flow, a0, q_half)
    try:
        wu, report = attempt(flow, seed[:-1, 1:])
        steps = (flow.F,)
    except ConvergenceError:
        wu, report, steps = _continue_in_froude(
            flow, q_half, dq, dp, m, tol, max_iter, continuation_steps
        )

    w_full, grid = _field_from_half(flow, wu, L, "even-symmetric")
    fieldv = WaveField(
        grid, flow, BoundaryCondition("even-symmetric"), w_full,
        NewtonReport(report.converged, report.iterations, report.residual_inf,
                     report.increment_norms, steps, report.wall_time),
    )
    amp = fieldv.amplitude
    tail = abs(w_full[1, -1])
    if amp != 0.0 and tail > 1e-6 * abs(amp):
        raise TailNotResolved(
            "surface tail %.3e exceeds 1e-6 x amplitude %.3e; increase L"
            % (tail, amp)
        )
    return fieldv


def _continue_in_froude(flow, q_half, dq, dp, m, tol, max_iter, steps):
    """March the Froude number up from near-critical with step halving."""
    prof = flow.profile
    F_target = flow.F
    if steps is None:
        steps = 4
    f_now = 1.0 + (F_target - 1.0) / steps
    df = (F_target - 1.0) / steps
    guess = None
    visited = []
    halvings = 0
    while True:
        fl = (
            flow
            if abs(f_now - F_target) < 1e-13
            else solve_background(prof, parameter_for_froude(prof, f_now), flow.n_p)
        )
        if guess is None:
            a0 = (fl.F ** 2 - 1.0) * fl.d
            guess = _sech2_seed(fl, a0, q_half)[0][:-1, 1:]
        try:
            guess, report = _newton(
                _Discretization(fl, dq, dp, m - 1, "even-symmetric"),
                guess, tol=tol, max_iter=max_iter, gate_jacobian=False,
            )
            visited.append(f_now)
            if abs(f_now - F_target) < 1e-13:
                return guess, report, tuple(visited)
            f_now = min(F_target, f_now + df)
        except ConvergenceError:
            halvings += 1
            if halvings > 8:
                raise
            df *= 0.5
            f_now = min(F_target, (visited[-1] if visited else 1.0) + df)


@dataclass(frozen=True)
class ProbeReport:
    """Outcome of a nonexistence probe on a subcritical flow."""

    outcome: str  # converged-to-trivial | converged-to-nontrivial | diverged
    sup_w: float
    residual_inf: float
    tail_decays: bool
    tail_wavelength: float
    linear_wavelength: float
    iterations: int
    field: object = field(repr=False, default=None)


def subcritical_probe(flow, a0, n_q=401, L=20.0, tol=1e-11, max_iter=50):
    """Hunt for a decaying nontrivial wave below the critical speed.

    Runs Newton from the sech^2 seed with decaying end conditions and
    classifies the outcome.  Every outcome is a legitimate report; the
    interesting assertion (made by callers) is that no decaying
    nontrivial field is ever produced, and that nontrivial outputs ring
    at the linear wavelength 2 pi / tau_0.
    """
    if not flow.F < 1.0:
        raise DomainError("probe requires a subcritical flow, F=%.6g" % flow.F)
    spec = sl_spectrum(flow, n_modes=1, shoot_check=False)
    tau0 = spec.tau0
    lam_wave = 2.0 * np.pi / tau0
    q = np.linspace(-L, L, n_q)
    grid = StripGrid(q, flow.p, L, symmetry="none")
    phi_hat = spec.phis[0] / spec.phis[0][-1]
    gamma = 0.5 * tau0
    w0 = a0 / np.cosh(gamma * q)[:, None] ** 2 * phi_hat[None, :]

    disc = _Discretization(flow, q[1] - q[0], flow.p[1] - flow.p[0], n_q - 2, "decay")
    try:
        wu, report = _newton(disc, w0[1:-1, 1:], tol=tol, max_iter=max_iter)
    except (ConvergenceError, UnidirectionalityViolation):
        return ProbeReport("diverged", np.nan, np.nan, False, np.nan,
                           lam_wave, max_iter)
    w = np.zeros((n_q, flow.n_p))
    w[1:-1, 1:] = wu
    sup_w = float(np.max(np.abs(w)))
    if sup_w < 1e-8:
        return ProbeReport("converged-to-trivial", sup_w, report.residual_inf,
                           True, np.nan, lam_wave, report.iterations)
    fieldv = WaveField(grid, flow, BoundaryCondition("decay"), w, report)
    eta = fieldv.eta
    outer = max(2, n_q // 10)
    tail_decays = bool(np.max(np.abs(eta[-outer:])) < 1e-6 * np.max(np.abs(eta)))
    return ProbeReport(
        "converged-to-nontrivial", sup_w, report.residual_inf, tail_decays,
        _crossing_wavelength(q, eta, L), lam_wave, report.iterations, fieldv,
    )


def _crossing_wavelength(q, eta, L):
    """Twice the mean zero-crossing spacing of the outer surface trace."""
    mask = np.abs(q) > 0.5 * L
    qs, es = q[mask], eta[mask]
    sign = np.sign(es)
    idx = np.nonzero(sign[1:] * sign[:-1] < 0)[0]
    if idx.size < 3:
        return np.nan
    crossings = qs[idx] - es[idx] * (qs[idx + 1] - qs[idx]) / (es[idx + 1] - es[idx])
    gaps = np.diff(crossings)
    gaps = gaps[gaps < 0.9 * L]  # ignore the jump across the wave core
    if gaps.size < 2:
        return np.nan
    return float(2.0 * np.mean(gaps))
