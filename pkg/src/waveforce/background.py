"""Laminar background shear flows.

A background state is a parallel flow over a flat bed, described in
mass-flux coordinates by a strictly increasing height function H(p) on
p in [0, 1].  Everything is nondimensional with unit mass flux and unit
gravity, so the bed is p = 0, the surface is p = 1, and the asymptotic
depth is d = H(1).

The family is parametrized by the vorticity distribution and a single
flow parameter s = R - d, where R is the Bernoulli constant.  With
Omega the primitive of the vorticity, the slope of the height function
is explicit:

    H_p(p) = [2 (s + Omega(1) - Omega(p))]^(-1/2),

which requires the radicand to stay positive (unidirectional flow).
The Froude number is F = (integral of H_p^3)^(-1/2); F = 1 separates
subcritical from supercritical states.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import BracketError, InputError, UnidirectionalityViolation
from .quadrature import cumulative, integrate


@dataclass(frozen=True)
class VorticityProfile:
    """Vorticity as a function of the stream-function variable p.

    kind is "polynomial" (values are coefficients, low order first) or
    "sampled" (values on a uniform grid over [0, 1], interpolated
    linearly).  Omega is the running integral of omega; for both kinds
    it is evaluated exactly under the declared rule, so re-integrating
    omega with composite trapezoid reproduces Omega on any uniform grid
    to machine precision.
    """

    kind: str
    values: np.ndarray
    p_grid: np.ndarray = field(repr=False)
    Omega_grid: np.ndarray = field(repr=False)

    def omega(self, p):
        p = np.asarray(p, dtype=float)
        if self.kind == "polynomial":
            return np.polyval(self.values[::-1], p)
        return np.interp(p, np.linspace(0.0, 1.0, self.values.size), self.values)

    def Omega(self, p):
        p = np.asarray(p, dtype=float)
        if self.kind == "polynomial":
            anti = self.values / np.arange(1.0, self.values.size + 1.0)
            return p * np.polyval(anti[::-1], p)
        # exact integral of the piecewise-linear interpolant
        nodes = np.linspace(0.0, 1.0, self.values.size)
        dx = nodes[1] - nodes[0]
        nodal = np.concatenate(
            ([0.0], np.cumsum(0.5 * dx * (self.values[1:] + self.values[:-1])))
        )
        idx = np.clip(np.searchsorted(nodes, p, side="right") - 1, 0, nodes.size - 2)
        t = p - nodes[idx]
        w0 = self.values[idx]
        slope = (self.values[idx + 1] - self.values[idx]) / dx
        return nodal[idx] + w0 * t + 0.5 * slope * t * t


def build_primitive(values, kind="sampled", n_p=2001):
    """Construct a vorticity profile together with its primitive.

    Parameters
    ----------
    values : array_like
        Polynomial coefficients (kind="polynomial", low order first) or
        samples of omega on a uniform grid over [0, 1].
    kind : str
        "polynomial" or "sampled".
    n_p : int
        Size of the quadrature grid on which Omega is tabulated.

    Returns
    -------
    VorticityProfile
    """
    values = np.atleast_1d(np.asarray(values, dtype=float))
    if not np.all(np.isfinite(values)):
        raise InputError("vorticity values must be finite")
    if kind not in ("polynomial", "sampled"):
        raise InputError("unknown vorticity kind %r" % kind)
    if kind == "sampled" and values.size < 2:
        values = np.repeat(values, 2)
    p_grid = np.linspace(0.0, 1.0, n_p)
    prof = VorticityProfile(kind, values, p_grid, np.zeros(n_p))
    Omega_grid = prof.Omega(p_grid)
    return VorticityProfile(kind, values, p_grid, Omega_grid)


@dataclass(frozen=True)
class ShearFlow:
    """A constructed background flow on a uniform p grid."""

    profile: VorticityProfile = field(repr=False)
    p: np.ndarray = field(repr=False)
    H: np.ndarray = field(repr=False)
    H_p: np.ndarray = field(repr=False)
    H_pp: np.ndarray = field(repr=False)
    d: float
    R: float
    s: float
    F: float
    rule: str = "trapezoid"

    @property
    def n_p(self):
        return self.p.size

    def Omega(self, p):
        return self.profile.Omega(p)

    def H_p_at(self, p):
        """Evaluate the exact slope formula off the grid (shooting, etc.)."""
        rad = 2.0 * (self.s + self.profile.Omega(1.0) - self.profile.Omega(p))
        return rad ** -0.5


def solve_background(profile, s, n_p=2001, rule="trapezoid"):
    """Build the background flow for flow parameter s = R - d.

    Raises UnidirectionalityViolation when the radicand
    2 (s + Omega(1) - Omega(p)) is not positive everywhere, which marks
    a stagnant or reversing background.
    """
    p = np.linspace(0.0, 1.0, n_p)
    Om = profile.Omega(p)
    rad = 2.0 * (s + Om[-1] - Om)
    if np.min(rad) <= 0.0:
        raise UnidirectionalityViolation(
            "background stagnates: min radicand %.3e at p=%.4f"
            % (np.min(rad), p[np.argmin(rad)])
        )
    H_p = rad ** -0.5
    H = cumulative(H_p, p[1] - p[0])
    # H_pp from the differentiated slope relation rather than differencing
    H_pp = profile.omega(p) * H_p ** 3
    d = float(H[-1])
    R = s + d
    flow = ShearFlow(profile, p, H, H_p, H_pp, d, R, float(s), np.nan, rule)
    F = froude(flow)
    return ShearFlow(profile, p, H, H_p, H_pp, d, R, float(s), F, rule)


def froude(flow):
    """Froude number from the cubed-slope integral, 1/F^2 = int H_p^3 dp."""
    dp = flow.p[1] - flow.p[0]
    return float(integrate(flow.H_p ** 3, dp, flow.rule) ** -0.5)


def _admissible_floor(profile):
    # s must exceed max(Omega(p) - Omega(1)) for the radicand to stay positive
    grid = np.linspace(0.0, 1.0, 4001)
    Om = profile.Omega(grid)
    return float(np.max(Om - Om[-1]))


def parameter_for_froude(profile, F_target, n_p=2001, tol=1e-11, max_iter=300):
    """Find s with F(s) = F_target by bisection.

    F is monotone in s for every vorticity distribution exercised here;
    monotonicity is checked numerically by the caller's tests, not
    assumed proven.  Raises BracketError when no sign change is found.
    """
    s_floor = _admissible_floor(profile)
    s_lo = s_floor + 1e-9 * max(1.0, abs(s_floor))

    def gap(s):
        return froude(solve_background(profile, s, n_p)) - F_target

    g_lo = gap(s_lo)
    if g_lo >= 0.0:
        raise BracketError(
            "F(s) >= %g already at the admissibility floor s=%.6g" % (F_target, s_lo)
        )
    s_hi = max(1.0, 2.0 * (s_floor + 1.0))
    for _ in range(64):
        if gap(s_hi) > 0.0:
            break
        s_hi *= 2.0
    else:
        raise BracketError("no supercritical parameter found up to s=%.3e" % s_hi)

    for _ in range(max_iter):
        s_mid = 0.5 * (s_lo + s_hi)
        g_mid = gap(s_mid)
        if abs(g_mid) < tol:
            return s_mid
        if g_mid < 0.0:
            s_lo = s_mid
        else:
            s_hi = s_mid
    raise BracketError("bisection stalled on [%.16g, %.16g]" % (s_lo, s_hi))


def critical_parameter(profile, n_p=2001, tol=1e-11):
    """The flow parameter s_c at which F = 1."""
    return parameter_for_froude(profile, 1.0, n_p=n_p, tol=tol)


def check_background(flow, tol=1e-9):
    """Residual of the defining invariants; raises on violation.

    Checks that 1/(2 H_p^2) + Omega is constant across the grid and that
    the surface value of that constant matches s + Omega(1).
    """
    Om = flow.Omega(flow.p)
    level = 1.0 / (2.0 * flow.H_p ** 2) + Om
    target = flow.s + Om[-1]
    err = float(np.max(np.abs(level - target)))
    if err >= tol:
        raise UnidirectionalityViolation(
            "background constancy residual %.3e exceeds %.1e" % (err, tol)
        )
    return err
