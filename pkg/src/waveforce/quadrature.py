"""Composite quadrature rules on uniform grids.

Trapezoid is the default everywhere so that quadrature error matches the
second-order finite differences used by the solvers; Simpson is available
where a diagnostic needs more accuracy than the grid provides.
"""

import numpy as np


def trapezoid_weights(n, dx):
    """Composite trapezoid weights for n uniformly spaced nodes."""
    w = np.full(n, dx)
    w[0] = w[-1] = 0.5 * dx
    return w


def simpson_weights(n, dx):
    """Composite Simpson weights; n must be odd (even interval count)."""
    if n < 3 or n % 2 == 0:
        raise ValueError("Simpson rule needs an odd number of nodes, got %d" % n)
    w = np.empty(n)
    w[0] = w[-1] = 1.0
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (dx / 3.0)


def weights(n, dx, rule="trapezoid"):
    if rule == "trapezoid":
        return trapezoid_weights(n, dx)
    if rule == "simpson":
        return simpson_weights(n, dx)
    raise ValueError("unknown quadrature rule %r" % rule)


def integrate(f, dx, rule="trapezoid", axis=-1):
    """Integrate sampled values along an axis of a uniform grid."""
    f = np.asarray(f, dtype=float)
    w = weights(f.shape[axis], dx, rule)
    return np.tensordot(f, w, axes=([axis], [0]))


def cumulative(f, dx, axis=-1):
    """Cumulative trapezoid integral along an axis, starting at zero."""
    f = np.asarray(f, dtype=float)
    f = np.moveaxis(f, axis, -1)
    out = np.zeros_like(f)
    out[..., 1:] = np.cumsum(0.5 * dx * (f[..., 1:] + f[..., :-1]), axis=-1)
    return np.moveaxis(out, -1, axis)
