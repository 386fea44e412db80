"""Second-order finite differences on uniform tensor grids.

Centered stencils in the interior, second-order one-sided stencils at
the edges; used for reporting residuals on full grids.  The Newton
solver assembles its own stencils and does not go through here.
"""

import numpy as np


def d1(f, dx, axis=0):
    """First derivative, second order everywhere."""
    f = np.asarray(f, dtype=float)
    g = np.empty_like(f)
    fm = np.moveaxis(f, axis, 0)
    gm = np.moveaxis(g, axis, 0)
    gm[1:-1] = (fm[2:] - fm[:-2]) / (2.0 * dx)
    gm[0] = (-3.0 * fm[0] + 4.0 * fm[1] - fm[2]) / (2.0 * dx)
    gm[-1] = (3.0 * fm[-1] - 4.0 * fm[-2] + fm[-3]) / (2.0 * dx)
    return g


def d2(f, dx, axis=0):
    """Second derivative, second order everywhere."""
    f = np.asarray(f, dtype=float)
    g = np.empty_like(f)
    fm = np.moveaxis(f, axis, 0)
    gm = np.moveaxis(g, axis, 0)
    gm[1:-1] = (fm[2:] - 2.0 * fm[1:-1] + fm[:-2]) / (dx * dx)
    gm[0] = (2.0 * fm[0] - 5.0 * fm[1] + 4.0 * fm[2] - fm[3]) / (dx * dx)
    gm[-1] = (2.0 * fm[-1] - 5.0 * fm[-2] + 4.0 * fm[-3] - fm[-4]) / (dx * dx)
    return g


def interior_sup(field, collar=2):
    """Sup norm over the grid with a boundary collar excluded."""
    field = np.asarray(field)
    c = int(collar)
    core = field[c:-c, c:-c] if c > 0 else field
    return float(np.max(np.abs(core)))
