import numpy as np
import pandas as pd
from numpy.polynomial.legendre import leggauss

from .grid import GridSpec

_GAUSS_2 = leggauss(2)


class Hull(object):
    """Half-breadth offsets f(x, z) >= 0 of a hull on a Q1 grid."""

    def __init__(self, grid, values, info=None):
        if not isinstance(grid, GridSpec):
            raise TypeError('grid must be a GridSpec')
        self.grid = grid
        self.values = grid.check_vector(values).copy()
        self.info = {} if info is None else dict(info)

    def __len__(self):
        return self.grid.n

    def volume(self):
        return hull_volume(self.grid, self.values)

    def field(self):
        """nodal values on the full (Nz+1, Nx+1) node table, zeros on the constrained sides"""
        return full_field(self.grid, self.values)

    def get_point(self, x, z):
        """
        Get the offset of the hull at a point of the domain
        :param x: longitudinal coordinate, m
        :param z: depth below the waterline, m
        :return: f(x, z), m
        """
        return eval_hull(self.grid, self.values, x, z)

    def mirror(self):
        return Hull(self.grid, self.values[self.grid.mirror], self.info)

    def center_of_mass(self, half=True):
        """
        Center of mass (xbar, zbar) of the hull, exact for the Q1 interpolant.
        :param half: restrict to the half hull x <= 0
        :return: (xbar, zbar)
        """
        x_max = 0.0 if half else None
        mass, x_moment, z_moment = _moments(self.grid, self.values, x_max)
        if mass <= 0:
            raise ValueError('hull has no volume on the selected part')
        return x_moment / mass, z_moment / mass

    def max_slope(self):
        """largest |grad f| over the cells; the thin-ship assumption wants it << 1"""
        f = self.field()
        fx = np.diff(f, axis=1) / self.grid.dx
        fz = np.diff(f, axis=0) / self.grid.dz
        # |grad f|^2 peaks at a cell corner: fx varies along z only and fz along x only
        corners = [fx[:-1, :] ** 2 + fz[:, :-1] ** 2, fx[:-1, :] ** 2 + fz[:, 1:] ** 2,
                   fx[1:, :] ** 2 + fz[:, :-1] ** 2, fx[1:, :] ** 2 + fz[:, 1:] ** 2]
        return float(np.sqrt(max(c.max() for c in corners)))

    def df(self):
        """every grid node, boundaries included, row-major with z outer"""
        xx, zz = np.meshgrid(self.grid.x_lines, self.grid.z_lines)
        return pd.DataFrame({'x': xx.ravel(), 'z': zz.ravel(), 'f': self.field().ravel()})

    def plot(self, **kwargs):
        from .plot import plot_hull
        return plot_hull(self, **kwargs)


def full_field(grid, values):
    values = grid.check_vector(values)
    field = np.zeros((grid.nz + 1, grid.nx + 1))
    field[grid.iz, grid.ix] = values
    return field


def eval_hull(grid, values, x, z):
    """
    Evaluate the bilinear interpolant of the nodal offsets.

    Parameters
    ----------
    grid: GridSpec
    values: array of N nodal offsets
    x, z: num or array
        points of the closed domain [-L/2, L/2] x [0, T]

    Returns
    -------
    f: float or array
        exactly f_i at node i and 0 on x = +-L/2 and z = T
    """
    field = full_field(grid, values)
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    slack = 1e-12 * max(grid.length, grid.draft)
    if np.any(np.abs(x) > grid.length / 2 + slack) or np.any(z < -slack) or np.any(z > grid.draft + slack):
        raise ValueError('(x, z) outside the hull domain')

    s = np.clip((x + grid.length / 2) / grid.dx, 0, grid.nx)
    t = np.clip(z / grid.dz, 0, grid.nz)
    i = np.minimum(np.floor(s).astype(int), grid.nx - 1)
    j = np.minimum(np.floor(t).astype(int), grid.nz - 1)
    s -= i
    t -= j
    value = ((1 - s) * (1 - t) * field[j, i] + s * (1 - t) * field[j, i + 1]
             + (1 - s) * t * field[j + 1, i] + s * t * field[j + 1, i + 1])
    if value.ndim == 0:
        return float(value)
    return value


def hull_volume(grid, values):
    """
    Exact integral of the Q1 interpolant over the domain
    :param grid: GridSpec
    :param values: array of N nodal offsets
    :return: dx dz (sum of interior values + 1/2 sum of waterline values), m3
    """
    values = grid.check_vector(values)
    return grid.cell_area * float(grid.alpha @ values)


def normalize_volume(grid, values, volume):
    """
    Rescale nonnegative offsets so the hull holds the given volume
    :param grid: GridSpec
    :param values: array of N nodal offsets, >= 0
    :param volume: target half-volume, m3
    :return: rescaled array
    """
    values = grid.check_vector(values)
    if np.any(values < 0):
        raise ValueError('offsets must be non-negative')
    current = hull_volume(grid, values)
    if not current > 0:
        raise ValueError('hull volume must be positive to be normalized')
    return values * (volume / current)


def _moments(grid, values, x_max=None):
    # 2-point Gauss in both directions integrates f, x f and z f exactly on every cell
    field = full_field(grid, values)
    nodes, weights = _GAUSS_2
    mass = x_moment = z_moment = 0.0
    z_lines, x_lines = grid.z_lines, grid.x_lines
    for i in range(grid.nx):
        a, b = x_lines[i], x_lines[i + 1]
        if x_max is not None:
            if a >= x_max:
                break
            b = min(b, x_max)
        xs = 0.5 * (a + b) + 0.5 * (b - a) * nodes
        wx = 0.5 * (b - a) * weights
        s = (xs - x_lines[i]) / grid.dx
        for j in range(grid.nz):
            zs = z_lines[j] + 0.5 * grid.dz * (1 + nodes)
            wz = 0.5 * grid.dz * weights
            t = (zs - z_lines[j]) / grid.dz
            f = (np.outer(1 - t, 1 - s) * field[j, i] + np.outer(1 - t, s) * field[j, i + 1]
                 + np.outer(t, 1 - s) * field[j + 1, i] + np.outer(t, s) * field[j + 1, i + 1])
            w = np.outer(wz, wx)
            mass += np.sum(w * f)
            x_moment += np.sum(w * f * xs[None, :])
            z_moment += np.sum(w * f * zs[:, None])
    return mass, x_moment, z_moment
