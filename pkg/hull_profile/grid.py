from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """
    Cartesian Q1 grid over the hull domain (-L/2, L/2) x (0, T).

    Free nodes are numbered interior first (row-major, z outer and x inner), then the
    nodes of the waterline z = 0 by increasing x. Nodes on x = +-L/2 and z = T carry no
    degree of freedom.
    """
    length: float
    draft: float
    nx: int
    nz: int

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError('length must be positive')
        if not self.draft > 0:
            raise ValueError('draft must be positive')
        if int(self.nx) != self.nx or self.nx < 2:
            raise ValueError('Nx must be an integer >= 2')
        if int(self.nz) != self.nz or self.nz < 2:
            raise ValueError('Nz must be an integer >= 2')

    @property
    def dx(self):
        return self.length / self.nx

    @property
    def dz(self):
        return self.draft / self.nz

    @property
    def cell_area(self):
        return self.dx * self.dz

    @property
    def n_int(self):
        return (self.nx - 1) * (self.nz - 1)

    @property
    def n(self):
        return self.n_int + self.nx - 1

    @cached_property
    def ix(self):
        """column index (0..Nx) of every free node"""
        interior = np.tile(np.arange(1, self.nx), self.nz - 1)
        surface = np.arange(1, self.nx)
        return _frozen(np.concatenate([interior, surface]))

    @cached_property
    def iz(self):
        """row index (0..Nz) of every free node"""
        interior = np.repeat(np.arange(1, self.nz), self.nx - 1)
        surface = np.zeros(self.nx - 1, dtype=int)
        return _frozen(np.concatenate([interior, surface]))

    @cached_property
    def x(self):
        return _frozen(self.x_lines[self.ix])

    @cached_property
    def z(self):
        return _frozen(self.z_lines[self.iz])

    @cached_property
    def x_lines(self):
        """abscissae of all grid columns, boundaries included"""
        return _frozen(-self.length / 2 + self.dx * np.arange(self.nx + 1))

    @cached_property
    def z_lines(self):
        return _frozen(self.dz * np.arange(self.nz + 1))

    @cached_property
    def alpha(self):
        """volume weights: 1 for interior nodes, 1/2 for waterline nodes"""
        weights = np.ones(self.n)
        weights[self.n_int:] = 0.5
        return _frozen(weights)

    @cached_property
    def dof_map(self):
        """(Nz+1, Nx+1) table of free-node indices, -1 where the node is constrained"""
        table = -np.ones((self.nz + 1, self.nx + 1), dtype=int)
        table[self.iz, self.ix] = np.arange(self.n)
        return _frozen(table)

    @cached_property
    def mirror(self):
        """permutation sending node (x, z) to node (-x, z)"""
        return _frozen(self.dof_map[self.iz, self.nx - self.ix])

    def is_surface(self):
        mask = np.zeros(self.n, dtype=bool)
        mask[self.n_int:] = True
        return mask

    def check_vector(self, values, name='F'):
        values = np.asarray(values, dtype=float)
        if values.shape != (self.n,):
            raise ValueError('{} has shape {}, expected ({},)'.format(name, values.shape, self.n))
        return values

    def info(self):
        return {'nx': self.nx, 'nz': self.nz, 'L': self.length, 'T': self.draft}


def build_grid(length, draft, nx, nz):
    """
    Build the computational grid of the hull domain.

    Parameters
    ----------
    length: num
        hull length L, m
    draft: num
        draft T, m
    nx: int
        number of cells along x, >= 2
    nz: int
        number of cells along z, >= 2

    Returns
    -------
    grid: GridSpec
        node count N = (Nx-1)(Nz-1) + (Nx-1)
    """
    return GridSpec(float(length), float(draft), int(nx), int(nz))


def _frozen(array):
    array.setflags(write=False)
    return array
