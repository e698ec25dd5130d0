import logging
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.sparse import coo_matrix

from .hull import full_field

logger = logging.getLogger(__name__)

# 1D Q1 stiffness and mass matrices on the unit interval
_K1 = np.array([[1.0, -1.0], [-1.0, 1.0]])
_M1 = np.array([[1.0 / 3, 1.0 / 6], [1.0 / 6, 1.0 / 3]])


@dataclass(frozen=True, eq=False)
class DragMatrix:
    """Sparse Q1 stiffness matrix (grad e_i, grad e_j) on the free nodes."""
    matrix: object
    grid: object

    @property
    def n(self):
        return self.matrix.shape[0]

    def quadratic(self, values):
        values = self.grid.check_vector(values)
        return float(values @ (self.matrix @ values))

    def toarray(self):
        return self.matrix.toarray()


def element_matrix(dx, dz):
    """
    4x4 stiffness of one cell, local corners ordered (z, x) = (0, 0), (0, 1), (1, 0), (1, 1)
    :param dx: cell length, m
    :param dz: cell height, m
    :return: (dz/dx) kron(M, K) + (dx/dz) kron(K, M)
    """
    return dz / dx * np.kron(_M1, _K1) + dx / dz * np.kron(_K1, _M1)


def assemble_drag_matrix(grid):
    """
    Assemble M_d from the cell stiffness matrices. Nodes on x = +-L/2 and z = T are dropped,
    which imposes f = 0 there; the waterline z = 0 is left free.

    :param grid: GridSpec
    :return: DragMatrix, CSR storage with at most 9 nonzeros per row
    """
    element = element_matrix(grid.dx, grid.dz)
    jz, ix = np.meshgrid(np.arange(grid.nz), np.arange(grid.nx), indexing='ij')
    jz, ix = jz.ravel(), ix.ravel()
    corners = np.stack([grid.dof_map[jz, ix], grid.dof_map[jz, ix + 1],
                        grid.dof_map[jz + 1, ix], grid.dof_map[jz + 1, ix + 1]], axis=1)

    rows = np.repeat(corners, 4, axis=1).ravel()
    cols = np.tile(corners, (1, 4)).ravel()
    vals = np.tile(element.ravel(), len(corners))
    keep = (rows >= 0) & (cols >= 0)

    matrix = coo_matrix((vals[keep], (rows[keep], cols[keep])), shape=(grid.n, grid.n)).tocsr()
    matrix.sum_duplicates()
    logger.debug('assembled M_d: N = %d, nnz = %d', grid.n, matrix.nnz)
    return DragMatrix(matrix, grid)


def viscous_resistance(values, drag_matrix, eps):
    """
    Linearized viscous drag eps * integral of |grad f|^2
    :param values: array of N nodal offsets, m
    :param drag_matrix: DragMatrix
    :param eps: 1/2 rho Cd U^2, Pa
    :return: eps F^t M_d F, N
    """
    if eps < 0:
        raise ValueError('eps must be non-negative')
    return eps * drag_matrix.quadratic(values)


def cell_gradients(grid, values, order=3):
    """
    Gradient of the Q1 interpolant at the Gauss points of every cell
    :return: (fx, fz, weights), arrays of shape (Nz, Nx, order, order) and weights summing to dx dz per cell
    """
    field = full_field(grid, values)
    nodes, weights = leggauss(order)
    s = 0.5 * (nodes + 1)
    f00, f01 = field[:-1, :-1, None, None], field[:-1, 1:, None, None]
    f10, f11 = field[1:, :-1, None, None], field[1:, 1:, None, None]
    t = s[:, None]      # z direction on axis -2
    r = s[None, :]      # x direction on axis -1
    fx = ((1 - t) * (f01 - f00) + t * (f11 - f10)) / grid.dx
    fz = ((1 - r) * (f10 - f00) + r * (f11 - f01)) / grid.dz
    w = 0.25 * grid.cell_area * np.outer(weights, weights)
    return fx, fz, w


def wetted_area(grid, values):
    """
    Wetted surface of both hull sides, 2 * integral of sqrt(1 + |grad f|^2) over the domain
    :param grid: GridSpec
    :param values: array of N nodal offsets, m
    :return: area, m2
    """
    fx, fz, w = cell_gradients(grid, values)
    return 2 * float(np.sum(w * np.sqrt(1 + fx ** 2 + fz ** 2)))


def drag_force(grid, values, flow):
    """
    Friction drag 1/2 rho U^2 Cd A on the wetted area A; its variation with the hull is
    eps * integral of |grad f|^2 to leading order.
    :param grid: GridSpec
    :param values: array of N nodal offsets, m
    :param flow: FlowParams
    :return: drag, N
    """
    return 0.5 * flow.rho * flow.speed ** 2 * flow.cd * wetted_area(grid, values)
