from unittest import TestCase

import numpy as np
from scipy.linalg import eigvalsh
from scipy.sparse import identity

from hull_profile import build_grid, flow_params
from hull_profile.create_hull import wigley_hull
from hull_profile.viscous import (DragMatrix, assemble_drag_matrix, cell_gradients, drag_force, element_matrix,
                                  viscous_resistance, wetted_area)


class TestDragMatrix(TestCase):

    def test_square_cells(self):
        grid = build_grid(1, 1, 4, 4)
        drag_matrix = assemble_drag_matrix(grid)
        diagonal = drag_matrix.toarray().diagonal()

        interior = grid.dof_map[2, 2]
        surface = grid.dof_map[0, 2]
        self.assertAlmostEqual(diagonal[interior], 8 / 3, places=14)
        self.assertAlmostEqual(diagonal[surface], 4 / 3, places=14)

        run_assertions(self, drag_matrix)

    def test_element(self):
        element = element_matrix(0.3, 0.1)
        np.testing.assert_allclose(element, element.T)
        np.testing.assert_allclose(element.sum(axis=1), 0, atol=1e-14)     # constants have no gradient

    def test_rectangular_cells(self):
        grid = build_grid(2, 0.2, 10, 5)
        run_assertions(self, assemble_drag_matrix(grid))

    def test_gradient_energy(self):
        grid = build_grid(2, 0.2, 12, 5)
        values = wigley_hull(grid, 0.03).values
        drag_matrix = assemble_drag_matrix(grid)

        fx, fz, w = cell_gradients(grid, values)
        np.testing.assert_allclose(w.sum(axis=(-2, -1)), grid.cell_area)
        energy = float(np.sum(w * (fx ** 2 + fz ** 2)))
        self.assertAlmostEqual(drag_matrix.quadratic(values) / energy, 1, places=12)


class TestViscousResistance(TestCase):

    def test_resistance(self):
        grid = build_grid(2, 0.2, 10, 5)
        drag_matrix = assemble_drag_matrix(grid)
        values = wigley_hull(grid, 0.03).values
        eps = flow_params(2, fr=0.6).eps

        self.assertEqual(viscous_resistance(np.zeros(grid.n), drag_matrix, eps), 0)
        r = viscous_resistance(values, drag_matrix, eps)
        self.assertGreater(r, 0)
        self.assertAlmostEqual(viscous_resistance(2 * values, drag_matrix, eps) / r, 4, places=12)
        with self.assertRaises(ValueError):
            viscous_resistance(values, drag_matrix, -1)
        with self.assertRaises(ValueError):
            viscous_resistance(values[1:], drag_matrix, eps)

    def test_indefinite_not_hidden(self):
        grid = build_grid(2, 0.2, 6, 3)
        broken = DragMatrix(-identity(grid.n, format='csr'), grid)
        self.assertAlmostEqual(viscous_resistance(np.ones(grid.n), broken, 2.0), -2.0 * grid.n, places=10)

    def test_wetted_area(self):
        grid = build_grid(2, 0.2, 10, 5)
        flow = flow_params(2, fr=0.6)
        self.assertAlmostEqual(wetted_area(grid, np.zeros(grid.n)), 2 * 2 * 0.2, places=12)

        values = wigley_hull(grid, 0.03).values
        area = wetted_area(grid, values)
        self.assertGreater(area, 0.8)
        self.assertAlmostEqual(drag_force(grid, values, flow), 0.5 * flow.rho * flow.speed ** 2 * flow.cd * area,
                               places=10)

    def test_linearized_drag(self):
        # eps * integral |grad f|^2 is the leading term of the wetted-area drag
        grid = build_grid(2, 0.2, 10, 5)
        flow = flow_params(2, fr=0.6)
        values = 1e-3 * wigley_hull(grid, 0.03).values
        linear = viscous_resistance(values, assemble_drag_matrix(grid), flow.eps)
        excess = flow.eps * (wetted_area(grid, values) - 2 * grid.length * grid.draft)
        self.assertAlmostEqual(excess / linear, 1, places=4)


def run_assertions(obj, drag_matrix):
    matrix = drag_matrix.toarray()
    obj.assertEqual(matrix.shape, (drag_matrix.n, drag_matrix.n))
    np.testing.assert_allclose(matrix, matrix.T, rtol=0, atol=1e-14)
    obj.assertGreater(eigvalsh(matrix)[0], 0, msg='M_d is not positive definite')
    obj.assertLessEqual(int(np.max(np.diff(drag_matrix.matrix.indptr))), 9, msg='more than 9 nonzeros in a row')
