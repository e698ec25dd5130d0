from unittest import TestCase

import numpy as np

from hull_profile import build_grid


class TestGrid(TestCase):

    def test_node_count(self):
        self.assertEqual(build_grid(2, 0.2, 100, 20).n, 1980)
        self.assertEqual(build_grid(1, 1, 2, 2).n, 2)
        self.assertEqual(build_grid(2, 0.2, 100, 30).n, 2970)

    def test_numbering(self):
        grid = build_grid(2, 0.2, 6, 4)

        run_assertions(self, grid)
        # interior first, row-major with x inner
        self.assertEqual(list(grid.iz[:grid.nx - 1]), [1] * (grid.nx - 1))
        self.assertEqual(list(grid.ix[:grid.nx - 1]), list(range(1, grid.nx)))
        # waterline nodes last
        self.assertTrue(np.all(grid.z[grid.n_int:] == 0))
        self.assertTrue(np.all(grid.is_surface()[grid.n_int:]))
        self.assertFalse(np.any(grid.is_surface()[:grid.n_int]))

    def test_weights(self):
        grid = build_grid(2, 0.2, 10, 5)
        self.assertEqual(float(np.sum(grid.alpha)), grid.n_int + 0.5 * (grid.nx - 1))
        self.assertTrue(np.all(grid.alpha[grid.is_surface()] == 0.5))

    def test_mirror(self):
        grid = build_grid(2, 0.2, 7, 3)
        np.testing.assert_allclose(grid.x[grid.mirror], -grid.x, atol=1e-14)
        np.testing.assert_array_equal(grid.z[grid.mirror], grid.z)
        np.testing.assert_array_equal(grid.mirror[grid.mirror], np.arange(grid.n))

    def test_read_only(self):
        grid = build_grid(2, 0.2, 4, 3)
        with self.assertRaises(ValueError):
            grid.alpha[0] = 2.0

    def test_invalid(self):
        with self.assertRaises(ValueError):
            build_grid(2, 0.2, 1, 3)
        with self.assertRaises(ValueError):
            build_grid(2, 0.2, 4, 1)
        with self.assertRaises(ValueError):
            build_grid(0, 0.2, 4, 3)
        with self.assertRaises(ValueError):
            build_grid(2, -0.2, 4, 3)

    def test_check_vector(self):
        grid = build_grid(2, 0.2, 4, 3)
        with self.assertRaises(ValueError):
            grid.check_vector(np.zeros(grid.n + 1))


def run_assertions(obj, grid):
    obj.assertEqual(grid.n, (grid.nx - 1) * grid.nz)
    obj.assertEqual(len(grid.x), grid.n)
    obj.assertEqual(len(np.unique(grid.dof_map[grid.dof_map >= 0])), grid.n, msg='free nodes are not unique')
    np.testing.assert_array_equal(grid.dof_map[grid.iz, grid.ix], np.arange(grid.n))
    obj.assertTrue(np.all(grid.dof_map[:, 0] == -1), msg='stern side carries a degree of freedom')
    obj.assertTrue(np.all(grid.dof_map[:, -1] == -1), msg='stem side carries a degree of freedom')
    obj.assertTrue(np.all(grid.dof_map[-1, :] == -1), msg='keel carries a degree of freedom')
