from unittest import TestCase

import numpy as np
import pandas as pd

from hull_profile import build_grid, get
from hull_profile.create_hull import wigley_beam, wigley_hull
from hull_profile.hull import Hull, hull_volume, normalize_volume


class TestHull(TestCase):

    def test_volume(self):
        grid = build_grid(2, 0.2, 100, 20)
        self.assertEqual(hull_volume(grid, np.zeros(grid.n)), 0)

        values = np.zeros(grid.n)
        values[grid.dof_map[5, 30]] = 1.0       # interior node, dx = 0.02, dz = 0.01
        self.assertAlmostEqual(hull_volume(grid, values), 2e-4, places=15)

        values = np.zeros(grid.n)
        values[grid.dof_map[0, 30]] = 1.0       # half a hat on the waterline
        self.assertAlmostEqual(hull_volume(grid, values), 1e-4, places=15)

    def test_wigley(self):
        self.assertAlmostEqual(wigley_beam(2, 0.2, 0.03), 0.3375, places=12)

        hull = get(0.03)
        self.assertAlmostEqual(hull.info['beam'], 0.3375, places=12)
        self.assertAlmostEqual(hull.get_point(0, 0), 0.16875, places=12)
        for z in [0, 0.05, 0.2]:
            self.assertAlmostEqual(hull.get_point(-1, z), 0, places=14)
            self.assertAlmostEqual(hull.get_point(1, z), 0, places=14)
        self.assertAlmostEqual(hull.volume(), 0.03, delta=0.03 * 2e-3)

        run_assertions(self, hull)

    def test_flat(self):
        hull = get(0.03, profile='flat', nx=10, nz=5)
        self.assertAlmostEqual(hull.volume(), 0.03, places=12)
        self.assertEqual(len(np.unique(np.round(hull.values, 12))), 1)

        zero = get(0, profile='flat', nx=10, nz=5)
        self.assertFalse(np.any(zero.values))

    def test_unknown_profile(self):
        with self.assertRaises(ValueError):
            get(0.03, profile='series60')

    def test_normalize(self):
        grid = build_grid(2, 0.2, 20, 10)
        hull = wigley_hull(grid, 0.03)
        doubled = normalize_volume(grid, 2 * hull.values, 2 * hull.volume())
        np.testing.assert_allclose(normalize_volume(grid, doubled, hull.volume()), hull.values, rtol=1e-14)

        with self.assertRaises(ValueError):
            normalize_volume(grid, -hull.values, 0.03)
        with self.assertRaises(ValueError):
            normalize_volume(grid, np.zeros(grid.n), 0.03)

    def test_get_point(self):
        grid = build_grid(2, 0.2, 10, 4)
        rng = np.random.default_rng(1)
        hull = Hull(grid, rng.uniform(0, 1, grid.n))

        for i in rng.integers(0, grid.n, 10):
            self.assertAlmostEqual(hull.get_point(grid.x[i], grid.z[i]), hull.values[i], places=12)

        # bilinear between nodes
        i, j = grid.dof_map[1, 3], grid.dof_map[1, 4]
        x_mid = 0.5 * (grid.x[i] + grid.x[j])
        self.assertAlmostEqual(hull.get_point(x_mid, grid.z[i]), 0.5 * (hull.values[i] + hull.values[j]), places=12)

        xs = np.linspace(-1, 1, 7)
        self.assertEqual(hull.get_point(xs[None, :], np.array([[0.0], [0.1]])).shape, (2, 7))

        with self.assertRaises(ValueError):
            hull.get_point(1.5, 0.1)
        with self.assertRaises(ValueError):
            hull.get_point(0, -0.1)
        with self.assertRaises(ValueError):
            hull.get_point(0, 0.3)

    def test_center_of_mass(self):
        hull = get(0.03, nx=40, nz=10)
        xbar, zbar = hull.center_of_mass(half=False)
        self.assertAlmostEqual(xbar, 0, places=12)
        self.assertAlmostEqual(zbar, 0.375 * 0.2, places=3)

        xbar_half, zbar_half = hull.center_of_mass(half=True)
        self.assertLess(xbar_half, 0)
        self.assertAlmostEqual(zbar_half, zbar, places=12)
        # parabola 1 - 4x^2/L^2 on [-L/2, 0]: centroid at -3L/16
        self.assertAlmostEqual(xbar_half, -3 * 2 / 16, places=2)

    def test_mirror(self):
        hull = get(0.03, nx=10, nz=4)
        np.testing.assert_allclose(hull.mirror().values, hull.values, rtol=1e-12)

        grid = hull.grid
        skewed = Hull(grid, hull.values * (1 + grid.x))
        self.assertAlmostEqual(skewed.mirror().get_point(-0.5, 0.05), skewed.get_point(0.5, 0.05), places=12)

    def test_max_slope(self):
        grid = build_grid(2, 0.2, 10, 4)
        self.assertEqual(Hull(grid, np.zeros(grid.n)).max_slope(), 0)

        values = np.zeros(grid.n)
        values[grid.dof_map[2, 5]] = grid.dz         # hat of height dz, steepest along z
        self.assertAlmostEqual(Hull(grid, values).max_slope(), np.hypot(1, grid.dz / grid.dx), places=12)

    def test_grid_type(self):
        with self.assertRaises(TypeError):
            Hull('grid', [0.0])


def run_assertions(obj, hull):
    df = hull.df()
    grid = hull.grid
    obj.assertIsInstance(df, pd.DataFrame, msg='df() is not returning a dataframe')
    obj.assertEqual(list(df.columns), ['x', 'z', 'f'])
    obj.assertEqual(len(df), (grid.nx + 1) * (grid.nz + 1), msg='boundary nodes are missing')
    obj.assertTrue(all(df['f'] >= 0), msg='negative offsets')
    obj.assertTrue(all(df.loc[df['z'] == df['z'].max(), 'f'] == 0), msg='keel is not closed')
    obj.assertEqual(len(hull), grid.n)
