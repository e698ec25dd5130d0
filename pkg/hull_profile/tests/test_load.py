import os
import tempfile
from unittest import TestCase

import numpy as np
import pandas as pd

from hull_profile import build_grid, get, load
from hull_profile.output import write_hull


class TestLoadHull(TestCase):

    def setUp(self):
        self.hull = get(0.03, 'wigley', nx=10, nz=4)

    def test_load_from_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_hull(os.path.join(tmp, 'hull.csv'), self.hull)
            hull = load(path)

        run_assertions(self, hull, self.hull)

    def test_load_from_excel(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'hull.xlsx')
            self.hull.df().to_excel(path, index=False)
            hull = load(path)

        run_assertions(self, hull, self.hull)

    def test_load_from_df(self):
        hull = load(self.hull.df())

        run_assertions(self, hull, self.hull)

    def test_aliases(self):
        df = self.hull.df().rename(columns={'x': 'X [m]', 'z': 'depth', 'f': 'offset'})
        hull = load(df)

        run_assertions(self, hull, self.hull)

    def test_load_from_dicts(self):
        hull = load(self.hull.df().to_dict('records'))

        run_assertions(self, hull, self.hull)

    def test_load_from_lists(self):
        df = self.hull.df()
        hull = load([list(df['x']), list(df['z']), list(df['f'])])

        run_assertions(self, hull, self.hull)

    def test_interior_only(self):
        # boundary rows may be left out when the grid is given
        df = self.hull.df()
        df = df[(df['z'] < self.hull.grid.draft) & (np.abs(df['x']) < self.hull.grid.length / 2)]
        hull = load(df, grid=self.hull.grid, set_info={'name': 'interior'})

        run_assertions(self, hull, self.hull)
        self.assertEqual(hull.info['name'], 'interior')

    def test_errors(self):
        df = self.hull.df()
        with self.assertRaises(ValueError):
            # row 5 is the waterline node at midship
            load(df.drop(index=5), grid=self.hull.grid)
        keel = df.copy()
        keel.loc[keel['z'] == keel['z'].max(), 'f'] = 0.01
        with self.assertRaises(ValueError):
            load(keel)
        with self.assertRaises(ValueError):
            load(df.drop(columns='f'))
        with self.assertRaises(ValueError):
            load('hull.txt')
        shifted = df.copy()
        shifted['x'] += 0.1
        with self.assertRaises(ValueError):
            load(shifted)
        with self.assertRaises(ValueError):
            load(df, grid=build_grid(2, 0.2, 7, 4))

    def test_load_initial(self):
        hull = load(self.hull.df())
        hull_initial = hull._base_data

        self.assertIsInstance(hull_initial, pd.DataFrame, msg='method is not returning a dataframe')
        self.assertEqual(len(hull_initial), len(self.hull.df()))


def run_assertions(obj, hull, reference):
    obj.assertEqual(hull.grid, reference.grid, msg='grid was not recovered')
    np.testing.assert_allclose(hull.values, reference.values, rtol=1e-14, atol=1e-16)
    obj.assertEqual(hull.info['source'], 'loaded')
