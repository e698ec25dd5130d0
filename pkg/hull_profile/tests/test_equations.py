from unittest import TestCase

import numpy as np
from scipy.integrate import quad

from hull_profile.equations import (a_minus, a_minus_closed, a_plus, a_plus_closed, a_sum, b_minus, b_minus_closed,
                                    b_plus, b_plus_closed, cos_moment, phi, psi, sin_moment)


class TestKernels(TestCase):

    def test_limits(self):
        self.assertEqual(float(cos_moment(0)), 0.5)
        self.assertEqual(float(sin_moment(0)), 0)
        self.assertAlmostEqual(float(phi(0)), 0.5, places=15)
        self.assertAlmostEqual(float(psi(0)), 0.5, places=15)

    def test_continuity(self):
        # series and closed form meet at the switch
        for kernel in [sin_moment, phi, psi]:
            below, above = kernel(0.5 - 1e-13), kernel(0.5 + 1e-13)
            self.assertAlmostEqual(float(below), float(above), places=12)

    def test_closed_forms(self):
        t = np.array([0.7, 1.3, 4.0, 25.0])
        np.testing.assert_allclose(cos_moment(t), (1 - np.cos(t)) / t ** 2, rtol=1e-12)
        np.testing.assert_allclose(sin_moment(t), (t - np.sin(t)) / t ** 2, rtol=1e-12)
        np.testing.assert_allclose(phi(t), (t - 1 + np.exp(-t)) / t ** 2, rtol=1e-12)
        np.testing.assert_allclose(psi(t), (1 - (1 + t) * np.exp(-t)) / t ** 2, rtol=1e-12)


class TestHatIntegrals(TestCase):

    def test_a_at_origin(self):
        for lam, v, dx in [(1.0, 0.5, 0.02), (7.3, 2.0, 0.05), (300.0, 1.0, 0.02)]:
            t = lam * v * dx
            expected = 2 * (1 - np.cos(t)) / (lam * v) ** 2
            self.assertAlmostEqual(float(a_plus(lam, v, 0, dx) + a_minus(lam, v, 0, dx)) / expected, 1, places=12)

    def test_a_small_argument(self):
        lam, v, x, dx = 1.0, 1e-4, 0.3, 1.0
        value = a_plus(lam, v, x, dx) + a_minus(lam, v, x, dx)
        self.assertAlmostEqual(float(value) / (dx ** 2 * np.cos(lam * v * x)), 1, places=8)
        np.testing.assert_allclose(a_sum(lam, v, x, dx), value, rtol=1e-14)

    def test_b_small_argument(self):
        lam, v, z, dz = 1.0, 1e-4, 0.3, 0.1
        value = b_plus(lam, v, z, dz) + b_minus(lam, v, z, dz)
        self.assertAlmostEqual(float(value) / (dz ** 2 * np.exp(-lam ** 2 * v * z)), 1, places=8)

    def test_b_waterline(self):
        self.assertEqual(float(b_minus(3.0, 2.0, 0.0, 0.01)), 0)
        self.assertEqual(float(b_minus_closed(3.0, 2.0, 0.0, 0.01)), 0)
        np.testing.assert_array_equal(b_minus(np.array([[1.0], [2.0]]), 1.0, np.array([0.0, 0.0]), 0.1), 0)

    def test_quadrature_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            lam, v = rng.uniform(1, 30), rng.uniform(0.3, 3)
            x, dx = rng.uniform(-1, 1), rng.uniform(0.01, 0.1)
            z, dz = rng.uniform(0.01, 0.2), rng.uniform(0.005, 0.01)
            k, mu = lam * v, lam ** 2 * v

            run_assertions(self, a_plus(lam, v, x, dx),
                           integral(lambda s: np.cos(k * s) * (x + dx - s), x, x + dx), dx ** 2)
            run_assertions(self, a_minus(lam, v, x, dx),
                           integral(lambda s: np.cos(k * s) * (s - x + dx), x - dx, x), dx ** 2)
            run_assertions(self, b_plus(lam, v, z, dz),
                           integral(lambda s: np.exp(-mu * s) * (z + dz - s), z, z + dz), 0)
            run_assertions(self, b_minus(lam, v, z, dz),
                           integral(lambda s: np.exp(-mu * s) * (s - z + dz), z - dz, z), 0)

    def test_stable_against_textbook(self):
        # moderate arguments, where the textbook forms are still accurate
        lam, v, x, dx = 2.5, 1.2, 0.4, 0.3
        np.testing.assert_allclose(a_plus(lam, v, x, dx), a_plus_closed(lam, v, x, dx), rtol=1e-10)
        np.testing.assert_allclose(a_minus(lam, v, x, dx), a_minus_closed(lam, v, x, dx), rtol=1e-10)
        z, dz = 0.1, 0.2
        np.testing.assert_allclose(b_plus(lam, v, z, dz), b_plus_closed(lam, v, z, dz), rtol=1e-10)
        np.testing.assert_allclose(b_minus(lam, v, z, dz), b_minus_closed(lam, v, z, dz), rtol=1e-10)

    def test_broadcast(self):
        lam = np.array([[1.0], [2.0], [4.0]])
        x = np.linspace(-0.9, 0.9, 5)[None, :]
        self.assertEqual(a_sum(lam, 1.0, x, 0.1).shape, (3, 5))
        self.assertEqual(b_plus(lam, 1.0, x ** 2, 0.1).shape, (3, 5))


def integral(function, a, b):
    return quad(function, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]


def run_assertions(obj, value, reference, floor):
    # floor guards the relative error where a cosine moment passes through zero
    scale = max(abs(reference), 1e-3 * floor)
    obj.assertLess(abs(float(value) - reference), 1e-11 * scale + 1e-300)
