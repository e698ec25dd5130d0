from unittest import TestCase

import numpy as np

from hull_profile import build_grid, flow_params
from hull_profile.quadrature import build_quadrature
from hull_profile.solver import (ConvergenceError, NotPositiveDefiniteError, QpProblem, StepSizeError,
                                 combine_objective, kkt_residuals, project_weighted_simplex, reference_qp_oracle,
                                 uzawa_solve)
from hull_profile.viscous import assemble_drag_matrix
from hull_profile.wave import assemble_wave_matrix


def small_problem(nx=4, nz=3, fr=0.5, wave=True, volume=0.03, length=2.0, draft=0.2, eps_factor=1.0):
    grid = build_grid(length, draft, nx, nz)
    flow = flow_params(length, fr=fr, volume=volume)
    wave_matrix = assemble_wave_matrix(grid, flow.v, build_quadrature(20, 6)) if wave else None
    return combine_objective(wave_matrix, assemble_drag_matrix(grid), flow.rho, flow.g, flow.v,
                             eps_factor * flow.eps, volume)


class TestCombineObjective(TestCase):

    def test_pure_drag(self):
        grid = build_grid(2, 0.2, 6, 3)
        drag_matrix = assemble_drag_matrix(grid)
        problem = combine_objective(None, drag_matrix, 1000, 9.81, 1.0, 2.5, 0.03)
        np.testing.assert_allclose(problem.q, 2.5 * drag_matrix.toarray(), rtol=1e-15)
        self.assertAlmostEqual(problem.v_tilde, 0.03 / grid.cell_area, places=10)
        np.testing.assert_array_equal(problem.alpha, grid.alpha)

    def test_parts(self):
        problem = small_problem()
        values = np.linspace(0.1, 1, problem.n)
        wave, viscous = problem.parts(values)
        self.assertGreater(wave, 0)
        self.assertGreater(viscous, 0)
        self.assertAlmostEqual((wave + viscous) / problem.objective(values), 1, places=12)

    def test_parts_not_clamped(self):
        grid = build_grid(2, 0.2, 4, 3)
        problem = QpProblem(-np.eye(grid.n), np.asarray(grid.alpha), 1.0)
        wave, viscous = problem.parts(np.ones(grid.n))
        self.assertEqual(wave, 0)
        self.assertAlmostEqual(viscous, -grid.n)

    def test_invalid(self):
        grid = build_grid(2, 0.2, 6, 3)
        drag_matrix = assemble_drag_matrix(grid)
        wave_matrix = assemble_wave_matrix(grid, 2.0, build_quadrature(5, 2))
        with self.assertRaises(ValueError):
            combine_objective(None, drag_matrix, 1000, 9.81, 2.0, 0, 0.03)
        with self.assertRaises(ValueError):
            combine_objective(wave_matrix, drag_matrix, 1000, 9.81, 1.0, 1.0, 0.03)
        other = assemble_wave_matrix(build_grid(2, 0.2, 4, 3), 2.0, build_quadrature(5, 2))
        with self.assertRaises(ValueError):
            combine_objective(other, drag_matrix, 1000, 9.81, 2.0, 1.0, 0.03)


class TestUzawa(TestCase):

    def test_zero_volume(self):
        report = uzawa_solve(small_problem(wave=False, volume=0.0))
        self.assertTrue(report.converged)
        self.assertFalse(np.any(report.values))

    def test_against_oracle_drag_only(self):
        problem = small_problem(wave=False)
        report = uzawa_solve(problem, tol=1e-10)
        reference = reference_qp_oracle(problem)

        run_assertions(self, problem, report)
        np.testing.assert_allclose(report.values, reference, rtol=0, atol=1e-6 * np.max(reference))

    def test_against_oracle(self):
        for fr in [0.5, 1.0]:
            problem = small_problem(nx=8, nz=4, fr=fr)
            report = uzawa_solve(problem, tol=1e-10, accelerate=True)
            reference = reference_qp_oracle(problem)

            run_assertions(self, problem, report)
            np.testing.assert_allclose(report.values, reference, rtol=0, atol=1e-6 * np.max(reference))
            self.assertLessEqual(report.objective, problem.objective(reference) * (1 + 1e-8))

    def test_against_oracle_wider(self):
        for fr in [0.5, 1.0]:
            for eps_factor in [1.0, 10.0]:
                problem = small_problem(nx=12, nz=6, fr=fr, eps_factor=eps_factor)
                report = uzawa_solve(problem, tol=1e-10, accelerate=True)
                reference = reference_qp_oracle(problem)

                run_assertions(self, problem, report)
                np.testing.assert_allclose(report.values, reference, rtol=0, atol=1e-6 * np.max(reference))

    def test_unique_from_other_start(self):
        problem = small_problem(nx=8, nz=4)
        cold = uzawa_solve(problem, tol=1e-10, accelerate=True)
        start = np.random.default_rng(5).uniform(0.1, 2.0, problem.n)
        other = uzawa_solve(problem, tol=1e-10, accelerate=True, f_init=start)

        run_assertions(self, problem, other)
        np.testing.assert_allclose(other.values, cold.values, rtol=0, atol=1e-6 * np.max(cold.values))

    def test_residuals(self):
        problem = small_problem(nx=8, nz=4)
        report = uzawa_solve(problem, tol=1e-11)

        run_assertions(self, problem, report)
        self.assertLess(report.relative.stationarity, 1e-8)
        self.assertLess(report.relative.feasibility, 1e-8)
        self.assertLess(report.relative.complementarity, 1e-8)
        self.assertLessEqual(report.residuals.volume, 1e-8 * problem.v_tilde)

    def test_symmetry(self):
        problem = small_problem(nx=8, nz=4, fr=1.0)
        report = uzawa_solve(problem, tol=1e-10, accelerate=True)
        mirror = problem.grid.mirror
        np.testing.assert_allclose(report.values[mirror], report.values, rtol=0, atol=1e-6 * np.max(report.values))

    def test_accelerated(self):
        problem = small_problem(nx=4, nz=4, wave=False, length=1.0, draft=1.0)
        plain = uzawa_solve(problem, tol=1e-10)
        fast = uzawa_solve(problem, tol=1e-10, accelerate=True)
        np.testing.assert_allclose(fast.values, plain.values, rtol=0, atol=1e-6 * np.max(plain.values))

    def test_warm_start(self):
        # square cells: the pure-drag optimum is strictly positive, so the warm start is exact
        problem = small_problem(nx=4, nz=4, wave=False, length=1.0, draft=1.0)
        cold = uzawa_solve(problem, tol=1e-9)
        warm = uzawa_solve(problem, tol=1e-9, f_init=cold.values)
        self.assertTrue(warm.converged)
        self.assertLess(warm.iterations, cold.iterations)

    def test_not_converged(self):
        problem = small_problem()
        report = uzawa_solve(problem, max_iter=3)
        self.assertFalse(report.converged)
        self.assertEqual(report.iterations, 3)
        self.assertTrue(report.message)
        with self.assertRaises(ConvergenceError):
            report.raise_for_status()

    def test_step_size(self):
        problem = small_problem()
        with self.assertRaises(StepSizeError):
            uzawa_solve(problem, dr1=1e8, dr2=1e8, max_iter=20000)

    def test_not_positive_definite(self):
        grid = build_grid(2, 0.2, 4, 3)
        problem = QpProblem(-np.eye(grid.n), np.asarray(grid.alpha), 1.0)
        with self.assertRaises(NotPositiveDefiniteError):
            uzawa_solve(problem)


class TestKkt(TestCase):

    def test_feasibility(self):
        problem = small_problem(wave=False)
        zeros = np.zeros(problem.n)
        residuals = kkt_residuals(problem, zeros, zeros, 0.0)
        self.assertAlmostEqual(residuals.feasibility, problem.v_tilde, places=10)
        self.assertEqual(residuals.stationarity, 0)
        self.assertEqual(residuals.complementarity, 0)
        with self.assertRaises(ValueError):
            kkt_residuals(problem, zeros[1:], zeros, 0.0)

    def test_projection(self):
        rng = np.random.default_rng(11)
        alpha = np.concatenate([np.ones(12), 0.5 * np.ones(4)])
        for _ in range(10):
            y = rng.normal(size=16)
            projected = project_weighted_simplex(y, alpha, 3.0)
            self.assertTrue(np.all(projected >= 0))
            self.assertAlmostEqual(float(alpha @ projected), 3.0, places=10)
            # optimality: y - p is a multiple of alpha on the support
            support = projected > 0
            ratio = (y - projected)[support] / alpha[support]
            self.assertAlmostEqual(float(np.ptp(ratio)), 0, places=10)

        feasible = np.full(16, 3.0 / alpha.sum())
        np.testing.assert_allclose(project_weighted_simplex(feasible, alpha, 3.0), feasible, rtol=1e-12)
        self.assertFalse(np.any(project_weighted_simplex(rng.normal(size=16), alpha, 0.0)))


def run_assertions(obj, problem, report):
    obj.assertTrue(report.converged, msg=report.message)
    obj.assertTrue(np.all(report.values >= 0), msg='negative offsets')
    obj.assertTrue(np.all(report.lambda1 <= 0), msg='positive multiplier of F >= 0')
    obj.assertAlmostEqual(problem.volume(report.values) / problem.v_tilde, 1, places=10)
    wave, viscous = problem.parts(report.values)
    obj.assertAlmostEqual(report.objective, wave + viscous, places=10)
