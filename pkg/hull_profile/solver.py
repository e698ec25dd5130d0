import logging
from dataclasses import dataclass, field
from math import sqrt

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, eigvalsh

logger = logging.getLogger(__name__)

BURN_IN = 500
BLOW_UP = 1e4
POWER_STEPS = 20


class NotPositiveDefiniteError(ValueError):
    """Cholesky factorization of the objective matrix failed."""


class ConvergenceError(RuntimeError):
    """The Uzawa iteration stopped before meeting its tolerance."""


class StepSizeError(ConvergenceError):
    """The Uzawa residual blew up; the steps dr1, dr2 are too large."""


@dataclass(frozen=True, eq=False)
class QpProblem:
    """
    min F^t Q F  subject to  F >= 0  and  alpha^t F = v_tilde

    Q = prefactor M_w + eps M_d. wave and drag keep the two parts so the objective can be split.
    """
    q: np.ndarray
    alpha: np.ndarray
    v_tilde: float
    wave: object = None
    drag: object = None
    prefactor: float = 0.0
    eps: float = 0.0
    grid: object = None

    def __post_init__(self):
        n = len(self.alpha)
        if self.q.shape != (n, n):
            raise ValueError('Q has shape {}, expected ({}, {})'.format(self.q.shape, n, n))
        if self.v_tilde < 0:
            raise ValueError('the target volume must be non-negative')

    @property
    def n(self):
        return len(self.alpha)

    def objective(self, values):
        return float(values @ self.q @ values)

    def parts(self, values):
        """(wave, viscous) resistance of F; the wave part is 0 without M_w"""
        wave = self.prefactor * self.wave.quadratic(values) if self.wave is not None else 0.0
        if self.drag is not None:
            viscous = self.eps * self.drag.quadratic(values)
        else:
            viscous = self.objective(values) - wave
        return wave, viscous

    def volume(self, values):
        return float(self.alpha @ values)


def combine_objective(wave_matrix, drag_matrix, rho, g, v, eps, volume):
    """
    Build the quadratic program of the total resistance.

    Parameters
    ----------
    wave_matrix: WaveMatrix, None
        None drops the wave resistance, leaving the pure viscous problem
    drag_matrix: DragMatrix
    rho, g, v: num
        density, gravity and Kelvin wave number
    eps: num
        1/2 rho Cd U^2, > 0
    volume: num
        half-volume V, m3; the discrete target is V / (dx dz)

    Returns
    -------
    problem: QpProblem
    """
    from .wave import wave_prefactor

    if not eps > 0:
        raise ValueError('eps must be positive')
    grid = drag_matrix.grid
    q = eps * drag_matrix.toarray()
    prefactor = 0.0
    if wave_matrix is not None:
        if wave_matrix.n != drag_matrix.n:
            raise ValueError('M_w is {0}x{0} but M_d is {1}x{1}'.format(wave_matrix.n, drag_matrix.n))
        if abs(wave_matrix.v - v) > 1e-12 * v:
            raise ValueError('M_w was assembled for v = {}, not {}'.format(wave_matrix.v, v))
        prefactor = wave_prefactor(rho, g, v)
        q += prefactor * wave_matrix.matrix
    q = 0.5 * (q + q.T)
    q.setflags(write=False)
    return QpProblem(q, np.asarray(grid.alpha), volume / grid.cell_area, wave_matrix, drag_matrix,
                     prefactor, float(eps), grid)


@dataclass(frozen=True)
class KktResiduals:
    """Absolute optimality residuals of (F, lambda1, lambda2)."""
    stationarity: float
    volume: float
    negativity: float
    complementarity: float

    @property
    def feasibility(self):
        return max(self.volume, self.negativity)

    def to_dict(self):
        return {'stationarity': self.stationarity, 'feasibility': self.feasibility,
                'volume': self.volume, 'negativity': self.negativity,
                'complementarity': self.complementarity}


def kkt_residuals(problem, values, lambda1, lambda2):
    """
    KKT residuals of the volume-constrained QP
    :param problem: QpProblem
    :param values: F
    :param lambda1: multiplier of F >= 0, <= 0
    :param lambda2: multiplier of the volume constraint
    :return: KktResiduals with ||2QF + lambda1 + lambda2 alpha||_inf, |alpha^t F - v_tilde|,
             max |min(f_i, 0)| and max |lambda1_i f_i|
    """
    values = np.asarray(values, dtype=float)
    lambda1 = np.asarray(lambda1, dtype=float)
    if values.shape != (problem.n,) or lambda1.shape != (problem.n,):
        raise ValueError('F and lambda1 must have length {}'.format(problem.n))
    gradient = 2 * problem.q @ values + lambda1 + lambda2 * problem.alpha
    return KktResiduals(
        stationarity=float(np.max(np.abs(gradient))),
        volume=abs(problem.volume(values) - problem.v_tilde),
        negativity=float(np.max(np.maximum(-values, 0.0))),
        complementarity=float(np.max(np.abs(lambda1 * values))))


def relative_residuals(problem, values, lambda1, lambda2, residuals=None):
    """the residuals above scaled by ||2QF||, v_tilde and ||F|| so one tolerance fits every grid"""
    if residuals is None:
        residuals = kkt_residuals(problem, values, lambda1, lambda2)
    f_scale = max(np.max(np.abs(values)), np.finfo(float).tiny)
    g_scale = max(np.max(np.abs(2 * problem.q @ values)), np.finfo(float).tiny)
    l_scale = max(np.max(np.abs(lambda1)), np.finfo(float).tiny)
    return KktResiduals(
        stationarity=residuals.stationarity / g_scale,
        volume=residuals.volume / problem.v_tilde if problem.v_tilde > 0 else residuals.volume,
        negativity=residuals.negativity / f_scale,
        complementarity=residuals.complementarity / (l_scale * f_scale))


@dataclass
class UzawaState:
    """Iterate of the Uzawa saddle-point iteration."""
    values: np.ndarray
    lambda1: np.ndarray
    lambda2: float
    dr1: float
    dr2: float
    iteration: int = 0
    history: list = field(default_factory=list)


@dataclass(eq=False)
class SolveReport:
    values: np.ndarray
    objective: float
    wave_part: float
    viscous_part: float
    iterations: int
    converged: bool
    residuals: KktResiduals
    relative: KktResiduals
    lambda1: np.ndarray
    lambda2: float
    dr1: float
    dr2: float
    trace: list
    message: str = ''

    def raise_for_status(self):
        if not self.converged:
            raise ConvergenceError(self.message or 'Uzawa iteration did not converge')
        return self

    def to_dict(self):
        return {'objective': self.objective, 'wave_part': self.wave_part, 'viscous_part': self.viscous_part,
                'iterations': self.iterations, 'converged': self.converged,
                'residuals': self.residuals.to_dict(), 'relative_residuals': self.relative.to_dict(),
                'lambda2': self.lambda2, 'dr1': self.dr1, 'dr2': self.dr2, 'message': self.message}


def factorize(q):
    try:
        return cho_factor(q, lower=True)
    except LinAlgError as error:
        raise NotPositiveDefiniteError('Q is not positive definite: {}'.format(error)) from None


def inverse_norm(q_inv, steps=POWER_STEPS):
    """power-iteration estimate of ||Q^-1||_2"""
    vector = np.ones(q_inv.shape[0]) / sqrt(q_inv.shape[0])
    estimate = 0.0
    for _ in range(steps):
        image = q_inv @ vector
        estimate = float(np.linalg.norm(image))
        if estimate == 0:
            break
        vector = image / estimate
    return estimate


def default_steps(q_inv, alpha):
    """dr1 = 1 / ||Q^-1||, dr2 = 1 / (alpha^t Q^-1 alpha)"""
    return 1.0 / inverse_norm(q_inv), 1.0 / float(alpha @ q_inv @ alpha)


def uzawa_solve(problem, dr1=None, dr2=None, tol=1e-8, max_iter=200000, f_init=None, accelerate=False,
                log_every=1000, trace_every=100):
    """
    Solve the QP by the Uzawa iteration

        F       = -1/2 Q^-1 (lambda1 + lambda2 alpha)
        lambda1 = min(0, lambda1 + dr1 F)
        lambda2 = lambda2 + dr2 (alpha^t F - v_tilde)

    Parameters
    ----------
    problem: QpProblem
    dr1, dr2: num, None
        dual steps; 1/||Q^-1|| and 1/(alpha^t Q^-1 alpha) when None
    tol: num
        bound on the relative update and KKT residuals
    max_iter: int
    f_init: array, None
        starting hull; the multipliers are initialized from its gradient
    accelerate: bool
        extrapolate the multipliers with restarted Nesterov momentum
    log_every: int
        iterations between DEBUG progress lines
    trace_every: int
        iterations between entries of the residual trace

    Returns
    -------
    report: SolveReport
        converged=False when max_iter is reached

    Raises
    ------
    NotPositiveDefiniteError
        Q has no Cholesky factor
    StepSizeError
        the residual grows by more than 1e4 after the burn-in, or an iterate is not finite
    """
    n = problem.n
    alpha = problem.alpha
    v_tilde = problem.v_tilde
    factor = factorize(problem.q)

    if v_tilde == 0:
        zeros = np.zeros(n)
        residuals = kkt_residuals(problem, zeros, zeros, 0.0)
        return SolveReport(zeros, 0.0, 0.0, 0.0, 0, True, residuals, residuals, zeros, 0.0,
                           dr1 or 0.0, dr2 or 0.0, [], 'zero volume')

    q_inv = cho_solve(factor, np.eye(n))
    q_inv = 0.5 * (q_inv + q_inv.T)
    q_inv_alpha = q_inv @ alpha
    default_dr1, default_dr2 = default_steps(q_inv, alpha)
    dr1 = default_dr1 if dr1 is None else float(dr1)
    dr2 = default_dr2 if dr2 is None else float(dr2)
    if not (dr1 > 0 and dr2 > 0):
        raise ValueError('dr1 and dr2 must be positive')

    if f_init is None:
        f_init = np.full(n, v_tilde / float(np.sum(alpha)))
    f_init = np.asarray(f_init, dtype=float)
    if f_init.shape != (n,):
        raise ValueError('F_init has shape {}, expected ({},)'.format(f_init.shape, n))
    gradient = -2 * problem.q @ f_init
    lambda2 = float(alpha @ gradient / (alpha @ alpha))
    lambda1 = np.minimum(0.0, gradient - lambda2 * alpha)

    state = UzawaState(f_init.copy(), lambda1, lambda2, dr1, dr2)
    y1, y2 = lambda1.copy(), lambda2
    momentum = 1.0
    best = np.inf
    converged = False
    message = ''

    while state.iteration < max_iter:
        state.iteration += 1
        active = np.flatnonzero(y1)
        values = -0.5 * (q_inv[:, active] @ y1[active] + y2 * q_inv_alpha)

        lambda1 = np.minimum(0.0, y1 + dr1 * values)
        volume_gap = float(alpha @ values) - v_tilde
        lambda2 = y2 + dr2 * volume_gap

        f_scale = max(np.max(np.abs(values)), np.finfo(float).tiny)
        g_scale = max(np.max(np.abs(y1 + y2 * alpha)), np.finfo(float).tiny)
        l_scale = max(np.max(np.abs(lambda1)), np.finfo(float).tiny)
        residual = max(np.max(np.abs(values - state.values)) / f_scale,
                       np.max(np.abs(lambda1 - y1 + (lambda2 - y2) * alpha)) / g_scale,
                       abs(volume_gap) / v_tilde,
                       np.max(np.maximum(-values, 0.0)) / f_scale,
                       np.max(np.abs(lambda1 * values)) / (l_scale * f_scale))

        if not np.isfinite(residual) or not np.all(np.isfinite(values)):
            raise StepSizeError('non-finite Uzawa iterate at iteration {} (dr1 = {:g}, dr2 = {:g})'
                                .format(state.iteration, dr1, dr2))
        best = min(best, residual)
        if state.iteration > BURN_IN and residual > BLOW_UP * best:
            raise StepSizeError('Uzawa residual grew from {:.3e} to {:.3e} (dr1 = {:g}, dr2 = {:g})'
                                .format(best, residual, dr1, dr2))

        if accelerate:
            # restart when the momentum points against the dual ascent step
            if np.dot(lambda1 - y1, lambda1 - state.lambda1) + (lambda2 - y2) * (lambda2 - state.lambda2) < 0:
                momentum = 1.0
            next_momentum = 0.5 * (1 + sqrt(1 + 4 * momentum ** 2))
            beta = (momentum - 1) / next_momentum
            momentum = next_momentum
            y1 = np.minimum(0.0, lambda1 + beta * (lambda1 - state.lambda1))
            y2 = lambda2 + beta * (lambda2 - state.lambda2)
        else:
            y1, y2 = lambda1, lambda2

        state.values, state.lambda1, state.lambda2 = values, lambda1, lambda2
        if state.iteration % trace_every == 0 or state.iteration == 1:
            state.history.append((state.iteration, residual))
        if state.iteration % log_every == 0:
            logger.debug('uzawa iteration %d: residual %.3e', state.iteration, residual)
        if residual < tol:
            converged = True
            state.history.append((state.iteration, residual))
            break

    if not converged:
        message = 'no convergence in {} iterations, residual {:.3e}'.format(max_iter, residual)
        logger.warning(message)

    values = polish(state.values, alpha, v_tilde)
    residuals = kkt_residuals(problem, values, state.lambda1, state.lambda2)
    relative = relative_residuals(problem, values, state.lambda1, state.lambda2, residuals)
    wave, viscous = problem.parts(values)
    logger.info('uzawa: %s after %d iterations, objective %.6g', 'converged' if converged else 'stopped',
                state.iteration, wave + viscous)
    return SolveReport(values, wave + viscous, wave, viscous, state.iteration, converged, residuals, relative,
                       state.lambda1, state.lambda2, dr1, dr2, state.history, message)


def polish(values, alpha, v_tilde):
    """clip negative offsets and rescale to the exact target volume"""
    values = np.maximum(values, 0.0)
    volume = float(alpha @ values)
    if volume > 0:
        values = values * (v_tilde / volume)
    return values


def project_weighted_simplex(y, alpha, v_tilde):
    """
    Euclidean projection onto {F >= 0, alpha^t F = v_tilde}
    :param y: point to project
    :param alpha: positive weights
    :param v_tilde: target, >= 0
    :return: max(y - tau alpha, 0), tau from the sorted breakpoints y_i / alpha_i
    """
    y = np.asarray(y, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if v_tilde < 0:
        raise ValueError('the target volume must be non-negative')
    if v_tilde == 0:
        return np.zeros_like(y)

    order = np.argsort(-y / alpha)
    ratio = y[order] / alpha[order]
    weighted = np.cumsum(alpha[order] * y[order])
    squares = np.cumsum(alpha[order] ** 2)
    taus = (weighted - v_tilde) / squares
    # support = the k largest ratios, k the last index where the ratio stays above tau
    k = int(np.flatnonzero(ratio > taus)[-1])
    return np.maximum(y - taus[k] * alpha, 0.0)


def reference_qp_oracle(problem, iterations=1000000, tol=1e-13):
    """
    Independent solution of the QP by accelerated projected gradient with function-value
    restart, step 1 / (2 lambda_max(Q)).

    :param problem: QpProblem
    :param iterations: iteration cap
    :param tol: stop when the projected-gradient step is below tol * max(F)
    :return: F*
    """
    q = problem.q
    alpha = problem.alpha
    step = 1.0 / (2 * float(eigvalsh(q, subset_by_index=[problem.n - 1, problem.n - 1])[0]))

    def objective(values):
        return float(values @ q @ values)

    def gradient_step(values):
        return project_weighted_simplex(values - step * 2 * (q @ values), alpha, problem.v_tilde)

    def stationary(values):
        scale = max(np.max(np.abs(values)), np.finfo(float).tiny)
        return np.max(np.abs(gradient_step(values) - values)) <= tol * scale

    x = project_weighted_simplex(np.full(problem.n, problem.v_tilde / float(np.sum(alpha))), alpha,
                                 problem.v_tilde)
    y = x.copy()
    fx = objective(x)
    t = 1.0
    for k in range(iterations):
        if k % 50 == 0 and stationary(x):
            break
        z = gradient_step(y)
        fz = objective(z)
        if fz > fx:
            # restart the momentum from the last accepted point
            y, t = x, 1.0
            continue
        t_new = 0.5 * (1 + sqrt(1 + 4 * t * t))
        y = z + ((t - 1) / t_new) * (z - x)
        x, fx, t = z, fz, t_new
    else:
        logger.warning('reference oracle stopped after %d iterations', iterations)
    return x
