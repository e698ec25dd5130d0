import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import ceil, pi

import numpy as np
from numpy.polynomial.legendre import leggauss

from .equations import a_sum, b_minus, b_plus
from .hull import Hull
from .quadrature import K_LAMBDA_MAX, build_quadrature, octave_rule, omega_zero

logger = logging.getLogger(__name__)

# lambda nodes per accumulated block; fixed so the sum is the same whatever the thread count
_BLOCK = 16

# direct quadrature: phase per Gauss piece and x points per evaluation batch
_MAX_PHASE = 3.0
_X_CHUNK = 4096


def wave_prefactor(rho, g, v):
    """4 rho g v^3 / pi"""
    return 4 * rho * g * v ** 3 / pi


def j_matrix(grid, v, lam):
    """
    Rows J(lambda_j) for a batch of lambda values
    :param grid: GridSpec
    :param v: Kelvin wave number, 1/m
    :param lam: array of lambda values, >= 1
    :return: array (len(lam), N)
    """
    if not v > 0:
        raise ValueError('v must be positive')
    lam = np.atleast_1d(np.asarray(lam, dtype=float))[:, None]
    if np.any(lam < 1):
        raise ValueError('lambda must be >= 1')
    a = a_sum(lam, v, grid.x[None, :], grid.dx)
    b = b_plus(lam, v, grid.z[None, :], grid.dz) + b_minus(lam, v, grid.z[None, :], grid.dz)
    return a * b / grid.cell_area


def j_vector(grid, v, lam):
    """(J(lambda))_i = (a+ + a-)(b+ + b-) / (dx dz), the lambda-kernel of the hat function of node i"""
    return j_matrix(grid, v, [lam])[0]


@dataclass(frozen=True, eq=False)
class WaveMatrix:
    """
    Geometric part M_w of the discrete wave resistance. The physical prefactor 4 rho g v^3 / pi
    is applied at evaluation.
    """
    matrix: np.ndarray
    grid: object
    v: float
    quadrature: object

    @property
    def n(self):
        return self.matrix.shape[0]

    def quadratic(self, values):
        values = self.grid.check_vector(values)
        return float(values @ self.matrix @ values)

    def info(self):
        return {'n': self.n, 'v': self.v, 'quadrature': self.quadrature.info()}


def assemble_wave_matrix(grid, v, quadrature=None, n_octave=80, k_lambda_max=K_LAMBDA_MAX, tol=1e-12, jobs=1):
    """
    Assemble M_w = omega_0 J(1) J(1)^t + sum_j omega_j J(lambda_j) J(lambda_j)^t.

    Parameters
    ----------
    grid: GridSpec
    v: num
        Kelvin wave number g / U^2, 1/m
    quadrature: LambdaQuadrature, None
        fixed lambda rule. When None, octaves of n_octave midpoints are added until the
        Frobenius norm of an octave's contribution falls below tol times the accumulated norm,
        with at most k_lambda_max octaves.
    jobs: int
        threads evaluating J; the accumulation order does not depend on it

    Returns
    -------
    wave_matrix: WaveMatrix
    """
    n = grid.n
    try:
        matrix = np.zeros((n, n))
    except MemoryError:
        raise MemoryError('M_w needs {} bytes for N = {}; reduce Nx or Nz'.format(8 * n * n, n)) from None

    executor = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        _accumulate(matrix, grid, v, np.array([1.0]),
                    np.array([quadrature.omega_zero if quadrature is not None else omega_zero(n_octave)]), executor)

        if quadrature is not None:
            for k in range(quadrature.k_lambda):
                idx = quadrature.octave_slice(k)
                _accumulate(matrix, grid, v, quadrature.nodes[idx], quadrature.weights[idx], executor)
        else:
            if int(k_lambda_max) != k_lambda_max or not 1 <= k_lambda_max <= K_LAMBDA_MAX:
                raise ValueError('k_lambda_max must be an integer in [1, {}]'.format(K_LAMBDA_MAX))
            k_reached = 0
            for k in range(int(k_lambda_max)):
                lam, weights = octave_rule(k, n_octave)
                contribution = _accumulate(matrix, grid, v, lam, weights, executor)
                k_reached = k + 1
                total = np.linalg.norm(matrix)
                logger.debug('octave %d: contribution %.3e, accumulated %.3e', k, contribution, total)
                if contribution < tol * total:
                    break
            else:
                logger.info('lambda quadrature reached k_lambda_max = %d before tol = %g', k_lambda_max, tol)
            quadrature = build_quadrature(n_octave, k_reached)
    finally:
        if executor is not None:
            executor.shutdown()

    # exact symmetry; the BLAS products are symmetric only up to rounding
    matrix += matrix.T
    matrix *= 0.5
    matrix.setflags(write=False)
    logger.info('assembled M_w: N = %d, %d lambda nodes, K = %d', n, len(quadrature), quadrature.k_lambda)
    return WaveMatrix(matrix, grid, float(v), quadrature)


def _accumulate(matrix, grid, v, lam, weights, executor):
    """adds sum_j w_j J_j J_j^t in ascending lambda, returns the Frobenius norm of the addition"""
    chunks = [slice(i, i + _BLOCK) for i in range(0, len(lam), _BLOCK)]

    def block(chunk):
        return np.sqrt(weights[chunk])[:, None] * j_matrix(grid, v, lam[chunk])

    blocks = executor.map(block, chunks) if executor is not None else map(block, chunks)
    rows = []
    for b in blocks:
        matrix += b.T @ b
        rows.append(b)
    rows = np.vstack(rows)
    # ||B^t B||_F = ||B B^t||_F
    return float(np.linalg.norm(rows @ rows.T))


def wave_resistance(values, wave_matrix, rho, g, v):
    """
    Michell wave resistance of the hull
    :param values: array of N nodal offsets, m
    :param wave_matrix: WaveMatrix assembled at the same v
    :param rho: water density, kg/m3
    :param g: gravity, m/s2
    :param v: Kelvin wave number, 1/m
    :return: (4 rho g v^3 / pi) F^t M_w F, N
    """
    if abs(v - wave_matrix.v) > 1e-12 * wave_matrix.v:
        raise ValueError('M_w was assembled for v = {}, not {}'.format(wave_matrix.v, v))
    return wave_prefactor(rho, g, v) * wave_matrix.quadratic(values)


def _gauss_pieces(breaks, max_step, order):
    """Gauss-Legendre points and weights on every interval of breaks, cut into pieces no longer than max_step"""
    nodes, weights = leggauss(order)
    points, point_weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a:
            continue
        pieces = max(1, int(ceil((b - a) / max_step)))
        edges = np.linspace(a, b, pieces + 1)
        half = 0.5 * np.diff(edges)[:, None]
        points.append((0.5 * (edges[:-1] + edges[1:])[:, None] + half * nodes).ravel())
        point_weights.append((half * weights).ravel())
    return np.concatenate(points), np.concatenate(point_weights)


def wave_resistance_direct(hull, rho, g, v, quadrature, order=8, full=False, domain=None, breaks=None):
    """
    Wave resistance from a direct 2D quadrature of the hull's Fourier-Laplace transform.

    Parameters
    ----------
    hull: Hull or callable
        a Hull, or a vectorized f(x, z) together with domain=(L, T)
    rho, g, v: num
        density, gravity and Kelvin wave number
    quadrature: LambdaQuadrature
        lambda rule shared with the matrix path
    order: int
        Gauss-Legendre points per piece; pieces are cut so the phase per piece stays below 3
    full: bool
        include the sin transform, which the cos-only form drops
    domain: tuple, None
        (L, T) when hull is a callable
    breaks: tuple, None
        (x_breaks, z_breaks) where the integrand may have kinks; the grid lines of a Hull by default

    Returns
    -------
    resistance: float, N
    """
    if isinstance(hull, Hull):
        length, draft = hull.grid.length, hull.grid.draft
        function = hull.get_point
        if breaks is None:
            breaks = (hull.grid.x_lines, hull.grid.z_lines)
    else:
        if domain is None:
            raise ValueError('domain=(L, T) is required when the hull is a function')
        length, draft = domain
        function = hull
        if breaks is None:
            breaks = (np.array([-length / 2, length / 2]), np.array([0.0, draft]))
    x_breaks, z_breaks = (np.asarray(b, dtype=float) for b in breaks)

    # one set of Gauss points per octave, fine enough for its largest lambda
    octaves = np.maximum(quadrature.octave, 0)
    total = 0.0
    for k in np.unique(octaves):
        idx = np.flatnonzero(octaves == k)
        lam = quadrature.nodes[idx][:, None]
        x, wx = _gauss_pieces(x_breaks, _MAX_PHASE / (lam[-1, 0] * v), order)
        # exp(-lambda^2 v z) < exp(-40) below z_top
        z_top = min(draft, 40.0 / (lam[0, 0] ** 2 * v))
        z_cut = np.concatenate([z_breaks[z_breaks < z_top], [z_top]])
        z, wz = _gauss_pieces(z_cut, _MAX_PHASE / (lam[-1, 0] ** 2 * v), order)
        depth = wz * np.exp(-lam ** 2 * v * z)

        cos_part = np.zeros(len(idx))
        sin_part = np.zeros(len(idx))
        for start in range(0, len(x), _X_CHUNK):
            xs, ws = x[start:start + _X_CHUNK], wx[start:start + _X_CHUNK]
            columns = depth @ function(xs[None, :], z[:, None])
            cos_part += np.sum(columns * ws * np.cos(lam * v * xs), axis=1)
            if full:
                sin_part += np.sum(columns * ws * np.sin(lam * v * xs), axis=1)
        total += float(np.sum(quadrature.weights[idx] * (cos_part ** 2 + sin_part ** 2)))
    return wave_prefactor(rho, g, v) * total


@dataclass(frozen=True)
class SineBump:
    """
    h(x, z) = sin^4(pi (x - x0) / (x1 - x0)) sin^4(pi (z - z0) / (z1 - z0)) on its support, 0 elsewhere
    """
    x0: float
    x1: float
    z0: float
    z1: float
    amplitude: float = 1.0

    @classmethod
    def centered(cls, length, draft, amplitude=1.0):
        """support x in [-3L/8, 3L/8], z in [T/8, 7T/8]"""
        return cls(-3 * length / 8, 3 * length / 8, draft / 8, 7 * draft / 8, amplitude)

    def _factors(self, s, s0, s1):
        p = pi / (s1 - s0)
        inside = (s > s0) & (s < s1)
        phase = p * (s - s0)
        sn, cs = np.sin(phase), np.cos(phase)
        value = np.where(inside, sn ** 4, 0.0)
        first = np.where(inside, 4 * p * sn ** 3 * cs, 0.0)
        second = np.where(inside, p ** 2 * (12 * sn ** 2 * cs ** 2 - 4 * sn ** 4), 0.0)
        return value, first, second

    def null_field(self, x, z, v):
        """f = d2h/dx2 + v dh/dz, whose transform vanishes for every lambda"""
        hx, _, hxx = self._factors(np.asarray(x, dtype=float), self.x0, self.x1)
        hz, dhz, _ = self._factors(np.asarray(z, dtype=float), self.z0, self.z1)
        return self.amplitude * (hxx * hz + v * hx * dhz)


def null_space_residual(grid, v, bump, quadrature):
    """
    Relative wave resistance of the sampled null field f = d2h/dx2 + v dh/dz.

    :param grid: GridSpec
    :param v: Kelvin wave number, 1/m
    :param bump: SineBump with support strictly inside the domain
    :param quadrature: LambdaQuadrature
    :return: sum_j w_j (J_j . F)^2 / sum_j w_j (|J_j| . |F|)^2, 0 for h = 0
    """
    if not (-grid.length / 2 < bump.x0 < bump.x1 < grid.length / 2 and 0 < bump.z0 < bump.z1 < grid.draft):
        raise ValueError('the bump support must lie strictly inside the hull domain')
    values = bump.null_field(grid.x, grid.z, v)
    if not np.any(values):
        return 0.0
    rows = j_matrix(grid, v, quadrature.nodes)
    numerator = np.sum(quadrature.weights * (rows @ values) ** 2)
    denominator = np.sum(quadrature.weights * (np.abs(rows) @ np.abs(values)) ** 2)
    return float(numerator / denominator)
