import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.linalg import eigvalsh

from .create_hull import wigley_hull
from .hull import Hull, full_field, normalize_volume
from .load_hull import load
from .quadrature import build_quadrature
from .solver import ConvergenceError, combine_objective, uzawa_solve
from .viscous import assemble_drag_matrix
from .wave import assemble_wave_matrix

logger = logging.getLogger(__name__)

SPECTRUM_MAX_N = 4000


@dataclass(eq=False)
class SpectrumReport:
    """|eigenvalues| of M_w in decreasing order and the counts above relative thresholds."""
    eigenvalues: np.ndarray
    counts: dict
    n: int
    grid: dict = field(default_factory=dict)
    fr: float = None

    def count_above(self, threshold):
        if len(self.eigenvalues) == 0 or self.eigenvalues[0] == 0:
            return 0
        return int(np.sum(self.eigenvalues > threshold * self.eigenvalues[0]))

    def to_frame(self):
        return pd.DataFrame({'index': np.arange(len(self.eigenvalues)), 'abs_eigenvalue': self.eigenvalues})

    def to_dict(self):
        return {'n': self.n, 'fr': self.fr, 'grid': self.grid, 'max': float(self.eigenvalues[0]),
                'counts': {'{:g}'.format(k): v for k, v in self.counts.items()}}


def spectrum(wave_matrix, thresholds=(1e-12, 1e-15), fr=None):
    """
    Eigenvalue census of M_w.

    :param wave_matrix: WaveMatrix
    :param thresholds: relative thresholds t, counting eigenvalues above t * max
    :param fr: Froude number, reported only
    :return: SpectrumReport
    """
    n = wave_matrix.n
    if n > SPECTRUM_MAX_N:
        raise ValueError('N = {} is above {} for a dense eigen-decomposition; use a coarser grid'
                         .format(n, SPECTRUM_MAX_N))
    values = np.sort(np.abs(eigvalsh(wave_matrix.matrix)))[::-1]
    report = SpectrumReport(values, {}, n, wave_matrix.grid.info(), fr)
    report.counts = {t: report.count_above(t) for t in thresholds}
    logger.info('spectrum: N = %d, counts %s', n, report.counts)
    return report


@dataclass(eq=False)
class Optimum:
    hull: Hull
    report: object
    flow: object
    eps: float


def wave_matrix_for(config, grid, flow, jobs=1):
    q = config.quadrature
    quadrature = build_quadrature(q.n_octave, q.k_lambda) if q.k_lambda is not None else None
    return assemble_wave_matrix(grid, flow.v, quadrature, n_octave=q.n_octave, k_lambda_max=q.k_lambda_max,
                                tol=q.tol, jobs=jobs)


def initial_guess(config, grid):
    s = config.solver
    if s.init == 'flat':
        return None
    if s.init == 'wigley':
        return wigley_hull(grid, config.physical.volume).values
    hull = load(s.init_file, grid=grid)
    return normalize_volume(grid, np.maximum(hull.values, 0.0), config.physical.volume)


def optimize_hull(config, fr=None, eps_factor=1.0, wave=True, drag_matrix=None, wave_matrix=None, f_init=None,
                  accelerate=None, jobs=1):
    """
    Minimize the total resistance of a hull of the configured volume.

    Parameters
    ----------
    config: RunConfig
    fr: num, None
        Froude number, the configured one when None
    eps_factor: num
        multiplies eps = 1/2 rho Cd U^2
    wave: bool
        False solves the pure viscous problem
    drag_matrix, wave_matrix: prebuilt matrices to reuse across calls
    f_init: array, None
        starting hull, from config.solver.init when None
    accelerate: bool, None
        momentum on the multipliers, config.solver.accelerate when None

    Returns
    -------
    optimum: Optimum
    """
    grid = config.build_grid()
    flow = config.flow(fr)
    eps = flow.eps * eps_factor
    if drag_matrix is None:
        drag_matrix = assemble_drag_matrix(grid)
    if wave and wave_matrix is None:
        wave_matrix = wave_matrix_for(config, grid, flow, jobs)
    problem = combine_objective(wave_matrix if wave else None, drag_matrix, flow.rho, flow.g, flow.v, eps,
                                flow.volume)
    if f_init is None:
        f_init = initial_guess(config, grid)
    s = config.solver
    report = uzawa_solve(problem, dr1=s.dr1, dr2=s.dr2, tol=s.tol, max_iter=s.max_iter, f_init=f_init,
                         accelerate=s.accelerate if accelerate is None else accelerate)
    hull = Hull(grid, report.values, {'fr': flow.fr, 'eps': eps, 'wave': wave, 'converged': report.converged})
    return Optimum(hull, report, flow, eps)


def pure_drag_optimum(config, fr=None, drag_matrix=None):
    """optimum of eps * integral |grad f|^2 alone; independent of the speed up to scaling of the objective"""
    return optimize_hull(config, fr=fr, wave=False, drag_matrix=drag_matrix)


def hull_distance(hull, reference):
    """relative distance sqrt(sum alpha (f - g)^2 / sum alpha g^2) between two hulls on the same grid"""
    if hull.grid != reference.grid:
        raise ValueError('the hulls live on different grids')
    alpha = np.asarray(hull.grid.alpha)
    norm = float(np.sqrt(np.sum(alpha * reference.values ** 2)))
    if norm == 0:
        raise ValueError('the reference hull is empty')
    return float(np.sqrt(np.sum(alpha * (hull.values - reference.values) ** 2))) / norm


# Froude numbers where the optimum is expected to carry a bulb, and the limits beyond which
# it stays close to the pure-drag shape
BULB_FR = (0.3, 1.0)
NO_BULB_FR = (0.1, 2.0)


def expected_bulb(fr):
    """True at moderate speeds, False at Fr <= 0.1 or Fr >= 2, None in between"""
    if BULB_FR[0] <= fr <= BULB_FR[1]:
        return True
    if fr <= NO_BULB_FR[0] or fr >= NO_BULB_FR[1]:
        return False
    return None


@dataclass
class BowDiagnostic:
    detected: bool
    quadrant_max: float
    stem_value: float
    excess: float = 0.0
    station: float = None

    def to_dict(self):
        return {'detected': self.detected, 'quadrant_max': self.quadrant_max, 'stem_value': self.stem_value,
                'excess': self.excess, 'station': self.station}


def bulbous_bow(hull, rel_tol=1e-6):
    """
    Bulb detector over the forward quadrant x in [-L/2, -L/4], z in [T/2, T].

    Every forward station is compared with its own waterline: a bulb is detected when the largest
    offset of the lower half of some section exceeds the waterline offset of that section by more
    than rel_tol * max(f). At the first station this is the waterline node next to the stem,
    (-L/2 + dx, 0), whose offset is reported as stem_value.

    :param hull: Hull
    :param rel_tol: margin relative to the largest offset
    :return: BowDiagnostic; excess is the largest (lower max - waterline) over the stations and
        station the x where it occurs
    """
    grid = hull.grid
    offsets = full_field(grid, hull.values)
    x, z = grid.x_lines, grid.z_lines
    stations = np.flatnonzero((x > -grid.length / 2) & (x <= -grid.length / 4 + 1e-12 * grid.length))
    lower = z >= grid.draft / 2 - 1e-12 * grid.draft
    if len(stations) == 0 or not np.any(lower):
        return BowDiagnostic(False, 0.0, 0.0)

    section_max = offsets[lower][:, stations].max(axis=0)
    waterline = offsets[0, stations]
    excess = section_max - waterline
    best = int(np.argmax(excess))
    scale = float(np.max(hull.values)) if hull.values.size else 0.0
    detected = bool(scale > 0 and excess[best] > rel_tol * scale)
    return BowDiagnostic(detected, float(section_max.max()), float(waterline[0]), float(excess[best]),
                         float(x[stations[best]]))


@dataclass(eq=False)
class SweepRecord:
    fr: float
    eps: float
    objective: float
    wave: float
    viscous: float
    xbar: float
    zbar: float
    converged: bool
    iterations: int
    bulb: bool = None
    hull: Hull = None
    hull_file: str = None
    error: str = None
    bulb_expected: bool = None
    drag_distance: float = None

    def to_dict(self):
        return {'fr': self.fr, 'eps': self.eps, 'objective': self.objective, 'wave': self.wave,
                'viscous': self.viscous, 'xbar': self.xbar, 'zbar': self.zbar, 'converged': self.converged,
                'iterations': self.iterations, 'bulb': self.bulb, 'bulb_expected': self.bulb_expected,
                'drag_distance': self.drag_distance, 'hull_file': self.hull_file, 'error': self.error}


def sweep_record(optimum):
    """record of one solve; (xbar, zbar) is the center of mass of the half hull x <= 0"""
    report = optimum.report
    xbar, zbar = optimum.hull.center_of_mass(half=True)
    return SweepRecord(optimum.flow.fr, optimum.eps, report.objective, report.wave_part, report.viscous_part,
                       xbar, zbar, report.converged, report.iterations, bulbous_bow(optimum.hull).detected,
                       optimum.hull)


def _failed_record(fr, eps, error):
    nan = float('nan')
    return SweepRecord(fr, eps, nan, nan, nan, nan, nan, False, 0, error=str(error))


def froude_sweep(config, fr_list=None, jobs=1):
    """
    One optimization per Froude number, eps = 1/2 rho Cd U^2 following the speed.

    Every record carries the bulb detector result, the regime expected at its Froude number and
    its relative distance to the pure-drag optimum. A detector result that disagrees with the
    expected regime is logged as a warning.

    :param config: RunConfig
    :param fr_list: Froude numbers, config.experiment.fr_list when None
    :param jobs: concurrent solves
    :return: list of SweepRecord in input order; failed points carry error and converged=False
    """
    fr_list = list(config.experiment.fr_list if fr_list is None else fr_list)
    if any(not fr > 0 for fr in fr_list):
        raise ValueError('Froude numbers must be positive')
    drag_matrix = assemble_drag_matrix(config.build_grid())
    reference = pure_drag_optimum(config, drag_matrix=drag_matrix).hull

    def solve(fr):
        try:
            record = sweep_record(optimize_hull(config, fr=fr, drag_matrix=drag_matrix))
        except (ConvergenceError, ValueError, MemoryError) as error:
            logger.warning('Fr = %g failed: %s', fr, error)
            return _failed_record(fr, config.flow(fr).eps, error)
        if not record.converged:
            logger.warning('Fr = %g did not converge', fr)
        record.drag_distance = hull_distance(record.hull, reference)
        record.bulb_expected = expected_bulb(fr)
        if record.bulb_expected is not None and record.bulb != record.bulb_expected:
            logger.warning('Fr = %g: bulbous-bow detector %s, expected %s at this speed (Cd = %g)', fr,
                           'fires' if record.bulb else 'does not fire',
                           'a bulb' if record.bulb_expected else 'none', config.physical.cd)
        logger.info('Fr = %g: objective %.6g, bulb %s, distance to pure drag %.3g', fr, record.objective,
                    record.bulb, record.drag_distance)
        return record

    return _map(solve, fr_list, jobs)


@dataclass(eq=False)
class BulbSensitivity:
    """detector outcome at one Froude number for several drag coefficients"""
    fr: float
    cd: list
    detected: list

    @property
    def sensitive(self):
        return len(set(self.detected)) > 1

    def to_dict(self):
        return {'fr': self.fr, 'cd': self.cd, 'detected': self.detected, 'sensitive': self.sensitive}


def bulb_cd_sensitivity(config, fr, cd_factors=None, jobs=1):
    """
    Re-run the detector at fr with the drag coefficient scaled by each factor.

    :param config: RunConfig
    :param fr: Froude number
    :param cd_factors: multipliers of physical.cd, config.experiment.cd_factors when None; 1 is always included
    :return: BulbSensitivity, ordered by increasing Cd
    """
    factors = sorted(set([1.0] + list(config.experiment.cd_factors if cd_factors is None else cd_factors)))
    if any(not f > 0 for f in factors):
        raise ValueError('the Cd factors must be positive')
    grid = config.build_grid()
    drag_matrix = assemble_drag_matrix(grid)
    wave_matrix = wave_matrix_for(config, grid, config.flow(fr), jobs)
    cds, detected = [], []
    for factor in factors:
        scaled = config.override('physical', cd=config.physical.cd * factor)
        optimum = optimize_hull(scaled, fr=fr, drag_matrix=drag_matrix, wave_matrix=wave_matrix)
        cds.append(scaled.physical.cd)
        detected.append(bulbous_bow(optimum.hull).detected)
    result = BulbSensitivity(fr, cds, detected)
    logger.info('Fr = %g: bulb detector over Cd %s: %s', fr, cds, detected)
    return result


def bulb_regime(records, config=None, cd_factors=None, jobs=1):
    """
    Summary of the detector against the expected regime over a sweep.

    :param records: SweepRecord list from froude_sweep
    :param config: RunConfig; when given, every disagreeing point is re-run over cd_factors
    :return: dict with the disagreeing Froude numbers and, per disagreement, the Cd sensitivity
    """
    disagreements = [r.fr for r in records
                     if r.error is None and r.bulb_expected is not None and r.bulb != r.bulb_expected]
    summary = {'expected_bulb': list(BULB_FR), 'expected_none': list(NO_BULB_FR), 'disagreements': disagreements,
               'cd_sensitivity': []}
    if config is not None:
        summary['cd'] = config.physical.cd
        summary['cd_sensitivity'] = [bulb_cd_sensitivity(config, fr, cd_factors, jobs).to_dict()
                                     for fr in disagreements]
    return summary


def _map(function, items, jobs):
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            return list(executor.map(function, items))
    return [function(item) for item in items]


@dataclass(eq=False)
class BoundaryLayerResult:
    exponent: float
    stderr: float
    intercept: float
    records: list
    complete: bool

    def widths(self):
        return [r.xbar + r.hull.grid.length / 2 for r in self.records]

    def to_frame(self):
        return pd.DataFrame({'eps': [r.eps for r in self.records], 'width': self.widths(),
                             'objective': [r.objective for r in self.records],
                             'converged': [r.converged for r in self.records]})

    def to_dict(self):
        return {'exponent': self.exponent, 'stderr': self.stderr, 'intercept': self.intercept,
                'complete': self.complete, 'points': self.to_frame().to_dict('records')}


def boundary_layer_sweep(config, eps_factors=None, fr=None, accelerate=True, jobs=1):
    """
    Width of the volume layer at the domain edge as eps -> 0.

    Parameters
    ----------
    config: RunConfig
    eps_factors: list, None
        multipliers of the reference eps, at least 4 spanning at least 3 decades
    fr: num, None
        Froude number, config.experiment.blayer_fr when None
    accelerate: bool
        momentum on the multipliers; small eps makes Q badly conditioned

    Returns
    -------
    result: BoundaryLayerResult
        slope of log(width) against log(eps), width = xbar + L/2 of the half hull
    """
    factors = list(config.experiment.eps_factors if eps_factors is None else eps_factors)
    fr = config.experiment.blayer_fr if fr is None else fr
    if len(factors) < 4 or any(not f > 0 for f in factors):
        raise ValueError('the eps sweep needs at least 4 positive factors')
    if np.log10(max(factors) / min(factors)) < 3 - 1e-9:
        raise ValueError('the eps sweep must span at least 3 decades')

    grid = config.build_grid()
    flow = config.flow(fr)
    drag_matrix = assemble_drag_matrix(grid)
    wave_matrix = wave_matrix_for(config, grid, flow, jobs)

    def solve(factor):
        return optimize_hull(config, fr=fr, eps_factor=factor, drag_matrix=drag_matrix, wave_matrix=wave_matrix,
                             accelerate=accelerate)

    records = []
    complete = True
    for factor in factors:
        try:
            optimum = solve(factor)
        except ConvergenceError as error:
            logger.warning('boundary-layer sweep aborted at eps factor %g: %s', factor, error)
            complete = False
            break
        record = sweep_record(optimum)
        records.append(record)
        if not record.converged:
            logger.warning('boundary-layer sweep aborted at eps factor %g: no convergence', factor)
            complete = False
            break

    exponent = stderr = intercept = float('nan')
    if len(records) >= 4:
        log_eps = np.log([r.eps for r in records])
        log_width = np.log([r.xbar + grid.length / 2 for r in records])
        (exponent, intercept), cov = np.polyfit(log_eps, log_width, 1, cov=True)
        stderr = float(np.sqrt(cov[0, 0]))
    logger.info('boundary layer: exponent %.4f +- %.4f', exponent, stderr)
    return BoundaryLayerResult(float(exponent), stderr, float(intercept), records, complete)


def total_resistance(problem, values):
    wave, viscous = problem.parts(values)
    return wave + viscous, wave, viscous


@dataclass(eq=False)
class WigleyComparison:
    table: pd.DataFrame
    fr_design: float
    crossover: bool

    def to_dict(self):
        return {'fr_design': self.fr_design, 'crossover': self.crossover, 'rows': self.table.to_dict('records')}


def wigley_compare(config, fr_list=None, fr_design=None, jobs=1):
    """
    Total resistance of the Wigley hull, of the hull optimized at each Fr and of the hull optimized
    at fr_design, all on the same grid and volume.

    :param config: RunConfig
    :param fr_list: Froude numbers, config.experiment.wigley_fr_list when None
    :param fr_design: design Froude number, config.experiment.fr_design when None
    :return: WigleyComparison; crossover tells whether the Wigley hull beats the design hull somewhere
    """
    fr_list = list(config.experiment.wigley_fr_list if fr_list is None else fr_list)
    fr_design = config.experiment.fr_design if fr_design is None else fr_design
    if any(not fr > 0 for fr in fr_list) or not fr_design > 0:
        raise ValueError('Froude numbers must be positive')
    grid = config.build_grid()
    drag_matrix = assemble_drag_matrix(grid)
    wigley = normalize_volume(grid, wigley_hull(grid, config.physical.volume).values, config.physical.volume)
    design = optimize_hull(config, fr=fr_design, drag_matrix=drag_matrix, jobs=jobs).report.raise_for_status()

    def row(fr):
        flow = config.flow(fr)
        wave_matrix = wave_matrix_for(config, grid, flow, jobs)
        problem = combine_objective(wave_matrix, drag_matrix, flow.rho, flow.g, flow.v, flow.eps, flow.volume)
        optimum = optimize_hull(config, fr=fr, drag_matrix=drag_matrix, wave_matrix=wave_matrix)
        total_w, wave_w, _ = total_resistance(problem, wigley)
        total_d, wave_d, _ = total_resistance(problem, design.values)
        return {'fr': fr, 'optimized': optimum.report.objective, 'optimized_wave': optimum.report.wave_part,
                'optimized_converged': optimum.report.converged, 'design': total_d, 'design_wave': wave_d,
                'wigley': total_w, 'wigley_wave': wave_w}

    table = pd.DataFrame(_map(row, fr_list, jobs))
    off_design = np.abs(table['fr'] - fr_design) > 1e-12
    crossover = bool(np.any(table['wigley'][off_design] < table['design'][off_design]))
    if not crossover:
        logger.warning('the Wigley hull never beats the hull optimized at Fr = %g over %s', fr_design, fr_list)
    return WigleyComparison(table, fr_design, crossover)


def wigley_hump(config, fr_list=None, jobs=1):
    """
    Wave-resistance coefficient R_w / (1/2 rho U^2 L^2) of the Wigley hull over Fr and its
    local maximum in [0.2, 0.7].

    :return: (fr_peak, table); fr_peak is None when the coefficient has no interior maximum there
    """
    fr_list = sorted(config.experiment.hump_fr_list if fr_list is None else fr_list)
    grid = config.build_grid()
    wigley = normalize_volume(grid, wigley_hull(grid, config.physical.volume).values, config.physical.volume)
    length = config.physical.length

    def row(fr):
        flow = config.flow(fr)
        wave_matrix = wave_matrix_for(config, grid, flow)
        r_wave = flow.wave_prefactor * wave_matrix.quadratic(wigley)
        return {'fr': fr, 'wave': r_wave, 'coefficient': r_wave / (0.5 * flow.rho * flow.speed ** 2 * length ** 2)}

    table = pd.DataFrame(_map(row, fr_list, jobs))
    fr_peak = None
    c = table['coefficient'].to_numpy()
    for i in range(1, len(c) - 1):
        if 0.2 <= table['fr'][i] <= 0.7 and c[i] >= c[i - 1] and c[i] >= c[i + 1]:
            if fr_peak is None or c[i] > table.loc[table['fr'] == fr_peak, 'coefficient'].iloc[0]:
                fr_peak = float(table['fr'][i])
    return fr_peak, table
