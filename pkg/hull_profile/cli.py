import argparse
import logging
import os
import sys

import numpy as np
import pandas as pd
from scipy.integrate import quad

from . import __version__
from .analysis import (boundary_layer_sweep, bulb_regime, bulbous_bow, expected_bulb, froude_sweep, optimize_hull,
                       spectrum, wave_matrix_for, wigley_compare, wigley_hump)
from .config import INIT_CHOICES, ConfigError, RunConfig, load_config
from .create_hull import wigley_hull
from .equations import a_minus, a_plus, b_minus, b_plus
from .flow import flow_params
from .grid import build_grid
from .output import MATRIX_EXPORT_MAX_N, write_hull, write_json, write_matrix, write_quadrature, write_table
from .quadrature import build_quadrature, omega_zero
from .solver import (ConvergenceError, NotPositiveDefiniteError, combine_objective, reference_qp_oracle,
                     uzawa_solve)
from .viscous import assemble_drag_matrix, drag_force, viscous_resistance, wetted_area
from .wave import SineBump, assemble_wave_matrix, null_space_residual, wave_resistance

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '{}: error: {}\n'.format(self.prog, message))


def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', metavar='PATH', help='INI configuration file')
    common.add_argument('--out', metavar='DIR', default='hull_profile_out', help='output directory')
    common.add_argument('--jobs', type=int, default=1, metavar='N', help='threads for assembly and sweeps')
    common.add_argument('--seed', type=int, metavar='N', help='seed of the random fixtures of validate')
    common.add_argument('-v', '--verbose', action='count', default=0, help='-v for INFO, -vv for DEBUG')
    common.add_argument('--fr', type=float, help='Froude number')
    common.add_argument('--n-octave', type=int, help='lambda nodes per octave')
    common.add_argument('--k-lambda-max', type=int, help='largest number of lambda octaves')
    common.add_argument('--quad-tol', type=float, help='relative tolerance closing the lambda octaves')
    common.add_argument('--dr1', type=float, help='Uzawa step of the positivity multiplier')
    common.add_argument('--dr2', type=float, help='Uzawa step of the volume multiplier')
    common.add_argument('--tol', type=float, help='Uzawa tolerance')
    common.add_argument('--max-iter', type=int, help='Uzawa iteration cap')
    common.add_argument('--init', choices=INIT_CHOICES, help='starting hull')
    common.add_argument('--init-file', metavar='PATH', help='hull CSV or xlsx used by --init file')
    return common


def build_parser():
    common = _common_options()
    parser = _Parser(prog='hull-profile', description='Minimum-resistance hulls of fixed volume')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    commands = parser.add_subparsers(dest='command', metavar='command', parser_class=_Parser)
    commands.required = True
    commands.add_parser('optimize', parents=[common], help='optimize one hull')
    commands.add_parser('sweep', parents=[common], help='optimize over a list of Froude numbers')
    spectrum_parser = commands.add_parser('spectrum', parents=[common], help='eigenvalue census of M_w')
    spectrum_parser.add_argument('--dump', action='store_true',
                                 help='also write the lambda quadrature and the dense M_w and M_d')
    commands.add_parser('blayer', parents=[common], help='boundary-layer width as eps -> 0')
    wigley = commands.add_parser('wigley', parents=[common], help='compare against the Wigley hull')
    wigley.add_argument('--hump', action='store_true', help='also locate the Wigley wave-resistance hump')
    validate = commands.add_parser('validate', parents=[common], help='oracle cross-checks')
    validate.add_argument('--samples', type=int, default=200, help='random closed-form samples')
    return parser


def resolve_config(args):
    config = load_config(args.config) if args.config else RunConfig()
    config = config.override('physical', fr=args.fr)
    config = config.override('quadrature', n_octave=args.n_octave, k_lambda_max=args.k_lambda_max,
                             tol=args.quad_tol)
    config = config.override('solver', dr1=args.dr1, dr2=args.dr2, tol=args.tol, max_iter=args.max_iter,
                             init=args.init, init_file=args.init_file)
    config = config.override('experiment', seed=args.seed)
    if args.jobs < 1:
        raise ConfigError('--jobs must be >= 1')
    return config


def _report_payload(config, optimum):
    hull = optimum.hull
    flow = optimum.flow
    payload = optimum.report.to_dict()
    xbar, zbar = hull.center_of_mass(half=True)
    payload.update({
        'fr': flow.fr, 'eps': optimum.eps, 'grid': hull.grid.info(), 'volume': hull.volume(),
        'center_of_mass': {'xbar': xbar, 'zbar': zbar},
        'max_slope': hull.max_slope(), 'bulb': bulbous_bow(hull).to_dict(), 'bulb_expected': expected_bulb(flow.fr),
        'wetted_area': wetted_area(hull.grid, hull.values), 'drag_force': drag_force(hull.grid, hull.values, flow),
        'config': config.to_dict()})
    return payload


def cmd_optimize(config, out, jobs=1):
    optimum = optimize_hull(config, jobs=jobs)
    write_hull(os.path.join(out, 'hull.csv'), optimum.hull)
    write_json(os.path.join(out, 'report.json'), _report_payload(config, optimum))
    return EXIT_OK if optimum.report.converged else EXIT_NOT_CONVERGED


def cmd_sweep(config, out, jobs=1):
    records = froude_sweep(config, jobs=jobs)
    for record in records:
        if record.hull is not None:
            record.hull_file = 'hull_fr{:g}.csv'.format(record.fr)
            write_hull(os.path.join(out, record.hull_file), record.hull)
    table = pd.DataFrame([r.to_dict() for r in records])
    write_table(os.path.join(out, 'sweep.csv'),
                table[['fr', 'eps', 'objective', 'wave', 'viscous', 'xbar', 'zbar', 'hull_file']])
    write_json(os.path.join(out, 'sweep.json'), {'records': [r.to_dict() for r in records],
                                                 'bulb_regime': bulb_regime(records, config, jobs=jobs),
                                                 'config': config.to_dict()})
    return EXIT_OK if all(r.converged for r in records) else EXIT_NOT_CONVERGED


def cmd_spectrum(config, out, jobs=1, dump=False):
    grid = config.build_grid()
    flow = config.flow()
    if dump and grid.n > MATRIX_EXPORT_MAX_N:
        raise ConfigError('--dump needs N <= {}, the grid has N = {}'.format(MATRIX_EXPORT_MAX_N, grid.n))
    wave_matrix = wave_matrix_for(config, grid, flow, jobs)
    report = spectrum(wave_matrix, config.experiment.thresholds, fr=flow.fr)
    if dump:
        write_quadrature(os.path.join(out, 'quadrature.csv'), wave_matrix.quadrature)
        write_matrix(os.path.join(out, 'wave_matrix.csv'), wave_matrix.matrix)
        write_matrix(os.path.join(out, 'drag_matrix.csv'), assemble_drag_matrix(grid))
    write_table(os.path.join(out, 'spectrum.csv'), report.to_frame())
    payload = report.to_dict()
    payload['config'] = config.to_dict()
    write_json(os.path.join(out, 'spectrum.json'), payload)
    return EXIT_OK


def cmd_blayer(config, out, jobs=1):
    result = boundary_layer_sweep(config, jobs=jobs)
    write_table(os.path.join(out, 'blayer.csv'), result.to_frame())
    payload = result.to_dict()
    payload['config'] = config.to_dict()
    write_json(os.path.join(out, 'blayer.json'), payload)
    return EXIT_OK if result.complete else EXIT_NOT_CONVERGED


def cmd_wigley(config, out, jobs=1, hump=False):
    comparison = wigley_compare(config, jobs=jobs)
    write_table(os.path.join(out, 'wigley.csv'), comparison.table)
    payload = comparison.to_dict()
    if hump:
        fr_peak, table = wigley_hump(config, jobs=jobs)
        write_table(os.path.join(out, 'wigley_hump.csv'), table)
        payload['hump_fr'] = fr_peak
    payload['config'] = config.to_dict()
    write_json(os.path.join(out, 'wigley.json'), payload)
    converged = bool(comparison.table['optimized_converged'].all())
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def cmd_validate(config, out, jobs=1, samples=200):
    """Desk-scale oracle cross-checks; each check is recorded with its measured value."""
    rng = np.random.default_rng(config.experiment.seed)
    checks = {}

    worst = 0.0
    for _ in range(samples):
        lam, v = rng.uniform(1, 20), rng.uniform(0.2, 5)
        delta, node = rng.uniform(0.005, 0.1), rng.uniform(-1, 1)
        depth = rng.choice([0.0, rng.uniform(delta, 0.2)])
        k, mu = lam * v, lam ** 2 * v
        floor_a, floor_b = 1e-3 * delta ** 2, 1e-3 * delta ** 2 * np.exp(-mu * depth)
        pairs = [
            (a_plus(lam, v, node, delta), quad(lambda s: np.cos(k * s) * (node + delta - s), node, node + delta,
                                              epsabs=0, epsrel=1e-13)[0], floor_a),
            (a_minus(lam, v, node, delta), quad(lambda s: np.cos(k * s) * (s - node + delta), node - delta, node,
                                               epsabs=0, epsrel=1e-13)[0], floor_a),
            (b_plus(lam, v, depth, delta), quad(lambda s: np.exp(-mu * s) * (depth + delta - s), depth,
                                               depth + delta, epsabs=0, epsrel=1e-13)[0], floor_b)]
        if depth > 0:
            pairs.append((b_minus(lam, v, depth, delta), quad(lambda s: np.exp(-mu * s) * (s - depth + delta),
                                                             depth - delta, depth, epsabs=0, epsrel=1e-13)[0], floor_b))
        for value, reference, floor in pairs:
            scale = max(abs(reference), floor)
            worst = max(worst, abs(float(value) - reference) / scale)
    checks['closed_forms'] = {'value': worst, 'passed': worst <= 1e-10}

    omegas = [omega_zero(n) for n in (10, 80, 320)]
    checks['omega_zero'] = {'value': omegas, 'passed': all(w > 0 for w in omegas) and omegas[0] > omegas[1] > omegas[2]}

    grid = build_grid(config.physical.length, config.physical.draft, 40, 12)
    flow = flow_params(config.physical.length, fr=1.0, rho=config.physical.rho, g=config.physical.g)
    wave_matrix = assemble_wave_matrix(grid, flow.v, build_quadrature(config.quadrature.n_octave, 10), jobs=jobs)
    census = spectrum(wave_matrix, (1e-12,))
    eigenvalues = np.linalg.eigvalsh(wave_matrix.matrix)
    psd = eigenvalues[0] >= -1e-10 * eigenvalues[-1]
    checks['rank_bound'] = {'value': census.counts[1e-12],
                            'passed': bool(psd) and census.counts[1e-12] >= max(grid.nx, grid.nz) - 1}

    drag_matrix = assemble_drag_matrix(grid)
    forms = []
    for _ in range(20):
        values = rng.normal(size=grid.n)
        scale = float(values @ values)
        wave = wave_resistance(values, wave_matrix, flow.rho, flow.g, flow.v) / (flow.wave_prefactor * eigenvalues[-1])
        forms.append(min(wave, viscous_resistance(values, drag_matrix, 1.0)) / scale)
    checks['quadratic_forms'] = {'value': min(forms), 'passed': min(forms) >= -1e-12}

    worst = 0.0
    for nx, nz in [(4, 3), (8, 4), (12, 6)]:
        small = build_grid(config.physical.length, config.physical.draft, nx, nz)
        for fr in (0.5, 1.0):
            small_flow = config.flow(fr)
            wave_matrix = assemble_wave_matrix(small, small_flow.v, build_quadrature(20, 8))
            for eps_factor in (1.0, 10.0):
                problem = combine_objective(wave_matrix, assemble_drag_matrix(small), small_flow.rho, small_flow.g,
                                            small_flow.v, eps_factor * small_flow.eps, config.physical.volume)
                report = uzawa_solve(problem, tol=1e-10, max_iter=config.solver.max_iter, accelerate=True)
                reference = reference_qp_oracle(problem)
                worst = max(worst, float(np.max(np.abs(report.values - reference)) / np.max(reference)))
    checks['uzawa_vs_oracle'] = {'value': worst, 'passed': worst <= 1e-6}

    residuals = []
    quadrature = build_quadrature(40, 6)
    for nx, nz in [(40, 8), (80, 16)]:
        fine = build_grid(config.physical.length, config.physical.draft, nx, nz)
        bump = SineBump.centered(fine.length, fine.draft)
        residuals.append(null_space_residual(fine, flow.v, bump, quadrature))
    checks['null_space'] = {'value': residuals, 'passed': residuals[0] >= 4 * residuals[1] > 0}

    hull = wigley_hull(build_grid(config.physical.length, config.physical.draft, 100, 20), config.physical.volume)
    checks['wigley_volume'] = {'value': hull.volume(),
                               'passed': abs(hull.volume() - config.physical.volume) < 1e-3 * config.physical.volume}

    for name, check in checks.items():
        logger.info('%s: %s (%s)', name, 'passed' if check['passed'] else 'FAILED', check['value'])
    write_json(os.path.join(out, 'validate.json'), {'checks': checks, 'config': config.to_dict()})
    failed = [name for name, check in checks.items() if not check['passed']]
    if failed:
        print('failed checks: {}'.format(', '.join(failed)), file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


COMMANDS = {'optimize': cmd_optimize, 'sweep': cmd_sweep, 'spectrum': cmd_spectrum, 'blayer': cmd_blayer,
            'wigley': cmd_wigley, 'validate': cmd_validate}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')

    try:
        config = resolve_config(args)
    except ConfigError as error:
        print('configuration error: {}'.format(error), file=sys.stderr)
        return EXIT_USAGE

    extra = {}
    if args.command == 'wigley':
        extra['hump'] = args.hump
    if args.command == 'spectrum':
        extra['dump'] = args.dump
    if args.command == 'validate':
        extra['samples'] = args.samples

    try:
        os.makedirs(args.out, exist_ok=True)
        write_json(os.path.join(args.out, 'config.json'), config.to_dict())
        return COMMANDS[args.command](config, args.out, jobs=args.jobs, **extra)
    except ConfigError as error:
        print('configuration error: {}'.format(error), file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as error:
        print('no convergence: {}'.format(error), file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except NotPositiveDefiniteError as error:
        print('internal error: {}'.format(error), file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as error:
        logger.debug('unhandled error', exc_info=True)
        print('internal error: {}: {}'.format(type(error).__name__, error), file=sys.stderr)
        return EXIT_INTERNAL
