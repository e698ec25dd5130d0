import configparser
import logging
from dataclasses import asdict, dataclass, field, fields, replace

from .flow import flow_params
from .grid import build_grid
from .quadrature import K_LAMBDA_MAX

logger = logging.getLogger(__name__)

FR_GRID = (0.1, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 1.5, 2.0)
INIT_CHOICES = ('flat', 'wigley', 'file')


class ConfigError(ValueError):
    """Invalid or unknown configuration entry; the message names it as section.key."""


@dataclass(frozen=True)
class PhysicalConfig:
    rho: float = 1000.0
    g: float = 9.81
    length: float = 2.0
    draft: float = 0.2
    volume: float = 0.03
    cd: float = 0.01
    fr: float = None
    speed: float = None


@dataclass(frozen=True)
class GridConfig:
    nx: int = 100
    nz: int = 20


@dataclass(frozen=True)
class QuadratureConfig:
    n_octave: int = 80
    k_lambda_max: int = K_LAMBDA_MAX
    tol: float = 1e-12
    k_lambda: int = None


@dataclass(frozen=True)
class SolverConfig:
    dr1: float = None
    dr2: float = None
    tol: float = 1e-8
    max_iter: int = 200000
    init: str = 'flat'
    init_file: str = None
    accelerate: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    fr_list: tuple = FR_GRID
    eps_factors: tuple = (1.0, 1e-1, 1e-2, 1e-3, 1e-4)
    blayer_fr: float = 1.0
    fr_design: float = 0.6
    wigley_fr_list: tuple = (0.3, 0.5, 0.6, 0.8, 1.0)
    hump_fr_list: tuple = (0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7)
    thresholds: tuple = (1e-12, 1e-15)
    cd_factors: tuple = (0.1, 10.0)
    seed: int = 0


SECTIONS = {'physical': PhysicalConfig, 'grid': GridConfig, 'quadrature': QuadratureConfig,
            'solver': SolverConfig, 'experiment': ExperimentConfig}

DEFAULT_FR = 0.6


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration of a run; defaults are the towing-basin case of a 2 m model."""
    physical: PhysicalConfig = field(default_factory=PhysicalConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)

    def __post_init__(self):
        validate(self)

    def build_grid(self):
        return build_grid(self.physical.length, self.physical.draft, self.grid.nx, self.grid.nz)

    def flow(self, fr=None):
        """FlowParams at the given Froude number, or at the configured fr / speed"""
        p = self.physical
        if fr is not None:
            return flow_params(p.length, fr=fr, rho=p.rho, g=p.g, cd=p.cd, volume=p.volume)
        if p.speed is not None:
            return flow_params(p.length, speed=p.speed, rho=p.rho, g=p.g, cd=p.cd, volume=p.volume)
        return flow_params(p.length, fr=p.fr if p.fr is not None else DEFAULT_FR,
                           rho=p.rho, g=p.g, cd=p.cd, volume=p.volume)

    def override(self, section, **values):
        """copy with some keys of one section replaced; None values are ignored"""
        values = {k: v for k, v in values.items() if v is not None}
        if not values:
            return self
        if section not in SECTIONS:
            raise ConfigError('unknown section "{}"'.format(section))
        known = {f.name for f in fields(SECTIONS[section])}
        for key in values:
            if key not in known:
                raise ConfigError('unknown key "{}.{}"'.format(section, key))
        block = replace(getattr(self, section), **values)
        return replace(self, **{section: block})

    def to_dict(self):
        return {name: asdict(getattr(self, name)) for name in SECTIONS}


def validate(config):
    p = config.physical
    for key in ['rho', 'g', 'length', 'draft', 'volume', 'cd']:
        value = getattr(p, key)
        if not isinstance(value, (int, float)) or not value > 0:
            raise ConfigError('physical.{} must be positive, got {!r}'.format(key, value))
    if p.fr is not None and p.speed is not None:
        raise ConfigError('physical.fr and physical.speed are exclusive')
    for key in ['fr', 'speed']:
        value = getattr(p, key)
        if value is not None and not value > 0:
            raise ConfigError('physical.{} must be positive, got {!r}'.format(key, value))

    for key in ['nx', 'nz']:
        value = getattr(config.grid, key)
        if not isinstance(value, int) or value < 2:
            raise ConfigError('grid.{} must be an integer >= 2, got {!r}'.format(key, value))

    q = config.quadrature
    if not isinstance(q.n_octave, int) or q.n_octave < 1:
        raise ConfigError('quadrature.n_octave must be an integer >= 1, got {!r}'.format(q.n_octave))
    if not isinstance(q.k_lambda_max, int) or not 1 <= q.k_lambda_max <= K_LAMBDA_MAX:
        raise ConfigError('quadrature.k_lambda_max must be an integer in [1, {}]'.format(K_LAMBDA_MAX))
    if q.k_lambda is not None and (not isinstance(q.k_lambda, int) or not 1 <= q.k_lambda <= K_LAMBDA_MAX):
        raise ConfigError('quadrature.k_lambda must be an integer in [1, {}]'.format(K_LAMBDA_MAX))
    if not q.tol > 0:
        raise ConfigError('quadrature.tol must be positive')

    s = config.solver
    for key in ['dr1', 'dr2']:
        value = getattr(s, key)
        if value is not None and not value > 0:
            raise ConfigError('solver.{} must be positive, got {!r}'.format(key, value))
    if not s.tol > 0:
        raise ConfigError('solver.tol must be positive')
    if not isinstance(s.max_iter, int) or s.max_iter < 1:
        raise ConfigError('solver.max_iter must be an integer >= 1')
    if s.init not in INIT_CHOICES:
        raise ConfigError('solver.init must be one of {}, got {!r}'.format(', '.join(INIT_CHOICES), s.init))
    if s.init == 'file' and not s.init_file:
        raise ConfigError('solver.init_file is required when solver.init = file')

    e = config.experiment
    for key in ['fr_list', 'wigley_fr_list', 'hump_fr_list', 'eps_factors', 'cd_factors']:
        values = getattr(e, key)
        if not values or any(not x > 0 for x in values):
            raise ConfigError('experiment.{} must be a non-empty list of positive numbers'.format(key))
    for key in ['blayer_fr', 'fr_design']:
        if not getattr(e, key) > 0:
            raise ConfigError('experiment.{} must be positive'.format(key))


def _parse(section, key, text, default_type):
    text = text.strip()
    try:
        if key in ('fr', 'speed', 'dr1', 'dr2'):
            return None if text.lower() in ('', 'none') else float(text)
        if key == 'k_lambda':
            return None if text.lower() in ('', 'none') else int(text)
        if key == 'init_file':
            return text or None
        if default_type is bool:
            return {'true': True, 'false': False, 'yes': True, 'no': False, '1': True, '0': False}[text.lower()]
        if default_type is tuple:
            return tuple(float(x) for x in text.replace(',', ' ').split())
        if default_type is int:
            return int(text)
        if default_type is float:
            return float(text)
        return text
    except (KeyError, ValueError):
        raise ConfigError('{}.{}: cannot read {!r}'.format(section, key, text)) from None


def load_config(path=None, text=None):
    """
    Read a run configuration.

    Parameters
    ----------
    path: str, None
        INI file with the sections physical, grid, quadrature, solver and experiment
    text: str, None
        the same content as a string

    Returns
    -------
    config: RunConfig
        defaults for every key the file leaves out
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        if path is not None:
            with open(path) as f:
                parser.read_file(f)
        if text is not None:
            parser.read_string(text)
    except configparser.Error as error:
        raise ConfigError('cannot parse configuration: {}'.format(error)) from None
    except OSError as error:
        raise ConfigError('cannot read configuration: {}'.format(error)) from None

    blocks = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError('unknown section "{}"'.format(section))
        defaults = SECTIONS[section]()
        types = {f.name: type(getattr(defaults, f.name)) for f in fields(defaults)}
        values = {}
        for key, raw in parser.items(section):
            if key not in types:
                raise ConfigError('unknown key "{}.{}"'.format(section, key))
            values[key] = _parse(section, key, raw, types[key])
        blocks[section] = SECTIONS[section](**values)

    try:
        config = RunConfig(**blocks)
    except TypeError as error:
        raise ConfigError(str(error)) from None
    logger.debug('configuration: %s', config.to_dict())
    return config
