__version__ = '0.1.0'

from .create_hull import get
from .load_hull import load
from .grid import build_grid
from .flow import flow_params
from .config import RunConfig, load_config
from .analysis import optimize_hull
