import numpy as np

from .grid import build_grid
from .hull import Hull, normalize_volume


def get(volume, profile='wigley', length=2.0, draft=0.2, nx=100, nz=20, **kwargs):
    """
    Generate a reference hull.

    Parameters
    ----------
    volume: num
        half-volume of the immersed hull, m3
    profile: str
        'wigley' for the parabolic Wigley hull, 'flat' for a constant offset
    length: num
        hull length L, m
    draft: num
        draft T, m
    nx: int
        cells along x
    nz: int
        cells along z

    Keyword Args
    ------------
    grid: GridSpec, None
        use an existing grid instead of building one from length, draft, nx and nz.
    set_info: dict, None
        extra entries merged into hull.info

    Returns
    -------
    hull: Hull object
        nodal offsets with the requested volume
    """

    # Settings
    params = {'grid': None, 'set_info': None}
    for key, value in kwargs.items():
        params[key] = value
    grid = params['grid']
    if grid is None:
        grid = build_grid(length, draft, nx, nz)

    if profile == 'wigley':
        hull = wigley_hull(grid, volume)
    elif profile == 'flat':
        hull = flat_hull(grid, volume)
    else:
        raise ValueError('The hull profile "{}" is not recognised'.format(profile))

    if isinstance(params['set_info'], dict):
        hull.info.update(params['set_info'])

    return hull


def wigley_beam(length, draft, volume):
    """
    Beam of the Wigley hull holding the given half-volume
    :param length: hull length L, m
    :param draft: draft T, m
    :param volume: half-volume V, m3
    :return: B = 9V / (2LT), m
    """
    return 9 * volume / (2 * length * draft)


def wigley_offset(x, z, length, draft, beam):
    """f(x, z) = B/2 (1 - 4x^2/L^2)(1 - z^2/T^2)"""
    return beam / 2 * (1 - 4 * np.square(x) / length ** 2) * (1 - np.square(z) / draft ** 2)


def wigley_hull(grid, volume):
    if not volume > 0:
        raise ValueError('volume must be positive')
    beam = wigley_beam(grid.length, grid.draft, volume)
    values = np.maximum(wigley_offset(grid.x, grid.z, grid.length, grid.draft, beam), 0.0)
    return Hull(grid, values, {'profile': 'wigley', 'beam': beam})


def flat_hull(grid, volume):
    """constant interior offset scaled to the volume; the default starting point of the solver"""
    if volume < 0:
        raise ValueError('volume must be non-negative')
    if volume == 0:
        return Hull(grid, np.zeros(grid.n), {'profile': 'flat'})
    values = normalize_volume(grid, np.ones(grid.n), volume)
    return Hull(grid, values, {'profile': 'flat'})
