import numpy as np
import pandas as pd

from .grid import build_grid
from .hull import Hull


def load(data, **kwargs):
    """
    Load an existing hull.

    Parameters
    ----------
    data:
        CSV or Excel file, dataframe, list of dictionaries or list of lists [x, z, f].
        One row per grid node; boundary rows are optional and must carry f = 0.

    Keyword Args
    ------------
        grid: GridSpec, None
            grid the offsets belong to. Built from the distinct x and z values when None.
        set_info: dict, None
            extra entries merged into hull.info

    Returns
    -------
    hull: Hull object
    """

    grid = kwargs.get('grid', None)
    set_info = kwargs.get('set_info', None)

    base_data = None

    if isinstance(data, str):
        if data.endswith('.xlsx'):
            data = pd.read_excel(data)      # openpyxl engine
        elif data.endswith('.csv'):
            data = pd.read_csv(data)
        else:
            raise ValueError('The file "{}" is not a .csv or .xlsx file'.format(data))

    if isinstance(data, pd.DataFrame):
        base_data = data.copy()
        data = data.dropna(axis=1, how='all').dropna()
        data = solve_key_similarities(data)
    elif isinstance(data[0], dict):
        data = solve_key_similarities(pd.DataFrame(data))
    else:       # list of lists
        data = pd.DataFrame({'x': data[0], 'z': data[1], 'f': data[2]})

    for key in ['x', 'z', 'f']:
        if key not in data.columns:
            raise ValueError('column "{}" was not found'.format(key))
    x = data['x'].to_numpy(dtype=float)
    z = data['z'].to_numpy(dtype=float)
    f = data['f'].to_numpy(dtype=float)

    if grid is None:
        grid = infer_grid(x, z)

    ix = np.rint((x + grid.length / 2) / grid.dx).astype(int)
    iz = np.rint(z / grid.dz).astype(int)
    off_grid = (np.abs(x - grid.x_lines[np.clip(ix, 0, grid.nx)]) > 1e-9 * grid.length) | \
               (np.abs(z - grid.z_lines[np.clip(iz, 0, grid.nz)]) > 1e-9 * grid.draft) | \
               (ix < 0) | (ix > grid.nx) | (iz < 0) | (iz > grid.nz)
    if np.any(off_grid):
        raise ValueError('{} rows do not lie on the grid nodes'.format(int(off_grid.sum())))

    dof = grid.dof_map[iz, ix]
    if np.any(f[dof < 0] != 0):
        raise ValueError('boundary nodes on x = +-L/2 or z = T must have f = 0')
    values = np.full(grid.n, np.nan)
    values[dof[dof >= 0]] = f[dof >= 0]
    if np.any(np.isnan(values)):
        raise ValueError('{} free nodes have no value'.format(int(np.isnan(values).sum())))

    info = {'source': 'loaded'}
    if isinstance(set_info, dict):
        info.update(set_info)
    hull = Hull(grid, values, info)
    if base_data is not None:
        hull._base_data = base_data

    return hull


def infer_grid(x, z):
    """Grid spanned by the distinct node coordinates; the table must reach x = +-L/2 and z = T."""
    x_lines = np.unique(np.round(x, 12))
    z_lines = np.unique(np.round(z, 12))
    if len(x_lines) < 3 or len(z_lines) < 3:
        raise ValueError('the table spans too few grid lines to infer the grid')
    length = x_lines[-1] - x_lines[0]
    if abs(x_lines[0] + x_lines[-1]) > 1e-9 * length:
        raise ValueError('x must span the symmetric interval [-L/2, L/2]')
    if abs(z_lines[0]) > 1e-12:
        raise ValueError('z must start at the waterline z = 0')
    return build_grid(length, z_lines[-1], len(x_lines) - 1, len(z_lines) - 1)


def solve_key_similarities(data):
    x_similarities = ['X', 'x(m)', 'X(m)', 'x[m]', 'X[m]', 'xi', 'length', 'Length']
    z_similarities = ['Z', 'z(m)', 'Z(m)', 'z[m]', 'Z[m]', 'zi', 'depth', 'Depth']
    f_similarities = ['F', 'f(m)', 'F(m)', 'f[m]', 'F[m]', 'fi', 'y', 'Y', 'y(m)', 'offset', 'Offset',
                      'halfbreadth', 'HalfBreadth']

    possible_keys = [x_similarities, z_similarities, f_similarities]
    correct_keys = ['x', 'z', 'f']

    data = data.copy()
    data.columns = data.columns.astype(str).str.replace(' ', '')
    for true_key, similarities in zip(correct_keys, possible_keys):
        if true_key in data.columns:
            continue
        for key in similarities:
            if key in data.columns:
                data = data.rename(columns={key: true_key})
                break

    return data
