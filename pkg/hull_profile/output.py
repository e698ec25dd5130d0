import json
import logging
import os
import tempfile

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'
MATRIX_EXPORT_MAX_N = 2000


def write_text(path, text):
    """Write a whole file atomically: temporary file in the target directory, then os.replace."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.' + os.path.basename(path), suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', newline='') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    logger.info('wrote %s', path)
    return path


def write_table(path, df):
    return write_text(path, df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n'))


def write_hull(path, hull):
    """hull CSV: header x,z,f and one row per grid node, boundary nodes included"""
    return write_table(path, hull.df())


def write_quadrature(path, quadrature):
    """quadrature dump: header lambda,weight and one row per node, lambda = 1 first"""
    return write_table(path, quadrature.to_frame())


def write_matrix(path, matrix):
    """
    Dense-row export of M_w or M_d: N lines of N values, no header.
    :param matrix: square ndarray, or a sparse matrix / DragMatrix with toarray()
    """
    n = matrix.shape[0] if hasattr(matrix, 'shape') else matrix.n
    if n > MATRIX_EXPORT_MAX_N:
        raise ValueError('N = {} is above {} for a dense matrix export'.format(n, MATRIX_EXPORT_MAX_N))
    dense = matrix.toarray() if hasattr(matrix, 'toarray') else np.asarray(matrix)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
        raise ValueError('only square matrices are exported')
    return write_text(path, pd.DataFrame(dense).to_csv(header=False, index=False, float_format=FLOAT_FORMAT,
                                                       lineterminator='\n'))


def write_json(path, payload):
    return write_text(path, dumps(payload) + '\n')


def dumps(payload):
    return json.dumps(to_builtin(payload), indent=2, sort_keys=True, allow_nan=True)


def to_builtin(value):
    """numpy scalars and arrays, tuples and nested dicts to plain JSON types"""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_builtin(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, pd.DataFrame):
        return to_builtin(value.to_dict('records'))
    return value
