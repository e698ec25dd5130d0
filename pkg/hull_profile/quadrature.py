import logging
from dataclasses import dataclass, field
from math import log, sqrt

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

# integral of 1/sqrt(lambda^2 - 1) over [1, 2]
LOG_2_SQRT3 = log(2 + sqrt(3))

K_LAMBDA_MAX = 14


@dataclass(frozen=True, eq=False)
class LambdaQuadrature:
    """
    Nodes and weights of the truncated lambda-integral over [1, 2^K].

    nodes[0] = 1 carries the weight of the subtracted singularity; the other nodes are
    octave midpoints in increasing order. `octave` gives the octave index of every node
    (-1 for the node at 1).
    """
    nodes: np.ndarray
    weights: np.ndarray
    octave: np.ndarray
    counts: tuple = field(default=())

    def __post_init__(self):
        if len(self.nodes) != len(self.weights) or len(self.nodes) != len(self.octave):
            raise ValueError('nodes, weights and octave must have the same length')
        if len(self.nodes) == 0 or self.nodes[0] != 1.0:
            raise ValueError('the first node must be lambda = 1')
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError('nodes must be strictly increasing')

    def __len__(self):
        return len(self.nodes)

    @property
    def k_lambda(self):
        return len(self.counts)

    @property
    def upper(self):
        """truncation Lambda = 2^K"""
        return 2.0 ** self.k_lambda

    @property
    def omega_zero(self):
        return float(self.weights[0])

    def octave_slice(self, k):
        return np.flatnonzero(self.octave == k)

    def truncated(self, k_lambda):
        """the same rule restricted to the first k_lambda octaves"""
        if not 0 <= k_lambda <= self.k_lambda:
            raise ValueError('k_lambda must lie in [0, {}]'.format(self.k_lambda))
        keep = self.octave < k_lambda
        return LambdaQuadrature(self.nodes[keep], self.weights[keep], self.octave[keep], self.counts[:k_lambda])

    def to_frame(self):
        return pd.DataFrame({'lambda': self.nodes, 'weight': self.weights})

    def info(self):
        return {'k_lambda': self.k_lambda, 'counts': list(self.counts), 'nodes': len(self),
                'omega_zero': self.omega_zero}


def octave_rule(k, n):
    """
    Midpoint rule of the regular part on the octave [2^k, 2^(k+1)]
    :param k: octave index, >= 0
    :param n: number of midpoints
    :return: (nodes, weights) with weights dl * lambda^4 / sqrt(lambda^2 - 1)
    """
    if int(n) != n or n < 1:
        raise ValueError('the number of nodes per octave must be an integer >= 1')
    start = 2.0 ** k
    step = start / n
    nodes = start + (np.arange(1, n + 1) - 0.5) * step
    weights = step * nodes ** 4 / np.sqrt(nodes ** 2 - 1)
    return nodes, weights


def omega_zero(n0):
    """
    Weight of lambda = 1 after subtracting the 1/sqrt(lambda^2 - 1) singularity on [1, 2]
    :param n0: number of midpoints on [1, 2]
    :return: ln(2 + sqrt 3) - sum of dl / sqrt(lambda_i^2 - 1), > 0
    """
    nodes, _ = octave_rule(0, n0)
    return LOG_2_SQRT3 - float(np.sum((1.0 / n0) / np.sqrt(nodes ** 2 - 1)))


def build_quadrature(n_octave=80, k_lambda=10, counts=None):
    """
    Build the lambda quadrature of the wave-resistance integral.

    Parameters
    ----------
    n_octave: int
        midpoints per octave
    k_lambda: int
        number of octaves, the integral is truncated at 2^k_lambda
    counts: list, None
        per-octave midpoint counts, overriding n_octave and k_lambda

    Returns
    -------
    quadrature: LambdaQuadrature
    """
    if counts is None:
        if int(k_lambda) != k_lambda or k_lambda < 1:
            raise ValueError('k_lambda must be an integer >= 1')
        if k_lambda > K_LAMBDA_MAX:
            raise ValueError('k_lambda must be <= {}'.format(K_LAMBDA_MAX))
        counts = [n_octave] * int(k_lambda)
    counts = tuple(int(n) for n in counts)
    if not counts:
        raise ValueError('at least one octave is required')

    nodes = [np.array([1.0])]
    weights = [np.array([omega_zero(counts[0])])]
    octave = [np.array([-1])]
    for k, n in enumerate(counts):
        lam, w = octave_rule(k, n)
        nodes.append(lam)
        weights.append(w)
        octave.append(np.full(n, k))

    quadrature = LambdaQuadrature(np.concatenate(nodes), np.concatenate(weights), np.concatenate(octave), counts)
    logger.debug('lambda quadrature: %d octaves, %d nodes, omega_0 = %.6g',
                 quadrature.k_lambda, len(quadrature), quadrature.omega_zero)
    return quadrature


def single_node():
    """the rank-1 rule made of lambda = 1 alone"""
    return LambdaQuadrature(np.array([1.0]), np.array([omega_zero(1)]), np.array([-1]), ())
