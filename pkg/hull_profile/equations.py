import numpy as np
from math import factorial

# series below this argument; the closed forms lose digits to cancellation there
_SERIES_LIMIT = 0.5
_SERIES_TERMS = 20

_SIN_DEFECT_COEFFS = np.array([(-1) ** m / factorial(2 * m + 3) for m in range(_SERIES_TERMS)])
_PHI_COEFFS = np.array([(-1) ** m / factorial(m + 2) for m in range(_SERIES_TERMS)])
_PSI_COEFFS = np.array([(-1) ** m * (m + 1) / factorial(m + 2) for m in range(_SERIES_TERMS)])


def cos_moment(t):
    """(1 - cos t) / t^2, written through sinc so it holds down to t = 0"""
    t = np.asarray(t, dtype=float)
    return 0.5 * np.sinc(t / (2 * np.pi)) ** 2


def sin_moment(t):
    """(t - sin t) / t^2"""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < _SERIES_LIMIT
    safe = np.where(small, 1.0, t)
    series = t * np.polynomial.polynomial.polyval(t ** 2, _SIN_DEFECT_COEFFS)
    return np.where(small, series, (safe - np.sin(safe)) / safe ** 2)


def phi(t):
    """(t - 1 + exp(-t)) / t^2 = integral of (1 - u) exp(-t u) over [0, 1]"""
    t = np.asarray(t, dtype=float)
    small = t < _SERIES_LIMIT
    safe = np.where(small, 1.0, t)
    series = np.polynomial.polynomial.polyval(t, _PHI_COEFFS)
    return np.where(small, series, (safe + np.expm1(-safe)) / safe ** 2)


def psi(t):
    """(1 - (1 + t) exp(-t)) / t^2 = integral of u exp(-t u) over [0, 1]"""
    t = np.asarray(t, dtype=float)
    small = t < _SERIES_LIMIT
    safe = np.where(small, 1.0, t)
    series = np.polynomial.polynomial.polyval(t, _PSI_COEFFS)
    return np.where(small, series, (-np.expm1(-safe) - safe * np.exp(-safe)) / safe ** 2)


def a_plus(lam, v, x, dx):
    """
    Integral of cos(lam v s) (x + dx - s) over [x, x + dx]
    :param lam: wave direction parameter, >= 1
    :param v: Kelvin wave number g / U^2, 1/m
    :param x: node abscissa, m
    :param dx: cell length, m
    :return: a+, m2
    """
    k = np.multiply(lam, v)
    t = k * dx
    return dx ** 2 * (np.cos(k * x) * cos_moment(t) - np.sin(k * x) * sin_moment(t))


def a_minus(lam, v, x, dx):
    """
    Integral of cos(lam v s) (s - x + dx) over [x - dx, x]
    :param lam: wave direction parameter, >= 1
    :param v: Kelvin wave number g / U^2, 1/m
    :param x: node abscissa, m
    :param dx: cell length, m
    :return: a-, m2
    """
    k = np.multiply(lam, v)
    t = k * dx
    return dx ** 2 * (np.cos(k * x) * cos_moment(t) + np.sin(k * x) * sin_moment(t))


def a_sum(lam, v, x, dx):
    """a+ + a- = 2 dx^2 cos(lam v x) (1 - cos t) / t^2 with t = lam v dx"""
    k = np.multiply(lam, v)
    return 2 * dx ** 2 * np.cos(k * x) * cos_moment(k * dx)


def a_plus_closed(lam, v, x, dx):
    """textbook form of a+; loses accuracy when lam v dx is small"""
    k = np.multiply(lam, v)
    return -dx * np.sin(k * x) / k + (np.cos(k * x) - np.cos(k * (x + dx))) / k ** 2


def a_minus_closed(lam, v, x, dx):
    k = np.multiply(lam, v)
    return dx * np.sin(k * x) / k + (np.cos(k * x) - np.cos(k * (x - dx))) / k ** 2


def b_plus(lam, v, z, dz):
    """
    Integral of exp(-lam^2 v s) (z + dz - s) over [z, z + dz]
    :param lam: wave direction parameter, >= 1
    :param v: Kelvin wave number g / U^2, 1/m
    :param z: node depth, m
    :param dz: cell height, m
    :return: b+, m2
    """
    mu = np.square(lam) * v
    return np.exp(-mu * z) * dz ** 2 * phi(mu * dz)


def b_minus(lam, v, z, dz):
    """
    Integral of exp(-lam^2 v s) (s - z + dz) over [z - dz, z]; 0 for a waterline node z = 0
    :param lam: wave direction parameter, >= 1
    :param v: Kelvin wave number g / U^2, 1/m
    :param z: node depth, m
    :param dz: cell height, m
    :return: b-, m2
    """
    mu = np.square(lam) * v
    z = np.asarray(z, dtype=float)
    value = np.exp(-mu * np.where(z > 0, z - dz, 0.0)) * dz ** 2 * psi(mu * dz)
    return np.where(z > 0, value, 0.0)


def b_plus_closed(lam, v, z, dz):
    mu = np.square(lam) * v
    return dz * np.exp(-mu * z) / mu - (np.exp(-mu * z) - np.exp(-mu * (z + dz))) / mu ** 2


def b_minus_closed(lam, v, z, dz):
    mu = np.square(lam) * v
    value = -dz * np.exp(-mu * z) / mu - (np.exp(-mu * z) - np.exp(-mu * (z - dz))) / mu ** 2
    return np.where(np.asarray(z) > 0, value, 0.0)
