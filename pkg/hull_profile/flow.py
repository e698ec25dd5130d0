from dataclasses import dataclass
from math import pi, sqrt


@dataclass(frozen=True)
class FlowParams:
    """Physical constants of a towing run. Units: SI."""
    rho: float
    g: float
    length: float
    speed: float
    cd: float
    volume: float

    def __post_init__(self):
        for name in ['rho', 'g', 'length', 'speed']:
            if not getattr(self, name) > 0:
                raise ValueError('{} must be positive'.format(name))
        if self.cd < 0:
            raise ValueError('cd must be non-negative')
        if self.volume < 0:
            raise ValueError('volume must be non-negative')

    @property
    def fr(self):
        """length Froude number U / sqrt(gL)"""
        return self.speed / sqrt(self.g * self.length)

    @property
    def v(self):
        """Kelvin wave number of the transverse waves, g / U^2 (1/m)"""
        return self.g / self.speed ** 2

    @property
    def eps(self):
        """dynamic-pressure weight of the gradient energy, 1/2 rho Cd U^2 (Pa)"""
        return 0.5 * self.rho * self.cd * self.speed ** 2

    @property
    def wave_prefactor(self):
        return 4 * self.rho * self.g * self.v ** 3 / pi

    def info(self):
        return {'rho': self.rho, 'g': self.g, 'L': self.length, 'U': self.speed, 'fr': self.fr,
                'v': self.v, 'cd': self.cd, 'eps': self.eps, 'V': self.volume}


def flow_params(length, fr=None, speed=None, rho=1000.0, g=9.81, cd=0.01, volume=0.03):
    """
    Set up the flow of a run from either the Froude number or the speed.

    :param length: hull length L, m
    :param fr: length Froude number (exclusive with speed)
    :param speed: ship speed U, m/s (exclusive with fr)
    :param rho: water density, kg/m3
    :param g: gravity, m/s2
    :param cd: viscous drag coefficient
    :param volume: half-volume of the immersed hull, m3
    :return: FlowParams
    """
    if (fr is None) == (speed is None):
        raise ValueError('give either fr or speed, not both')
    if fr is not None:
        if not fr > 0:
            raise ValueError('fr must be positive')
        speed = fr * sqrt(g * length)
    return FlowParams(float(rho), float(g), float(length), float(speed), float(cd), float(volume))
