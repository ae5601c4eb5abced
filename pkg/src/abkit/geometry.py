"""Coordinates, the two-particle change of variables, the magnetic
potential, and the diffractive distance vector.

The singular set is the plane r = sqrt(x1^2 + x2^2) = 0 in the rotated
coordinates (particle coincidence in the original ones); operations that
evaluate the potential reject points inside a configurable axis guard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FluxParam:
    """Dimensionless magnetic flux alpha with the derived mode orders."""

    alpha: float

    def order(self, k: int) -> float:
        """nu(k) = |k + alpha|, the radial Bessel order of angular mode k."""
        return abs(k + self.alpha)

    @property
    def reduced(self) -> float:
        """alpha shifted by an integer into [-1/2, 1/2]."""
        return self.alpha - round(self.alpha)

    @property
    def shift(self) -> int:
        """The integer removed by the reduction."""
        return int(round(self.alpha))

    @property
    def is_integer(self) -> bool:
        return self.alpha == round(self.alpha)


@dataclass(frozen=True)
class CylPoint4:
    """Point of R^4 in cylindrical coordinates (r, theta, x3, x4)."""

    r: float
    theta: float
    x3: float
    x4: float

    def __post_init__(self):
        if self.r < 0:
            raise DomainError("cylindrical radius must be >= 0")

    def to_cartesian(self) -> np.ndarray:
        return np.array(
            [
                self.r * math.cos(self.theta),
                self.r * math.sin(self.theta),
                self.x3,
                self.x4,
            ]
        )

    @property
    def transverse(self) -> np.ndarray:
        return np.array([self.x3, self.x4])


def to_cylindrical(p) -> CylPoint4:
    """Cartesian R^4 point -> CylPoint4; theta in [0, 2 pi), r = 0 maps to
    theta = 0."""
    x1, x2, x3, x4 = (float(v) for v in p)
    r = math.hypot(x1, x2)
    theta = math.atan2(x2, x1) % TWO_PI if r > 0 else 0.0
    return CylPoint4(r, theta, x3, x4)


@dataclass(frozen=True)
class PairConfig:
    """Positions of the two planar particles."""

    x1: tuple[float, float]
    x2: tuple[float, float]

    @property
    def separation(self) -> float:
        return math.hypot(self.x1[0] - self.x2[0], self.x1[1] - self.x2[1])


def pair_change_of_variables(c: PairConfig) -> tuple[np.ndarray, np.ndarray]:
    """The rotation y1 = (x1 - x2)/sqrt2, y2 = (x1 + x2)/sqrt2 (an isometry
    of R^4)."""
    a = np.asarray(c.x1, dtype=float)
    b = np.asarray(c.x2, dtype=float)
    s = math.sqrt(2.0)
    return (a - b) / s, (a + b) / s


def pair_change_inverse(y1, y2) -> PairConfig:
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    s = math.sqrt(2.0)
    x1 = (y1 + y2) / s
    x2 = (y2 - y1) / s
    return PairConfig(tuple(x1), tuple(x2))


def potential_A(flux: FluxParam, p, r_min: float = 1e-12) -> np.ndarray:
    """The singular vector potential alpha (-x2, x1, 0, 0)/(x1^2 + x2^2)."""
    x1, x2, *_ = (float(v) for v in p)
    rho2 = x1 * x1 + x2 * x2
    if rho2 <= r_min * r_min:
        raise DomainError("potential_A evaluated on the singular axis")
    return flux.alpha / rho2 * np.array([-x2, x1, 0.0, 0.0])


def pair_potentials(flux: FluxParam, c: PairConfig, r_min: float = 1e-12):
    """The two-particle gauge fields F1, F2 at a configuration off the
    coincidence set."""
    d1 = c.x1[0] - c.x2[0]
    d2 = c.x1[1] - c.x2[1]
    rho2 = d1 * d1 + d2 * d2
    if rho2 <= r_min * r_min:
        raise DomainError("pair configuration on the singular set x1 = x2")
    f1 = flux.alpha / rho2 * np.array([-d2, d1])
    return f1, -f1


def n_vector(r: float, rbar: float, s: float, xp, yp) -> tuple[np.ndarray, float]:
    """The diffractive distance vector

        n_s = (r + rbar, sqrt(2 r rbar (cosh s - 1)), x' - y')

    and its magnitude.  |n_s| is nondecreasing in s and |n_0| >= |x - y|.
    """
    if r < 0 or rbar < 0 or s < 0:
        raise DomainError("n_vector requires r, rbar, s >= 0")
    xp = np.asarray(xp, dtype=float)
    yp = np.asarray(yp, dtype=float)
    second = math.sqrt(2.0 * r * rbar * (math.cosh(s) - 1.0))
    vec = np.array([r + rbar, second, xp[0] - yp[0], xp[1] - yp[1]])
    return vec, float(np.linalg.norm(vec))


def n_magnitude_sq(r: float, rbar: float, s, d_transverse_sq: float):
    """|n_s|^2 = r^2 + rbar^2 + 2 r rbar cosh s + |x'-y'|^2, vectorized in s."""
    s = np.asarray(s, dtype=float)
    return r * r + rbar * rbar + 2.0 * r * rbar * np.cosh(s) + d_transverse_sq


def cartesian_distance(x: CylPoint4, y: CylPoint4) -> float:
    """|x - y| from cylindrical data via the law of cosines in the plane."""
    dtheta = x.theta - y.theta
    plane = x.r * x.r + y.r * y.r - 2.0 * x.r * y.r * math.cos(dtheta)
    d3 = x.x3 - y.x3
    d4 = x.x4 - y.x4
    return math.sqrt(max(plane, 0.0) + d3 * d3 + d4 * d4)
