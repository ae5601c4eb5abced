"""Canonical test data: single-angular-mode Bessel-Gaussian packets.

u0 = amp (r/w)^{nu} e^{-r^2/(2 w^2)} e^{i l theta}
     e^{-|x'-c|^2/(2 wt^2)} e^{i v.x'}

The radial factor r^{nu(-l)} matches the operator's natural behavior at
the axis for angular mode k = -l, so the radial spectrum is an exact
Bessel-Gaussian (exponentially band-limited) and the angular content is a
single mode.  These are the default family for evolution experiments and
scans; superpositions of several l give multi-mode data.
"""

from __future__ import annotations

import numpy as np

from ..geometry import FluxParam
from .grid import GridSpec


def mode_gaussian(
    grid: GridSpec,
    flux: FluxParam,
    l: int = 0,
    w: float = 2.0,
    w_t: float = 2.0,
    center=(0.0, 0.0),
    velocity=(0.0, 0.0),
    amp: complex = 1.0,
) -> np.ndarray:
    """Physical samples of one Bessel-Gaussian packet."""
    r, th, x3, x4 = grid.meshes()
    nu = flux.order(-l)
    radial = (r / w) ** nu * np.exp(-(r * r) / (2.0 * w * w))
    angular = np.exp(1j * l * th)
    d3 = x3 - center[0]
    d4 = x4 - center[1]
    trans = np.exp(-(d3 * d3 + d4 * d4) / (2.0 * w_t * w_t))
    boost = np.exp(1j * (velocity[0] * x3 + velocity[1] * x4))
    return (amp * radial * angular * trans * boost).astype(complex)


def normalized(grid: GridSpec, u: np.ndarray, target: float = 1.0) -> np.ndarray:
    """Scale to prescribed L2 mass."""
    mass = grid.physical_norm_sq(u)
    return u * np.sqrt(target / mass)


def datum_family(
    grid: GridSpec,
    flux: FluxParam,
    count: int,
    seed: int,
    max_l: int | None = None,
) -> list[np.ndarray]:
    """Seeded family of normalized packets for scan harnesses."""
    rng = np.random.default_rng(seed)
    max_l = grid.k_max // 2 if max_l is None else max_l
    out = []
    for _ in range(count):
        l = int(rng.integers(-max_l, max_l + 1))
        w = float(rng.uniform(1.5, 3.0))
        w_t = float(rng.uniform(1.5, 3.0))
        c = rng.uniform(-1.5, 1.5, size=2)
        v = rng.uniform(-0.6, 0.6, size=2)
        u = mode_gaussian(grid, flux, l, w, w_t, tuple(c), tuple(v))
        out.append(normalized(grid, u))
    return out
