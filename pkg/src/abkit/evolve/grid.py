"""Discretization of the cylindrical-times-periodic-box geometry.

Radial direction: Gauss-Legendre on [0, R] against the r dr measure with a
band limit rho_max (see specfun.hankel).  Angular direction: uniform theta
samples carrying modes |k| <= K_max.  Transverse plane: periodic box
[-L, L)^2 standing in for R^2, justified run by run through the
boundary-mass monitor since the evolution factorizes into (planar magnetic
piece) x (free transverse piece).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..geometry import FluxParam
from ..specfun.hankel import RadialGrid


@dataclass
class GridSpec:
    """Grid and stepping parameters; owns all discretization tolerances."""

    radius: float = 24.0
    n_r: int = 256
    k_max: int = 8
    box: float = 24.0
    n_t: int = 32
    dt: float = 5e-3
    r_min: float = 0.0
    rho_max: float | None = None
    bandwidth_tol: float = 1e-10

    def __post_init__(self):
        if self.radius <= 0 or self.box <= 0 or self.dt <= 0:
            raise ConfigError("radius, box and dt must be positive")
        if self.n_r < 16 or self.n_t < 4 or self.k_max < 0:
            raise ConfigError("grid too small")
        if self.n_t % 2:
            raise ConfigError("n_t must be even")
        if self.r_min == 0.0:
            self.r_min = 1e-12 * self.radius
        self.radial = RadialGrid(self.radius, self.n_r, self.rho_max)
        self.rho_max = self.radial.rho_max
        self.n_theta = 2 * self.k_max + 2
        self.theta = 2.0 * math.pi * np.arange(self.n_theta) / self.n_theta
        self.x_t = -self.box + 2.0 * self.box * np.arange(self.n_t) / self.n_t
        self.xi = math.pi / self.box * np.fft.fftfreq(self.n_t, 1.0 / self.n_t)
        self.dx = 2.0 * self.box / self.n_t
        # fft-layout mode numbers; the Nyquist slot is unused (forced 0)
        k = np.fft.fftfreq(self.n_theta, 1.0 / self.n_theta).astype(int)
        self.modes = k
        self.mode_live = np.abs(k) <= self.k_max

    # -- measures -----------------------------------------------------------

    @property
    def radial_weight(self) -> np.ndarray:
        return self.radial.wr * self.radial.r

    @property
    def rho_weight(self) -> np.ndarray:
        return self.radial.wp * self.radial.rho

    @property
    def cell_physical(self) -> float:
        """theta and transverse measure per sample."""
        return (2.0 * math.pi / self.n_theta) * self.dx * self.dx

    def physical_norm_sq(self, u: np.ndarray) -> float:
        """Discrete int |u|^2 r dr dtheta dx' for u[i_r, m, j3, j4]."""
        return float(
            np.einsum("i,imjk->", self.radial_weight, np.abs(u) ** 2).real
            * self.cell_physical
        )

    def physical_integral(self, w: np.ndarray) -> float:
        """Discrete integral of a real sample array against the measure."""
        return float(
            np.einsum("i,imjk->", self.radial_weight, w) * self.cell_physical
        )

    def lambda_sq(self) -> np.ndarray:
        """rho^2 + |xi|^2 broadcast to [rho, q3, q4]."""
        rho2 = self.radial.rho**2
        xi2 = self.xi[:, None] ** 2 + self.xi[None, :] ** 2
        return rho2[:, None, None] + xi2[None, :, :]

    def meshes(self):
        """r, theta, x3, x4 broadcastable to the physical array shape."""
        r = self.radial.r[:, None, None, None]
        th = self.theta[None, :, None, None]
        x3 = self.x_t[None, None, :, None]
        x4 = self.x_t[None, None, None, :]
        return r, th, x3, x4

    # -- bandwidth invariants ------------------------------------------------

    def mode_tail_estimate(self, rho_eff: float, r_eff: float) -> float:
        """Small-argument bound (rho r / 2)^K / Gamma(K+1) on the angular
        tail of data with effective radial extent r_eff and bandwidth
        rho_eff."""
        k = self.k_max + 1
        return math.exp(
            k * math.log(max(rho_eff * r_eff / 2.0, 1e-300)) - math.lgamma(k + 1.0)
        )

    def validate_datum(self, u: np.ndarray, flux: FluxParam) -> dict:
        """Measured bandwidth diagnostics for a physical datum.

        Raises ConfigError when the spatial-tail/mode-tail content exceeds
        bandwidth_tol relative to the datum mass.
        """
        from .transforms import decompose

        total = self.physical_norm_sq(u)
        if total == 0.0:
            raise ConfigError("empty datum")
        r = self.radial.r
        outside_r = r > 0.5 * self.radius
        tail_r = (
            float(
                np.einsum(
                    "i,imjk->",
                    self.radial_weight[outside_r],
                    np.abs(u[outside_r]) ** 2,
                )
            )
            * self.cell_physical
        )
        out3 = np.abs(self.x_t) > 0.5 * self.box
        tail_t = (
            float(
                np.einsum(
                    "i,imjk->", self.radial_weight, np.abs(u[:, :, out3, :]) ** 2
                )
                + np.einsum(
                    "i,imjk->", self.radial_weight, np.abs(u[:, :, :, out3]) ** 2
                )
            )
            * self.cell_physical
        )
        mf = decompose(u, self, flux)
        per_mode = mf.mode_norms_sq()
        live = np.abs(self.modes) <= self.k_max
        edge = per_mode[np.abs(self.modes) == self.k_max].sum()
        rho_tail_frac = mf.band_tail_fraction()
        diag = {
            "mass": total,
            "radial_tail": tail_r / total,
            "transverse_tail": tail_t / total,
            "edge_mode_fraction": float(edge / per_mode[live].sum()),
            "rho_band_tail": rho_tail_frac,
        }
        if diag["radial_tail"] > self.bandwidth_tol:
            raise ConfigError(f"datum mass beyond R/2: {diag['radial_tail']:.2e}")
        if diag["transverse_tail"] > self.bandwidth_tol:
            raise ConfigError(f"datum mass beyond L/2: {diag['transverse_tail']:.2e}")
        if diag["rho_band_tail"] > 1e3 * self.bandwidth_tol:
            raise ConfigError(f"datum radial band tail: {diag['rho_band_tail']:.2e}")
        return diag
