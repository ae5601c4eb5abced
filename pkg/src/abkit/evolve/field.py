"""Transform-side field container."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError


@dataclass
class ModeField:
    """Coefficients a[k, rho_q, q3, q4] on the full transform side
    (angular mode x Hankel x transverse Fourier).

    ``coeff`` follows the fft mode layout of ``grid.modes``; the Nyquist
    slot stays zero.  The weighted l2 norm of the coefficients equals the
    physical L2 norm of the synthesized field (each sub-transform is an
    isometry for band-limited data).
    """

    coeff: np.ndarray
    grid: object
    flux: object

    def __post_init__(self):
        g = self.grid
        expect = (g.n_theta, g.n_r, g.n_t, g.n_t)
        if self.coeff.shape != expect:
            raise ConfigError(f"coefficient shape {self.coeff.shape} != {expect}")

    def copy(self) -> "ModeField":
        return ModeField(self.coeff.copy(), self.grid, self.flux)

    def norm_sq(self) -> float:
        return float(np.sum(self.mode_norms_sq()))

    def mode_norms_sq(self) -> np.ndarray:
        """Weighted |coeff|^2 mass per angular mode."""
        g = self.grid
        w = g.rho_weight
        # coeff carries the dx^2 forward-Fourier factor; Plancherel then
        # weights each xi sample by (dxi / 2 pi)^2 = 1/(2 box)^2
        cell = 1.0 / (2.0 * g.box) ** 2
        per = np.einsum("q,kqjl->k", w, np.abs(self.coeff) ** 2)
        return per * cell

    def band_tail_fraction(self, frac: float = 0.85) -> float:
        """Coefficient mass beyond frac * rho_max, relative to the total."""
        g = self.grid
        w = g.rho_weight
        hi = g.radial.rho > frac * g.rho_max
        num = float(np.einsum("q,kqjl->", w[hi], np.abs(self.coeff[:, hi]) ** 2))
        den = float(np.einsum("q,kqjl->", w, np.abs(self.coeff) ** 2))
        return num / den if den else 0.0

    def active_modes(self, rel: float = 1e-14) -> np.ndarray:
        per = self.mode_norms_sq()
        total = per.sum()
        return np.nonzero(per > rel * rel * total)[0]
