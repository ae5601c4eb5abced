"""The partial-wave transform pipeline and the exact linear flow.

decompose: angular DFT -> per-mode Hankel of order nu(k) = |k + alpha| ->
transverse Fourier.  synthesize inverts it.  The linear evolution of the
flux operator is the diagonal multiplier e^{i t (rho^2 + |xi|^2)} on the
transform side; for fixed dt the radial part is precomposed into one
matrix per mode, which is what the NLS stepper reuses every step.

Sparsity: modes whose relative l2 mass is below 1e-14 are skipped by the
stepper; the split-step nonlinear phase cannot excite a mode whose
coefficient is exactly zero unless |u| carries angular content, so
single-mode data stay single-mode to rounding.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigError
from ..geometry import FluxParam
from .field import ModeField
from .grid import GridSpec

_SQRT2PI = math.sqrt(2.0 * math.pi)


def _mode_orders(grid: GridSpec, flux: FluxParam) -> list[float]:
    return [flux.order(int(k)) for k in grid.modes]


def decompose(u: np.ndarray, grid: GridSpec, flux: FluxParam) -> ModeField:
    """Physical samples u[i_r, m, j3, j4] -> full transform side."""
    if u.shape != (grid.n_r, grid.n_theta, grid.n_t, grid.n_t):
        raise ConfigError(f"datum shape {u.shape} incompatible with grid")
    a = _SQRT2PI * np.fft.ifft(u, axis=1)          # modes along axis 1
    a = np.moveaxis(a, 1, 0)                        # [k, r, j3, j4]
    out = np.empty_like(a)
    for p, nu in enumerate(_mode_orders(grid, flux)):
        if not grid.mode_live[p]:
            out[p] = 0.0
            continue
        fwd = grid.radial.forward_matrix(nu)
        out[p] = (fwd @ a[p].reshape(grid.n_r, -1)).reshape(a[p].shape)
    out = grid.dx * grid.dx * np.fft.fft2(out, axes=(2, 3))
    return ModeField(out, grid, flux)


def synthesize(m: ModeField, grid: GridSpec | None = None, flux=None) -> np.ndarray:
    """Transform side -> physical samples (inverse of decompose)."""
    grid = grid or m.grid
    flux = flux or m.flux
    a = np.fft.ifft2(m.coeff, axes=(2, 3)) / (grid.dx * grid.dx)
    out = np.empty_like(a)
    for p, nu in enumerate(_mode_orders(grid, flux)):
        if not grid.mode_live[p]:
            out[p] = 0.0
            continue
        inv = grid.radial.inverse_matrix(nu)
        out[p] = (inv @ a[p].reshape(grid.n_r, -1)).reshape(a[p].shape)
    out = np.moveaxis(out, 0, 1)
    return np.fft.fft(out, axis=1) / _SQRT2PI


def apply_multiplier(m: ModeField, h) -> ModeField:
    """Coefficient-wise multiplication by h(lambda), lambda^2 = rho^2+|xi|^2."""
    lam = np.sqrt(m.grid.lambda_sq())
    return ModeField(m.coeff * h(lam)[None, ...], m.grid, m.flux)


def linear_evolve(m: ModeField, t: float) -> ModeField:
    """Exact linear flow: multiplier e^{i t lambda^2}; unitary group."""
    lam2 = m.grid.lambda_sq()
    return ModeField(m.coeff * np.exp(1j * t * lam2)[None, ...], m.grid, m.flux)


def evaluate_at_point(
    m: ModeField, r: float, theta: float, xp
) -> complex:
    """Synthesize the field at one physical point (r, theta, x').

    Direct summation over the transform lattice: per mode, the inverse
    Hankel row J_nu(rho_q r) rho_q w_q, the angular eigenfunction, and the
    transverse inverse Fourier sum at x'.
    """
    g = m.grid
    f = m.flux
    xp = np.asarray(xp, dtype=float)
    phase = np.exp(1j * (g.xi[:, None] * xp[0] + g.xi[None, :] * xp[1]))
    cell = 1.0 / (2.0 * g.box) ** 2
    total = 0.0j
    from ..specfun.bessel import bessel_j

    for p, k in enumerate(g.modes):
        if not g.mode_live[p]:
            continue
        nu = f.order(int(k))
        row = np.asarray(bessel_j(nu, g.radial.rho * r)) * g.rho_weight
        trans = np.einsum("qjl,jl->q", m.coeff[p], phase) * cell
        total += (row @ trans) * np.exp(-1j * k * theta) / _SQRT2PI
    return complex(total)


class StepOperator:
    """Cached one-step linear propagator for a fixed (grid, flux, dt).

    Radial part: P_k = H_nu^{-1} diag(e^{i dt rho^2}) H_nu per mode.
    Transverse part: diagonal e^{i dt |xi|^2} in Fourier space.
    """

    def __init__(self, grid: GridSpec, flux: FluxParam, dt: float):
        self.grid = grid
        self.flux = flux
        self.dt = dt
        self.radial_ops: dict[int, np.ndarray] = {}
        phase_rho = np.exp(1j * dt * grid.radial.rho**2)
        for p, k in enumerate(grid.modes):
            if not grid.mode_live[p]:
                continue
            nu = flux.order(int(k))
            fwd = grid.radial.forward_matrix(nu)
            inv = grid.radial.inverse_matrix(nu)
            self.radial_ops[p] = (inv * phase_rho[None, :]) @ fwd
        xi2 = grid.xi[:, None] ** 2 + grid.xi[None, :] ** 2
        self.trans_phase = np.exp(1j * dt * xi2)

    def apply(self, u: np.ndarray, active=None) -> np.ndarray:
        """One linear step on physical samples; optionally only the listed
        fft-layout mode slots."""
        g = self.grid
        a = np.fft.ifft(u, axis=1)
        a = np.moveaxis(a, 1, 0)
        idx = range(g.n_theta) if active is None else active
        out = np.zeros_like(a)
        for p in idx:
            op = self.radial_ops.get(int(p))
            if op is None:
                continue
            block = (op @ a[p].reshape(g.n_r, -1)).reshape(a[p].shape)
            block = np.fft.fft2(block, axes=(1, 2))
            block *= self.trans_phase[None, :, :]
            out[p] = np.fft.ifft2(block, axes=(1, 2))
        out = np.moveaxis(out, 0, 1)
        return np.fft.fft(out, axis=1)
