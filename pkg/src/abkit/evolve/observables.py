"""Physical observables and the virial/Morawetz diagnostics.

Mass, magnetic kinetic energy and the conserved energy

    E = 1/2 ||grad_A u||^2 + 1/(p+1) int |u|^{p+1}

with the kinetic term computed spectrally (sum of lambda^2 |a|^2).  The
virial machinery uses the regularized radial weight a(x) = sqrt(|x|^2 +
delta^2) in 4D, whose derivatives are analytic:

    grad a = x/a,   Hessian quadratic form  |v|^2/a - |x.v|^2/a^3,
    Lap a = (3|x|^2 + 4 delta^2)/a^3,
    Lap^2 a = -(3 a^4 + 6 delta^2 a^2 + 15 delta^4)/a^7

(checked against finite differences in the tests; delta = 0 reduces to
Lap|x| = 3/|x| and Lap^2|x| = -3/|x|^3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..geometry import FluxParam
from .field import ModeField
from .grid import GridSpec


@dataclass
class Observables:
    time: float
    mass: float
    kinetic: float
    potential_pp1: float
    energy: float
    boundary_fraction: float = 0.0

    @staticmethod
    def columns():
        return ["time", "mass", "kinetic", "potential_pp1", "energy", "boundary"]

    def row(self):
        return (
            self.time,
            self.mass,
            self.kinetic,
            self.potential_pp1,
            self.energy,
            self.boundary_fraction,
        )


def observables(
    u: np.ndarray,
    m: ModeField,
    grid: GridSpec,
    flux: FluxParam,
    p: float,
    time: float = 0.0,
) -> Observables:
    mass = grid.physical_norm_sq(u)
    lam2 = grid.lambda_sq()
    cell = 1.0 / (2.0 * grid.box) ** 2
    kinetic = float(
        np.einsum("q,qjl,kqjl->", grid.rho_weight, lam2, np.abs(m.coeff) ** 2) * cell
    )
    pot = grid.physical_integral(np.abs(u) ** (p + 1.0))
    energy = 0.5 * kinetic + pot / (p + 1.0)
    return Observables(time, mass, kinetic, pot, energy, boundary_fraction(u, grid))


def boundary_fraction(u: np.ndarray, grid: GridSpec) -> float:
    """Relative mass in the outer 10% shell of the radial/transverse box."""
    w2 = np.abs(u) ** 2
    total = grid.physical_norm_sq(u)
    out_r = grid.radial.r > 0.9 * grid.radius
    tail = float(
        np.einsum("i,imjk->", grid.radial_weight[out_r], w2[out_r])
        * grid.cell_physical
    )
    out_t = np.abs(grid.x_t) > 0.9 * grid.box
    tail += float(
        (
            np.einsum("i,imjk->", grid.radial_weight, w2[:, :, out_t, :])
            + np.einsum("i,imjk->", grid.radial_weight, w2[:, :, :, out_t])
        )
        * grid.cell_physical
    )
    return tail / total if total else 0.0


# -- magnetic gradient -------------------------------------------------------


def magnetic_gradient(
    u: np.ndarray, m: ModeField, grid: GridSpec, flux: FluxParam
) -> list[np.ndarray]:
    """(-i grad + A) u componentwise on the physical grid.

    d/dr comes from differentiating the Bessel expansion (exact on the
    band-limited representation), d/dtheta and the transverse derivatives
    from their diagonal multipliers.
    """
    g = grid
    a = np.fft.ifft2(m.coeff, axes=(2, 3)) / (g.dx * g.dx)  # [k, rho, x3, x4]
    du_dr_modes = np.zeros_like(a)
    u_modes = np.zeros_like(a)
    for p, k in enumerate(g.modes):
        if not g.mode_live[p]:
            continue
        nu = flux.order(int(k))
        inv = g.radial.inverse_matrix(nu)
        dinv = _radial_derivative_matrix(g, nu)
        u_modes[p] = (inv @ a[p].reshape(g.n_r, -1)).reshape(a[p].shape)
        du_dr_modes[p] = (dinv @ a[p].reshape(g.n_r, -1)).reshape(a[p].shape)

    def to_phys(modes):
        return np.fft.fft(np.moveaxis(modes, 0, 1), axis=1) / math.sqrt(2.0 * math.pi)

    du_dr = to_phys(du_dr_modes)
    ik = (-1j * g.modes)[None, :, None, None]
    du_dth = to_phys(u_modes * (-1j * g.modes)[:, None, None, None])
    del ik
    # transverse derivatives straight from the physical samples
    uhat = np.fft.fft2(u, axes=(2, 3))
    du3 = np.fft.ifft2(uhat * (1j * g.xi)[None, None, :, None], axes=(2, 3))
    du4 = np.fft.ifft2(uhat * (1j * g.xi)[None, None, None, :], axes=(2, 3))
    r, th, _, _ = g.meshes()
    cos = np.cos(th)
    sin = np.sin(th)
    inv_r = 1.0 / np.maximum(r, g.r_min)
    dx1 = cos * du_dr - sin * inv_r * du_dth
    dx2 = sin * du_dr + cos * inv_r * du_dth
    alpha = flux.alpha
    a1 = -alpha * sin * inv_r
    a2 = alpha * cos * inv_r
    return [
        -1j * dx1 + a1 * u,
        -1j * dx2 + a2 * u,
        -1j * du3,
        -1j * du4,
    ]


def _radial_derivative_matrix(grid: GridSpec, nu: float) -> np.ndarray:
    key = ("ddr", round(nu, 12))
    cache = grid.radial._tables
    if key not in cache:
        from ..specfun.bessel import bessel_j

        rho = grid.radial.rho
        r = grid.radial.r
        arg = np.outer(rho, r)
        jn = grid.radial.bessel_table(nu)
        jn1 = np.asarray(bessel_j(nu + 1.0, arg.ravel())).reshape(arg.shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            jp = np.where(arg > 0, (nu / np.where(arg > 0, arg, 1.0)) * jn - jn1, 0.0)
        mat = (jp * rho[:, None]).T * (grid.radial.rho * grid.radial.wp)[None, :]
        cache[key] = mat
    return cache[key]


# -- virial / Morawetz -------------------------------------------------------


def weight_derivatives(grid: GridSpec, delta_reg: float):
    """a = sqrt(|x|^2 + delta^2) and its Laplacians on the grid meshes."""
    r, th, x3, x4 = grid.meshes()
    rho2 = r * r + x3 * x3 + x4 * x4
    a = np.sqrt(rho2 + delta_reg * delta_reg)
    lap = (3.0 * rho2 + 4.0 * delta_reg**2) / a**3
    bilap = -(3.0 * a**4 + 6.0 * delta_reg**2 * a * a + 15.0 * delta_reg**4) / a**7
    return a, lap, bilap


def virial_rhs(
    u: np.ndarray,
    m: ModeField,
    grid: GridSpec,
    flux: FluxParam,
    p: float,
    delta_reg: float,
    include_nonlinear: bool = True,
) -> float:
    """4 int grad_A u . D^2a . conj(grad_A u) - int |u|^2 Lap^2 a
    + (2(p-1)/(p+1)) int |u|^{p+1} Lap a."""
    g = grid
    a, lap, bilap = weight_derivatives(g, delta_reg)
    grads = magnetic_gradient(u, m, g, flux)
    r, th, x3, x4 = g.meshes()
    xs = [r * np.cos(th), r * np.sin(th), x3 * np.ones_like(th), x4 * np.ones_like(th)]
    grad_sq = sum(np.abs(gc) ** 2 for gc in grads)
    x_dot = sum(x * gc for x, gc in zip(xs, grads))
    hess_form = grad_sq / a - np.abs(x_dot) ** 2 / a**3
    total = 4.0 * g.physical_integral(hess_form.real)
    total -= g.physical_integral((np.abs(u) ** 2) * bilap)
    if include_nonlinear:
        total += (
            2.0
            * (p - 1.0)
            / (p + 1.0)
            * g.physical_integral((np.abs(u) ** (p + 1.0)) * lap)
        )
    return float(total)


def phi_weight(u: np.ndarray, grid: GridSpec, delta_reg: float) -> float:
    """Phi_a = int a_delta |u|^2."""
    a, _, _ = weight_derivatives(grid, delta_reg)
    return grid.physical_integral(a * np.abs(u) ** 2)


def morawetz_density(u: np.ndarray, grid: GridSpec, p: float, delta_reg: float) -> float:
    """int |u|^{p+1} / a_delta."""
    a, _, _ = weight_derivatives(grid, delta_reg)
    return grid.physical_integral(np.abs(u) ** (p + 1.0) / a)
