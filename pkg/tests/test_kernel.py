"""Closed-form propagator/heat kernels against their oracles."""

import cmath
import math

import numpy as np
import pytest

from abkit.errors import DomainError
from abkit.geometry import CylPoint4, FluxParam, cartesian_distance
from abkit.kernel.factors import AngleDiff, b_l1_norm
from abkit.kernel.modesum import modesum_kernel
from abkit.kernel.propagator import (
    boundary_kernel_pair,
    heat_kernel,
    kernel_z,
    normalization,
    propagator_kernel,
)
from abkit.kernel.scans import FREE_DECAY, dispersive_ratio_scan, heat_ratio_scan

X = CylPoint4(1.2, 0.7, 0.3, -0.2)
Y = CylPoint4(0.8, 2.5, -0.1, 0.4)
Z = CylPoint4(2.0, 5.9, 0.6, 0.1)

FREE = FluxParam(0.0)
HALF = FluxParam(0.5)


class TestFreeCase:
    def test_propagator_diagonal(self):
        kv = propagator_kernel(FREE, 1.0, X, X)
        assert kv.value == pytest.approx(-1.0 / (16.0 * math.pi**2), abs=1e-15)

    def test_heat_diagonal(self):
        kv = heat_kernel(FREE, 1.0, X, X)
        assert kv.value == pytest.approx(1.0 / (16.0 * math.pi**2), abs=1e-15)

    def test_free_closed_form_off_diagonal(self):
        t = 0.7
        d = cartesian_distance(X, Y)
        ref = normalization(-1j * t) * cmath.exp(-d * d / (4.0 * (-1j * t)))
        kv = propagator_kernel(FREE, t, X, Y)
        assert kv.value == pytest.approx(ref, rel=1e-13)
        assert kv.diffractive == 0.0


class TestIntegerFluxDegeneration:
    def test_magnitude_free_phase_shifted(self):
        flux = FluxParam(2.0)
        for t in [0.4, 1.1]:
            for a, b in [(X, Y), (Y, Z)]:
                kv = propagator_kernel(flux, t, a, b)
                free = propagator_kernel(FREE, t, a, b)
                assert abs(kv.value) == pytest.approx(abs(free.value), rel=1e-12)
                delta = AngleDiff(a.theta - b.theta).wrapped
                assert kv.value == pytest.approx(
                    free.value * cmath.exp(2j * delta), rel=1e-12
                )


class TestOracleEquivalence:
    @pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 0.75, 1.3])
    def test_weber_mode_sum(self, alpha):
        flux = FluxParam(alpha)
        for t in [0.3, 1.0]:
            for a, b in [(X, Y), (Z, X)]:
                kv = propagator_kernel(flux, t, a, b, tol=1e-11)
                ms = modesum_kernel(flux, t, a, b, k_modes=30)
                assert abs(kv.value - ms) / abs(ms) < 1e-7

    def test_quadrature_mode_sum(self):
        # the pre-Weber J.J rho-integral route, independent of the Weber
        # identity; coarser because of the eps extrapolation
        kv = propagator_kernel(HALF, 0.5, X, Y, tol=1e-11)
        ms = modesum_kernel(HALF, 0.5, X, Y, k_modes=24, method="quadrature")
        assert abs(kv.value - ms) / abs(kv.value) < 1e-3

    def test_contour_vs_regularized(self):
        for alpha in [0.25, 0.5]:
            flux = FluxParam(alpha)
            a = propagator_kernel(flux, 0.8, X, Y, method="contour")
            b = propagator_kernel(flux, 0.8, X, Y, method="regularized")
            assert a.value == pytest.approx(b.value, rel=2e-6)


class TestSymmetries:
    def test_time_reversal_hermitian(self):
        for alpha in [0.25, 0.5]:
            flux = FluxParam(alpha)
            for t in [0.5, 1.2]:
                kv = propagator_kernel(flux, t, X, Y)
                rv = propagator_kernel(flux, -t, Y, X)
                assert kv.value == pytest.approx(np.conj(rv.value), rel=1e-8)

    def test_flux_periodicity(self):
        # K_{alpha+1} = e^{i delta} K_alpha, checked against the mode sum
        # at the unreduced flux
        t = 0.6
        delta = X.theta - Y.theta
        k_lo = propagator_kernel(FluxParam(0.3), t, X, Y).value
        k_hi = propagator_kernel(FluxParam(1.3), t, X, Y).value
        assert k_hi == pytest.approx(k_lo * cmath.exp(1j * delta), rel=1e-10)
        ms_hi = modesum_kernel(FluxParam(1.3), t, X, Y, k_modes=32)
        assert k_hi == pytest.approx(ms_hi, rel=1e-7)

    def test_boundary_branch_pair(self):
        xb = CylPoint4(1.0, math.pi, 0.2, 0.0)
        yb = CylPoint4(1.4, 0.0, 0.0, 0.3)
        for alpha in [0.3, 0.5]:
            for z in [-0.7j, 0.9]:
                kp, km = boundary_kernel_pair(FluxParam(alpha), z, xb, yb)
                assert kp == pytest.approx(km, abs=1e-14)

    def test_boundary_continuity(self):
        # the full kernel is continuous across |delta| = pi even though A
        # jumps there (the diffractive spike cancels the jump)
        flux = FluxParam(0.3)
        h = 1e-4
        xa = CylPoint4(1.0, math.pi - h, 0.2, 0.0)
        xb = CylPoint4(1.0, math.pi + h, 0.2, 0.0)
        y = CylPoint4(1.4, 0.0, 0.0, 0.3)
        ka = propagator_kernel(flux, 0.7, xa, y).value
        kb = propagator_kernel(flux, 0.7, xb, y).value
        jump_scale = abs(
            propagator_kernel(FluxParam(0.0), 0.7, xa, y).value
        ) * 2.0 * math.sin(0.3 * math.pi)
        assert abs(ka - kb) < 1e-2 * jump_scale


class TestKernelValueInvariant:
    def test_triangle_bound_on_diffractive(self):
        for t in [0.3, 1.0, 4.0]:
            kv = propagator_kernel(HALF, t, X, Y)
            bound = abs(normalization(-1j * t)) * b_l1_norm(
                HALF, AngleDiff(X.theta - Y.theta).wrapped
            )
            assert abs(kv.diffractive) <= bound + kv.err_estimate + 1e-14

    def test_domain_guards(self):
        with pytest.raises(DomainError):
            propagator_kernel(HALF, 0.0, X, Y)
        with pytest.raises(DomainError):
            heat_kernel(HALF, -1.0, X, Y)
        axis = CylPoint4(0.0, 0.0, 0.0, 0.0)
        with pytest.raises(DomainError):
            propagator_kernel(HALF, 1.0, axis, Y)


class TestHeat:
    def test_gaussian_ratio_bounded(self):
        for t in [0.02, 0.3, 2.0, 10.0]:
            kv = heat_kernel(HALF, t, X, Y)
            d = cartesian_distance(X, Y)
            ratio = abs(kv.value) * t * t * math.exp(d * d / (4.0 * t))
            assert ratio <= FREE_DECAY * (1.0 + math.pi) + 1e-9

    def test_chapman_kolmogorov(self):
        # semigroup property by 4D quadrature over the midpoint; the
        # diffractive integral depends only on (theta, r) of the midpoint,
        # so it is tabulated once per (angle, radius) pair
        from abkit import backend
        from abkit.specfun.quadrature import gauss_legendre, panel_nodes

        flux = HALF
        t = 1.0
        x = CylPoint4(0.9, 0.4, 0.2, 0.0)
        y = CylPoint4(1.1, 1.9, -0.3, 0.2)

        def heat_value(tt, a: CylPoint4, rs, ths, b3, b4):
            """Vectorized heat kernel K(tt; a, z) on a product midpoint
            grid z = (rs x ths x b3 x b4), returning a 4D array."""
            n = 1.0 / (16.0 * math.pi**2 * tt * tt)
            snodes, sweights = panel_nodes(
                np.concatenate([[0.0], np.geomspace(1e-4, 40.0, 90)]), 8
            )
            dist2 = (
                (a.r**2 + rs[:, None] ** 2
                 - 2.0 * a.r * rs[:, None] * np.cos(a.theta - ths[None, :]))[
                    :, :, None, None
                ]
                + (a.x3 - b3)[None, None, :, None] ** 2
                + (a.x4 - b4)[None, None, None, :] ** 2
            )
            wrapped = np.remainder(a.theta - ths + math.pi, 2.0 * math.pi) - math.pi
            geom = n * np.exp(-dist2 / (4.0 * tt)) * np.exp(
                1j * flux.alpha * wrapped
            )[None, :, None, None]
            # D-table over (r_z, theta_z)
            dtab = np.empty((rs.size, ths.size), dtype=complex)
            for j, thz in enumerate(ths):
                arg = (a.theta - thz) + math.pi
                bvals = backend.b_alpha_batch(
                    flux.reduced, math.cos(arg), math.sin(arg), snodes
                )
                env = np.exp(
                    -np.outer(a.r * rs / (2.0 * tt), np.cosh(snodes))
                )
                dtab[:, j] = env @ (sweights * bvals)
            sep2 = (
                (a.r**2 + rs[:, None] ** 2)[:, :, None, None]
                + (a.x3 - b3)[None, None, :, None] ** 2
                + (a.x4 - b4)[None, None, None, :] ** 2
            )
            diffr = n / math.pi * np.exp(-sep2 / (4.0 * tt)) * dtab[:, :, None, None]
            return geom + diffr

        rr = gauss_legendre(24, 1e-3, 8.0)
        ths = np.linspace(0.0, 2.0 * math.pi, 24, endpoint=False)
        tr = gauss_legendre(16, -5.5, 5.5)
        k1 = heat_value(t / 2, x, rr.nodes, ths, tr.nodes, tr.nodes)
        k2 = np.conj(heat_value(t / 2, y, rr.nodes, ths, tr.nodes, tr.nodes))
        # K(t/2; z, y) = K(t/2; y, z) conjugate-free for the heat kernel:
        # the heat kernel is Hermitian, K(z, y) = conj(K(y, z))
        w4 = (
            (rr.weights * rr.nodes)[:, None, None, None]
            * (2.0 * math.pi / ths.size)
            * tr.weights[None, None, :, None]
            * tr.weights[None, None, None, :]
        )
        total = complex(np.sum(k1 * k2 * w4))
        ref = heat_kernel(flux, t, x, y).value
        assert abs(total - ref) / abs(ref) < 1e-2


class TestScans:
    def test_dispersive_free_rows_exact(self):
        rep = dispersive_ratio_scan(FREE, [0.1, 1.0, 10.0], [(X, Y)])
        for v in rep.column("measured"):
            assert v == pytest.approx(FREE_DECAY, abs=1e-12)
        assert rep.all_pass

    def test_dispersive_bounded(self):
        rep = dispersive_ratio_scan(HALF, np.geomspace(0.1, 10.0, 5), [(X, Y), (Y, Z)])
        assert rep.all_pass
        assert max(rep.column("ratio")) <= 1.0 + 1e-9

    def test_heat_scan(self):
        rep = heat_ratio_scan(HALF, np.geomspace(0.01, 10.0, 5), [(X, Y)])
        assert rep.all_pass

    def test_workers_deterministic(self):
        a = dispersive_ratio_scan(HALF, [0.5, 2.0], [(X, Y)], workers=1)
        b = dispersive_ratio_scan(HALF, [0.5, 2.0], [(X, Y)], workers=2)
        assert a.to_csv() == b.to_csv()
