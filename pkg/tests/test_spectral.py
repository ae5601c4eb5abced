"""Spectral measure, Stone consistency, localized wave kernels."""

import math

import numpy as np
import pytest

from abkit.geometry import CylPoint4, FluxParam
from abkit.kernel.propagator import propagator_kernel
from abkit.spectral import (
    C4,
    density_sweep,
    localized_bound_scan,
    localized_wave_kernel,
    measure_kernel_consistency,
    smooth_bump,
    spectral_density,
    sphere_surface_ft,
    wave_dispersive_scan,
)
from abkit.specfun import bessel_j

X = CylPoint4(1.2, 0.7, 0.3, -0.2)
Y = CylPoint4(0.8, 2.5, -0.1, 0.4)
FREE = FluxParam(0.0)
HALF = FluxParam(0.5)


class TestSphereTransform:
    def test_at_zero(self):
        assert sphere_surface_ft(np.zeros(4)) == pytest.approx(
            2.0 * math.pi**2, rel=1e-14
        )

    def test_j1_zero(self):
        w = np.array([3.8317059702075125, 0.0, 0.0, 0.0])
        assert abs(sphere_surface_ft(w)) < 1e-9

    def test_unit_radius(self):
        ref = (2.0 * math.pi) ** 2 * bessel_j(1.0, 1.0)
        assert sphere_surface_ft(np.array([1.0, 0, 0, 0])) == pytest.approx(
            ref, rel=1e-12
        )
        assert ref == pytest.approx(17.3725, abs=1e-3)


class TestDensity:
    def test_free_closed_form(self):
        from abkit.geometry import cartesian_distance

        lam = 2.0
        d = cartesian_distance(X, Y)
        dv = spectral_density(FREE, lam, X, Y)
        ref = C4 * lam**3 * sphere_surface_ft(lam * d)
        assert dv.value == pytest.approx(ref, rel=1e-13)
        assert dv.diffractive == 0.0

    def test_integer_flux_phase(self):
        import cmath

        lam = 1.7
        dv = spectral_density(FluxParam(2.0), lam, X, Y)
        free = spectral_density(FREE, lam, X, Y)
        delta = math.remainder(X.theta - Y.theta, 2.0 * math.pi)
        assert dv.value == pytest.approx(free.value * cmath.exp(2j * delta), rel=1e-12)

    def test_hermitian(self):
        for lam in [0.5, 2.0, 9.0]:
            a = spectral_density(HALF, lam, X, Y)
            b = spectral_density(HALF, lam, Y, X)
            assert a.value == pytest.approx(np.conj(b.value), abs=1e-8 * abs(a.value) + 1e-15)

    def test_diagonal_nonnegative(self):
        for lam in [0.3, 1.0, 4.0, 11.0]:
            dv = spectral_density(HALF, lam, X, X)
            assert abs(dv.value.imag) < 1e-10 * abs(dv.value) + 1e-15
            assert dv.value.real > -1e-12

    def test_sweep_matches_scalar(self):
        lams = np.array([0.4, 1.3, 5.0, 17.0])
        sweep = density_sweep(HALF, lams, X, Y)
        for lam, v in zip(lams, sweep):
            assert v == pytest.approx(
                spectral_density(HALF, float(lam), X, Y).value, rel=1e-10
            )


class TestStoneConsistency:
    def test_free_diagonal(self):
        res = measure_kernel_consistency(FREE, 1.0, X, X)
        assert res["rel_deviation"] < 1e-6
        assert res["reconstructed"] == pytest.approx(
            -1.0 / (16.0 * math.pi**2), rel=1e-4
        )

    def test_half_flux(self):
        res = measure_kernel_consistency(HALF, 0.45, X, Y)
        assert res["rel_deviation"] < 1e-4

    def test_truncated_tail_grows(self):
        good = measure_kernel_consistency(HALF, 0.45, X, Y)
        bad = measure_kernel_consistency(HALF, 0.45, X, Y, lam_max=8.0)
        assert bad["rel_deviation"] > 5.0 * good["rel_deviation"]


class TestLocalizedWave:
    def test_scaling_covariance(self):
        for k in [-2, 1, 3]:
            t = 0.8
            a = localized_wave_kernel(HALF, k, t, X, Y)
            s = 2.0**k
            xs = CylPoint4(s * X.r, X.theta, s * X.x3, s * X.x4)
            ys = CylPoint4(s * Y.r, Y.theta, s * Y.x3, s * Y.x4)
            b = s**4 * localized_wave_kernel(HALF, 0, s * t, xs, ys)
            assert a == pytest.approx(b, rel=1e-8)

    def test_t_zero_diagonal_value(self):
        # U_k(0)(x, x) = 2^{4k}/(8 pi^2) int phi(mu) mu^3 dmu at alpha = 0
        from abkit.specfun.quadrature import gauss_legendre

        rule = gauss_legendre(200, 0.5, 2.0)
        phi_int = float(
            np.sum(rule.weights * smooth_bump(rule.nodes) * rule.nodes**3)
        )
        for k in [-1, 0, 2]:
            val = localized_wave_kernel(FREE, k, 0.0, X, X)
            ref = 2.0 ** (4 * k) / (8.0 * math.pi**2) * phi_int
            assert val.real == pytest.approx(ref, rel=1e-8)
            assert val.real > 0

    def test_bump_partition(self):
        lam = np.geomspace(0.3, 12.0, 60)
        total = sum(smooth_bump(lam / 2.0**k) for k in range(-6, 8))
        assert np.max(np.abs(total - 1.0)) < 1e-14
        vals = smooth_bump(np.linspace(0.3, 2.3, 101))
        assert np.all((vals >= 0.0) & (vals <= 1.0))

    def test_wave_scan_normalizations(self):
        rep = wave_dispersive_scan(
            HALF, range(-2, 3), [0.0, 0.5, 2.0], [(X, Y)], tol=1e-7
        )
        n52 = np.array(rep.column("norm_52"))
        assert np.all(np.isfinite(n52))
        # uniformity in k: per-k maxima do not grow with k
        ks = np.array(rep.column("k"))
        per_k = [n52[ks == k].max() for k in sorted(set(ks))]
        for lo, hi in zip(per_k[:-1], per_k[1:]):
            assert hi <= 1.3 * max(lo, max(per_k) * 0.5) + 1e-12

    def test_localized_bound_scan_diag_scaling(self):
        rep = localized_bound_scan(HALF, range(-1, 3), [(X, X)], tol=1e-7)
        w = rep.column("weighted")
        # x = y rows are k-independent by exact scaling
        assert max(w) / min(w) == pytest.approx(1.0, rel=1e-8)

    def test_localized_bound_decay_in_separation(self):
        pairs = []
        for sep in [0.5, 2.0, 5.0]:
            pairs.append((X, CylPoint4(X.r, X.theta, X.x3 + sep, X.x4)))
        rep = localized_bound_scan(HALF, [2], pairs, k_decay=4.0, tol=1e-7)
        w = rep.column("weighted")
        assert np.all(np.isfinite(w))
        assert max(w) < 10.0 * w[0] + 1.0


class TestPlancherelSpotCheck:
    def test_identity_action(self):
        # (P_Lambda g)(x) ~ g(x) for a narrow Gaussian g once Lambda is
        # past the data bandwidth.  The lambda integral of the projector
        # kernel collapses through int_0^X u^2 J_1(u) du = X^2 J_2(X), so
        # P(x, y) = C4 (2 pi)^2 Lambda^2 [ J_2(Lambda d)/d^2 A(delta)
        #           + (1/pi) int B(s) J_2(Lambda |n_s|)/|n_s|^2 ds ].
        from abkit import backend
        from abkit.kernel.factors import AngleDiff, angular_factor_A
        from abkit.specfun.quadrature import gauss_legendre, panel_nodes

        h = 0.45
        lam_max = 7.0 / h
        y0 = CylPoint4(1.1, 0.9, 0.1, -0.2)
        flux = HALF

        def projector(x: CylPoint4, y: CylPoint4) -> complex:
            from abkit.geometry import cartesian_distance

            d = cartesian_distance(x, y)
            pref = C4 * (2.0 * math.pi) ** 2 * lam_max**2
            if d < 1e-9:
                geo = pref * lam_max**2 / 8.0
            else:
                geo = pref * float(bessel_j(2.0, lam_max * d)) / (d * d)
            geo = geo * angular_factor_A(flux, AngleDiff(x.theta - y.theta))
            # diffractive part: phase-adapted panels in s
            base = x.r**2 + y.r**2 + (x.x3 - y.x3) ** 2 + (x.x4 - y.x4) ** 2
            rr2 = 2.0 * x.r * y.r
            n0 = math.sqrt(base + rr2)
            n_end = n0 + 3000.0 / lam_max
            s_end = math.acosh(max((n_end**2 - base) / rr2, 1.0))
            nvals = np.linspace(n0, n_end, 1400)[1:]
            svals = np.arccosh(np.maximum((nvals**2 - base) / rr2, 1.0))
            edges = np.union1d(np.geomspace(1e-4, s_end, 30), svals)
            edges = np.concatenate([[0.0], edges[edges > 0.0]])
            nodes, weights = panel_nodes(edges, 6)
            arg = (x.theta - y.theta) + math.pi
            bv = backend.b_alpha_batch(
                flux.reduced, math.cos(arg), math.sin(arg), nodes
            )
            ns = np.sqrt(base + rr2 * np.cosh(nodes))
            j2 = np.asarray(bessel_j(2.0, lam_max * ns))
            diff = pref / math.pi * np.sum(weights * bv * j2 / ns**2)
            return geo + diff

        rr = gauss_legendre(6, max(y0.r - 3.0 * h, 1e-3), y0.r + 3.0 * h)
        th_half = 3.0 * h / y0.r
        trule = gauss_legendre(6, y0.theta - th_half, y0.theta + th_half)
        t3 = gauss_legendre(6, y0.x3 - 3.0 * h, y0.x3 + 3.0 * h)
        t4 = gauss_legendre(6, y0.x4 - 3.0 * h, y0.x4 + 3.0 * h)
        total = 0.0j
        for ri, wi in zip(rr.nodes, rr.weights):
            for tj, wj in zip(trule.nodes, trule.weights):
                for a3, w3 in zip(t3.nodes, t3.weights):
                    for a4, w4 in zip(t4.nodes, t4.weights):
                        ypt = CylPoint4(ri, tj, a3, a4)
                        g = math.exp(
                            -(
                                ri * ri
                                + y0.r * y0.r
                                - 2.0 * ri * y0.r * math.cos(tj - y0.theta)
                                + (a3 - y0.x3) ** 2
                                + (a4 - y0.x4) ** 2
                            )
                            / (2.0 * h * h)
                        )
                        total += projector(y0, ypt) * g * wi * ri * wj * w3 * w4
        assert abs(total - 1.0) < 0.05
