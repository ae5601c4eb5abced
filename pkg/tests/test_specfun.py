"""Special functions, quadrature engines and the Hankel transform."""

import math

import numpy as np
import pytest

from abkit.errors import AccuracyError, ConfigError, DomainError
from abkit.specfun import (
    RadialGrid,
    bessel_i,
    bessel_i_complex,
    bessel_j,
    gamma_fn,
    gauss_legendre,
    gl_refine,
    hankel_transform,
    quad_adaptive,
    quad_semi_infinite,
)
from abkit.specfun.bessel import _asym_threshold
from abkit.specfun.hankel import radial_norm
from abkit.specfun.oracles import i_integral_oracle, j_integral_oracle

SQRT_PI = math.sqrt(math.pi)


class TestGamma:
    def test_half(self):
        assert gamma_fn(0.5) == pytest.approx(SQRT_PI, rel=1e-14)

    def test_factorial(self):
        assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-14)

    def test_three_halves(self):
        assert gamma_fn(1.5) == pytest.approx(SQRT_PI / 2.0, rel=1e-13)

    def test_domain(self):
        with pytest.raises(DomainError):
            gamma_fn(0.0)
        with pytest.raises(DomainError):
            gamma_fn(-1.3)


class TestBesselJ:
    def test_at_zero(self):
        assert bessel_j(0.0, 0.0) == 1.0
        assert bessel_j(2.0, 0.0) == 0.0

    def test_half_order_closed_form(self):
        # J_{1/2}(x) = sqrt(2/(pi x)) sin x
        for x in [0.3, 1.7, math.pi, 11.0, 40.0]:
            ref = math.sqrt(2.0 / (math.pi * x)) * math.sin(x)
            assert bessel_j(0.5, x) == pytest.approx(ref, abs=2e-13)

    def test_first_zero_of_j0(self):
        # bisection with the series evaluation as the oracle
        lo, hi = 2.0, 3.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if bessel_j(0.0, lo) * bessel_j(0.0, mid) <= 0:
                hi = mid
            else:
                lo = mid
        assert 0.5 * (lo + hi) == pytest.approx(2.404825557695773, abs=1e-12)
        assert abs(bessel_j(0.0, 2.404825557695773)) < 1e-9

    def test_against_integral_representation(self):
        # well-conditioned spot grid for the quadrature oracle
        for nu in [0.0, 0.3, 0.5, 1.0, 1.7, 2.5, 5.0]:
            for x in [0.5, 1.0, 3.0, 7.0, 15.0, 40.0]:
                assert bessel_j(nu, x) == pytest.approx(
                    j_integral_oracle(nu, x), abs=1e-9
                )

    def test_regime_overlap(self):
        # series vs the other two regimes near the boundaries
        from abkit import _ref

        for nu in [0.0, 0.7, 2.3, 5.5]:
            x = np.linspace(10.0, 12.0, 9)
            mid = _ref.jnu_miller_batch(nu, x)
            ser = _ref.jnu_series_batch(nu, x)
            assert np.max(np.abs(mid - ser)) < 1e-10
            xa = np.linspace(_asym_threshold(nu), _asym_threshold(nu) + 6.0, 9)
            asym = _ref.jnu_asym_batch(nu, xa)
            mid2 = _ref.jnu_miller_batch(nu, xa)
            assert np.max(np.abs(asym - mid2)) < 1e-10

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            bessel_j(-0.5, 1.0)
        with pytest.raises(DomainError):
            bessel_j(0.5, -1.0)


class TestBesselI:
    def test_at_zero(self):
        assert bessel_i(0.0, 0.0) == 1.0

    def test_half_order_closed_form(self):
        ref = math.sqrt(4.0 / math.pi) * math.sinh(0.5)
        assert bessel_i(0.5, 0.5) == pytest.approx(0.5879930867904163, abs=1e-13)
        assert bessel_i(0.5, 0.5) == pytest.approx(ref, rel=1e-13)

    def test_against_integral_representation(self):
        assert bessel_i(0.3, 2.0) == pytest.approx(2.177637989553738, abs=1e-10)
        for nu in [0.0, 0.3, 1.7]:
            for z in [0.25, 2.0, 9.0, 28.0]:
                assert bessel_i(nu, z) == pytest.approx(
                    i_integral_oracle(nu, z), abs=1e-9 * max(1.0, math.exp(z) / z)
                )

    def test_large_argument(self):
        # asymptotic regime against the scaled series evaluated in mpmath
        mp = pytest.importorskip("mpmath")
        for nu in [0.0, 0.5, 2.3]:
            for z in [40.0, 50.0]:
                assert bessel_i(nu, z) == pytest.approx(
                    float(mp.besseli(nu, z)), rel=1e-12
                )

    def test_complex_variant(self):
        mp = pytest.importorskip("mpmath")
        for nu in [0.0, 0.5, 1.3]:
            for z in [3 + 4j, 0.5 - 9j, 2 + 25j, 1.5 + 45j]:
                ref = complex(mp.besseli(nu, z))
                assert bessel_i_complex(nu, z) == pytest.approx(ref, abs=2e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            bessel_i(-1.0, 1.0)
        with pytest.raises(DomainError):
            bessel_i(0.5, -2.0)
        assert bessel_i(1.0, -2.0) == pytest.approx(-bessel_i(1.0, 2.0), rel=1e-13)


class TestQuadrature:
    def test_rule_invariants(self):
        rule = gauss_legendre(64, -1.5, 4.0)
        assert np.all(rule.weights > 0)
        assert np.all(np.diff(rule.nodes) > 0)
        assert rule.integrate(lambda x: np.ones_like(x)) == pytest.approx(
            5.5, rel=1e-12
        )

    def test_bad_rule_rejected(self):
        with pytest.raises(ValueError):
            gauss_legendre(8, 2.0, 1.0)

    def test_semi_infinite_exponential(self):
        val, err = quad_semi_infinite(lambda s: np.exp(-s), 1.0, 1e-10)
        assert val == pytest.approx(1.0, abs=1e-10)

    def test_semi_infinite_s_exp(self):
        val, err = quad_semi_infinite(lambda s: s * np.exp(-2.0 * s), 0.5, 1e-10)
        assert val == pytest.approx(0.25, abs=1e-10)

    def test_semi_infinite_matches_b_l1(self):
        # cross-module consistency: |B_{1/2}(s, 0)| integrates to pi
        from abkit.geometry import FluxParam
        from abkit.kernel.factors import b_l1_norm, diffractive_factor_B

        flux = FluxParam(0.5)
        val, _ = quad_semi_infinite(
            lambda s: np.abs(diffractive_factor_B(flux, s, 0.0)), 2.0, 1e-9
        )
        direct = b_l1_norm(flux, 0.0, 1e-9)
        assert val == pytest.approx(direct, abs=1e-7)
        assert direct == pytest.approx(math.pi, abs=1e-8)

    def test_adaptive(self):
        val, err = quad_adaptive(lambda x: np.exp(-x * x), -6.0, 6.0, 1e-12)
        assert val == pytest.approx(SQRT_PI, abs=1e-11)

    def test_gl_refine_failure_carries_best(self):
        with pytest.raises(AccuracyError) as info:
            gl_refine(lambda x: np.abs(x - 1 / 3) ** 0.1, 0.0, 1.0, 1e-14, n0=8,
                      max_doublings=2)
        assert info.value.best is not None


class TestHankel:
    def test_measure_invariant(self):
        grid = RadialGrid(12.0, 128)
        assert np.sum(grid.wr * grid.r) == pytest.approx(
            12.0**2 / 2.0, rel=1e-12
        )

    def test_gaussian_self_reciprocal(self):
        grid = RadialGrid(12.0, 256)
        f = np.exp(-grid.r**2 / 2.0)
        g = hankel_transform(grid, 0.0, f)
        ref = np.exp(-grid.rho**2 / 2.0)
        assert np.max(np.abs(g - ref)) < 1e-8

    def test_round_trip(self):
        grid = RadialGrid(12.0, 256)
        nu = 0.5
        f = grid.r**nu * np.exp(-grid.r**2 / 1.7)
        back = hankel_transform(grid, nu, hankel_transform(grid, nu, f), "inverse")
        rel = radial_norm(grid, back - f) / radial_norm(grid, f)
        assert rel < 1e-8

    def test_plancherel(self):
        grid = RadialGrid(12.0, 256)
        nu = 0.5
        f = grid.r**nu * np.exp(-grid.r**2 / 2.5) * (1.0 + 0.3 * grid.r**2)
        g = hankel_transform(grid, nu, f)
        assert radial_norm(grid, g, side="rho") == pytest.approx(
            radial_norm(grid, f), rel=1e-8
        )

    def test_self_adjoint_matrix(self):
        # with the measure folded symmetrically the operator matrix is
        # symmetric by construction; check the unfolded form explicitly
        grid = RadialGrid(8.0, 96, rho_max=8.0)
        tab = grid.bessel_table(0.7)
        m = np.sqrt(grid.wp * grid.rho)[:, None] * tab * np.sqrt(grid.wr * grid.r)[None, :]
        assert np.max(np.abs(m - m.T)) < 1e-13

    def test_multiplier_property_closed_form(self):
        # A_nu (r^nu e^{-a r^2}) = 4a(nu + 1 - a r^2) r^nu e^{-a r^2};
        # transforming both sides must match rho^2 * transform
        grid = RadialGrid(14.0, 256)
        nu, a = 0.5, 0.9
        f = grid.r**nu * np.exp(-a * grid.r**2)
        af = 4.0 * a * (nu + 1.0 - a * grid.r**2) * f
        lhs = hankel_transform(grid, nu, af)
        rhs = grid.rho**2 * hankel_transform(grid, nu, f)
        scale = np.max(np.abs(rhs))
        assert np.max(np.abs(lhs - rhs)) / scale < 1e-9

    def test_multiplier_property_finite_difference(self):
        # spec form of Lemma 2.2 (4): discrete A_nu by finite differences
        grid = RadialGrid(14.0, 384)
        nu = 0.5
        r = grid.r
        f = r**nu * np.exp(-r**2)
        # nonuniform 3-point second derivative and centered first derivative
        d2 = np.zeros_like(f)
        d1 = np.zeros_like(f)
        hm = r[1:-1] - r[:-2]
        hp = r[2:] - r[1:-1]
        d2[1:-1] = 2.0 * (
            f[:-2] / (hm * (hm + hp)) - f[1:-1] / (hm * hp) + f[2:] / (hp * (hm + hp))
        )
        d1[1:-1] = (
            -hp / (hm * (hm + hp)) * f[:-2]
            + (hp - hm) / (hm * hp) * f[1:-1]
            + hm / (hp * (hm + hp)) * f[2:]
        )
        af = -d2 - d1 / r + nu**2 / r**2 * f
        lhs = hankel_transform(grid, nu, af)
        rhs = grid.rho**2 * hankel_transform(grid, nu, f)
        interior = grid.rho < 0.6 * grid.rho_max
        scale = np.max(np.abs(rhs[interior]))
        # O(h^2) with h ~ R / n
        assert (
            np.max(np.abs(lhs[interior] - rhs[interior])) / scale
            < 50.0 * (grid.radius / grid.n) ** 2
        )

    def test_shape_guard(self):
        grid = RadialGrid(8.0, 64)
        with pytest.raises(ConfigError):
            hankel_transform(grid, 0.0, np.zeros(32))


class TestWeberIdentity:
    @pytest.mark.parametrize("nu", [0.0, 0.3, 0.5, 1.7])
    def test_grid(self, nu):
        # int_0^inf J(r rho) J(rbar rho) e^{-eps rho^2} rho drho
        #   = (1/(2 eps)) e^{-(r^2+rbar^2)/(4 eps)} I_nu(r rbar/(2 eps))
        for r in [0.5, 1.0, 2.0]:
            for rbar in [0.7, 1.5, 2.5]:
                for eps in [0.4, 1.0, 2.3]:
                    def f(rho):
                        return (
                            np.asarray(bessel_j(nu, r * rho))
                            * np.asarray(bessel_j(nu, rbar * rho))
                            * np.exp(-eps * rho**2)
                            * rho
                        )

                    lhs, _ = quad_semi_infinite(f, 1.0 / math.sqrt(eps), 1e-11)
                    rhs = (
                        math.exp(-(r**2 + rbar**2) / (4.0 * eps))
                        / (2.0 * eps)
                        * bessel_i(nu, r * rbar / (2.0 * eps))
                    )
                    assert lhs.real == pytest.approx(rhs, rel=1e-7)

    def test_frozen_instance(self):
        # nu = 1/2, r = rbar = 1, eps = 1
        rhs = 0.5 * math.exp(-0.5) * bessel_i(0.5, 0.5)
        assert rhs == pytest.approx(0.17831791741872947, rel=1e-12)
