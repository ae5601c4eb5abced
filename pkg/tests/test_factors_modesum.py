"""Angular/diffractive factors against the truncated mode-sum oracle."""

import cmath
import math

import numpy as np
import pytest

from abkit.geometry import FluxParam
from abkit.kernel.factors import (
    AngleDiff,
    angular_factor_A,
    b_l1_norm,
    diffractive_factor_B,
)
from abkit.kernel.modesum import mode_sum_oracle
from abkit.specfun.quadrature import panel_nodes

DELTA_GRID = [-2.8, -2.0, -1.1, -0.4, 0.7, 1.5, 2.4, 3.0]


def b_transform(alpha: float, delta: float, zz: float) -> complex:
    """(1/pi) int_0^inf e^{-zz cosh s} B(s, delta) ds by quadrature."""
    flux = FluxParam(alpha)
    edges = np.concatenate([[0.0], np.geomspace(1e-4, 60.0, 140)])
    nodes, w = panel_nodes(edges, 10)
    vals = np.asarray(diffractive_factor_B(flux, nodes, delta))
    return complex(np.sum(w * np.exp(-zz * np.cosh(nodes)) * vals) / math.pi)


class TestAngularFactor:
    def test_zero_flux(self):
        for d in DELTA_GRID:
            assert angular_factor_A(FluxParam(0.0), d) == pytest.approx(1.0)

    def test_direct_values(self):
        assert angular_factor_A(FluxParam(0.5), math.pi / 2) == pytest.approx(
            cmath.exp(1j * math.pi / 4), abs=1e-14
        )
        assert angular_factor_A(FluxParam(0.5), 3 * math.pi / 2) == pytest.approx(
            cmath.exp(-1j * math.pi / 4), abs=1e-14
        )

    def test_unit_modulus(self):
        for a in [0.25, 0.5, 1.3, -0.7]:
            for d in DELTA_GRID:
                assert abs(angular_factor_A(FluxParam(a), d)) == pytest.approx(1.0)

    def test_branch_indicator(self):
        d = AngleDiff(3 * math.pi / 2)
        assert d.outer_branch
        assert not AngleDiff(0.4).outer_branch
        assert AngleDiff(math.pi).on_boundary

    def test_domain(self):
        with pytest.raises(ValueError):
            AngleDiff(7.0)


class TestDiffractiveFactor:
    def test_integer_flux_vanishes(self):
        s = np.linspace(0.0, 5.0, 11)
        for a in [0.0, 2.0, -3.0]:
            assert np.all(diffractive_factor_B(FluxParam(a), s, 1.0) == 0.0)

    def test_value_at_origin(self):
        # alpha = 1/2, s = 0, delta = 0 -> -1
        assert diffractive_factor_B(FluxParam(0.5), 0.0, 0.0) == pytest.approx(
            -1.0, abs=1e-14
        )

    def test_exponential_decay(self):
        s = np.linspace(0.0, 30.0, 200)
        for a in [0.25, 0.5, 0.75]:
            flux = FluxParam(a)
            rate = min(abs(flux.reduced), 1.0 - abs(flux.reduced))
            vals = np.abs(diffractive_factor_B(flux, s, 0.9))
            bound = 4.0 * np.exp(-rate * s)
            assert np.all(vals <= bound + 1e-12)

    def test_conjugation_symmetry(self):
        s = np.array([0.05, 0.4, 1.1, 3.0])
        for a in [0.25, 0.5, 1.3]:
            for d in DELTA_GRID:
                bp = np.asarray(diffractive_factor_B(FluxParam(a), s, d))
                bm = np.asarray(diffractive_factor_B(FluxParam(-a), s, d))
                assert np.max(np.abs(np.conj(bm) - bp)) < 1e-12
                ap = angular_factor_A(FluxParam(a), d)
                am = angular_factor_A(FluxParam(-a), d)
                assert abs(np.conj(am) - ap) < 1e-12

    def test_flux_periodicity_pointwise(self):
        s = np.array([0.1, 0.8, 2.0])
        for a in [0.3, 0.75]:
            for d in [-2.0, 0.7]:
                hi = np.asarray(diffractive_factor_B(FluxParam(a), s, d))
                lo = np.asarray(diffractive_factor_B(FluxParam(a - 1.0), s, d))
                assert np.max(np.abs(lo - np.exp(-1j * d) * hi)) < 1e-13

    def test_removable_singularity(self):
        # s -> 0 at delta = -pi: ratio limit -2 alpha, B finite
        flux = FluxParam(0.3)
        vals = np.asarray(
            diffractive_factor_B(flux, np.array([0.0, 1e-8, 1e-4]), -math.pi)
        )
        assert np.all(np.isfinite(vals))
        assert np.max(np.abs(np.diff(vals))) < 1e-6


class TestBL1Norm:
    def test_integer_flux(self):
        assert b_l1_norm(FluxParam(2.0), 0.3) == 0.0

    def test_half_flux_closed_form(self):
        # int |B_{1/2}(s, 0)| ds = pi
        assert b_l1_norm(FluxParam(0.5), 0.0, 1e-10) == pytest.approx(
            math.pi, abs=1e-8
        )

    def test_tol_refinement_stability(self):
        coarse = b_l1_norm(FluxParam(0.5), 0.0, 1e-6)
        fine = b_l1_norm(FluxParam(0.5), 0.0, 1e-10)
        assert coarse == pytest.approx(fine, abs=2e-6)
        assert fine == pytest.approx(math.pi, abs=1e-8)

    def test_sup_over_delta_finite(self):
        vals = [b_l1_norm(FluxParam(0.25), d, 1e-8) for d in DELTA_GRID]
        assert max(vals) < 10.0


class TestModeSumOracle:
    def test_free_closed_form(self):
        # alpha = 0: first sum is e^{z cos delta}, K_max = 60 suffices
        for d in [0.3, 1.9]:
            res = mode_sum_oracle(0.0, d, -2.0, k_max=60)
            assert abs(res.sum1 - math.exp(-2.0 * math.cos(d))) < 1e-9
            assert abs(res.sum2) < 1e-12

    def test_branch_value(self):
        res = mode_sum_oracle(0.5, math.pi / 2, -1.0, k_max=150)
        ref = math.exp(-math.cos(math.pi / 2)) * cmath.exp(1j * 0.5 * math.pi / 2)
        assert abs(res.sum1 - ref) < 1e-8

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_closed_forms_on_grid(self, alpha):
        z = -2.0
        for d in DELTA_GRID:
            res = mode_sum_oracle(alpha, d, z, k_max=150)
            a = angular_factor_A(FluxParam(alpha), d)
            assert abs(res.sum1 - math.exp(z * math.cos(d)) * a) < 1e-7
            rhs = -b_transform(alpha, d, abs(z))
            assert abs(res.sum2 - rhs) < 1e-8

    def test_outer_branch_against_paper_ambiguity(self):
        # delta in (-2 pi, -pi): the 2 pi shift must carry the sign of
        # delta (wrap convention), not the unconditional -2 pi of the
        # printed formula
        alpha, d, z = 0.25, -5.1, -2.0
        res = mode_sum_oracle(alpha, d, z, k_max=150)
        wrap = math.remainder(d, 2.0 * math.pi)
        good = math.exp(z * math.cos(d)) * cmath.exp(1j * alpha * wrap)
        bad = math.exp(z * math.cos(d)) * cmath.exp(1j * alpha * (d - 2.0 * math.pi))
        assert abs(res.sum1 - good) < 1e-9
        assert abs(res.sum1 - bad) > 0.1

    def test_tail_bound_reported(self):
        res = mode_sum_oracle(0.5, 0.7, -2.0, k_max=120)
        assert 0.0 <= res.tail_bound < 1e-8
