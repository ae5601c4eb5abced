"""Coordinates, change of variables, potential, diffractive vector."""

import math

import numpy as np
import pytest

from abkit.errors import DomainError
from abkit.geometry import (
    CylPoint4,
    FluxParam,
    PairConfig,
    cartesian_distance,
    n_vector,
    pair_change_inverse,
    pair_change_of_variables,
    pair_potentials,
    potential_A,
    to_cylindrical,
)

RNG = np.random.default_rng(42)


class TestFluxParam:
    def test_orders(self):
        f = FluxParam(0.5)
        assert f.order(0) == 0.5
        assert f.order(-1) == 0.5
        assert f.order(2) == 2.5

    def test_reduction(self):
        assert FluxParam(1.3).reduced == pytest.approx(0.3)
        assert FluxParam(-0.8).reduced == pytest.approx(0.2)
        assert FluxParam(2.0).is_integer
        assert not FluxParam(0.25).is_integer


class TestCylindrical:
    def test_examples(self):
        p = to_cylindrical([1.0, 0.0, 0.0, 0.0])
        assert (p.r, p.theta) == (1.0, 0.0)
        p = to_cylindrical([0.0, 1.0, 2.0, 3.0])
        assert p.r == pytest.approx(1.0)
        assert p.theta == pytest.approx(math.pi / 2.0)
        assert (p.x3, p.x4) == (2.0, 3.0)
        p = to_cylindrical([-1.0, -1.0, 0.0, 0.0])
        assert p.r == pytest.approx(math.sqrt(2.0))
        assert p.theta == pytest.approx(5.0 * math.pi / 4.0)

    def test_round_trip(self):
        for _ in range(50):
            x = RNG.normal(size=4)
            p = to_cylindrical(x)
            assert np.allclose(p.to_cartesian(), x, atol=1e-12)
            assert 0.0 <= p.theta < 2.0 * math.pi

    def test_axis_canonicalization(self):
        assert to_cylindrical([0.0, 0.0, 1.0, 2.0]).theta == 0.0

    def test_negative_radius_rejected(self):
        with pytest.raises(DomainError):
            CylPoint4(-1.0, 0.0, 0.0, 0.0)

    def test_distance(self):
        x = CylPoint4(1.0, 0.3, 0.5, -0.2)
        y = CylPoint4(2.0, 2.1, -0.4, 0.8)
        ref = np.linalg.norm(x.to_cartesian() - y.to_cartesian())
        assert cartesian_distance(x, y) == pytest.approx(float(ref), rel=1e-13)


class TestPairChange:
    def test_diagonal_collapses(self):
        y1, y2 = pair_change_of_variables(PairConfig((1.0, 0.0), (1.0, 0.0)))
        assert np.allclose(y1, 0.0)
        assert np.allclose(y2, [math.sqrt(2.0), 0.0])

    def test_direct_substitution(self):
        y1, y2 = pair_change_of_variables(PairConfig((1.0, 0.0), (0.0, 0.0)))
        s = 1.0 / math.sqrt(2.0)
        assert np.allclose(y1, [s, 0.0])
        assert np.allclose(y2, [s, 0.0])

    def test_isometry_and_inverse(self):
        for _ in range(50):
            c = PairConfig(tuple(RNG.normal(size=2)), tuple(RNG.normal(size=2)))
            y1, y2 = pair_change_of_variables(c)
            n_in = np.sum(np.square(c.x1)) + np.sum(np.square(c.x2))
            n_out = float(y1 @ y1 + y2 @ y2)
            assert n_out == pytest.approx(n_in, rel=1e-14)
            back = pair_change_inverse(y1, y2)
            assert np.allclose(back.x1, c.x1, atol=1e-14)
            assert np.allclose(back.x2, c.x2, atol=1e-14)


class TestPotential:
    def test_direct(self):
        a = potential_A(FluxParam(1.0), [1.0, 0.0, 5.0, 5.0])
        assert np.allclose(a, [0.0, 1.0, 0.0, 0.0])

    def test_zero_flux(self):
        a = potential_A(FluxParam(0.0), [0.3, -0.4, 1.0, 2.0])
        assert np.allclose(a, 0.0)

    def test_homogeneity(self):
        flux = FluxParam(0.7)
        for _ in range(30):
            x = RNG.normal(size=4)
            if math.hypot(x[0], x[1]) < 1e-3:
                continue
            a = potential_A(flux, x)
            assert float(np.linalg.norm(a)) * math.hypot(x[0], x[1]) == pytest.approx(
                0.7, rel=1e-12
            )

    def test_divergence_free(self):
        flux = FluxParam(0.6)
        h = 1e-5
        for _ in range(10):
            x = RNG.normal(size=4) * 2.0
            if math.hypot(x[0], x[1]) < 0.3:
                continue
            div = 0.0
            for j in range(4):
                e = np.zeros(4)
                e[j] = h
                div += (potential_A(flux, x + e)[j] - potential_A(flux, x - e)[j]) / (
                    2.0 * h
                )
            assert abs(div) < 1e-8

    def test_axis_rejected(self):
        with pytest.raises(DomainError):
            potential_A(FluxParam(0.5), [0.0, 0.0, 1.0, 1.0])

    def test_pair_potentials_singular_set(self):
        with pytest.raises(DomainError):
            pair_potentials(FluxParam(0.5), PairConfig((1.0, 1.0), (1.0, 1.0)))


class TestNVector:
    def test_s_zero(self):
        vec, mag = n_vector(1.3, 0.8, 0.0, [1.0, 2.0], [0.5, 1.0])
        assert np.allclose(vec, [2.1, 0.0, 0.5, 1.0])

    def test_direct_value(self):
        _, mag = n_vector(1.0, 1.0, 1.0, [0.0, 0.0], [0.0, 0.0])
        assert mag == pytest.approx(math.sqrt(4.0 + 2.0 * (math.cosh(1.0) - 1.0)),
                                    rel=1e-13)

    def test_monotone_and_dominates(self):
        for _ in range(30):
            r, rbar = RNG.uniform(0.1, 3.0, size=2)
            xp = RNG.normal(size=2)
            yp = RNG.normal(size=2)
            mags = [n_vector(r, rbar, s, xp, yp)[1] for s in np.linspace(0, 4, 12)]
            assert np.all(np.diff(mags) >= -1e-12)
            x = CylPoint4(r, 0.0, xp[0], xp[1])
            y = CylPoint4(rbar, RNG.uniform(0, 2 * math.pi), yp[0], yp[1])
            assert mags[0] >= cartesian_distance(x, y) - 1e-12

    def test_domain(self):
        with pytest.raises(DomainError):
            n_vector(-1.0, 1.0, 0.0, [0, 0], [0, 0])
