"""Closed-form oracle: identities, semigroup property, honest refusals."""

import math

import numpy as np
import pytest

from burgulence import DynamicRangeFailure, Field, Grid, hopf_cole_solve
from burgulence.hopf_cole import primitive


@pytest.fixture
def sine1024():
    g = Grid(1024)
    return Field.from_physical(g, np.sin(2 * np.pi * g.x))


class TestPrimitive:
    def test_derivative_round_trip(self, grid256, random_field):
        u = random_field(grid256, seed=2)
        back = primitive(u).derivative(1)
        assert np.max(np.abs(back.values - u.values)) < 1e-12

    def test_zero_mean(self, grid256, random_field):
        p = primitive(random_field(grid256, seed=3))
        assert p.coeffs[0] == 0.0

    def test_sine_primitive_is_cosine(self, sine1024):
        # d/dx of -cos(2 pi x)/(2 pi) is sin(2 pi x)
        p = primitive(sine1024)
        expected = -np.cos(2 * np.pi * sine1024.grid.x) / (2 * np.pi)
        assert np.max(np.abs(p.values - expected)) < 1e-12


class TestSolve:
    def test_time_zero_identity(self, sine1024):
        # the log/exp round trip amplifies roundoff by the phi range
        # (~e^16 at nu = 1e-2), so "identity" means ~1e-8, not 1e-16
        out = hopf_cole_solve(sine1024, nu=1e-2, t=0.0)
        assert np.max(np.abs(out.values - sine1024.values)) < 1e-6

    def test_semigroup(self, sine1024):
        one = hopf_cole_solve(sine1024, nu=1e-2, t=0.7)
        two = hopf_cole_solve(hopf_cole_solve(sine1024, nu=1e-2, t=0.3),
                              nu=1e-2, t=0.4)
        assert np.max(np.abs(one.values - two.values)) < 1e-8

    def test_mean_stays_zero(self, sine1024):
        out = hopf_cole_solve(sine1024, nu=1e-2, t=0.5)
        assert out.coeffs[0] == 0.0

    def test_odd_symmetry_preserved(self, sine1024):
        # odd initial data stays odd: u(t, -x) = -u(t, x)
        out = hopf_cole_solve(sine1024, nu=1e-2, t=0.5).values
        n = out.size
        reflected = -out[(-np.arange(n)) % n]
        assert np.max(np.abs(out - reflected)) < 1e-12

    def test_l2_decay(self, sine1024):
        norms = [hopf_cole_solve(sine1024, nu=1e-2, t=t).lp_norm(2)
                 for t in (0.0, 0.2, 0.5, 1.0)]
        assert all(b < a for a, b in zip(norms, norms[1:]))

    def test_slope_upper_bound(self, sine1024):
        # positive slopes relax toward 1/t regardless of initial steepness:
        # max u_x <= min(max u0_x, 1 / (sigma t)), modest grid slack
        d0 = float(sine1024.derivative(1).values.max())
        for t in (0.1, 0.5, 1.0):
            out = hopf_cole_solve(sine1024, nu=1e-2, t=t)
            bound = min(d0, 1.0 / t)
            assert float(out.derivative(1).values.max()) <= bound * 1.05

    def test_small_amplitude_matches_heat_kernel(self):
        g = Grid(256)
        u0 = Field.from_physical(g, 1e-3 * np.sin(2 * np.pi * g.x))
        out = hopf_cole_solve(u0, nu=1e-2, t=1.0)
        expected = 1e-3 * math.exp(-4 * math.pi**2 * 1e-2)
        assert np.max(np.abs(out.values)) == pytest.approx(expected,
                                                           rel=1e-3)


class TestRefusals:
    def test_low_viscosity_refused(self, sine1024):
        with pytest.raises(DynamicRangeFailure, match="representable"):
            hopf_cole_solve(sine1024, nu=5e-4, t=0.1)

    def test_negative_time_refused(self, sine1024):
        with pytest.raises(ValueError):
            hopf_cole_solve(sine1024, nu=1e-2, t=-0.1)

    def test_large_amplitude_exhausts_range(self):
        # osc(H0)/2nu ~ 160 at amplitude 10: phi0 sits below the
        # cancellation floor, and at small t the heat flow has not yet
        # lifted it, so the oracle must refuse rather than return garbage
        # (by t ~ 0.5 the range recovers and the solve succeeds)
        g = Grid(1024)
        u0 = Field.from_physical(g, 10.0 * np.sin(2 * np.pi * g.x))
        with pytest.raises(DynamicRangeFailure):
            hopf_cole_solve(u0, nu=1e-2, t=0.05)
