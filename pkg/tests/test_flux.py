"""Flux functions: derivatives, convexity, parsing."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from burgulence.flux import (
    ConvexityViolation,
    FluxFunction,
    check_convexity,
    classical_flux,
    cosine_flux,
    flux_from_name,
    shifted_flux,
)


class TestClassical:
    def test_values(self):
        f = classical_flux()
        u = np.array([-2.0, 0.0, 3.0])
        assert np.allclose(f.eval(u), [2.0, 0.0, 4.5])
        assert np.allclose(f.d1(u), u)
        assert np.allclose(f.d2(u), 1.0)
        assert f.sigma == 1.0

    def test_name_round_trip(self):
        assert flux_from_name(classical_flux().name).name == "classical"


class TestCosinePerturbed:
    def test_sigma_exact(self):
        # f'' = 1 - eps cos u attains 1 - eps at u = 0
        assert cosine_flux(0.1).sigma == pytest.approx(0.9)

    def test_rejects_nonconvex_eps(self):
        with pytest.raises(ValueError):
            cosine_flux(1.0)

    def test_finite_difference_consistency(self):
        f = cosine_flux(0.3)
        rng = np.random.default_rng(1)
        u = rng.uniform(-8.0, 8.0, size=1000)
        h = 1e-6
        fd1 = (f.eval(u + h) - f.eval(u - h)) / (2 * h)
        assert np.max(np.abs(fd1 - f.d1(u))) < 1e-6
        # second difference needs a coarser step or roundoff dominates
        h = 1e-3
        fd2 = (f.eval(u + h) - 2 * f.eval(u) + f.eval(u - h)) / h**2
        assert np.max(np.abs(fd2 - f.d2(u))) < 1e-5

    @given(eps=st.floats(min_value=0.0, max_value=0.95),
           u=st.floats(min_value=-10.0, max_value=10.0))
    def test_convexity_everywhere(self, eps, u):
        f = cosine_flux(eps)
        assert f.d2(np.array([u]))[0] >= f.sigma - 1e-12


class TestShifted:
    def test_moving_frame_identity(self):
        # g(y) = f(y + b) - b y keeps g'' = f''(. + b) and drops the frame
        # drift from the characteristic speed
        base = classical_flux()
        g = shifted_flux(base, 2.0)
        u = np.linspace(-3, 3, 7)
        assert np.allclose(g.eval(u), base.eval(u + 2.0) - 2.0 * u)
        assert np.allclose(g.d1(u), base.d1(u + 2.0) - 2.0)
        assert np.allclose(g.d2(u), base.d2(u + 2.0))
        assert g.sigma == base.sigma
        assert g.working_range == (-12.0, 8.0)

    def test_name_round_trip(self):
        g = shifted_flux(cosine_flux(0.2), -1.5)
        h = flux_from_name(g.name)
        u = np.linspace(-2, 2, 5)
        assert np.allclose(h.eval(u), g.eval(u))


class TestConvexityCheck:
    def test_accepts_convex(self):
        check_convexity(classical_flux())
        check_convexity(cosine_flux(0.5))

    def test_finds_witness(self):
        # a flux that lies about its convexity: f = u^4 - u^2
        liar = FluxFunction(
            name="liar",
            eval=lambda u: u**4 - u**2,
            d1=lambda u: 4 * u**3 - 2 * u,
            d2=lambda u: 12 * u**2 - 2.0,
            sigma=0.5,
        )
        with pytest.raises(ConvexityViolation) as err:
            check_convexity(liar)
        assert liar.d2(np.array([err.value.witness]))[0] <= 0.0


class TestParsing:
    def test_unknown_rejected(self):
        with pytest.raises(ValueError):
            flux_from_name("cubic")

    def test_cosine_spec(self):
        f = flux_from_name("classical+cos:0.25")
        assert f.sigma == pytest.approx(0.75)

    def test_nested_shift(self):
        f = flux_from_name("shifted:0.5:classical+cos:0.1")
        base = cosine_flux(0.1)
        u = np.array([0.0, 1.0])
        assert np.allclose(f.eval(u), base.eval(u + 0.5) - 0.5 * u)
