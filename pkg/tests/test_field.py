"""Grid and Field: representations, norms, calculus, snapshot I/O."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from burgulence.field import Field, Grid, SobolevIndex, load_snapshot, load_text


class TestGrid:
    def test_basic_layout(self, grid64):
        assert grid64.n == 64
        assert grid64.x[0] == 0.0
        assert grid64.spacing == pytest.approx(1.0 / 64)
        assert grid64.wavenumbers[-1] == 32
        assert grid64.dealias_cutoff == 21

    def test_rejects_odd_and_tiny(self):
        with pytest.raises(ValueError):
            Grid(63)
        with pytest.raises(ValueError):
            Grid(4)

    def test_mode_weights(self, grid64):
        w = grid64.mode_weights
        assert w[0] == 1.0 and w[-1] == 1.0
        assert (w[1:-1] == 2.0).all()

    def test_arrays_readonly(self, grid64):
        with pytest.raises(ValueError):
            grid64.x[0] = 1.0


class TestSobolevIndex:
    def test_gamma_values(self):
        # gamma = max(0, m - 1/p): the sharp small-nu growth exponent
        assert SobolevIndex(1, 2).gamma == pytest.approx(0.5)
        assert SobolevIndex(1, 1).gamma == 0.0
        assert SobolevIndex(2, math.inf).gamma == 2.0
        assert SobolevIndex(0, 2).gamma == 0.0


class TestRepresentations:
    def test_sine_coefficient(self, sine64):
        # sin(2 pi x) = (e^{2 pi i x} - e^{-2 pi i x}) / 2i -> uhat(1) = -i/2
        assert sine64.coefficient(1) == pytest.approx(-0.5j, abs=1e-14)
        assert sine64.coefficient(-1) == pytest.approx(0.5j, abs=1e-14)
        assert sine64.coefficient(2) == pytest.approx(0.0, abs=1e-14)

    def test_round_trip_physical(self, grid64):
        rng = np.random.default_rng(3)
        v = rng.normal(size=64)
        v -= v.mean()
        u = Field.from_physical(grid64, v)
        assert np.allclose(u.values, v, atol=1e-12)

    def test_mean_is_projected_out(self, grid64):
        u = Field.from_physical(grid64, np.full(64, 2.5))
        assert u.lp_norm(math.inf) < 1e-12
        v = Field.from_function(grid64, lambda x: 1.0 + np.sin(2 * np.pi * x))
        assert abs(v.values.mean()) < 1e-12

    def test_projection_idempotent(self, grid64):
        rng = np.random.default_rng(11)
        u = Field.from_physical(grid64, rng.normal(size=64))
        again = Field.from_physical(grid64, u.values)
        assert (again.values == u.values).all()
        assert (again.coeffs == u.coeffs).all()

    def test_from_spectral_conjugate_symmetry(self, grid64):
        c = np.zeros(33, dtype=complex)
        c[2] = 1.0 - 0.5j
        u = Field.from_spectral(grid64, c)
        assert not np.iscomplexobj(u.values)
        assert u.coefficient(2) == pytest.approx(1.0 - 0.5j)
        assert u.coefficient(-2) == pytest.approx(1.0 + 0.5j)

    def test_grid_mismatch_rejected(self, grid64, grid256):
        a = Field.zeros(grid64)
        b = Field.zeros(grid256)
        with pytest.raises(ValueError):
            _ = a + b


class TestNorms:
    def test_sine_frozen_values(self, sine64):
        # |sin|_2 = 1/sqrt(2), |sin|_1 = 2/pi, |sin|_inf = 1 on the unit circle
        assert sine64.lp_norm(2) == pytest.approx(1 / math.sqrt(2), rel=1e-10)
        assert sine64.lp_norm(math.inf) == pytest.approx(1.0, rel=1e-10)
        # |sin| has kinks, so the rectangle rule is only O(h^2) for p=1
        assert sine64.lp_norm(1) == pytest.approx(2 / math.pi, rel=2e-3)
        fine = Field.from_physical(Grid(4096),
                                   np.sin(2 * np.pi * Grid(4096).x))
        assert fine.lp_norm(1) == pytest.approx(2 / math.pi, rel=1e-6)

    def test_sine_h_half(self, sine64):
        # (2 pi)^{1/2} (2 * |uhat(1)|^2)^{1/2} = sqrt(pi)
        assert sine64.hs_norm(0.5) == pytest.approx(math.sqrt(math.pi),
                                                    rel=1e-10)

    def test_parseval(self, grid256, random_field):
        u = random_field(grid256, seed=5)
        spectral = float(np.sum(u.grid.mode_weights * np.abs(u.coeffs) ** 2))
        assert u.lp_norm(2) ** 2 == pytest.approx(spectral, rel=1e-10)
        assert u.hs_norm(0.0) == pytest.approx(u.lp_norm(2), rel=1e-10)

    def test_derivative_norm_chain(self, grid256, random_field):
        u = random_field(grid256, seed=7)
        # Lp monotone in p on a probability space
        assert u.lp_norm(1) <= u.lp_norm(2) + 1e-12
        assert u.lp_norm(2) <= u.lp_norm(math.inf) + 1e-12
        # |u|_2 <= |u'|_2 / 2 pi (Poincare with zero mean)
        assert u.hs_norm(0) <= u.hs_norm(1) / (2 * math.pi) + 1e-12
        assert u.wmp_norm(1, 2) == pytest.approx(u.hs_norm(1), rel=1e-8)

    def test_hs_increment_equivalence(self, grid256, random_field):
        # increment form matches the spectral H^{1/2} within fixed constants
        for seed in range(4):
            u = random_field(grid256, seed=seed)
            ratio = u.hs_norm_increment(0.5) / u.hs_norm(0.5)
            assert 0.25 <= ratio <= 4.0

    def test_wmp_requires_int_order(self, sine64):
        assert sine64.wmp_norm(2, 2) == pytest.approx(sine64.hs_norm(2),
                                                      rel=1e-8)


class TestCalculus:
    def test_derivative_of_sine(self, grid64):
        u = Field.from_function(grid64, lambda x: np.sin(2 * np.pi * x))
        du = u.derivative(1)
        expected = 2 * np.pi * np.cos(2 * np.pi * grid64.x)
        assert np.allclose(du.values, expected, atol=1e-10)

    def test_second_derivative_sign(self, sine64):
        d2 = sine64.derivative(2)
        assert np.allclose(d2.values, -(2 * np.pi) ** 2 * sine64.values,
                           atol=1e-8)

    def test_shift_exact_and_additive(self, grid64, random_field):
        u = random_field(grid64, seed=2)
        a, b = 3 / 64, 5 / 64
        one = u.shift(a).shift(b)
        two = u.shift(a + b)
        assert np.allclose(one.values, two.values, atol=1e-12)

    def test_shift_rejects_off_grid(self, grid64, random_field):
        u = random_field(grid64, seed=2)
        with pytest.raises(ValueError):
            u.shift(0.017)

    @given(j=st.integers(min_value=-64, max_value=64))
    def test_shift_wraps(self, j):
        grid = Grid(64)
        u = Field.from_function(grid, lambda x: np.sin(2 * np.pi * x))
        shifted = u.shift(j / 64)
        expected = np.sin(2 * np.pi * ((grid.x + j / 64) % 1.0))
        assert np.allclose(shifted.values, expected, atol=1e-10)

    def test_derivative_linearity(self, grid64, random_field):
        u = random_field(grid64, seed=1)
        v = random_field(grid64, seed=9)
        lhs = (u + v).derivative(1)
        rhs = u.derivative(1) + v.derivative(1)
        assert np.allclose(lhs.values, rhs.values, atol=1e-9)


class TestSnapshotIO:
    def test_binary_round_trip(self, tmp_path, grid256, random_field):
        u = random_field(grid256, seed=4)
        p = tmp_path / "state.snap"
        u.save(p, time=1.75)
        back, t = load_snapshot(p)
        assert t == 1.75
        assert (back.values == u.values).all()

    def test_text_round_trip(self, tmp_path, grid64, random_field):
        u = random_field(grid64, seed=4)
        p = tmp_path / "state.txt"
        u.save_text(p)
        back = load_text(p)
        assert np.allclose(back.values, u.values, atol=1e-12)

    def test_truncated_snapshot_rejected(self, tmp_path, grid64):
        u = Field.zeros(grid64)
        p = tmp_path / "state.snap"
        u.save(p)
        data = p.read_bytes()
        p.write_bytes(data[:-8])
        with pytest.raises(ValueError, match="truncated"):
            load_snapshot(p)

    def test_bad_magic_rejected(self, tmp_path):
        p = tmp_path / "junk.snap"
        p.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(ValueError, match="not a field snapshot"):
            load_snapshot(p)
