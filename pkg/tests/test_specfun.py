import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpc, mpf

from partfrac.specfun import (
    clausen,
    clausen_max,
    cot_deriv,
    dilog,
    dilog_continued,
    dilog_zero,
    rho_deriv,
)

TIGHT = mpf(2) ** -240


class TestDilog:
    def test_zero_and_one(self):
        assert dilog(0) == 0
        assert abs(dilog(1) - mp.pi**2 / 6) < TIGHT

    def test_half(self):
        assert abs(dilog(mpf(1) / 2) - (mp.pi**2 / 12 - mp.log(2) ** 2 / 2)) < TIGHT

    @pytest.mark.parametrize(
        "z",
        [
            mpc("0.3", "0.4"),
            mpc("-1.7", "0.2"),
            mpc("0.9", "0.9"),
            mpc("2.5", "3"),
            mpc("-0.5", "-0.866"),
            mpc("0.05", "-0.99"),
            mpc("-3.4", "-0.1"),
            mpc("1.4", "0.001"),
            mpc("0.999", "0"),
            mpc("-17", "40"),
        ],
    )
    def test_against_reference_library(self, z):
        assert abs(dilog(z) - mpmath.polylog(2, z)) < TIGHT * max(1, abs(mpmath.polylog(2, z)))

    def test_on_cut_limit_from_above(self):
        # Li2(x + i0+) has imaginary part +pi log x for x > 1
        for x in (mpf("1.2"), mpf("1.7"), mpf(2), mpf("6.5")):
            v = dilog(x)
            assert abs(v.imag - mp.pi * mp.log(x)) < TIGHT
            eps = mpf(2) ** -100
            assert abs(v - dilog(mpc(x, eps))) < mpf(2) ** -90

    @given(st.floats(min_value=0.05, max_value=0.95), st.integers(min_value=0, max_value=3))
    @settings(max_examples=20, deadline=None)
    def test_reflection_identity(self, frac, m):
        # Li2(e^-2pi i z) + Li2(e^2pi i z) = 2 pi^2 (z^2 - (2m+1) z + m^2 + m + 1/6)
        z = mpc(m + frac, mpf("0.37"))
        lhs = dilog(mp.exp(-2 * mp.pi * mpc(0, 1) * z)) + dilog(mp.exp(2 * mp.pi * mpc(0, 1) * z))
        rhs = 2 * mp.pi**2 * (z * z - (2 * m + 1) * z + m * m + m + mpf(1) / 6)
        assert abs(lhs - rhs) < mpf(2) ** -200 * max(1, abs(rhs))

    @given(st.floats(min_value=-0.49, max_value=0.49), st.floats(min_value=0.0, max_value=2.0))
    @settings(max_examples=25, deadline=None)
    def test_upper_half_plane_bound(self, x, y):
        # |Li2(e^(2 pi i z))| <= Li2(1) for y >= 0
        z = mpc(x, y)
        assert abs(dilog(mp.exp(2 * mp.pi * mpc(0, 1) * z))) <= mp.pi**2 / 6 + mpf(2) ** -200

    def test_imag_decreasing_in_y_on_left_half(self):
        # Im Li2(e^(2 pi i (x+iy))) decreases in y for x in (0, 1/2)
        for x in (mpf("0.1"), mpf("0.3"), mpf("0.45")):
            prev = None
            for i in range(12):
                y = mpf(i) / 8
                val = dilog(mp.exp(2 * mp.pi * mpc(0, 1) * mpc(x, y))).imag
                assert val > -TIGHT
                if prev is not None:
                    assert val <= prev + TIGHT
                prev = val

    def test_real_monotone_ranges(self):
        # Re Li2 decreasing from positive values for |x| <= 1/6; increasing negative for 1/4 <= x <= 3/4
        for x, rising in [(mpf("0.1"), False), (mpf("0.3"), True), (mpf("0.49"), True)]:
            vals = [dilog(mp.exp(2 * mp.pi * mpc(0, 1) * mpc(x, mpf(i) / 8))).real for i in range(10)]
            for a, b in zip(vals, vals[1:]):
                if rising:
                    assert b >= a - TIGHT
                    assert a <= TIGHT
                else:
                    assert b <= a + TIGHT
                    assert a >= -TIGHT

    def test_continued_value_trivial(self):
        z = mpc("0.4", "0.1")
        assert abs(dilog_continued(z, 0, 0) - dilog(z)) == 0


class TestDilogZeros:
    def test_unique_zero_base(self):
        z = dilog_zero(0, -1)
        assert abs(z.w - mpc("0.916198", "-0.182459")) < mpf("1e-6")
        assert z.residual < mpf("1e-40")
        # the defining relation of the base zero: Li2(w) = 2 pi i log w
        assert abs(dilog(z.w) - 2 * mp.pi * mpc(0, 1) * mp.log(z.w)) < mpf(2) ** -230

    @pytest.mark.parametrize(
        "A,B,ref",
        [
            (0, -1, mpc("0.916198", "-0.182459")),
            (0, -2, mpc("0.968482", "-0.109531")),
            (1, -3, mpc("-0.459473", "-0.848535")),
        ],
    )
    def test_reference_zeros(self, A, B, ref):
        z = dilog_zero(A, B)
        assert abs(z.w - ref) < mpf("1e-6")
        assert abs(dilog_continued(z.w, A, B)) < mpf(2) ** -230

    def test_grid_seeded_zero(self):
        z = dilog_zero(0, -3)
        assert abs(dilog_continued(z.w, 0, -3)) < mpf(2) ** -230

    def test_nonexistent(self):
        with pytest.raises(ValueError):
            dilog_zero(1, -1)
        with pytest.raises(ValueError):
            dilog_zero(0, 0)

    def test_derived_constants(self):
        vals = {
            (0, -1): "0.068076",
            (0, -2): "0.0256706",
            (1, -3): "0.0356795",
        }
        for (A, B), txt in vals.items():
            u = -mp.log(abs(dilog_zero(A, B).w))
            assert abs(u - mpf(txt)) < mpf("1e-5")
        half = -mp.log(abs(dilog_zero(0, -1).w)) / 2
        assert abs(half - mpf("0.0340381")) < mpf("1e-5")


class TestClausen:
    def test_zeros(self):
        assert clausen(0) == 0
        assert clausen(mp.pi) == 0

    def test_peak_value(self):
        assert abs(clausen(mp.pi / 3) - mpf("1.0149416")) < mpf("1e-7")
        assert clausen_max() == clausen(mp.pi / 3)

    def test_series_oracle(self):
        # direct slow Fourier sum at theta = 0.9
        theta = mpf("0.9")
        s = mp.nsum(lambda n: mp.sin(n * theta) / n**2, [1, mp.inf])
        assert abs(clausen(theta) - s) < mpf(2) ** -200

    @given(st.floats(min_value=-20, max_value=20))
    @settings(max_examples=30, deadline=None)
    def test_odd_periodic_bounded(self, t):
        t = mpf(t)
        assert abs(clausen(t) + clausen(-t)) < mpf(2) ** -200
        assert abs(clausen(t) - clausen(t + 2 * mp.pi)) < mpf(2) ** -200
        assert abs(clausen(t)) <= clausen_max() + mpf(2) ** -200


class TestCotRho:
    def test_cot_values(self):
        assert abs(cot_deriv(0, mp.pi / 4) - 1) < TIGHT
        assert abs(cot_deriv(1, mp.pi / 2) + 1) < TIGHT  # -1 - cot^2

    def test_cot_deriv_vs_finite_difference(self):
        z = mpc("0.7", "0.2")
        h = mpf(2) ** -60
        for d in (1, 2, 3, 4):
            fd = (cot_deriv(d - 1, z + h) - cot_deriv(d - 1, z - h)) / (2 * h)
            assert abs(cot_deriv(d, z) - fd) < mpf(2) ** -100

    def test_cot_pole(self):
        with pytest.raises(ValueError):
            cot_deriv(2, mp.pi)

    def test_rho_odd_zero(self):
        for d in (1, 3, 5, 7):
            assert rho_deriv(d, 0) == 0

    def test_rho_even_values(self):
        # rho^(d)(0) = -2^d |B_d| / d for even d
        from partfrac.numkit import bernoulli_number, rat_to_mpf

        for d in (2, 4, 6):
            want = -(mpf(2) ** d) * abs(rat_to_mpf(bernoulli_number(d))) / d
            assert abs(rho_deriv(d, 0) - want) < TIGHT

    def test_rho_series_matches_closed_form(self):
        # the small-|z| series and the cot-based closed form agree near the crossover
        for z in (mpf("0.2"), mpc("0.2", "0.1"), mpf("0.3")):
            for d in (1, 2, 3, 6):
                series = rho_deriv(d, z)
                closed = cot_deriv(d - 1, z) - (-1) ** (d - 1) * mpf(math.factorial(d - 1)) / mpc(z) ** d
                assert abs(series - closed) < mpf(2) ** -220
