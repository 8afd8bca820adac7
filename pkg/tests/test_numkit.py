import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpc, mpf

from partfrac.numkit import (
    NumericError,
    Rat,
    TruncSeries,
    bernoulli_number,
    bernoulli_poly,
    binomial_general,
    partial_ordinary_bell,
    rat_to_mpf,
    shift_series_basis,
    stirling_subset,
    taylor_coeffs,
    unit_phase,
)


def bernoulli_oracle(n):
    """Independent recurrence: sum_k binom(n+1,k) B_k = 0."""
    b = [Fraction(1)]
    for m in range(1, n + 1):
        s = sum(Fraction(math.comb(m + 1, k)) * b[k] for k in range(m))
        b.append(-s / (m + 1))
    return b[n]


class TestBernoulli:
    def test_b0(self):
        assert bernoulli_number(0) == 1

    def test_b1_convention(self):
        assert bernoulli_number(1) == Rat(-1, 2)

    def test_b2_and_b12(self):
        assert bernoulli_number(2) == bernoulli_oracle(2) == Fraction(1, 6)
        assert bernoulli_number(12) == bernoulli_oracle(12) == Fraction(-691, 2730)

    @given(st.integers(min_value=1, max_value=60))
    @settings(max_examples=25, deadline=None)
    def test_recurrence(self, n):
        s = sum(Fraction(math.comb(n + 1, k)) * Fraction(int(bernoulli_number(k).numerator), int(bernoulli_number(k).denominator)) for k in range(n + 1))
        assert s == 0

    def test_poly_basics(self):
        assert bernoulli_poly(0, Rat(7, 3)) == 1
        assert bernoulli_poly(1, Rat(1, 2)) == 0  # B_1(x) = x - 1/2
        assert bernoulli_poly(2, 0) == Rat(1, 6)  # B_a(0) = B_a

    def test_poly_oracle(self):
        # direct sum at a random rational point
        x = Fraction(3, 7)
        a = 6
        direct = sum(Fraction(math.comb(a, k)) * bernoulli_oracle(k) * x ** (a - k) for k in range(a + 1))
        assert bernoulli_poly(a, Rat(3, 7)) == direct


class TestStirling:
    def test_base(self):
        assert stirling_subset(0, 0) == 1
        assert stirling_subset(3, 5) == 0

    def test_enumeration_oracle(self):
        # partitions of {1,2,3,4} into 2 nonempty blocks, counted directly
        import itertools

        n, m = 4, 2
        count = 0
        for labels in itertools.product(range(m), repeat=n):
            if len(set(labels)) == m:
                count += 1
        count //= math.factorial(m)
        assert count == 7
        assert stirling_subset(n, m) == count

    def test_row_sum_is_bell(self):
        # sum_m {n over m} = Bell(n); Bell(5) = 52
        assert sum(stirling_subset(5, m) for m in range(6)) == 52


class TestBell:
    def test_trivial(self):
        assert partial_ordinary_bell(0, 0, []) == 1
        assert partial_ordinary_bell(3, 0, []) == 0

    def test_single_factor(self):
        args = [mpc(5), mpc(-2), mpc(7)]
        assert partial_ordinary_bell(2, 1, args) == args[1]

    def test_square(self):
        p = [mpc(1.5), mpc(-0.5), mpc(2)]
        # coefficient of x^3 in (p1 x + p2 x^2 + p3 x^3)^2 is 2 p1 p2
        assert abs(partial_ordinary_bell(3, 2, p) - 2 * p[0] * p[1]) < mpf(2) ** -250

    def test_insufficient_args(self):
        with pytest.raises(ValueError):
            partial_ordinary_bell(3, 2, [mpc(1)])

    @given(st.integers(min_value=1, max_value=6), st.integers(min_value=1, max_value=4))
    @settings(max_examples=20, deadline=None)
    def test_generating_identity(self, i, j):
        # numerically expand (sum p_r x^r)^j at a small x and compare term sums
        import random

        rng = random.Random(i * 13 + j)
        p = [mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(i)]
        p_full = p + [mpc(0)] * (i * j - i)  # higher coefficients vanish
        x = mpf(1) / 64
        direct = (sum(p[r] * x ** (r + 1) for r in range(i))) ** j
        series = sum(partial_ordinary_bell(t, j, p_full) * x**t for t in range(i * j + 1))
        assert abs(direct - series) < mpf(2) ** -240


class TestBinomial:
    def test_r0(self):
        assert binomial_general(mpc(2, 3), 0) == 1
        assert binomial_general(Rat(9, 4), 0) == 1

    def test_integer(self):
        assert binomial_general(-2, 1) == -2

    def test_rational(self):
        assert binomial_general(Rat(-3, 2), 2) == Rat(15, 8)

    def test_matches_comb_for_integers(self):
        assert binomial_general(7, 3) == math.comb(7, 3)


class TestTruncSeries:
    def test_mul_truncates_to_min_order(self):
        a = TruncSeries(mpc(0), [mpc(1), mpc(2), mpc(3)])
        b = TruncSeries(mpc(0), [mpc(1), mpc(1)])
        assert (a * b).order == 2
        assert (a + b).order == 2

    def test_exp_matches_closed_form(self):
        # exp(c + t) has coefficients e^c / k!
        s = TruncSeries(mpc(0), [mpc(0.5), mpc(1)] + [mpc(0)] * 6)
        e = s.exp()
        for k in range(8):
            assert abs(e.coeffs[k] - mp.exp(0.5) / math.factorial(k)) < mpf(2) ** -240

    def test_eval(self):
        s = TruncSeries(mpc(1), [mpc(2), mpc(3)])
        assert abs(s.eval(mpc(1.5)) - (2 + 1.5)) < mpf(2) ** -200


class TestTaylorCoeffs:
    def test_exp_at_zero(self):
        tol = mpf(2) ** (-(mp.prec - 8))
        s = taylor_coeffs(mp.exp, 0, mpf("0.7"), 12)
        for k in range(12):
            assert abs(s.coeffs[k] - mpf(1) / math.factorial(k)) < tol

    def test_sin_at_zero(self):
        tol = mpf(2) ** (-(mp.prec - 8))
        s = taylor_coeffs(mp.sin, 0, mpf("0.7"), 10)
        for k in range(10):
            want = 0 if k % 2 == 0 else mpf(-1) ** ((k - 1) // 2) / math.factorial(k)
            assert abs(s.coeffs[k] - want) < tol

    def test_geometric(self):
        s = taylor_coeffs(lambda z: 1 / (1 - z), 0, mpf("0.4"), 10)
        for k in range(10):
            assert abs(s.coeffs[k] - 1) < mpf(2) ** -200

    def test_radius_beyond_singularity_fails(self):
        with pytest.raises((NumericError, ZeroDivisionError)):
            taylor_coeffs(lambda z: 1 / (1 - z), 0, mpf("1.5"), 6, max_doublings=4)


class TestShiftBasis:
    def test_identity_at_zero(self):
        alphas = [mpc(1, 2), mpc(-3), mpc(0.25)]
        betas = shift_series_basis(alphas, 0)
        assert all(abs(a - b) < mpf(2) ** -250 for a, b in zip(alphas, betas))

    def test_half_shift_closed_form(self):
        betas = shift_series_basis([mpc(1), mpc(0), mpc(0)], Rat(1, 2))
        for got, want in zip(betas, [1, -1, mpf(3) / 4]):
            assert abs(got - want) < mpf(2) ** -250

    def test_unit_shift_alternating(self):
        # a=1: beta_t = sum_j (-1)^(t-j) binom(t+1, j+1) alpha_j
        import random

        rng = random.Random(7)
        alphas = [mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(5)]
        betas = shift_series_basis(alphas, 1)
        for t in range(5):
            want = sum((-1) ** (t - j) * math.comb(t + 1, j + 1) * alphas[j] for j in range(t + 1))
            assert abs(betas[t] - want) < mpf(2) ** -240

    @pytest.mark.parametrize("a", [Rat(1, 2), Rat(1), Rat(2, 3)])
    def test_round_trip_evaluation(self, a):
        # both series agree at N = 50, 100, 200 within the truncation tail
        import random

        rng = random.Random(3)
        alphas = [mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(8)]
        betas = shift_series_basis(alphas, a)
        af = rat_to_mpf(a)
        for N in (50, 100, 200):
            lhs = sum(alphas[j] / (N + af) ** (j + 2) for j in range(8))
            rhs = sum(betas[t] / mpf(N) ** (t + 2) for t in range(8))
            # tail starts at beta_8/N^10 with |beta_8| <= sum binom(9, 8-j)|alpha_j|
            assert abs(lhs - rhs) < mpf(N) ** (-10) * 2000


def test_unit_phase_reduces_exactly():
    # huge multiples of pi stay exact
    assert abs(unit_phase(4 * 10**30 + 1, 2) - mpc(0, 1)) < mpf(2) ** -250
