"""Sine products prod_{j<=m} 2 sin(pi j h/k), the lattice sums S(m;h,k), the
minimal-pair invariant D(h,k), and the Clausen-based size estimate with its
explicit error budget.

``sine_product`` is the plain (signed) product; most growth statements are
about its reciprocal, handled by ``sine_product_recip``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import mp, mpf

from .numkit import Rat, bernoulli_number, rat_to_mpf
from .specfun import clausen, clausen_max, cot_deriv, rho_deriv

__all__ = [
    "sine_product",
    "sine_product_recip",
    "log_abs_sine_product",
    "MinPair",
    "min_pair",
    "s_sum",
    "log_product_estimate",
    "psi",
    "psi_recip",
    "sine_product_em",
    "t_remainder",
    "growth_constant",
    "half_identity_c",
    "half_identity_d",
    "half_identity_parity",
    "half_identities",
]


def _check_pair(h: int, k: int):
    if not (1 <= h < k):
        raise ValueError("need 1 <= h < k")
    if math.gcd(h, k) != 1:
        raise ValueError("h/k must be reduced")


def sine_product(h: int, k: int, m: int) -> mpf:
    """prod_{j=1}^m 2 sin(pi j h/k), the empty product being 1.

    Returns exact 0 when some factor vanishes (only possible for m >= k).
    """
    _check_pair(h, k)
    if m < 0:
        raise ValueError("m must be >= 0")
    if m >= k:
        return mpf(0)  # j = k contributes sin(pi h) = 0
    acc = mpf(1)
    t = 0
    for _ in range(m):
        t = (t + h) % (2 * k)
        acc *= 2 * mp.sinpi(mpf(t) / k)
    return acc


def sine_product_recip(h: int, k: int, m: int) -> mpf:
    """Reciprocal sine product 1 / prod_{j<=m} 2 sin(pi j h/k)."""
    p = sine_product(h, k, m)
    if p == 0:
        raise ZeroDivisionError("sine product vanishes")
    return 1 / p


def log_abs_sine_product(h: int, k: int, m: int) -> mpf:
    """log |prod_{j<=m} 2 sin(pi j h/k)| without forming the product."""
    _check_pair(h, k)
    acc = mpf(0)
    t = 0
    for _ in range(m):
        t = (t + h) % (2 * k)
        acc += mp.log(abs(2 * mp.sinpi(mpf(t) / k)))
    return acc


@dataclass
class MinPair:
    """Pair (beta0, gamma0) in Z(h,k) with |beta0 gamma0| minimal."""

    beta0: int
    gamma0: int
    D: int
    unique: bool


def min_pair(h: int, k: int) -> MinPair:
    """Exhaustive minimal pair of Z(h,k) = {(b,g): bh = g mod k, 1<=|b|,g<k}.

    Ties are broken by smallest gamma, then positive beta, for reproducibility.
    """
    _check_pair(h, k)
    best = None
    count = 0
    for b in range(1, k):
        g = (b * h) % k
        for beta, gamma in ((b, g), (-b, k - g)):
            key = (abs(beta) * gamma, gamma, beta < 0)
            if best is None or key < best[0]:
                best = (key, beta, gamma)
                count = 1
            elif key[0] == best[0][0]:
                count += 1
    _, beta0, gamma0 = best
    return MinPair(beta0, gamma0, abs(beta0) * gamma0, count == 1)


def s_sum(m: int, h: int, k: int) -> mpf:
    """S(m;h,k) = sum over Z(h,k) of sin(2 pi m gamma/k) / |beta gamma|."""
    _check_pair(h, k)
    if not 0 <= m < k:
        raise ValueError("need 0 <= m < k")
    acc = mpf(0)
    for b in range(1, k):
        g = (b * h) % k
        for gamma in (g, k - g):
            acc += mp.sinpi(mpf(2 * ((m * gamma) % k)) / k) / (b * gamma)
    return acc


def log_product_estimate(m: int, h: int, k: int):
    """Clausen estimate of (1/k) log |reciprocal sine product| and its error budget.

    Returns (Cl2(2 pi m gamma0/k) / (2 pi D), (16.05 + sqrt(2)/pi log k)/sqrt(k)).
    """
    _check_pair(h, k)
    if not 0 <= m < k:
        raise ValueError("need 0 <= m < k")
    pair = min_pair(h, k)
    est = clausen(2 * mp.pi * ((m * pair.gamma0) % k) / k) / (2 * mp.pi * pair.D)
    err = (mpf("16.05") + mp.sqrt(2) / mp.pi * mp.log(k)) / mp.sqrt(k)
    return est, err


def psi(h: int, k: int) -> mpf:
    """Psi(h,k) = max_{0<=m<k} (1/k) |log |prod_m(h/k)||."""
    _check_pair(h, k)
    acc = mpf(0)
    best = mpf(0)
    t = 0
    for _ in range(1, k):
        t = (t + h) % (2 * k)
        acc += mp.log(abs(2 * mp.sinpi(mpf(t) / k)))
        best = max(best, abs(acc))
    return best / k


def psi_recip(h: int, k: int) -> mpf:
    """One-sided growth rate max_{0<=m<k} (1/k) log |1/prod_m(h/k)|.

    This is the quantity the reciprocal-product bounds control (the m=0 term
    pins it at >= 0); it is the profile plotted against Cl2(pi/3)/(2 pi D).
    """
    _check_pair(h, k)
    acc = mpf(0)
    best = mpf(0)
    t = 0
    for _ in range(1, k):
        t = (t + h) % (2 * k)
        acc += mp.log(abs(2 * mp.sinpi(mpf(t) / k)))
        best = max(best, -acc)
    return best / k


# ----------------------------------------------------------------------------
# Euler-Maclaurin form of the product and its exact remainder T_L


def _bernoulli_poly_mpf_coeffs(a: int) -> list:
    # Horner order: coefficient of t^(a-i) is binom(a,i) B_i
    return [rat_to_mpf(Rat(math.comb(a, i)) * bernoulli_number(i)) for i in range(a + 1)]


def t_remainder(m: int, h: int, k: int, L: int) -> mpf:
    """T_L(m, h/k): periodic-Bernoulli remainder of the sine-product expansion.

    First piece: (pi h/k)^(2L) int_0^m (B_2L - B_2L({x})) rho^(2L)(pi x h/k) dx /(2L)!
    by Gauss-Legendre on unit panels (the integrand is smooth between integers).
    Second piece has the closed Stirling-remainder form through log-Gamma.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if not 1 <= m < k / h:
        raise ValueError("need 1 <= m < k/h")
    theta = mpf(h) / k
    coeffs = _bernoulli_poly_mpf_coeffs(2 * L)
    b2l = rat_to_mpf(bernoulli_number(2 * L))

    def bfrac(t):
        acc = mpf(0)
        for c in coeffs:
            acc = acc * t + c
        return b2l - acc

    first = mpf(0)
    for j in range(m):
        first += mp.quad(lambda t: bfrac(t) * rho_deriv(2 * L, mp.pi * (j + t) * theta).real, [0, 1])
    first *= (mp.pi * theta) ** (2 * L) / math.factorial(2 * L)

    # int_0^oo (B_2L - B_2L({x})) / (2L (x+m)^(2L)) dx  ==  Stirling remainder of log m!
    second = mp.loggamma(mpf(m + 1)) - (m + mpf(1) / 2) * mp.log(m) + m - mp.log(mp.sqrt(2 * mp.pi))
    for r in range(1, L):
        second -= rat_to_mpf(bernoulli_number(2 * r)) / ((2 * r) * (2 * r - 1)) / mpf(m) ** (2 * r - 1)
    return first + second


def sine_product_em(h: int, k: int, m: int, L: int):
    """Closed Euler-Maclaurin main term for the reciprocal product, plus T_L.

    Returns (mainterm, TL) with the exact relation
    ``sine_product_recip(h,k,m) = mainterm * exp(-TL)``.
    """
    _check_pair(h, k)
    if not 1 <= m < k / h:
        raise ValueError("need 1 <= m < k/h (so m h/k < 1)")
    theta = mpf(h) / k
    x = mp.pi * m * theta
    main = mp.sqrt(theta / (2 * mp.sin(x)))
    main *= mp.exp(clausen(2 * x) / (2 * mp.pi * theta))
    corr = mpf(0)
    for ell in range(1, L):
        corr += (
            rat_to_mpf(bernoulli_number(2 * ell))
            / math.factorial(2 * ell)
            * (mp.pi * theta) ** (2 * ell - 1)
            * cot_deriv(2 * ell - 2, x).real
        )
    main *= mp.exp(-corr)
    return main, t_remainder(m, h, k, L)


def growth_constant(h: int) -> mpf:
    """c(h) = sqrt(h) exp(pi^2 h/18 + 1/6)/2 bounding off-peak reciprocal products."""
    return mp.sqrt(h) * mp.exp(mp.pi**2 * h / 18 + mpf(1) / 6) / 2


# ----------------------------------------------------------------------------
# Half-angle product identities (k odd)


def half_identity_c(k: int, a: int):
    """Both sides of spr(2/k; a+(k-1)/2) = (-1)^a spr(1/k;2a) / (sqrt(k) spr(2/k;a))."""
    if k % 2 == 0 or k < 3:
        raise ValueError("k must be odd >= 3")
    if not 1 <= a <= (k - 1) // 2:
        raise ValueError("need 1 <= a <= (k-1)/2")
    m = a + (k - 1) // 2
    lhs = sine_product_recip(2, k, m)
    rhs = (-1) ** a / mp.sqrt(k) * sine_product(2, k, a) / sine_product(1, k, 2 * a)
    return lhs, rhs


def half_identity_d(k: int, m: int):
    """Both sides of the four-factor split of spr((k-1)/2k; m), k odd, m even."""
    if k % 2 == 0 or k < 3:
        raise ValueError("k must be odd >= 3")
    if m % 2 != 0 or not 0 <= m < k:
        raise ValueError("need m even with 0 <= m < k")
    lhs = sine_product_recip((k - 1) // 2, k, m)
    rhs = (
        sine_product_recip(1, k, m)
        / sine_product_recip(1, 2 * k, m)
        * sine_product_recip(1, k, m // 2) ** 2
        / sine_product_recip(2, k, m // 2)
    )
    return lhs, rhs


def half_identity_parity(k: int, N: int):
    """Both sides of the shift spr((k-1)/2k; N-1-k) = 2(-1)^((N-k)/2+1) sin(pi(N/k-1)/2) spr((k-1)/2k; N-k)."""
    if k % 2 == 0 or N % 2 == 0:
        raise ValueError("k and N must be odd")
    m = N - k
    if m % 2 != 0 or not 2 <= m < k:
        raise ValueError("need N-k even with 2 <= N-k < k")
    lhs = sine_product_recip((k - 1) // 2, k, m - 1)
    rhs = 2 * (-1) ** (m // 2 + 1) * mp.sin(mp.pi * (mpf(N) / k - 1) / 2) * sine_product_recip((k - 1) // 2, k, m)
    return lhs, rhs


def half_identities(k: int, which: str, **kw) -> mpf:
    """Relative residual of one of the half-product identities ('c', 'd', 'parity')."""
    if which == "c":
        lhs, rhs = half_identity_c(k, kw["a"])
    elif which == "d":
        lhs, rhs = half_identity_d(k, kw["m"])
    elif which == "parity":
        lhs, rhs = half_identity_parity(k, kw["N"])
    else:
        raise ValueError(f"unknown identity {which!r}")
    return abs(lhs - rhs) / max(mpf(1), abs(lhs))
