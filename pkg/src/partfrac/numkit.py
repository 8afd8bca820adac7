"""Exact rational and arbitrary-precision kernels shared by every other module.

Floating scalars are mpmath ``mpf``/``mpc`` at the ambient working precision
(``mpmath.mp.prec``, default 256 bits set by the CLI and test suite).  Exact
rationals are gmpy2 ``mpq`` when available, ``fractions.Fraction`` otherwise;
the two interoperate transparently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from mpmath import mp, mpc, mpf

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as Rat

__all__ = [
    "Rat",
    "NumericError",
    "DEFAULT_PREC",
    "set_precision",
    "rat_to_mpf",
    "bernoulli_number",
    "bernoulli_poly",
    "stirling_subset",
    "partial_ordinary_bell",
    "binomial_general",
    "TruncSeries",
    "taylor_coeffs",
    "shift_series_basis",
    "unit_phase",
]

DEFAULT_PREC = 256


def set_precision(bits: int = DEFAULT_PREC) -> int:
    """Set the mpmath working precision (bits >= 64); returns the old value."""
    if bits < 64:
        raise ValueError("precision must be at least 64 bits")
    old = mp.prec
    mp.prec = bits
    return old


class NumericError(ArithmeticError):
    """A numeric procedure failed to converge; ``residual`` holds the last error."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


def rat_to_mpf(q) -> mpf:
    """Exact rational -> mpf at the current working precision."""
    q = Rat(q)
    return mpf(int(q.numerator)) / mpf(int(q.denominator))


# ----------------------------------------------------------------------------
# Bernoulli numbers and polynomials (convention B_1 = -1/2)

_bernoulli: list = [Rat(1)]


def bernoulli_number(n: int) -> Rat:
    """B_n with z/(e^z-1) = sum B_n z^n / n!, so B_1 = -1/2.  Cached."""
    if n < 0:
        raise ValueError("n must be >= 0")
    while len(_bernoulli) <= n:
        m = len(_bernoulli)
        # sum_{k=0}^{m} binom(m+1,k) B_k = 0
        s = Rat(0)
        for k in range(m):
            s += math.comb(m + 1, k) * _bernoulli[k]
        _bernoulli.append(-s / (m + 1))
    return _bernoulli[n]


def bernoulli_poly(a: int, x) -> Rat:
    """Bernoulli polynomial B_a(x) = sum_k binom(a,k) B_k x^(a-k), exact."""
    if a < 0:
        raise ValueError("a must be >= 0")
    x = Rat(x)
    acc = Rat(0)
    xp = Rat(1)  # x^(a-k), built from the k=a end down
    for k in range(a, -1, -1):
        acc += math.comb(a, k) * bernoulli_number(k) * xp
        xp *= x
    return acc


_stirling_rows: list = [[1]]


def stirling_subset(n: int, m: int) -> int:
    """Stirling subset number {n over m}; 0 when m > n or m < 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if m < 0 or m > n:
        return 0
    while len(_stirling_rows) <= n:
        prev = _stirling_rows[-1]
        r = len(_stirling_rows)
        row = [0] * (r + 1)
        for j in range(1, r + 1):
            row[j] = j * (prev[j] if j < r else 0) + prev[j - 1]
        _stirling_rows.append(row)
    return _stirling_rows[n][m]


def partial_ordinary_bell(i: int, j: int, args) -> "object":
    """Partial ordinary Bell polynomial: coefficient of x^i in (p1 x + p2 x^2 + ...)^j.

    ``args`` lists p_1, p_2, ... and must reach index i whenever i, j >= 1.
    Works over any commutative ring (mpc, mpf, rationals).
    """
    if i < 0 or j < 0:
        raise ValueError("indices must be >= 0")
    if j == 0:
        return 1 if i == 0 else 0
    if i == 0:
        return 0
    if len(args) < i:
        raise ValueError(f"need p_1..p_{i}, got only {len(args)} coefficients")
    # row recurrence over j: B[i, j] = sum_r p_r B[i-r, j-1]
    prev = [1] + [0] * i
    for jj in range(1, j + 1):
        cur = [0] * (i + 1)
        for ii in range(jj, i + 1):
            acc = 0
            for r in range(1, ii - jj + 2):
                b = prev[ii - r]
                if b:
                    acc = acc + args[r - 1] * b
            cur[ii] = acc
        prev = cur
    return prev[i]


def binomial_general(alpha, r: int):
    """Generalized binomial coefficient alpha(alpha-1)...(alpha-r+1)/r!.

    Exact for rational/integer alpha, floating for mpf/mpc alpha.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    if r == 0:
        return _one_like(alpha)
    if isinstance(alpha, int):
        alpha = Rat(alpha)
    acc = _one_like(alpha)
    for t in range(r):
        acc = acc * (alpha - t)
    return acc / math.factorial(r)


def _one_like(alpha):
    if isinstance(alpha, (int, Rat)):
        return Rat(1)
    return mpf(1) if isinstance(alpha, mpf) else mpc(1)


# ----------------------------------------------------------------------------
# Truncated power series


@dataclass
class TruncSeries:
    """Finite power series sum_j coeffs[j] (z - center)^j.

    Arithmetic truncates at the shorter operand's order, so orders stay
    consistent through +, * and exp.
    """

    center: mpc
    coeffs: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise ValueError("series needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def truncate(self, order: int) -> "TruncSeries":
        return TruncSeries(self.center, self.coeffs[:order])

    def __add__(self, other):
        if isinstance(other, TruncSeries):
            n = min(self.order, other.order)
            return TruncSeries(self.center, [self.coeffs[j] + other.coeffs[j] for j in range(n)])
        c = list(self.coeffs)
        c[0] = c[0] + other
        return TruncSeries(self.center, c)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(self.center, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, TruncSeries) else -mpc(other))

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            n = min(self.order, other.order)
            out = [mpc(0)] * n
            for a in range(n):
                ca = self.coeffs[a]
                if ca == 0:
                    continue
                for b in range(n - a):
                    out[a + b] += ca * other.coeffs[b]
            return TruncSeries(self.center, out)
        return TruncSeries(self.center, [c * other for c in self.coeffs])

    __rmul__ = __mul__

    def exp(self) -> "TruncSeries":
        """exp of the series, truncated at the same order."""
        n = self.order
        head = mp.exp(self.coeffs[0])
        nil = TruncSeries(self.center, [mpc(0)] + list(self.coeffs[1:]))
        out = TruncSeries(self.center, [mpc(1)] + [mpc(0)] * (n - 1))
        term = out
        for r in range(1, n):
            term = term * nil * (mpf(1) / r)
            out = out + term
        return out * head

    def eval(self, z) -> mpc:
        """Evaluate at the point z (Horner in z - center)."""
        t = mpc(z) - self.center
        acc = mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc


def taylor_coeffs(f, center, radius, order: int, tol=None, max_doublings: int = 9) -> TruncSeries:
    """Taylor coefficients of ``f`` at ``center`` by the trapezoidal Cauchy integral.

    Samples f on >= 4*order equally spaced nodes of the circle |z-center| =
    radius and doubles the node count until two passes agree to ``tol``
    (default 2^-(prec-8) relative to the largest coefficient).  Raises
    NumericError carrying the last residual if doubling runs out.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    prec = mp.prec
    if tol is None:
        tol = mpf(2) ** (-(prec - 8))
    center = mpc(center)
    radius = mpf(radius)
    # dividing by radius^j amplifies node noise; add guard bits for that
    guard = 24 + max(0, int(order * max(0.0, -math.log(float(radius), 2))) + 8)
    n = 8
    while n < 4 * order:
        n *= 2
    with mp.extraprec(guard):
        vals: list = []
        prev = None
        resid = None
        for _ in range(max_doublings + 1):
            new_vals = [mpc(0)] * n
            if vals:
                for m in range(0, n, 2):
                    new_vals[m] = vals[m // 2]
                todo = range(1, n, 2)
            else:
                todo = range(n)
            for m in todo:
                new_vals[m] = mpc(f(center + radius * mp.expjpi(mpf(2 * m) / n)))
            vals = new_vals
            coeffs = []
            rk = mpf(1)
            for j in range(order):
                acc = mpc(0)
                for m in range(n):
                    acc += vals[m] * mp.expjpi(mpf(-2 * ((j * m) % n)) / n)
                coeffs.append(acc / (n * rk))
                rk *= radius
            if prev is not None:
                scale = max([mpf(1)] + [abs(c) for c in coeffs])
                resid = max(abs(coeffs[j] - prev[j]) for j in range(order)) / scale
                if resid <= tol:
                    return TruncSeries(center, [mpc(c) for c in coeffs])
            prev = coeffs
            n *= 2
    raise NumericError("taylor_coeffs did not converge", residual=resid)


def shift_series_basis(alphas, a) -> list:
    """Re-center an asymptotic tail: sum_j alphas[j]/(N+a)^(j+2) -> sum_t betas[t]/N^(t+2).

    beta_t = sum_{j<=t} binom(-j-2, t-j) a^(t-j) alpha_j, exact in a.
    """
    a = Rat(a)
    out = []
    for t in range(len(alphas)):
        acc = mpc(0)
        for j in range(t + 1):
            acc += rat_to_mpf(binomial_general(Rat(-j - 2), t - j) * a ** (t - j)) * alphas[j]
        out.append(acc)
    return out


def unit_phase(num: int, den: int) -> mpc:
    """e^(i pi num/den) for integers, with the angle reduced exactly mod 2."""
    if den < 0:
        num, den = -num, -den
    return mp.expjpi(mpf(num % (2 * den)) / den)
