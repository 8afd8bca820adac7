"""Residue coefficients Q_{hk sigma}(N) by several independent routes, the
Rademacher coefficients C_{hkl}(N), Farey subsets and their direct sums, the
restricted-partition oracle, and explicit upper bounds on |Q|.

Routes to Q:
  * q_exact   - exact rational recursion E_k(N,m;r), any k <= N (cost grows fast)
  * q_simple  - closed form in the simple-pole regime N/2 < k <= N
  * q_double  - closed form in the double-pole regime N/3 < k <= N/2, h = 1 or k-1
  * q_contour - trapezoidal Cauchy residue, any regime (numeric fallback)
"""

from __future__ import annotations

import math
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from mpmath import mp, mpc, mpf

from .numkit import Rat, bernoulli_number, bernoulli_poly, rat_to_mpf, stirling_subset, unit_phase
from .sineprod import log_abs_sine_product, sine_product, sine_product_recip

__all__ = [
    "FareyFrac",
    "farey_fractions",
    "QValue",
    "SUBSET_KINDS",
    "subset_fractions",
    "ek_table",
    "q_exact",
    "q_simple",
    "q_double",
    "q_contour",
    "q_value",
    "phi_direct",
    "c_coeff",
    "c01_formula",
    "partition_count",
    "reconstruct_from_pf",
    "xi_triple",
    "q_bound",
    "q_bound_refined",
    "subset_sum",
    "zero_sum",
    "EXACT_CAP",
]

EXACT_CAP = 40  # largest N the exact-recursion route accepts by default


@dataclass(frozen=True)
class FareyFrac:
    """Reduced fraction h/k with 0 <= h < k."""

    h: int
    k: int

    def __post_init__(self):
        if not (self.k >= 1 and 0 <= self.h < self.k):
            raise ValueError("need 0 <= h < k")
        if math.gcd(self.h, self.k) != 1:
            raise ValueError("h/k must be reduced")


def farey_fractions(N: int) -> list[FareyFrac]:
    """Farey fractions of order N in [0,1), ascending by (k, h)."""
    out = [FareyFrac(0, 1)]
    for k in range(2, N + 1):
        for h in range(1, k):
            if math.gcd(h, k) == 1:
                out.append(FareyFrac(h, k))
    return out


@dataclass
class QValue:
    """One coefficient Q_{hk sigma}(N) together with the formula that produced it."""

    frac: FareyFrac
    sigma: int
    N: int
    value: mpc
    method: str  # exact-recursion | simple-pole | double-pole | contour


SUBSET_KINDS = ("A", "B", "C", "CPRIME", "C2STAR", "D", "E")


def subset_fractions(kind: str, N: int, K: int = 101) -> list[FareyFrac]:
    """Enumerate one of the Farey subsets, ascending by (k, h)."""
    kind = kind.upper()
    out: list[FareyFrac] = []
    if kind == "A":
        for k in range(N // 2 + 1, N + 1):
            for h in sorted({1, k - 1}):
                if h and math.gcd(h, k) == 1:
                    out.append(FareyFrac(h, k))
    elif kind in ("C", "CPRIME", "C2STAR"):
        if kind == "C":
            lo, hi = N // 2 + 1, N
        elif kind == "CPRIME":
            lo, hi = 2 * N // 3 + 1, N
        else:
            lo, hi = N // 2 + 1, 2 * N // 3
        for k in range(lo, hi + 1):
            if k % 2 == 1 and k >= 3:
                for h in sorted({2, k - 2}):
                    if 1 <= h < k and math.gcd(h, k) == 1:
                        out.append(FareyFrac(h, k))
    elif kind == "D":
        for k in range(N // 2 + 1, N + 1):
            if k % 2 == 1 and k >= 3:
                for h in sorted({(k - 1) // 2, (k + 1) // 2}):
                    if 1 <= h < k and math.gcd(h, k) == 1:
                        out.append(FareyFrac(h, k))
    elif kind == "E":
        for k in range(N // 3 + 1, N // 2 + 1):
            if k >= 2:
                for h in sorted({1, k - 1}):
                    if h and math.gcd(h, k) == 1:
                        out.append(FareyFrac(h, k))
    elif kind == "B":
        for k in range(max(K, 2), N + 1):
            if 3 * k <= N:
                excluded = set()
            elif 2 * k <= N:
                excluded = {1 % k, (-1) % k}
            else:
                excluded = {1 % k, (-1) % k, 2 % k, (-2) % k}
                if k % 2 == 1:
                    excluded |= {((k + 1) // 2) % k, ((k - 1) // 2) % k}
            for h in range(k):
                if math.gcd(h, k) == 1 and h % k not in excluded:
                    out.append(FareyFrac(h, k))
    else:
        raise ValueError(f"unknown subset kind {kind!r}")
    return out


# ----------------------------------------------------------------------------
# Exact rational recursion for Q


_ek_cache: dict = {}


def _ek_levels(N: int, k: int) -> list:
    """Level-N table lvl[m][r] = E_k(N, m; r) for 0 <= m <= max(N-1, 0), r < k."""
    key = (N, k)
    if key in _ek_cache:
        return _ek_cache[key]
    M = max(N - 1, 0)
    zero = Rat(0)
    # Bernoulli polynomial values B_a(j/k), a <= M
    bp = [[bernoulli_poly(a, Rat(j, k)) for j in range(k)] for a in range(M + 1)]
    lvl = [[zero] * k for _ in range(M + 1)]
    lvl[0][0] = Rat(1)
    for n in range(1, N + 1):
        new = [[zero] * k for _ in range(M + 1)]
        # c_a = n^a k^(a-1) / a!
        c = []
        for a in range(M + 1):
            num = Rat(n) ** a * (Rat(k) ** (a - 1) if a >= 1 else Rat(1, k))
            c.append(num / math.factorial(a))
        shift = [(-n * j) % k for j in range(k)]
        for mp_ in range(M + 1):
            row = lvl[mp_]
            if not any(row):
                continue
            for a in range(M + 1 - mp_):
                ca = c[a]
                bpa = bp[a]
                tgt = new[mp_ + a]
                for r in range(k):
                    acc = zero
                    for j in range(k):
                        e = row[(r + shift[j]) % k]
                        if e:
                            acc += e * bpa[j]
                    if acc:
                        tgt[r] += ca * acc
        lvl = new
    _ek_cache[key] = lvl
    return lvl


def ek_table(N: int, k: int) -> dict:
    """E_k(N, m; r) for 0 <= m <= max(N-1,0), 0 <= r < k, as a {(m, r): Rat} map."""
    if N < 0 or k < 1:
        raise ValueError("need N >= 0 and k >= 1")
    lvl = _ek_levels(N, k)
    return {(m, r): lvl[m][r] for m in range(len(lvl)) for r in range(k)}


def q_exact(h: int, k: int, sigma: int, N: int, cap: int = EXACT_CAP) -> QValue:
    """Q_{hk sigma}(N) from the exact rational recursion (any k <= N)."""
    frac = FareyFrac(h % k, k)
    if k > N:
        raise ValueError("need k <= N")
    if N > cap:
        raise ValueError(f"exact recursion capped at N <= {cap}; use q_contour")
    lvl = _ek_levels(N, k)
    acc = mpc(0)
    for r in range(k):
        s = Rat(0)
        sig_pow = Rat(1)
        for j in range(N):
            e = lvl[N - 1 - j][r]
            if e:
                s += sig_pow * e / math.factorial(j)
            sig_pow *= sigma
        if s:
            acc += unit_phase(2 * ((r + sigma) * h % k), k) * rat_to_mpf(s)
    value = acc * rat_to_mpf(Rat((-1) ** N, math.factorial(N)))
    return QValue(frac, sigma, N, value, "exact-recursion")


# ----------------------------------------------------------------------------
# Closed forms in the simple- and double-pole regimes


def q_simple(h: int, k: int, sigma: int, N: int) -> QValue:
    """Simple-pole closed form, valid for N/2 < k <= N."""
    if not (N / 2 < k <= N):
        raise ValueError("simple-pole formula needs N/2 < k <= N")
    frac = FareyFrac(h, k)
    phase = unit_phase(-h * (N * N + N - 4 * sigma), 2 * k)
    phase *= unit_phase(2 * N * h + N + h + k - h * k, 2)
    value = (-1) ** (k + 1) * phase * sine_product_recip(h, k, N - k) / k**2
    return QValue(frac, sigma, N, value, "simple-pole")


def phi_direct(N: int, k: int, sigma: int) -> mpc:
    """phi(N,k,sigma) = (N^2+N-4 sigma)/(4k^2) + (1/(2 pi i k)) sum (pi j/k) cot(pi j/k).

    The sum runs over 1 <= j <= N with k not dividing j; it is grouped by the
    residue of j mod k so only k-1 cotangents are evaluated.
    """
    s = mpf(0)
    for t in range(1, k):
        c = math.floor((N - t) / k) + 1 if t <= N else 0
        if c > 0:
            jsum = c * t + k * (c * (c - 1)) // 2
            s += mp.cot(mp.pi * t / k) * jsum
    s *= mp.pi / k
    return mpf(N * N + N - 4 * sigma) / (4 * k * k) + s / (2 * mp.pi * mpc(0, 1) * k)


def q_double(k: int, sigma: int, N: int, h: int = 1) -> QValue:
    """Double-pole closed form, valid for N/3 < k <= N/2 and h in {1, k-1}."""
    if not (N / 3 < k <= N / 2):
        raise ValueError("double-pole formula needs N/3 < k <= N/2")
    if h not in (1, k - 1):
        raise ValueError("double-pole formula needs h = 1 or k-1")
    frac = FareyFrac(h, k)
    phi = phi_direct(N, k, sigma)
    # exponent: -i pi (N^2 + N - N k + 2 k^2 - 4 sigma) / (2k), assembled exactly
    num = -(N * N + N - N * k + 2 * k * k - 4 * sigma)
    value = phi * unit_phase(num, 2 * k) / (2 * k**2) * sine_product_recip(1, k, N - 2 * k)
    if h == k - 1:
        value = mpc(value.real, -value.imag)
    return QValue(frac, sigma, N, value, "double-pole")


def _zeta_run_recip(h: int, k: int, M: int) -> mpc:
    """1 / prod_{j=1}^M (1 - e^(2 pi i j h/k)) with the phase carried exactly.

    1 - e^(i phi) = -2i sin(phi/2) e^(i phi/2), so the product is a signed sine
    product times the unit phase (-i)^M e^(pi i h M(M+1)/(2k)).
    """
    p = sine_product(h, k, M)
    if p == 0:
        raise ZeroDivisionError("root-of-unity run vanishes")
    phase = unit_phase(-M, 2) * unit_phase(h * M * (M + 1), 2 * k)
    return 1 / (phase * p)


def q_double_general(h: int, k: int, sigma: int, N: int) -> QValue:
    """Second-order-pole residue for any h coprime to k (N/3 < k <= N/2).

    Q = -e^(2 pi i sigma h/k)/(2 k^4) ((N(N+1) - 3k - 2 sigma)/2
        - sum_{k !| m <= N} m/(1 - e^(2 pi i m h/k))) / prod_{j<=N-2k}(1 - e^(2 pi i j h/k));
    the lattice sum is grouped by the residue of m mod k.
    """
    if not (N / 3 < k <= N / 2):
        raise ValueError("double-pole formula needs N/3 < k <= N/2")
    frac = FareyFrac(h, k)
    inner = mpc(0)
    for t in range(1, k):
        c = math.floor((N - t) / k) + 1 if t <= N else 0
        if c > 0:
            jsum = c * t + k * (c * (c - 1)) // 2
            inner += jsum / (1 - unit_phase(2 * ((t * h) % k), k))
    bracket = mpf(N * (N + 1) - 3 * k - 2 * sigma) / 2 - inner
    value = -unit_phase(2 * ((sigma * h) % k), k) / (2 * k**4) * bracket * _zeta_run_recip(h, k, N - 2 * k)
    return QValue(frac, sigma, N, value, "double-pole")


def q_contour(h: int, k: int, sigma: int, N: int, nodes: int | None = None) -> QValue:
    """Numeric residue by the trapezoidal Cauchy integral around h/k.

    Valid in every regime; used beyond the exact-recursion cap.  The circle
    radius stays below half the distance to any neighbouring pole, so with
    nodes > pole order the negative Laurent aliases vanish and the error
    decays like 2^-nodes.
    """
    frac = FareyFrac(h % k, k)
    if k > N:
        raise ValueError("need k <= N")
    s = N // k
    n = nodes or 1 << max(8, (mp.prec + 80).bit_length())
    if n <= s:
        n = 1 << (2 * s).bit_length()
    guard = mp.prec // 2 + 4 * s + 32
    with mp.extraprec(guard):
        r = mpf(1) / (2 * N * k)
        base = unit_phase(2 * h, k)
        acc = mpc(0)
        for t in range(n):
            e = mp.expjpi(mpf(2 * t) / n)
            z = r * e
            u1 = base * mp.exp(2 * mp.pi * mpc(0, 1) * z)  # e^(2 pi i (h/k + z))
            w = mpc(1)
            prod = mpc(1)
            for _ in range(N):
                w *= u1
                prod *= 1 - w
            acc += mp.exp(2 * mp.pi * mpc(0, 1) * sigma * (mpf(h) / k + z)) / prod * e
        value = 2 * mp.pi * mpc(0, 1) * r * acc / n
    return QValue(frac, sigma, N, +value, "contour")


def q_value(h: int, k: int, sigma: int, N: int, method: str = "auto") -> QValue:
    """Q_{hk sigma}(N) by the requested route ('auto' picks the cheapest valid one)."""
    if method == "auto":
        if h >= 1 and N / 2 < k <= N:
            method = "simple"
        elif h >= 1 and N / 3 < k <= N / 2:
            method = "double"
        elif N <= EXACT_CAP:
            method = "exact"
        else:
            method = "contour"
    if method == "simple":
        return q_simple(h, k, sigma, N)
    if method == "double":
        return q_double(k, sigma, N, h=h) if h in (1, k - 1) else q_double_general(h, k, sigma, N)
    if method == "exact":
        return q_exact(h, k, sigma, N)
    if method == "contour":
        return q_contour(h, k, sigma, N)
    raise ValueError(f"unknown method {method!r}")


# ----------------------------------------------------------------------------
# Rademacher coefficients and the partition oracle


def c_coeff(h: int, k: int, ell: int, N: int, method: str = "auto") -> mpc:
    """C_{hkl}(N) = sum_sigma binom(l-1, sigma-1) (-e^(2 pi i h/k))^(l-sigma) Q_{hk sigma}(N)."""
    if not 1 <= ell <= N // k:
        raise ValueError("need 1 <= ell <= floor(N/k)")
    zeta = unit_phase(2 * h, k)
    acc = mpc(0)
    for sigma in range(1, ell + 1):
        q = q_value(h, k, sigma, N, method=method).value
        acc += math.comb(ell - 1, sigma - 1) * (-zeta) ** (ell - sigma) * q
    return acc


def c01_formula(ell: int, N: int) -> Rat:
    """Exact C_{01l}(N) from the Stirling/Bernoulli composition sum.

    Evaluated as the x^(N-l) coefficient of the product of the N series
    m x/(e^(m x)-1) with the Stirling head series, all over exact rationals.
    """
    if not 1 <= ell <= N:
        raise ValueError("need 1 <= ell <= N")
    t = N - ell
    # head: sum_{j0} {l+j0 over l} / (l-1+j0)! x^j0
    poly = [Rat(stirling_subset(ell + j0, ell), math.factorial(ell - 1 + j0)) for j0 in range(t + 1)]
    for m in range(1, N + 1):
        fac = [bernoulli_number(j) * Rat(m) ** j / math.factorial(j) for j in range(t + 1)]
        new = [Rat(0)] * (t + 1)
        for i in range(t + 1):
            if poly[i]:
                for j in range(t + 1 - i):
                    new[i + j] += poly[i] * fac[j]
        poly = new
    return Rat((-1) ** N * math.factorial(ell - 1), math.factorial(N)) * poly[t]


def partition_count(N: int, n: int) -> int:
    """p_N(n): partitions of n into at most N parts (bounded-parts DP)."""
    if N < 1 or n < 0:
        raise ValueError("need N >= 1 and n >= 0")
    dp = [1] + [0] * n
    for j in range(1, N + 1):
        for t in range(j, n + 1):
            dp[t] += dp[t - j]
    return dp[n]


_pf_cache: dict = {}


def _pf_coeffs(N: int) -> list:
    """All (h, k, ell, C_{hkl}(N)) from the exact route, cached per N."""
    if N not in _pf_cache:
        out = []
        for fr in farey_fractions(N):
            for ell in range(1, N // fr.k + 1):
                out.append((fr.h, fr.k, ell, c_coeff(fr.h, fr.k, ell, N, method="exact")))
        _pf_cache[N] = out
    return _pf_cache[N]


def reconstruct_from_pf(N: int, n: int) -> mpc:
    """Coefficient of q^n in sum C_{hkl}(N)/(q - e^(2 pi i h/k))^l.

    Must reproduce partition_count(N, n); each pole term is expanded by the
    negative-binomial series, valid for |q| < 1.
    """
    acc = mpc(0)
    for h, k, ell, c in _pf_coeffs(N):
        b = math.comb(n + ell - 1, ell - 1)
        acc += c * (-1) ** ell * b * unit_phase(-2 * h * ((ell + n) % k), k)
    return acc


# ----------------------------------------------------------------------------
# Explicit bounds on |Q|


def xi_triple(K: int):
    """(xi1, xi2, xi3) from the sharpened elementary bounds at parameter K >= 2."""
    if K < 2:
        raise ValueError("need K >= 2")
    lam = mpf(1) / 2 + mpf(K) / 8
    y0 = 1 / (K * lam)
    xi1 = 2 + y0 * (1 - mp.cot(y0 / 2)) / 2
    xi2 = (mp.exp(y0) - 1) / y0
    y3 = xi2 / (4 * lam)
    xi3 = mp.log(1 / (1 - y3)) / y3
    return xi1, xi2, xi3


def _spr_abs(h: int, k: int, N: int) -> mpf:
    m = N % k
    return mp.exp(-log_abs_sine_product(h, k, m))


def q_bound(h: int, k: int, sigma: int, N: int) -> mpf:
    """Elementary bound: (3/k^3) exp(N(2+log(1+3k/4))/k + |sigma|/N) |spr(h/k; N mod k)|."""
    if not 2 <= k <= N:
        raise ValueError("need 2 <= k <= N")
    return 3 * mp.exp(N * (2 + mp.log(1 + mpf(3 * k) / 4)) / k + mpf(abs(sigma)) / N) * _spr_abs(h, k, N) / k**3


def q_bound_refined(K: int, h: int, k: int, sigma: int, N: int) -> mpf:
    """Sharpened bound with the xi-triple at parameter K (needs K <= k)."""
    if not 2 <= K <= k <= N:
        raise ValueError("need 2 <= K <= k <= N")
    xi1, xi2, xi3 = xi_triple(K)
    lam = xi1 / 2 + xi1 * xi2 * xi3 * k / 8
    return 9 * mp.exp(N * (2 + mp.log(lam)) / k + mpf(abs(sigma)) / N) * _spr_abs(h, k, N) / k**3


# ----------------------------------------------------------------------------
# Subset sums


def _q_for_subset(fr: FareyFrac, sigma: int, N: int) -> mpc:
    return q_value(fr.h, fr.k, sigma, N, method="auto").value


def _subset_worker(args):
    prec, kind, N, K, sigma, chunk = args
    with mp.workprec(prec):
        vals = []
        for h, k in chunk:
            vals.append(_q_for_subset(FareyFrac(h, k), sigma, N))
        return vals


def subset_sum(kind: str, sigma: int, N: int, K: int = 101, threads: int = 1) -> mpf:
    """Direct sum of Q over a Farey subset, accumulated in ascending (k, h) order.

    The result is real (the subsets are closed under h -> k-h and Q conjugates);
    the imaginary part is folded in as a consistency cross-check.
    """
    if N < 4:
        raise ValueError("need N >= 4")
    fracs = subset_fractions(kind, N, K=K)
    if not fracs:
        return mpf(0)
    if threads > 1:
        chunks: list = [[] for _ in range(min(threads, len(fracs)))]
        for i, fr in enumerate(fracs):
            chunks[i % len(chunks)].append((fr.h, fr.k))
        # spawn: immune to fork/lock interactions under test harnesses
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=len(chunks), mp_context=ctx) as ex:
            parts = list(ex.map(_subset_worker, [(mp.prec, kind, N, K, sigma, ch) for ch in chunks]))
        vals: dict = {}
        for ch, part in zip(chunks, parts):
            for hk, v in zip(ch, part):
                vals[hk] = v
        acc = mpc(0)
        for fr in fracs:
            acc += vals[(fr.h, fr.k)]
    else:
        acc = mpc(0)
        for fr in fracs:
            acc += _q_for_subset(fr, sigma, N)
    return acc.real


def zero_sum(sigma: int, N: int) -> mpc:
    """sum over all of Farey_N of Q_{hk sigma}(N); vanishes for sigma < N(N+1)/2."""
    acc = mpc(0)
    for fr in farey_fractions(N):
        acc += q_exact(fr.h, fr.k, sigma, N).value
    return acc


def default_threads() -> int:
    return os.cpu_count() or 1
