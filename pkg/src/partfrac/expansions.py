"""Correction-series kernels g, the saddle prefactors, the composed
u-coefficients, and the asymptotic coefficient tables c_t, c_t*, d_t, e_t
with their evaluators.

Each table kind pairs a dilogarithm zero w with coefficients so that the
corresponding Farey-subset sum is Re[w^-N / N^2 * sum_t coeffs[t]/N^t] up to
the next omitted order; for the half-Farey kind the basis is sqrt(w0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import mp, mpc, mpf

from .numkit import (
    NumericError,
    Rat,
    TruncSeries,
    bernoulli_number,
    rat_to_mpf,
    shift_series_basis,
    taylor_coeffs,
)
from .specfun import cot_deriv, dilog
from .saddle import SaddleContext, p_d, saddle_point, wojdylo_a2s
from . import rademacher

__all__ = [
    "g_kernels",
    "u_coeffs",
    "prefactor",
    "phi_series",
    "phi_direct",
    "ExpansionResult",
    "EXPANSION_KINDS",
    "coeff_table",
    "eval_expansion",
    "compare",
    "b0_constant",
]

EXPANSION_KINDS = ("C2", "C2STAR", "D1ODD", "D1EVEN", "E1")


# ----------------------------------------------------------------------------
# Kernels


def g_kernels(family: str, ell: int, z) -> mpc:
    """The correction kernels: 'g', 'gstar', 'gtilde', 'gC', 'gD'."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    z = mpc(z)
    b = rat_to_mpf(bernoulli_number(2 * ell)) / math.factorial(2 * ell)
    if family == "g":
        return -b * (mp.pi * z) ** (2 * ell - 1) * cot_deriv(2 * ell - 2, mp.pi * z)
    if family == "gstar":
        return -b * (mp.pi * z / 2) ** (2 * ell - 1) * cot_deriv(2 * ell - 2, mp.pi * (z - 1) / 2)
    if family == "gtilde":
        return b * (mp.pi * z) ** (2 * ell - 1) * (
            mp.pi * z * cot_deriv(2 * ell - 1, mp.pi * z) + (2 * ell - 1) * cot_deriv(2 * ell - 2, mp.pi * z)
        )
    if family == "gC":
        return g_kernels("g", ell, z) * (mpf(2) ** (-(2 * ell - 1)) - 1)
    if family == "gD":
        g = g_kernels("g", ell, z)
        gs = g_kernels("gstar", ell, z)
        return g - gs + mpf(2) ** (2 * ell - 1) * (2 * gs - g)
    raise ValueError(f"unknown kernel family {family!r}")


def _u_first_order(kind: str, sigma: int, z) -> mpc:
    z = mpc(z)
    if kind == "C":
        return 2 * mp.pi * mpc(0, 1) * sigma * z + g_kernels("g", 1, z)
    if kind == "CSTAR":
        return mp.pi * mpc(0, 1) * (16 * sigma + 1) * z / 8 + g_kernels("gC", 1, z)
    if kind == "D":
        return mp.pi * mpc(0, 1) * sigma * z + g_kernels("gD", 1, z)
    raise ValueError(f"unknown u-family {kind!r}")


_U_KERNEL = {"C": "g", "CSTAR": "gC", "D": "gD"}


def _weighted_compositions(j: int):
    """All (m_1, m_2, ...) with m_1 + 3 m_2 + 5 m_3 + ... = j."""
    def rec(rem, ell):
        w = 2 * ell - 1
        if rem == 0:
            yield {}
            return
        if w > rem:
            return
        for m in range(rem // w + 1):
            for tail in rec(rem - m * w, ell + 1):
                if m:
                    tail = dict(tail)
                    tail[ell] = m
                yield tail
    yield from rec(j, 1)


def u_coeffs(kind: str, sigma: int, j: int):
    """The coefficient of N^-j in exp(first-order/N + sum_l g_l/N^(2l-1)), as a function of z."""
    if j < 0:
        raise ValueError("j must be >= 0")
    fam = _U_KERNEL[kind]

    def u(z):
        z = mpc(z)
        acc = mpc(0)
        for comp in _weighted_compositions(j):
            term = mpc(1)
            for ell, m in comp.items():
                h = _u_first_order(kind, sigma, z) if ell == 1 else g_kernels(fam, ell, z)
                term *= h**m / math.factorial(m)
            acc += term
        return acc

    return u


# ----------------------------------------------------------------------------
# Prefactors


def _strip_check(z: mpc, lo: float, hi: float):
    if not (lo < z.real < hi):
        raise ValueError(f"prefactor defined on the strip ({lo}, {hi})")


def prefactor(kind: str, z, N: int | None = None, sigma: int | None = None) -> mpc:
    """Saddle prefactors q_C, q_C*, q_D, q_D*, q_E (the last needs N, sigma)."""
    z = mpc(z)
    if kind == "C":
        _strip_check(z, 2, 2.5)
        return mp.sqrt(z / (2 * mp.sin(mp.pi * z))) * mp.exp(-mp.pi * mpc(0, 1) * z / 2)
    if kind == "CSTAR":
        _strip_check(z, 3, 3.5)
        return mp.exp(-3 * mp.pi * mpc(0, 1) / 4) * mp.sqrt(z)
    if kind == "D":
        _strip_check(z, 1, 1.5)
        return mp.sqrt(z / (2 * mp.sin(mp.pi * (z - 1) / 2))) * mp.exp(-mp.pi * mpc(0, 1) * (z + 3) / 4)
    if kind == "DSTAR":
        _strip_check(z, 1, 1.5)
        s = 2 * mp.sin(mp.pi * (z - 1) / 2)
        return s * mp.sqrt(z / s) * mp.exp(mp.pi * mpc(0, 1) * (z - 1) / 4)
    if kind == "E":
        _strip_check(z, 2, 2.5)
        if N is None or sigma is None:
            raise ValueError("q_E needs N and sigma")
        acc = mpc(0)
        L = 2 * max(4, int(mp.floor(0.006 * mp.pi * mp.e * N / 2)))
        for ell in range(L):
            acc += phi_series(sigma, ell, z) / mpf(N) ** ell
        return prefactor("C", z) * acc
    raise ValueError(f"unknown prefactor kind {kind!r}")


def phi_series(sigma: int, ell: int, z) -> mpc:
    """Coefficient of N^-ell in the double-pole weight phi(N, k, sigma) at z = N/k.

    phi_0 is continued off the real axis through the dilogarithm; odd
    coefficients beyond the first vanish and even ones carry the gtilde kernel.
    """
    z = mpc(z)
    if ell == 0:
        return (
            mp.pi**2 / 6
            - dilog(mp.exp(2 * mp.pi * mpc(0, 1) * z))
            + 6 * mp.pi**2
            - 2 * mp.pi * mpc(0, 1) * z * mp.log(1 - mp.exp(2 * mp.pi * mpc(0, 1) * z))
        ) / (4 * mp.pi**2)
    if ell == 1:
        return z * z * cot_deriv(0, mp.pi * z) / mpc(0, 4) + z * z / 4 - 5 * z / (4 * mp.pi * mpc(0, 1))
    if ell % 2 == 1:
        return mpc(0)
    tail = z / (2 * mp.pi * mpc(0, 1)) * g_kernels("gtilde", ell // 2, z)
    if ell == 2:
        tail += -sigma * z * z
    return tail


def phi_direct(N: int, k: int, sigma: int) -> mpc:
    """Exact finite cotangent sum phi(N,k,sigma) (double-pole regime weight)."""
    return rademacher.phi_direct(N, k, sigma)


# ----------------------------------------------------------------------------
# Coefficient tables


@dataclass
class ExpansionResult:
    """Basis zero w, optional parity, and coefficients of Re[w^-N/N^2 sum_t coeffs[t]/N^t]."""

    w: mpc
    parity: int | None
    coeffs: list
    kind: str
    sign_choice: int = 1  # sign of the leading square root kept by the closed-form gate


_ctx_cache: dict = {}
_table_cache: dict = {}


def _ctx(d: int, m: int, order: int) -> SaddleContext:
    key = (d, m, order, mp.prec)
    if key not in _ctx_cache:
        _ctx_cache[key] = saddle_point(d, m, order=order)
    return _ctx_cache[key]


def _series_of(fn, ctx: SaddleContext, order: int) -> TruncSeries:
    return taylor_coeffs(fn, ctx.zstar, ctx.radius, order)


def _u_series_list(kind: str, sigma: int, ctx: SaddleContext, tmax: int, order: int) -> list:
    """Taylor series of u_{sigma,0..tmax} at the saddle via the exp composition."""
    zero = TruncSeries(ctx.zstar, [mpc(0)] * order)
    one = TruncSeries(ctx.zstar, [mpc(1)] + [mpc(0)] * (order - 1))
    V = [zero] * (tmax + 1)
    if tmax >= 1:
        V[1] = _series_of(lambda z: _u_first_order(kind, sigma, z), ctx, order)
    fam = _U_KERNEL[kind]
    ell = 2
    while 2 * ell - 1 <= tmax:
        V[2 * ell - 1] = _series_of(lambda z, e=ell: g_kernels(fam, e, z), ctx, order)
        ell += 1
    out = [zero] * (tmax + 1)
    out[0] = one
    term = [one] + [zero] * tmax
    for r in range(1, tmax + 1):
        new = [zero] * (tmax + 1)
        for i in range(tmax + 1):
            if term[i] is zero:
                continue
            for jj in range(1, tmax + 1 - i):
                if V[jj] is zero:
                    continue
                prod = term[i] * V[jj]
                new[i + jj] = prod if new[i + jj] is zero else new[i + jj] + prod
        term = [t * (mpf(1) / r) if t is not zero else zero for t in new]
        for i in range(tmax + 1):
            if term[i] is not zero:
                out[i] = term[i] if out[i] is zero else out[i] + term[i]
    return out


def _gate(kind: str, computed: mpc, closed: mpc) -> int:
    """Leading coefficients must match the closed form up to the square-root sign."""
    tol = mpf(2) ** (-(mp.prec // 2))
    scale = max(mpf(1), abs(closed))
    if abs(computed - closed) < tol * scale:
        return 1
    if abs(computed + closed) < tol * scale:
        return -1
    raise NumericError(f"{kind}: leading coefficient gate failed", residual=abs(computed - closed))


def coeff_table(kind: str, sigma: int, tmax: int = 6) -> ExpansionResult:
    """Expansion coefficients for one of C2, C2STAR, D1ODD, D1EVEN, E1.

    Every ingredient series is generated a little past tmax so each returned
    coefficient is exact in its inputs; the leading coefficient is gated
    against its closed form.
    """
    kind = kind.upper()
    if kind not in EXPANSION_KINDS:
        raise ValueError(f"unknown expansion kind {kind!r}")
    if tmax > 12:
        raise ValueError("tmax capped at 12")
    key = (kind, sigma, tmax, mp.prec)
    if key in _table_cache:
        return _table_cache[key]
    order = 2 * tmax + 3
    sqrt_pi_half = [mp.gamma(s + mpf(1) / 2) for s in range(tmax + 1)]

    if kind in ("C2", "E1"):
        ctx = _ctx(0, 2, order)
        useries = _u_series_list("C", sigma, ctx, tmax, order)
        qc = _series_of(lambda z: prefactor("C", z), ctx, order)
        z1 = ctx.zstar
        if kind == "C2":
            coeffs = []
            for t in range(tmax + 1):
                acc = mpc(0)
                for s in range(t + 1):
                    acc += sqrt_pi_half[s] * wojdylo_a2s(ctx.pseries, qc * useries[t - s], ctx.omega, s)
                coeffs.append(acc)
            closed = -z1 * mp.exp(-mp.pi * mpc(0, 1) * z1) / 2
            sign = _gate(kind, coeffs[0], closed)
            res = ExpansionResult(ctx.w, None, coeffs, kind, sign)
        else:
            phis = [
                _series_of(lambda z, e=ell: phi_series(sigma, e, z), ctx, order) if ell % 2 == 0 or ell == 1 else None
                for ell in range(tmax + 1)
            ]
            coeffs = []
            for t in range(tmax + 1):
                acc = mpc(0)
                for s in range(t + 1):
                    for kk in range(t - s + 1):
                        if phis[kk] is None:
                            continue
                        acc += 2 * sqrt_pi_half[s] * wojdylo_a2s(
                            ctx.pseries, qc * phis[kk] * useries[t - s - kk], ctx.omega, s
                        )
                coeffs.append(acc)
            closed = -3 * z1 * mp.exp(-mp.pi * mpc(0, 1) * z1) / 2
            sign = _gate(kind, coeffs[0], closed)
            res = ExpansionResult(ctx.w, None, coeffs, kind, sign)

    elif kind == "C2STAR":
        ctx = _ctx(1, 3, order)
        useries = _u_series_list("CSTAR", sigma, ctx, tmax, order)
        qs = _series_of(lambda z: mpc(0, 1) * prefactor("CSTAR", z), ctx, order)
        z3 = ctx.zstar
        head = mp.exp(-p_d(1, z3) / 2)
        alphas = []
        for t in range(tmax + 1):
            acc = mpc(0)
            for s in range(t + 1):
                acc += sqrt_pi_half[s] * wojdylo_a2s(ctx.pseries, qs * useries[t - s], ctx.omega, s) / 2
            alphas.append(head * acc)
        coeffs = shift_series_basis(alphas, Rat(1, 2))
        closed = -z3 * mp.exp(-mp.pi * mpc(0, 1) * z3) / 4
        sign = _gate(kind, coeffs[0], closed)
        res = ExpansionResult(ctx.w, None, coeffs, kind, sign)

    else:  # D1ODD / D1EVEN
        ctx = _ctx(0, 1, order)
        half_pseries = TruncSeries(ctx.pseries.center, [c / 2 for c in ctx.pseries.coeffs])
        useries = _u_series_list("D", sigma, ctx, tmax, order)
        z0 = ctx.zstar
        w_half = mp.sqrt(ctx.w)  # principal root, Re > 0
        if kind == "D1ODD":
            qd = _series_of(lambda z: prefactor("D", z), ctx, order)
            coeffs = []
            for t in range(tmax + 1):
                acc = mpc(0)
                for s in range(t + 1):
                    acc += sqrt_pi_half[s] * wojdylo_a2s(half_pseries, qd * useries[t - s], ctx.omega, s)
                coeffs.append(-2 * acc)
            closed = z0 * mp.sqrt(2 * mp.exp(-mp.pi * mpc(0, 1) * z0) * (mp.exp(-mp.pi * mpc(0, 1) * z0) - 1))
            sign = _gate(kind, coeffs[0], closed)
            res = ExpansionResult(w_half, 1, coeffs, kind, sign)
        else:
            qd = _series_of(lambda z: mpc(0, 1) * prefactor("DSTAR", z), ctx, order)
            head = mp.exp(-p_d(0, z0) / 2)
            alphas = []
            for t in range(tmax + 1):
                acc = mpc(0)
                for s in range(t + 1):
                    acc += sqrt_pi_half[s] * wojdylo_a2s(half_pseries, qd * useries[t - s], ctx.omega, s)
                alphas.append(-2 * head * acc)
            coeffs = shift_series_basis(alphas, Rat(1))
            closed = z0 * mp.sqrt(2 * mp.exp(-mp.pi * mpc(0, 1) * z0) * (mp.exp(-mp.pi * mpc(0, 1) * z0) + 1))
            sign = _gate(kind, coeffs[0], closed)
            res = ExpansionResult(w_half, 0, coeffs, kind, sign)

    _table_cache[key] = res
    return res


def eval_expansion(res: ExpansionResult, N: int, m: int) -> mpf:
    """Re[w^-N / N^2 sum_{t<m} coeffs[t]/N^t], the m-term approximation.

    Meaningful for large N; below N = 400 the error-term scales are not yet
    separated and a warning is emitted.
    """
    if m < 1 or m > len(res.coeffs):
        raise ValueError("need 1 <= m <= number of generated coefficients")
    if res.parity is not None and N % 2 != res.parity:
        raise ValueError(f"{res.kind} expects N with parity {res.parity}")
    if N < 400:
        import warnings

        warnings.warn(f"expansion evaluated at N={N} below its regime (N >= 400)", stacklevel=2)
    acc = mpc(0)
    for t in range(m - 1, -1, -1):
        acc = acc / N + res.coeffs[t]
    return (mp.power(res.w, -N) / N**2 * acc).real


_DIRECT_FOR = {"C2": "CPRIME", "C2STAR": "C2STAR", "D1": "D", "D1ODD": "D", "D1EVEN": "D", "E1": "E"}


def expansion_for(kind: str, sigma: int, N: int, tmax: int = 6) -> ExpansionResult:
    """coeff_table with the D-parity resolved from N ('D1' picks odd/even)."""
    kind = kind.upper()
    if kind == "D1":
        kind = "D1ODD" if N % 2 else "D1EVEN"
    return coeff_table(kind, sigma, tmax)


def compare(kind: str, sigma: int, N: int, m: int, threads: int = 1):
    """(direct subset sum, m-term expansion value, absolute error)."""
    kind = kind.upper()
    res = expansion_for(kind, sigma, N, tmax=max(m, 4))
    approx = eval_expansion(res, N, m)
    direct = rademacher.subset_sum(_DIRECT_FOR[kind], sigma, N, threads=threads)
    return direct, approx, abs(direct - approx)


def b0_constant() -> mpc:
    """b_0 = 2 z_0 e^(-pi i z_0), the leading coefficient of the A(N)-sum expansion."""
    z0 = _ctx(0, 1, 6).zstar
    return 2 * z0 * mp.exp(-mp.pi * mpc(0, 1) * z0)
