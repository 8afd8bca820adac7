"""Dilogarithm on the principal branch, its continued-branch zeros w(A,B),
Clausen's integral, and higher cotangent / log-sinc derivative kernels.

The dilogarithm is evaluated by region: Taylor series for |z| <= 1/2, the
inversion identity for |z| >= 2, the reflection identity for |1-z| <= 1/2 and
a Bernoulli series in u = -log(1-z) on the remaining annulus.  Points on the
cut [1, oo) get the limit from the upper half-plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import mp, mpc, mpf

from .numkit import NumericError, Rat, bernoulli_number, rat_to_mpf

__all__ = [
    "dilog",
    "dilog_continued",
    "DilogZero",
    "dilog_zero",
    "clausen",
    "clausen_max",
    "cot_deriv",
    "rho_deriv",
]


def _eps() -> mpf:
    return mpf(2) ** (-mp.prec + 4)


def _on_cut(z: mpc) -> bool:
    return z.imag == 0 and z.real >= 1


def _log_1mz(z: mpc) -> mpc:
    """log(1-z), taking the limit from the upper half-plane when z in (1, oo)."""
    if _on_cut(z) and z.real > 1:
        return mpc(mp.log(z.real - 1), -mp.pi)
    return mp.log(1 - z)


def _log_negz(z: mpc) -> mpc:
    """log(-z) with the same upper-half-plane limit for z in (0, oo)."""
    if z.imag == 0 and z.real > 0:
        return mpc(mp.log(z.real), -mp.pi)
    return mp.log(-z)


def _dilog_series(z: mpc) -> mpc:
    # sum z^n / n^2, |z| <= 1/2 so the tail drops by at least half per term
    eps = _eps()
    acc = mpc(0)
    p = mpc(z)
    n = 1
    while True:
        term = p / (n * n)
        acc += term
        if abs(term) < eps * (1 + abs(acc)):
            return acc
        p *= z
        n += 1


def _dilog_u_series(z: mpc) -> mpc:
    # Li2(1 - e^-u) = sum_{n>=0} B_n u^(n+1) / (n! (n+1)), u = -log(1-z); |u| < 2 pi
    u = -_log_1mz(z)
    eps = _eps()
    acc = mpc(0)
    up = mpc(u)  # u^(n+1)
    n = 0
    while True:
        b = bernoulli_number(n)
        if b != 0:
            term = rat_to_mpf(Rat(b) / (math.factorial(n) * (n + 1))) * up
            acc += term
            if n > 2 and abs(term) < eps * (1 + abs(acc)):
                return acc
        up *= u
        n += 1
        if n > 8 * mp.prec:  # pragma: no cover - |u| < 2 pi guarantees termination
            raise NumericError("dilog u-series stalled", residual=abs(term))


def dilog(z) -> mpc:
    """Principal-branch dilogarithm Li2(z); on-cut arguments use the limit from above."""
    z = mpc(z)
    with mp.extraprec(16):
        if z == 0:
            res = mpc(0)
        elif z == 1:
            res = mpc(mp.pi**2) / 6
        elif abs(z) <= mpf(1) / 2:
            res = _dilog_series(z)
        elif abs(z) >= 2:
            lg = _log_negz(z)
            res = -mpc(mp.pi**2) / 6 - lg * lg / 2 - dilog(1 / z)
        elif abs(1 - z) <= mpf(1) / 2:
            res = mpc(mp.pi**2) / 6 - mp.log(z) * _log_1mz(z) - dilog(1 - z)
        else:
            res = _dilog_u_series(z)
    return +res


def dilog_continued(z, A: int, B: int) -> mpc:
    """Continued-branch value Li2(z) + 4 pi^2 A + 2 pi i B log z (principal log)."""
    z = mpc(z)
    if z == 0:
        raise ValueError("z must be nonzero")
    return dilog(z) + 4 * mp.pi**2 * A + 2 * mp.pi * mpc(0, 1) * B * mp.log(z)


@dataclass
class DilogZero:
    """Zero w(A,B) of the continued dilogarithm, with its Newton residual."""

    A: int
    B: int
    w: mpc
    residual: mpf


_ZERO_SEEDS = {
    (0, -1): mpc("0.916198", "-0.182459"),
    (0, -2): mpc("0.968482", "-0.109531"),
    (1, -3): mpc("-0.459473", "-0.848535"),
}


def _grid_seed(A: int, B: int) -> mpc:
    """Coarse 40x40 minimization of |F| on [-2,2]^2, avoiding the cut and 0."""
    best, best_val = None, mpf("inf")
    with mp.workprec(53):
        for i in range(40):
            for j in range(40):
                w = mpc(-2 + mpf(4 * i + 2) / 40, -2 + mpf(4 * j + 2) / 40)
                if abs(w) < mpf("0.05") or (abs(w.imag) < mpf("0.05") and w.real > mpf("0.9")):
                    continue
                v = abs(dilog_continued(w, A, B))
                if v < best_val:
                    best, best_val = w, v
    return best


def dilog_zero(A: int, B: int) -> DilogZero:
    """Newton solve of Li2(w) + 4 pi^2 A + 2 pi i B log w = 0.

    Requires B != 0 and -|B|/2 < A <= |B|/2 (existence and uniqueness range).
    The derivative is (-log(1-w) + 2 pi i B)/w; precision is raised in stages.
    """
    if B == 0:
        raise ValueError("B must be nonzero")
    if not (-abs(B) / 2 < A <= abs(B) / 2):
        raise ValueError(f"no zero exists for (A,B)=({A},{B})")
    target = mp.prec
    seeds = [_ZERO_SEEDS[(A, B)]] if (A, B) in _ZERO_SEEDS else [_grid_seed(A, B)]
    for seed in seeds:
        w = seed
        ok = True
        prec = 64
        while True:
            with mp.workprec(prec + 16):
                for _ in range(60):
                    F = dilog_continued(w, A, B)
                    dF = (-_log_1mz(w) + 2 * mp.pi * mpc(0, 1) * B) / w
                    step = F / dF
                    w = w - step
                    if abs(step) <= mpf(2) ** (-prec) * (1 + abs(w)):
                        break
                else:
                    ok = False
            if not ok or prec >= target:
                break
            prec = min(2 * prec, target)
        if ok:
            resid = abs(dilog_continued(w, A, B))
            if resid < mpf(2) ** (-(target - 16)):
                return DilogZero(A, B, +w, +resid)
    raise NumericError(f"Newton failed for w({A},{B})", residual=resid if ok else None)


def clausen(theta) -> mpf:
    """Clausen's integral Cl2(theta) = sum sin(n theta)/n^2 = Im Li2(e^(i theta))."""
    theta = mpf(theta)
    # reduce mod 2 pi exactly enough: work from theta/pi to keep periodicity tight
    x = theta / mp.pi
    x = x - 2 * mp.floor(x / 2)  # in [0, 2)
    if x == 0 or x == 1:
        return mpf(0)
    return dilog(mp.expjpi(x)).imag


def clausen_max() -> mpf:
    """The maximum value Cl2(pi/3) of Clausen's integral."""
    return clausen(mp.pi / 3)


# ----------------------------------------------------------------------------
# cot and rho = log(sin z / z) derivatives

_cot_polys: list = [[0, 1]]  # cot^(d) as integer polynomials in c = cot z


def _cot_poly(d: int) -> list:
    while len(_cot_polys) <= d:
        p = _cot_polys[-1]
        # differentiate: (p(c))' = p'(c) * c' with c' = -1 - c^2
        dp = [i * p[i] for i in range(1, len(p))]
        q = [0] * (len(dp) + 2)
        for i, a in enumerate(dp):
            q[i] -= a
            q[i + 2] -= a
        while len(q) > 1 and q[-1] == 0:
            q.pop()
        _cot_polys.append(q)
    return _cot_polys[d]


def cot_deriv(d: int, z) -> mpc:
    """d-th derivative of cot at z, via the polynomial recurrence cot' = -1 - cot^2."""
    if d < 0:
        raise ValueError("d must be >= 0")
    z = mpc(z)
    s = mp.sin(z)
    if abs(s) < _eps():
        raise ValueError("cot derivative at a pole")
    c = mp.cos(z) / s
    acc = mpc(0)
    for a in reversed(_cot_poly(d)):
        acc = acc * c + a
    return acc


def rho_deriv(d: int, z) -> mpc:
    """d-th derivative of rho(z) = log(sin z / z).

    rho^(d)(z) = cot^(d-1)(z) - (-1)^(d-1) (d-1)!/z^d for d >= 1, with a series
    fallback near the removable singularity at 0.
    """
    if d < 0:
        raise ValueError("d must be >= 0")
    z = mpc(z)
    if d == 0:
        if z == 0:
            return mpc(0)
        return mp.log(mp.sin(z) / z)
    if abs(z) < mpf(1) / 4:
        return _rho_deriv_series(d, z)
    return cot_deriv(d - 1, z) - (-1) ** (d - 1) * mpf(math.factorial(d - 1)) / z**d


def _rho_deriv_series(d: int, z: mpc) -> mpc:
    # -rho'(w) = sum_{r>=1} 2^(2r) |B_2r| w^(2r-1) / (2r)!   (|w| < pi)
    eps = _eps()
    acc = mpc(0)
    r = max(1, (d + 1) // 2)
    if z == 0 and d % 2 == 1:
        return mpc(0)
    while True:
        e = 2 * r - 1 - (d - 1)
        if e >= 0:
            coef = Rat(2 ** (2 * r)) * abs(bernoulli_number(2 * r)) / math.factorial(2 * r)
            for t in range(d - 1):
                coef *= 2 * r - 1 - t
            term = -rat_to_mpf(coef) * z**e
            acc += term
            if r > d and abs(term) <= eps * (1 + abs(acc)):
                return acc
        r += 1
