"""The functions p_d(z), their saddle points and polygonal integration paths,
numerical certification that each path satisfies the saddle-point hypothesis,
and Wojdylo's expansion coefficients a_2s.

p_d(z) = (-Li2(e^(2 pi i z)) + Li2(1) + 4 pi^2 d) / (2 pi i z) is holomorphic
away from the vertical cuts (-i oo, n], n integer.  Saddles are indexed by the
strip: p_d'(z) has a unique zero z* with m-1/2 < Re z* < m+1/2 whenever
-|m|/2 < d <= |m|/2, located through the dilogarithm zero w(d,-m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from mpmath import mp, mpc, mpf

from .numkit import NumericError, Rat, TruncSeries, binomial_general, rat_to_mpf, taylor_coeffs
from .specfun import dilog, dilog_zero

__all__ = [
    "p_d",
    "p_d_prime",
    "p_d_second",
    "SaddleContext",
    "saddle_point",
    "PathSpec",
    "build_path",
    "PATH_KINDS",
    "ray_deriv_value",
    "ray_deriv_bounds",
    "PathReport",
    "verify_path",
    "wojdylo_a2s",
    "steepest_expansion",
]


def _check_off_cut(z: mpc):
    if z.imag <= 0 and z.real == mp.floor(z.real):
        raise ValueError("z lies on a vertical branch cut (-i oo, n]")


def p_d(d: int, z) -> mpc:
    """p_d(z) = (-Li2(e^(2 pi i z)) + Li2(1) + 4 pi^2 d)/(2 pi i z)."""
    z = mpc(z)
    _check_off_cut(z)
    li = dilog(mp.exp(2 * mp.pi * mpc(0, 1) * z))
    return (-li + mp.pi**2 / 6 + 4 * mp.pi**2 * d) / (2 * mp.pi * mpc(0, 1) * z)


def p_d_prime(d: int, z) -> mpc:
    """p_d'(z) from 2 pi i z^2 p_d'(z) = Li2(e^(2 pi i z)) - Li2(1) - 4 pi^2 d + 2 pi i z log(1-e^(2 pi i z))."""
    z = mpc(z)
    _check_off_cut(z)
    u = mp.exp(2 * mp.pi * mpc(0, 1) * z)
    li = dilog(u)
    twopii = 2 * mp.pi * mpc(0, 1)
    return (li - mp.pi**2 / 6 - 4 * mp.pi**2 * d + twopii * z * mp.log(1 - u)) / (twopii * z * z)


def p_d_second(d: int, z) -> mpc:
    """p_d''(z) = -(1/z)(2 p_d'(z) + 2 pi i e^(2 pi i z)/(1 - e^(2 pi i z)))."""
    z = mpc(z)
    u = mp.exp(2 * mp.pi * mpc(0, 1) * z)
    return -(2 * p_d_prime(d, z) + 2 * mp.pi * mpc(0, 1) * u / (1 - u)) / z


@dataclass
class SaddleContext:
    """A saddle z* of p_d in strip m, with the local Taylor data for expansions."""

    d: int
    m: int
    zstar: mpc
    w: mpc  # dilogarithm zero w(d, -m); exp(p_d(z*)) = w
    pseries: TruncSeries
    omega: mpc  # path direction through the saddle (the ray direction z*)
    radius: mpf = mpf("0.1")


def _cut_distance(z: mpc) -> mpf:
    best = mpf("inf")
    base = int(mp.floor(z.real))
    for n in (base - 1, base, base + 1, base + 2):
        if z.imag > 0:
            dist = mp.hypot(z.real - n, z.imag)
        else:
            dist = abs(z.real - n)
        best = min(best, dist)
    return best


def saddle_point(d: int, m: int, order: int = 28) -> SaddleContext:
    """Locate z* = m + log(1 - w(d,-m))/(2 pi i) and expand p_d there.

    Requires -|m|/2 < d <= |m|/2.  The Taylor radius defaults to 0.4 x the
    distance from z* to the nearest branch cut.
    """
    if not (-abs(m) / 2 < d <= abs(m) / 2):
        raise ValueError("need -|m|/2 < d <= |m|/2")
    w = dilog_zero(d, -m).w
    zstar = m + mp.log(1 - w) / (2 * mp.pi * mpc(0, 1))
    radius = mpf("0.4") * _cut_distance(zstar)
    pseries = taylor_coeffs(lambda z: p_d(d, z), zstar, radius, order)
    tol = mpf(2) ** (-(mp.prec - 40))
    resid = abs(p_d_prime(d, zstar))
    if resid > tol:
        raise NumericError("saddle residual too large", residual=resid)
    drift = abs(mp.exp(p_d(d, zstar)) - w)
    if drift > tol:
        raise NumericError("exp(p_d(z*)) != w", residual=drift)
    return SaddleContext(d, m, +zstar, +w, pseries, +zstar, radius)


# ----------------------------------------------------------------------------
# Polygonal paths


@dataclass
class PathSpec:
    """Polygonal integration path; the saddle sits inside segment saddle_index."""

    vertices: list
    saddle_index: int
    kind: str = ""
    d: int = 0
    m: int = 0


# kind -> (d, strip m, x_lo, x_hi); v = Im(z*)/Re(z*) fixes the middle ray
PATH_KINDS = {
    "P": (0, 1, "1.01", "1.49"),
    "Q": (0, 2, "2.01", "2.49"),
    "R": (0, 3, "3.01", "3.49"),
    "S": (1, 3, "3.01", "3.49"),
}


def build_path(kind: str, ctx: SaddleContext | None = None) -> PathSpec:
    """Path through the saddle of its kind: x_lo, x_lo*c, x_hi*c, x_hi with c = 1 + i v."""
    kind = kind.upper()
    if kind not in PATH_KINDS:
        raise ValueError(f"unknown path kind {kind!r}")
    d, m, x_lo, x_hi = PATH_KINDS[kind]
    x_lo, x_hi = mpf(x_lo), mpf(x_hi)
    if ctx is None:
        ctx = saddle_point(d, m, order=6)
    v = ctx.zstar.imag / ctx.zstar.real
    c = mpc(1, v)
    return PathSpec([mpc(x_lo), x_lo * c, x_hi * c, mpc(x_hi)], 1, kind, d, m)


# ----------------------------------------------------------------------------
# Derivatives of Re p_d along rays z = (1 + i v) t

# For v > 0 the dilogarithm series converges directly; for v < 0 the
# reflection across the strip integer m converts it to a convergent series
# plus an elementary part.  Both cases share the coefficient shapes
#   A_n = e^(-2 pi n |v| t) (2/(n t^2) + s (2 pi rho/t + 1/(n^2 pi rho t^3)))
#   B_n = e^(-2 pi n |v| t) cos(theta) (2 pi rho/t - 1/(n^2 pi rho t^3))
#   C_n = e^(-2 pi n |v| t) (1/(n t) + s/(2 pi rho n^2 t^2))
#   D_n = e^(-2 pi n |v| t) cos(theta)/(2 pi rho n^2 t^2)
# with s = |sin theta|, and elementary parts
#   v > 0:  Re p_d = -kappa sin(theta)/(2 pi rho t) - sum ...,
#           kappa = pi^2/6 + 4 pi^2 d
#   v < 0:  Re p_d = -pi v t - kappa' sin(theta)/(2 pi rho t) - sum ...,
#           kappa' = 4 pi^2 d - 2 pi^2 m(m+1) - pi^2/6  (strip m)


def _kappa(d: int, eta: int, m_strip: int | None) -> mpf:
    if eta > 0:
        return mp.pi**2 / 6 + 4 * mp.pi**2 * d
    if m_strip is None:
        raise ValueError("rays below the axis need the strip index m")
    return 4 * mp.pi**2 * d - 2 * mp.pi**2 * m_strip * (m_strip + 1) - mp.pi**2 / 6


def ray_deriv_value(d: int, v, t, order: int = 1, m_strip: int | None = None) -> mpf:
    """d^order/dt^order of Re p_d((1+iv) t), order 1 or 2, by the convergent ray series."""
    v = mpf(v)
    t = mpf(t)
    if v == 0:
        raise ValueError("v must be nonzero")
    eta = 1 if v > 0 else -1
    a = abs(v)
    rho = mp.hypot(1, v)
    s = a / rho
    cost = 1 / rho
    kap = _kappa(d, eta, m_strip)
    sint = eta * s
    if order == 1:
        acc = kap * sint / (2 * mp.pi * rho * t * t)
        if eta < 0:
            acc += -mp.pi * v
    elif order == 2:
        acc = -kap * sint / (mp.pi * rho * t**3)
    else:
        raise ValueError("order must be 1 or 2")
    eps = mpf(2) ** (-mp.prec + 4)
    n = 1
    while True:
        e = mp.exp(-2 * mp.pi * n * a * t)
        if e < eps:
            break
        if order == 1:
            cn = e * (1 / (n * t) + s / (2 * mp.pi * rho * n * n * t * t))
            dn = e * cost / (2 * mp.pi * rho * n * n * t * t)
            acc += -cn * mp.cos(2 * mp.pi * n * t) + dn * mp.sin(2 * mp.pi * n * t)
        else:
            an = e * (2 / (n * t * t) + s * (2 * mp.pi * rho / t + 1 / (n * n * mp.pi * rho * t**3)))
            bn = e * cost * (2 * mp.pi * rho / t - 1 / (n * n * mp.pi * rho * t**3))
            acc += an * mp.cos(2 * mp.pi * n * t) + bn * mp.sin(2 * mp.pi * n * t)
        n += 1
    return acc


def _trig_min(kind: str, n: int, x0: mpf, x1: mpf) -> mpf:
    """Exact min of cos(2 pi n t) ('cos') or sin(2 pi n t) ('sin') over [x0, x1]."""
    if kind == "cos":
        lo, hi = mp.ceil(2 * n * x0), mp.floor(2 * n * x1)
        lo, hi = int(lo), int(hi)
        if hi >= lo and (lo % 2 == 1 or lo + 1 <= hi):
            return mpf(-1)
        return min(mp.cos(2 * mp.pi * n * x0), mp.cos(2 * mp.pi * n * x1))
    lo, hi = int(mp.ceil(4 * n * x0)), int(mp.floor(4 * n * x1))
    for c in range(lo, hi + 1):
        if c % 4 == 3:
            return mpf(-1)
    return min(mp.sin(2 * mp.pi * n * x0), mp.sin(2 * mp.pi * n * x1))


def ray_deriv_bounds(
    d: int,
    v_lo,
    v_hi,
    t_lo,
    t_hi,
    order: int = 2,
    n: int = 10,
    L: int = 3,
    m_strip: int | None = None,
) -> mpf:
    """Certified lower bound of d^order/dt^order Re p_d((1+iv)t) over the window.

    Works over v in [v_lo, v_hi] (single sign) and t in [t_lo, t_hi] split into
    n segments; the series is truncated at L terms with its tail absorbed into
    an explicit envelope.  Refining n never lowers the bound.
    """
    v_lo, v_hi, t_lo, t_hi = mpf(v_lo), mpf(v_hi), mpf(t_lo), mpf(t_hi)
    if not v_lo <= v_hi or v_lo * v_hi <= 0:
        raise ValueError("v-window must have a single sign")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    eta = 1 if v_lo > 0 else -1
    a1, a2 = sorted((abs(v_lo), abs(v_hi)))
    rho1, rho2 = mp.hypot(1, a1), mp.hypot(1, a2)
    s1, s2 = a1 / rho1, a2 / rho2  # |sin theta| = a/rho is increasing in a
    kap = _kappa(d, eta, m_strip)
    best = mpf("inf")
    for j in range(n):
        x0 = t_lo + (t_hi - t_lo) * j / n
        x1 = t_lo + (t_hi - t_lo) * (j + 1) / n
        if order == 2:
            coef = -kap * eta  # times s/(pi rho t^3)
            if coef >= 0:
                poly = coef * s1 / (mp.pi * rho2 * x1**3)
            else:
                poly = coef * s2 / (mp.pi * rho1 * x0**3)
        else:
            coef = kap * eta  # times s/(2 pi rho t^2)
            if coef >= 0:
                poly = coef * s1 / (2 * mp.pi * rho2 * x1**2)
            else:
                poly = coef * s2 / (2 * mp.pi * rho1 * x0**2)
            if eta < 0:
                poly += mp.pi * a1
        seg = poly
        for nn in range(1, L):
            e_lo = mp.exp(-2 * mp.pi * nn * a2 * x1)  # smallest exponential on segment
            e_hi = mp.exp(-2 * mp.pi * nn * a1 * x0)  # largest
            if order == 2:
                f_min = e_lo * (2 / (nn * x1 * x1) + s1 * (2 * mp.pi * rho1 / x1 + 1 / (nn * nn * mp.pi * rho2 * x1**3)))
                f_max = e_hi * (2 / (nn * x0 * x0) + s2 * (2 * mp.pi * rho2 / x0 + 1 / (nn * nn * mp.pi * rho1 * x0**3)))
                tmin = _trig_min("cos", nn, x0, x1)
                seg += f_min * tmin if tmin >= 0 else f_max * tmin
                g_min = (1 / rho2) * e_lo * (2 * mp.pi * rho1 / x1 - 1 / (nn * nn * mp.pi * rho1 * x1**3))
                g_max = (1 / rho1) * e_hi * (2 * mp.pi * rho2 / x0 - 1 / (nn * nn * mp.pi * rho2 * x0**3))
                if g_min < 0:
                    raise NumericError("B_n envelope not positive; enlarge t or n")
                tmin = _trig_min("sin", nn, x0, x1)
                seg += g_min * tmin if tmin >= 0 else g_max * tmin
            else:
                c_min = e_lo * (1 / (nn * x1) + s1 / (2 * mp.pi * rho2 * nn * nn * x1 * x1))
                c_max = e_hi * (1 / (nn * x0) + s2 / (2 * mp.pi * rho1 * nn * nn * x0 * x0))
                # term is -C_n cos(2 pi n t); its min is -max(C cos)
                tmax = _trig_max_cos(nn, x0, x1)
                seg += -(c_max * tmax) if tmax >= 0 else -(c_min * tmax)
                d_min = e_lo / (2 * mp.pi * rho2 * rho2 * nn * nn * x1 * x1)
                d_max = e_hi / (2 * mp.pi * rho1 * rho1 * nn * nn * x0 * x0)
                tmin = _trig_min("sin", nn, x0, x1)
                seg += d_min * tmin if tmin >= 0 else d_max * tmin
        # series tail: |sum_{n>=L}| <= e(L)/(1-e(1)) (coefficient envelope)
        e_tail = mp.exp(-2 * mp.pi * L * a1 * x0) / (1 - mp.exp(-2 * mp.pi * a1 * x0))
        if order == 2:
            tail = e_tail * (1 / (mp.pi * rho1 * L * L * x0**3) + 2 / (L * x0 * x0) + 2 * mp.pi * rho2 / x0)
        else:
            tail = e_tail * (1 / (2 * mp.pi * rho1 * L * L * x0 * x0) + 1 / (L * x0))
        seg -= tail
        best = min(best, seg)
    return best


def _trig_max_cos(n: int, x0: mpf, x1: mpf) -> mpf:
    lo, hi = int(mp.ceil(2 * n * x0)), int(mp.floor(2 * n * x1))
    if hi >= lo and (lo % 2 == 0 or lo + 1 <= hi):
        return mpf(1)
    return max(mp.cos(2 * mp.pi * n * x0), mp.cos(2 * mp.pi * n * x1))


# ----------------------------------------------------------------------------
# Path verification


@dataclass
class PathReport:
    ok: bool
    margin: mpf
    details: dict = field(default_factory=dict)


# per-kind verification windows: (t_lo, t_split, t_hi, v-window or None, n, L)
_VERIFY = {
    "Q": ("2", "2.35", "2.5", ("0.15", "0.16"), 10, 3),
    "P": ("1", "1.33", "1.5", None, 24, 6),
    "R": ("3", "3.35", "3.5", None, 24, 6),
    "S": ("3", "3.2", "3.5", None, 48, 60),
}
_V_HALFWIDTH = "0.005"


def _side_segment_max(d: int, x: mpf, y_lo: mpf, y_hi: mpf, segments: int, samples: int) -> mpf:
    """Upper bound (monotone envelope when valid, else dense sampling) of Re[-p_d] on a vertical side."""
    kap2 = mp.pi**2 / 6 + 4 * mp.pi**2 * d
    frac = x - mp.floor(x)
    monotone_ok = y_lo >= 0 and 0 < frac < mpf(1) / 2 and (frac <= mpf(1) / 6 or frac >= mpf(1) / 4)
    best = mpf("-inf")
    if monotone_ok:
        # f(y) = y (kap2 - Re Li2), g(y) = x Im Li2; Re/Im Li2 monotone in y here,
        # so per segment: f <= y_hi (kap2 - min-endpoint Re Li2), g <= g(y_lo)
        ys = [y_lo + (y_hi - y_lo) * i / segments for i in range(segments + 1)]
        li = [dilog(mp.exp(2 * mp.pi * mpc(0, 1) * mpc(x, y))) for y in ys]
        for i in range(segments):
            fmax = ys[i + 1] * (kap2 - min(li[i].real, li[i + 1].real))
            gmax = x * li[i].imag
            best = max(best, (fmax + gmax) / (2 * mp.pi * (x * x + ys[i] ** 2)))
    else:
        for i in range(samples + 1):
            y = y_lo + (y_hi - y_lo) * i / samples
            best = max(best, (-p_d(d, mpc(x, y))).real)
    return best


def verify_path(path: PathSpec, d: int | None = None, samples: int = 1000) -> PathReport:
    """Check Re(p_d(z) - p_d(z*)) > 0 on the path except at the saddle z*.

    The middle ray segment is certified by the second/first derivative lower
    bounds plus endpoint slope signs (unique interior minimum); the sides are
    bounded by the monotone dilogarithm envelopes where they apply, dense
    sampling otherwise.  The margin is the sampled minimum of
    Re(p_d - p_d(z*)) outside a disk of radius 1e-3 around z*.
    """
    kind = path.kind.upper()
    if kind not in _VERIFY:
        raise ValueError("verify_path needs one of the built-in path kinds")
    if d is None:
        d = path.d
    t_lo, t_split, t_hi, v_win, n, L = _VERIFY[kind]
    t_lo, t_split, t_hi = mpf(t_lo), mpf(t_split), mpf(t_hi)
    ctx = saddle_point(d, path.m, order=6)
    zs = ctx.zstar
    v = zs.imag / zs.real
    if v_win is None:
        v1, v2 = v - mpf(_V_HALFWIDTH), v + mpf(_V_HALFWIDTH)
    else:
        v1, v2 = mpf(v_win[0]), mpf(v_win[1])
    m_strip = path.m
    details: dict = {}
    b2 = ray_deriv_bounds(d, v1, v2, t_lo, t_split, order=2, n=n, L=L, m_strip=m_strip)
    b1 = ray_deriv_bounds(d, v1, v2, t_split, t_hi, order=1, n=n, L=L, m_strip=m_strip)
    details["second_deriv_bound"] = b2
    details["first_deriv_bound"] = b1
    slope_lo = ray_deriv_value(d, v, t_lo, order=1, m_strip=m_strip)
    slope_split = ray_deriv_value(d, v, t_split, order=1, m_strip=m_strip)
    details["slope_at_t_lo"] = slope_lo
    details["slope_at_t_split"] = slope_split
    middle_ok = b2 > 0 and b1 > 0 and slope_lo < 0 < slope_split
    # side segments
    x_lo, x_hi = path.vertices[0].real, path.vertices[3].real
    target = (-p_d(d, zs)).real
    side_max = mpf("-inf")
    for x in (x_lo, x_hi):
        y_end = x * v
        y0, y1 = (mpf(0), y_end) if y_end > 0 else (y_end, mpf(0))
        side_max = max(side_max, _side_segment_max(d, x, y0, y1, segments=64, samples=samples))
    margin_side = target - side_max
    details["side_max"] = side_max
    details["saddle_level"] = target
    # sampled clearance along the whole path outside the saddle disk
    margin_path = mpf("inf")
    pz = p_d(d, zs)
    for i in range(len(path.vertices) - 1):
        za, zb = path.vertices[i], path.vertices[i + 1]
        for t in range(samples + 1):
            z = za + (zb - za) * t / samples
            if abs(z - zs) < mpf("1e-3"):
                continue
            margin_path = min(margin_path, (p_d(d, z) - pz).real)
    details["sampled_margin"] = margin_path
    ok = bool(middle_ok and margin_side > 0 and margin_path > 0)
    if not ok:
        details["offending"] = (
            "middle" if not middle_ok else ("sides" if margin_side <= 0 else "sampling")
        )
    return PathReport(ok, min(margin_side, margin_path), details)


# ----------------------------------------------------------------------------
# Wojdylo's formula and the steepest-descent expansion


def _sqrt_repos(x: mpc) -> mpc:
    r = mp.sqrt(x)
    if r.real < 0 or (r.real == 0 and r.imag < 0):
        r = -r
    return r


def wojdylo_a2s(pseries: TruncSeries, qseries: TruncSeries, omega, s: int) -> mpc:
    """a_2s = omega/(2 (omega^2 p0)^(1/2)) sum_i q_{2s-i} sum_j p0^(-s-j) binom(-s-1/2, j) B^_{i,j}(p1,...).

    pseries carries p(z*) + p0 (z-z*)^2 + p1 (z-z*)^3 + ...; the square root is
    the one with positive real part.
    """
    if pseries.order < 2 * s + 3:
        raise ValueError("pseries too short for a_2s")
    if qseries.order < 2 * s + 1:
        raise ValueError("qseries too short for a_2s")
    p0 = pseries.coeffs[2]
    if p0 == 0:
        raise NumericError("not a simple saddle: p0 = 0")
    omega = mpc(omega)
    ptail = pseries.coeffs[3:]
    pref = omega / (2 * _sqrt_repos(omega * omega * p0))
    acc = mpc(0)
    from .numkit import partial_ordinary_bell

    for i in range(2 * s + 1):
        qi = qseries.coeffs[2 * s - i]
        inner = mpc(0)
        for j in range(i + 1):
            bell = partial_ordinary_bell(i, j, ptail)
            if bell == 0:
                continue
            binom = rat_to_mpf(binomial_general(Rat(-2 * s - 1, 2), j))
            inner += p0 ** (-s - j) * binom * bell
        acc += qi * inner
    return pref * acc


def steepest_expansion(ctx: SaddleContext, q, S: int) -> list:
    """Terms 2 Gamma(s+1/2) a_2s, s < S, so the integral of e^(-N p) q over the
    path is e^(-N p(z*)) sum_s terms[s] / N^(s+1/2) + O(N^(-S-1/2))."""
    if callable(q):
        qseries = taylor_coeffs(q, ctx.zstar, ctx.radius, 2 * S + 1)
    else:
        qseries = q
    out = []
    for s in range(S):
        out.append(2 * mp.gamma(s + mpf(1) / 2) * wojdylo_a2s(ctx.pseries, qseries, ctx.omega, s))
    return out
