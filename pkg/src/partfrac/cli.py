"""Command-line front end: reproduce the asymptotic tables and figure data,
query zeros/saddles/coefficients, and run the verification batteries.

Exit codes: 0 success, 2 usage error, 3 verification failure, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from mpmath import mp, mpf

from .numkit import NumericError
from . import expansions, rademacher, saddle, sineprod, specfun

EXIT_VERIFY = 3
EXIT_NUMERIC = 4


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--bits", type=int, default=None, help="working precision in bits (default 256)")
    parser.add_argument("--sigma", type=int, default=None, help="sigma parameter (default 1)")
    parser.add_argument("--N", type=int, action="append", default=None, help="N value (repeatable)")
    parser.add_argument("--m", type=int, default=None, help="number of expansion terms (default 4)")
    parser.add_argument("--tmax", type=int, default=None, help="coefficient truncation order (default 6)")
    parser.add_argument("--threads", type=int, default=None, help="worker processes for sweeps")
    parser.add_argument("--format", choices=["csv", "json"], default=None, help="output format (default csv)")
    parser.add_argument("--out", default=None, help="write output to FILE instead of stdout")
    parser.add_argument("--config", default=None, help="key=value config file; flags override")


_DEFAULTS = {"bits": 256, "sigma": 1, "m": 4, "tmax": 6, "threads": 1, "format": "csv"}


def _load_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k] = v
    return out


def _settings(args) -> dict:
    cfg = dict(_DEFAULTS)
    if args.config:
        raw = _load_config(args.config)
        for k, v in raw.items():
            if k not in _DEFAULTS:
                raise ValueError(f"unknown config key {k!r}")
            cfg[k] = v if k == "format" else int(v)
    for k in _DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    if cfg["bits"] < 64:
        raise ValueError("precision must be at least 64 bits")
    if cfg["tmax"] > 12:
        raise ValueError("tmax is capped at 12")
    return cfg


def _emit(cfg, header: list, rows: list, out=None):
    """Rows of str/number cells, one header row; csv or json mirror."""
    stream = io.StringIO()
    if cfg["format"] == "csv":
        w = csv.writer(stream)
        w.writerow(header)
        for r in rows:
            w.writerow([str(c) for c in r])
    else:
        payload = {
            "precision_bits": cfg["bits"],
            "columns": header,
            "rows": [[str(c) for c in r] for r in rows],
        }
        stream.write(json.dumps(payload, indent=2) + "\n")
    text = stream.getvalue()
    path = out if out is not None else None
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _str(x, digits=15):
    return mp.nstr(x, digits)


# ----------------------------------------------------------------------------
# Subcommands


def cmd_zeros(args, cfg):
    z = specfun.dilog_zero(args.A, args.B)
    rows = [
        ["A", args.A],
        ["B", args.B],
        ["re", _str(z.w.real)],
        ["im", _str(z.w.imag)],
        ["residual", mp.nstr(z.residual, 5)],
        ["-log|w|", _str(-mp.log(abs(z.w)))],
    ]
    _emit(cfg, ["field", "value"], rows, args.out)
    return 0


def cmd_saddles(args, cfg):
    ctx = saddle.saddle_point(args.d, args.m_strip, order=6)
    pz = saddle.p_d(ctx.d, ctx.zstar)
    rows = [
        ["d", ctx.d],
        ["m", ctx.m],
        ["re", _str(ctx.zstar.real)],
        ["im", _str(ctx.zstar.imag)],
        ["pprime_residual", mp.nstr(abs(saddle.p_d_prime(ctx.d, ctx.zstar)), 5)],
        ["w_re", _str(ctx.w.real)],
        ["w_im", _str(ctx.w.imag)],
        ["exp_p_drift", mp.nstr(abs(mp.exp(pz) - ctx.w), 5)],
        ["Re(-p)", _str((-pz).real)],
        ["-log|w|", _str(-mp.log(abs(ctx.w)))],
    ]
    _emit(cfg, ["field", "value"], rows, args.out)
    return 0


def cmd_qcoeff(args, cfg):
    q = rademacher.q_value(args.h, args.k, cfg["sigma"], args.Nval, method=args.method)
    rows = [[args.h, args.k, cfg["sigma"], args.Nval, q.method, _str(q.value.real), _str(q.value.imag)]]
    _emit(cfg, ["h", "k", "sigma", "N", "method", "re", "im"], rows, args.out)
    return 0


def cmd_ccoeff(args, cfg):
    c = rademacher.c_coeff(args.h, args.k, args.ell, args.Nval)
    rows = [[args.h, args.k, args.ell, args.Nval, _str(c.real), _str(c.imag)]]
    _emit(cfg, ["h", "k", "ell", "N", "re", "im"], rows, args.out)
    return 0


def cmd_sums(args, cfg):
    rows = []
    for N in args.N or [800]:
        val = rademacher.subset_sum(args.kind.upper(), cfg["sigma"], N, threads=cfg["threads"])
        rows.append([args.kind.upper(), cfg["sigma"], N, _str(val)])
    _emit(cfg, ["kind", "sigma", "N", "sum"], rows, args.out)
    return 0


_TABLE_KIND = {1: "C2", 2: "C2STAR", 3: "D1", 4: "E1"}
_TABLE_DEFAULT_N = {1: [800, 1000], 2: [800, 1000], 3: [1000, 1001], 4: [800, 1000]}


def cmd_table(args, cfg):
    which = args.which
    kind = _TABLE_KIND[which]
    Ns = args.N or _TABLE_DEFAULT_N[which]
    mmax = cfg["m"]
    header = ["N"] + [f"m={m}" for m in range(1, mmax + 1)] + ["direct"]
    rows = []
    for N in Ns:
        res = expansions.expansion_for(kind, cfg["sigma"], N, tmax=max(cfg["tmax"], mmax))
        vals = [expansions.eval_expansion(res, N, m) for m in range(1, mmax + 1)]
        direct = rademacher.subset_sum(expansions._DIRECT_FOR[kind], cfg["sigma"], N, threads=cfg["threads"])
        rows.append([N] + [mp.nstr(v, 6) for v in vals] + [mp.nstr(direct, 6)])
    _emit(cfg, header, rows, args.out)
    return 0


def cmd_figure(args, cfg):
    rows = []
    if args.which == 1:
        k = 101
        header = ["h", "psi", "bound"]
        for h in range(1, k):
            bound = specfun.clausen_max() / (2 * mp.pi * sineprod.min_pair(h, k).D)
            rows.append([h, mp.nstr(sineprod.psi_recip(h, k), 6), mp.nstr(bound, 6)])
    else:
        N = (args.N or [50])[0]
        header = ["k", "log_qbound", "log_absq"]
        for k in range(2, N + 1):
            q = rademacher.q_value(1, k, cfg["sigma"], N)
            b = rademacher.q_bound(1, k, cfg["sigma"], N)
            rows.append([k, mp.nstr(mp.log(b), 6), mp.nstr(mp.log(abs(q.value)), 6)])
    _emit(cfg, header, rows, args.out)
    return 0


def cmd_bounds(args, cfg):
    rows = []
    for K in args.K or [2, 61, 82, 101]:
        x1, x2, x3 = rademacher.xi_triple(K)
        rows.append([K, mp.nstr(x1, 6), mp.nstr(x1 * x2 * x3, 6)])
    _emit(cfg, ["K", "xi1", "xi1xi2xi3"], rows, args.out)
    return 0


def cmd_sineprod(args, cfg):
    p = sineprod.sine_product(args.h, args.k, args.m_count)
    rows = [["product", _str(p)]]
    if p != 0:
        rows.append(["reciprocal", _str(1 / p)])
    if args.L and 1 <= args.m_count < args.k / args.h:
        main, tl = sineprod.sine_product_em(args.h, args.k, args.m_count, args.L)
        rows += [["em_mainterm", _str(main)], ["em_TL", _str(tl)]]
    _emit(cfg, ["field", "value"], rows, args.out)
    return 0


def cmd_verify(args, cfg):
    ok = True
    rows = []
    what = args.what
    if what in ("paths", "all"):
        for kind in ["P", "Q", "R", "S"]:
            rep = saddle.verify_path(saddle.build_path(kind), samples=args.samples)
            ok &= rep.ok
            rows.append([f"path-{kind}", "pass" if rep.ok else "FAIL", mp.nstr(rep.margin, 5)])
    if what in ("zero-sum", "all"):
        N = (args.N or [10])[0]
        sig = cfg["sigma"]
        resid = abs(rademacher.zero_sum(sig, N))
        good = resid < mpf(2) ** (-(cfg["bits"] - 56))
        ok &= good
        rows.append([f"zero-sum-N{N}-s{sig}", "pass" if good else "FAIL", mp.nstr(resid, 5)])
    if what in ("identities", "all"):
        tol = mpf(2) ** (-(cfg["bits"] - 64))
        checks = [
            ("half-c-k7", sineprod.half_identities(7, "c", a=1)),
            ("half-c-k11", sineprod.half_identities(11, "c", a=3)),
            ("half-d-k9", sineprod.half_identities(9, "d", m=4)),
            ("half-parity-k11-N15", sineprod.half_identities(11, "parity", N=15)),
        ]
        z = mp.mpc("0.3", "0.4")
        refl = abs(
            specfun.dilog(mp.exp(-2 * mp.pi * mp.mpc(0, 1) * z))
            + specfun.dilog(mp.exp(2 * mp.pi * mp.mpc(0, 1) * z))
            - 2 * mp.pi**2 * (z * z - z + mpf(1) / 6)
        )
        checks.append(("dilog-reflection", refl))
        for name, resid in checks:
            good = resid < tol
            ok &= good
            rows.append([name, "pass" if good else "FAIL", mp.nstr(resid, 5)])
    _emit(cfg, ["check", "status", "margin_or_residual"], rows, args.out)
    return 0 if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="partfrac", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zeros", help="dilogarithm zero w(A,B)")
    p.add_argument("A", type=int)
    p.add_argument("B", type=int)
    _common(p)
    p.set_defaults(fn=cmd_zeros)

    p = sub.add_parser("saddles", help="saddle point of p_d in strip m")
    p.add_argument("d", type=int)
    p.add_argument("m_strip", type=int, metavar="m")
    _common(p)
    p.set_defaults(fn=cmd_saddles)

    p = sub.add_parser("qcoeff", help="Q_{hk sigma}(N)")
    p.add_argument("h", type=int)
    p.add_argument("k", type=int)
    p.add_argument("Nval", type=int, metavar="N")
    p.add_argument("--method", default="auto", choices=["auto", "exact", "simple", "double", "contour"])
    _common(p)
    p.set_defaults(fn=cmd_qcoeff)

    p = sub.add_parser("ccoeff", help="Rademacher coefficient C_{hkl}(N)")
    p.add_argument("h", type=int)
    p.add_argument("k", type=int)
    p.add_argument("ell", type=int)
    p.add_argument("Nval", type=int, metavar="N")
    _common(p)
    p.set_defaults(fn=cmd_ccoeff)

    p = sub.add_parser("sums", help="direct Farey-subset sums")
    p.add_argument("kind", choices=[k.lower() for k in rademacher.SUBSET_KINDS])
    _common(p)
    p.set_defaults(fn=cmd_sums)

    p = sub.add_parser("table", help="reproduce asymptotic tables 1-4")
    p.add_argument("which", type=int, choices=[1, 2, 3, 4])
    _common(p)
    p.set_defaults(fn=cmd_table)

    p = sub.add_parser("figure", help="figure datasets (1: psi profile, 2: |Q| bound)")
    p.add_argument("which", type=int, choices=[1, 2])
    _common(p)
    p.set_defaults(fn=cmd_figure)

    p = sub.add_parser("bounds", help="xi-triples of the refined |Q| bound")
    p.add_argument("--K", type=int, action="append", default=None)
    _common(p)
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("sineprod", help="sine product and its Euler-Maclaurin form")
    p.add_argument("h", type=int)
    p.add_argument("k", type=int)
    p.add_argument("m_count", type=int, metavar="m")
    p.add_argument("--L", type=int, default=0, help="Euler-Maclaurin truncation")
    _common(p)
    p.set_defaults(fn=cmd_sineprod)

    p = sub.add_parser("verify", help="verification batteries")
    p.add_argument("what", choices=["paths", "zero-sum", "identities", "all"])
    p.add_argument("--samples", type=int, default=400)
    _common(p)
    p.set_defaults(fn=cmd_verify)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _settings(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    old_prec = mp.prec
    try:
        mp.prec = cfg["bits"]
        return args.fn(args, cfg)
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        mp.prec = old_prec


if __name__ == "__main__":
    sys.exit(main())
