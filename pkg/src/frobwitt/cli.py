"""Command line interface.

Exit codes: 0 all checks passed, 1 a verification failed, 2 bad usage or
input, 3 enumeration budget exceeded. JSON output carries ``"schema": 1``
and is byte-stable for identical arguments.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .errors import BudgetExceeded, FrobWittError, PolyParseError
from .ff import make_field
from .hassewitt import hw_matrix, katz_check, zeta_mod_p
from .modrep import (
    CyclicModule,
    build_periodic_complex,
    compute_L_Lprime,
    ext_dim,
    ext_dim_resolution,
    jordan_type,
    random_complex,
    random_module,
    tate_cohomology,
    verify_prop34_35,
)
from .mu import EllipticCurve, mu_elliptic, mu_sweep, projectivize
from .polyring import build_fp, evaluate, parse_poly, to_text
from .semilinear import fitting_parts, fixed_space, random_op, stable_order
from .variety import (
    CyclicAction,
    Hypersurface,
    cohomology_dims,
    count_points,
    sigma_fixed_points,
    smoothness_probe,
)

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def parse_field(text: str):
    parts = [s for s in text.split(",") if s.strip()]
    if not 1 <= len(parts) <= 2:
        raise UsageError(f"bad field spec {text!r}; expected p or p,f")
    try:
        p, f = int(parts[0]), int(parts[1]) if len(parts) == 2 else 1
    except ValueError as exc:
        raise UsageError(f"bad field spec {text!r}") from exc
    return make_field(p, f)


def parse_curve(text: str, ctx) -> EllipticCurve:
    vals = {}
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise UsageError(f"bad curve coefficient {item!r}; expected name=value")
        k, v = item.split("=", 1)
        k = k.strip()
        if k not in ("a", "b", "a2", "a4", "a6"):
            raise UsageError(f"unknown curve coefficient {k!r}")
        try:
            vals[k] = int(v)
        except ValueError as exc:
            raise UsageError(f"bad value for {k}: {v!r}") from exc
    a2 = vals.get("a2", 0)
    a4 = vals.get("a4", vals.get("a", 0))
    a6 = vals.get("a6", vals.get("b", 0))
    return EllipticCurve(ctx, a2, a4, a6)


def _source(args) -> Hypersurface:
    """Hypersurface from --poly / --fp / --curve."""
    given = [x for x in (args.poly, args.fp, args.curve) if x is not None]
    if len(given) != 1:
        raise UsageError("give exactly one of --poly, --fp, --curve")
    if args.fp is not None:
        f = build_fp(args.fp)
        if args.field is not None and parse_field(args.field) != f.ctx:
            raise UsageError("--fp p lives over GF(p); drop --field or make it match")
        return Hypersurface(f)
    if args.field is None:
        raise UsageError("--field is required with --poly or --curve")
    ctx = parse_field(args.field)
    if args.curve is not None:
        return projectivize(parse_curve(args.curve, ctx))
    try:
        return Hypersurface(parse_poly(args.poly, ctx, args.nvars))
    except ValueError as exc:
        if isinstance(exc, PolyParseError):
            raise
        raise UsageError(str(exc)) from exc


def _codes(ctx, cs):
    return [list(ctx.decode(int(c))) for c in cs]


def _upoly_text(ctx, cs) -> str:
    terms = []
    for i, c in enumerate(cs):
        c = int(c)
        if not c:
            continue
        coef = str(c) if ctx.f == 1 else "[" + ",".join(map(str, ctx.decode(c))) + "]"
        mono = "" if i == 0 else ("T" if i == 1 else f"T^{i}")
        terms.append(coef if not mono else (mono if c == 1 else f"{coef}*{mono}"))
    return " + ".join(terms) or "0"


# ---------------------------------------------------------------------------
# subcommands; each returns (report dict, passed)
# ---------------------------------------------------------------------------


def cmd_zeta(args):
    X = _source(args)
    z = zeta_mod_p(X)
    rep = {
        "variety": X.to_json(),
        "zeta0": _codes(X.ctx, z.zeta0),
        "zeta1": _codes(X.ctx, z.zeta1),
        "zeta0_text": _upoly_text(X.ctx, z.zeta0),
        "zeta1_text": _upoly_text(X.ctx, z.zeta1),
        "hw": z.hw.to_json()["A_q"],
        "hw_p": z.hw.to_json()["A_p"],
        "n": z.n,
    }
    return rep, True


def cmd_katz(args):
    X = _source(args)
    r = katz_check(X, args.emax, budget=args.budget)
    return {"variety": X.to_json(), **r.to_json()}, r.passed


def cmd_count(args):
    X = _source(args)
    es = [args.e] if args.e is not None else list(range(1, args.emax + 1))
    counts = [count_points(X, e, budget=args.budget).to_json() for e in es]
    return {"variety": X.to_json(), "counts": counts}, True


def cmd_smooth(args):
    X = _source(args)
    r = smoothness_probe(X, args.emax, budget=args.budget)
    return {"variety": X.to_json(), "smooth_probe": r.to_json(X), "singular_found": r.singular_found}, True


def cmd_fixed_points(args):
    X = _source(args)
    r = sigma_fixed_points(X, CyclicAction(X.N + 1), args.emax, budget=args.budget)
    return {"variety": X.to_json(), "fixed_points": r.to_json(X)}, True


def cmd_cohdims(args):
    X = _source(args)
    return {"variety": X.to_json(), "h": cohomology_dims(X)}, True


def cmd_modrep(args):
    ctx = make_field(args.p, args.f)
    wanted = set((args.report or "jordan,tate,ext,LLprime").split(","))
    rep, ok = {"p": args.p}, True
    if args.jordan:
        sizes = [int(s) for s in args.jordan.split(",") if s.strip()]
        M = CyclicModule.from_jordan(ctx, sizes)
        if "jordan" in wanted:
            rep["jordan"] = jordan_type(M)
        if "tate" in wanted:
            rep["tate"] = {str(i): tate_cohomology(M, i).dim for i in range(-2, 3)}
        if "ext" in wanted:
            e1 = {str(m): ext_dim(M, m) for m in range(1, args.m + 1)}
            e2 = {str(m): ext_dim_resolution(M, m) for m in range(1, args.m + 1)}
            rep["ext"] = e1
            rep["ext_resolution"] = e2
            ok &= e1 == e2
        if args.n is not None and "prop" in wanted:
            pr = verify_prop34_35(M, args.n)
            rep["prop"] = pr.to_json()
            ok &= pr.passed
    if args.n is not None and ("LLprime" in wanted or args.ll):
        Cx = build_periodic_complex(args.p, ctx, args.n)
        ll = compute_L_Lprime(Cx)
        rep["n"] = args.n
        rep["end_jordan"] = jordan_type(Cx.end)
        rep["L"] = ll.dim_L
        rep["Lprime"] = ll.dim_Lprime
        ok &= (ll.dim_L, ll.dim_Lprime) == (1, 1)
    if len(rep) == 1:
        raise UsageError("modrep needs --jordan and/or --n")
    return rep, ok


def cmd_mu(args):
    ctx = make_field(args.p, args.f)
    E = parse_curve(args.curve, ctx)
    r = mu_elliptic(E, m_cap=args.mcap, budget=args.budget)
    return {"report": r.to_json(), "notes": r.notes}, r.passed


def cmd_mu_sweep(args):
    s = mu_sweep(args.p, args.f, m_cap=args.mcap)
    return s.to_json(), s.passed


def cmd_verify_fp(args):
    p = args.p
    f = build_fp(p)
    X = Hypersurface(f)
    rep = {"p": p, "e_max": args.emax, "poly": to_text(f), "terms": len(f), "degree": f.degree}
    checks = {}
    rep["checks"] = checks
    checks["sigma_invariant"] = CyclicAction(p).preserves(f)
    checks["value_at_ones_is_1"] = evaluate(f, [1] * p).code == 1
    h = cohomology_dims(X)
    expected = [1] + [0] * (p - 3) + [1]
    rep["h"] = h
    checks["cohomology_profile"] = h == expected
    try:
        sm = smoothness_probe(X, args.emax, budget=args.budget)
        rep["smooth_probe"] = sm.to_json(X)
        checks["no_singular_point_found"] = not sm.singular_found
        fx = sigma_fixed_points(X, CyclicAction(p), args.emax, budget=args.budget)
        rep["fixed_points"] = fx.to_json(X)
        checks["ambient_fixed_is_ones"] = all(pts == [tuple([1] * p)] for pts in fx.ambient.values())
        checks["no_fixed_point_on_X"] = not fx.on_X
        kz = katz_check(X, args.emax, budget=args.budget)
        rep["katz"] = kz.to_json()
        checks["katz"] = kz.passed
    except BudgetExceeded:
        rep["partial"] = True
        raise _Partial(rep)
    rep["bounded"] = True
    return rep, all(checks.values())


class _Partial(Exception):
    def __init__(self, rep):
        super().__init__("budget exceeded")
        self.rep = rep


def _selftest(seed: int):
    rng = np.random.default_rng(seed)
    out = {}
    F9 = make_field(3, 2)
    t = F9.gen
    out["gf9_frobenius_t"] = t.frobenius(1).to_json()
    X3 = Hypersurface(build_fp(3))
    out["fp3_hw"] = int(hw_matrix(X3).A_q[0, 0])
    kz = katz_check(X3, 2)
    out["fp3_katz"] = [r.to_json(X3.ctx) for r in kz.rows]
    sw = mu_sweep(5)
    out["mu_sweep_5"] = {"curves": sw.total, "failures": len(sw.failures)}
    ops = []
    for _ in range(6):
        F = [make_field(3), make_field(3, 2), make_field(5)][int(rng.integers(0, 3))]
        r = int(rng.integers(1, 4))
        op = random_op(F, F, r, rng)
        Vs, Veta, nil = fitting_parts(op)
        o = stable_order(op, Vs)
        fs = fixed_space(op) if o is not None else None
        ops.append({
            "q": F.q,
            "r": r,
            "stable": int(Vs.shape[1]),
            "nil_index": nil,
            "order": o,
            "fixed": fs.dim if fs else None,
        })
    out["semilinear"] = ops
    ll = []
    for _ in range(4):
        p = [3, 5][int(rng.integers(0, 2))]
        n = int(rng.integers(1, 5))
        r = compute_L_Lprime(random_complex(p, make_field(p), n, rng))
        ll.append([p, n, r.dim_L, r.dim_Lprime])
    out["LLprime"] = ll
    mods = []
    for _ in range(6):
        M = random_module(make_field(3), rng)
        mods.append({"jordan": jordan_type(M), "ext": [ext_dim(M, m) for m in (1, 2)],
                     "ext_res": [ext_dim_resolution(M, m) for m in (1, 2)]})
    out["modules"] = mods
    passed = (
        out["gf9_frobenius_t"] == [0, 2]
        and out["fp3_hw"] == 1
        and kz.passed
        and sw.passed
        and all(o["fixed"] in (None, o["stable"]) for o in ops)
        and all(x[2:] == [1, 1] for x in ll)
        and all(m["ext"] == m["ext_res"] for m in mods)
    )
    return out, passed


def cmd_selftest(args):
    rep, ok = _selftest(args.seed)
    rep["seed"] = args.seed
    return rep, ok


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------


def _add_source(sp):
    sp.add_argument("--field", help="p or p,f")
    sp.add_argument("--poly", help="polynomial text, e.g. 'X0^3 + 2*X1*X2^2'")
    sp.add_argument("--nvars", type=int, help="number of variables (default: inferred)")
    sp.add_argument("--fp", type=int, help="use the cyclic-invariant degree-p polynomial in p variables")
    sp.add_argument("--curve", help="elliptic curve coefficients, e.g. a=1,b=0 or a2=1,a4=0,a6=2")


def _common(sp):
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=None, help="enumeration cap (env FROBWITT_BUDGET)")
    sp.add_argument("--mcap", type=int, default=64, help="largest extension multiple for fixed points")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frobwitt", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"frobwitt {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    for name, fn, extra in [
        ("zeta", cmd_zeta, None),
        ("katz", cmd_katz, "emax"),
        ("count", cmd_count, "count"),
        ("smooth", cmd_smooth, "emax"),
        ("fixed-points", cmd_fixed_points, "emax"),
        ("cohdims", cmd_cohdims, None),
    ]:
        sp = sub.add_parser(name)
        _add_source(sp)
        _common(sp)
        if extra in ("emax", "count"):
            sp.add_argument("--emax", type=int, default=1)
        if extra == "count":
            sp.add_argument("--e", type=int, default=None)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("modrep")
    _common(sp)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--f", type=int, default=1)
    sp.add_argument("--jordan", help="block sizes, e.g. 2,3")
    sp.add_argument("--n", type=int, help="length of the periodic complex / parity for the bookkeeping")
    sp.add_argument("--m", type=int, default=3, help="largest Ext degree to report")
    sp.add_argument("--report", help="comma list from jordan,tate,ext,LLprime,prop")
    sp.add_argument("--ll", action="store_true", help="compute L and L' for the periodic complex")
    sp.set_defaults(func=cmd_modrep)

    sp = sub.add_parser("mu")
    _common(sp)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--f", type=int, default=1)
    sp.add_argument("--curve", required=True)
    sp.set_defaults(func=cmd_mu)

    sp = sub.add_parser("mu-sweep")
    _common(sp)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--f", type=int, default=1)
    sp.set_defaults(func=cmd_mu_sweep)

    sp = sub.add_parser("verify-fp")
    _common(sp)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--emax", type=int, default=1)
    sp.set_defaults(func=cmd_verify_fp)

    sp = sub.add_parser("selftest")
    _common(sp)
    sp.set_defaults(func=cmd_selftest)
    return ap


def _text(obj, prefix="") -> list[str]:
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            lines.extend(_text(obj[k], f"{prefix}{k}." if isinstance(obj[k], (dict, list)) else f"{prefix}{k}"))
    elif isinstance(obj, list) and obj and isinstance(obj[0], dict):
        for i, x in enumerate(obj):
            lines.extend(_text(x, f"{prefix}{i}."))
    else:
        lines.append(f"{prefix.rstrip('.')}: {json.dumps(obj)}")
    return lines


def emit(rep: dict, fmt: str, stream=None):
    stream = stream or sys.stdout
    if fmt == "text":
        stream.write("\n".join(_text(rep)) + "\n")
    else:
        stream.write(json.dumps(rep, sort_keys=True, indent=2) + "\n")


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    fmt = getattr(args, "format", "json")
    try:
        rep, ok = args.func(args)
    except _Partial as exc:
        rep = {"schema": SCHEMA, "command": args.cmd, **exc.rep, "error": "budget exceeded"}
        emit(rep, fmt)
        return EXIT_BUDGET
    except BudgetExceeded as exc:
        emit({"schema": SCHEMA, "command": args.cmd, "error": str(exc), "required": exc.required,
              "budget": exc.budget}, fmt)
        return EXIT_BUDGET
    except (UsageError, ValueError) as exc:
        print(f"frobwitt {args.cmd}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FrobWittError, AssertionError) as exc:
        print(f"frobwitt {args.cmd}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    rep = {"schema": SCHEMA, "command": args.cmd, **rep, "pass": bool(ok)}
    emit(rep, fmt)
    return EXIT_OK if ok else EXIT_FAIL


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
