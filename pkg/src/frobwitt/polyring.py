"""Sparse multivariate polynomials over a FieldCtx.

A polynomial is a pair of arrays: ``exps`` (terms x nvars, nonnegative) and
``coeffs`` (element codes, never zero), kept in descending lexicographic
order of exponent vectors. Products pack exponent vectors into mixed-radix
integer keys, form all pairwise products at once and merge equal keys with a
compiled group-sum kernel.
"""

from __future__ import annotations

import json
import re

import numpy as np

from . import _kernels
from .errors import BadPrime, ContextMismatch, ExponentOverflow, PolyParseError
from .ff import FieldCtx, FieldElem, TowerEmbedding, make_field

EXP_LIMIT = 1 << 16


class MultiPoly:
    """Immutable sparse polynomial in ``nvars`` variables X0..X(nvars-1)."""

    __slots__ = ("ctx", "nvars", "exps", "coeffs")

    def __init__(self, ctx: FieldCtx, nvars: int, exps, coeffs, *, _canonical=False):
        self.ctx = ctx
        self.nvars = int(nvars)
        exps = np.asarray(exps, dtype=np.int64).reshape(-1, self.nvars)
        coeffs = np.asarray(coeffs, dtype=np.int64 if ctx.q < (1 << 62) else object).reshape(-1)
        if exps.shape[0] != coeffs.shape[0]:
            raise ValueError("exponent and coefficient counts differ")
        if exps.size and (exps.min() < 0):
            raise ValueError("negative exponent")
        if exps.size and exps.max() >= EXP_LIMIT:
            raise ExponentOverflow(f"exponent {int(exps.max())} exceeds {EXP_LIMIT - 1}")
        if not _canonical:
            exps, coeffs = _canonicalize(ctx, exps, coeffs)
        self.exps = exps
        self.coeffs = coeffs
        self.exps.setflags(write=False)
        self.coeffs.setflags(write=False)

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, ctx, nvars):
        return cls(ctx, nvars, np.zeros((0, nvars), dtype=np.int64), [], _canonical=True)

    @classmethod
    def constant(cls, ctx, nvars, c=1):
        code = ctx(c).code
        if code == 0:
            return cls.zero(ctx, nvars)
        return cls(ctx, nvars, np.zeros((1, nvars), dtype=np.int64), [code], _canonical=True)

    @classmethod
    def monomial(cls, ctx, nvars, exp, c=1):
        return cls(ctx, nvars, [list(exp)], [ctx(c).code])

    @classmethod
    def from_terms(cls, ctx, nvars, terms):
        """From a mapping or iterable of (exponent vector, coefficient)."""
        items = terms.items() if isinstance(terms, dict) else terms
        exps, coeffs = [], []
        for e, c in items:
            if len(e) != nvars:
                raise ValueError(f"exponent vector {tuple(e)} has wrong length")
            exps.append(list(e))
            coeffs.append(ctx(c).code)
        return cls(ctx, nvars, np.array(exps, dtype=np.int64).reshape(-1, nvars), coeffs)

    # -- views ------------------------------------------------------------

    @property
    def terms(self) -> dict:
        return {
            tuple(int(x) for x in e): FieldElem(self.ctx, int(c)) for e, c in zip(self.exps, self.coeffs)
        }

    def __len__(self):
        return int(self.coeffs.shape[0])

    def is_zero(self):
        return len(self) == 0

    @property
    def degree(self) -> int:
        return int(self.exps.sum(axis=1).max()) if len(self) else -1

    def is_homogeneous(self, d=None) -> bool:
        if not len(self):
            return d is None
        tot = self.exps.sum(axis=1)
        target = tot[0] if d is None else d
        return bool(np.all(tot == target))

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (
            self.ctx == other.ctx
            and self.nvars == other.nvars
            and np.array_equal(self.exps, other.exps)
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((self.ctx, self.nvars, self.exps.tobytes(), tuple(int(c) for c in self.coeffs)))

    def _check(self, other):
        if not isinstance(other, MultiPoly):
            raise TypeError("expected MultiPoly")
        if other.ctx != self.ctx or other.nvars != self.nvars:
            raise ContextMismatch(f"{self.ctx!r}[{self.nvars}] vs {other.ctx!r}[{other.nvars}]")

    def _lift(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(self.ctx, self.nvars, other)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = self._lift(other)
        return MultiPoly(
            self.ctx,
            self.nvars,
            np.concatenate([self.exps, other.exps]),
            np.concatenate([self.coeffs, other.coeffs]),
        )

    __radd__ = __add__

    def __neg__(self):
        ctx = self.ctx
        return MultiPoly(ctx, self.nvars, self.exps, [ctx.neg(int(c)) for c in self.coeffs], _canonical=True)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        return poly_mul(self, self._lift(other))

    __rmul__ = __mul__

    def __pow__(self, e):
        return poly_pow(self, e)

    def __repr__(self):
        return f"MultiPoly({to_text(self)!r} over {self.ctx!r})"

    def __str__(self):
        return to_text(self)


def _canonicalize(ctx: FieldCtx, exps, coeffs):
    """Merge equal exponent vectors, drop zeros, sort descending lex."""
    if exps.shape[0] == 0:
        return exps.copy(), np.asarray(coeffs).copy()
    keys, radix = _pack(exps)
    if keys is None:
        acc = {}
        for e, c in zip(map(tuple, exps.tolist()), coeffs):
            acc[e] = ctx.add(acc.get(e, 0), int(c))
        items = sorted(((e, c) for e, c in acc.items() if c), reverse=True)
        n = exps.shape[1]
        return (
            np.array([e for e, _ in items], dtype=np.int64).reshape(-1, n),
            np.array([c for _, c in items], dtype=coeffs.dtype),
        )
    uk, uv = _group_sum(ctx, keys, np.asarray(coeffs))
    order = np.argsort(-uk, kind="stable") if uk.size else uk
    uk, uv = uk[order], uv[order]
    return _unpack(uk, radix), uv


def _pack(exps, radix=None):
    """Mixed-radix keys with variable 0 most significant, or (None, None) if too wide."""
    n = exps.shape[1]
    if radix is None:
        radix = exps.max(axis=0) + 1 if exps.size else np.ones(n, dtype=np.int64)
    total = 1
    for r in radix:
        total *= int(r)
    if total >= (1 << 62):
        return None, None
    strides = np.ones(n, dtype=np.int64)
    for i in range(n - 2, -1, -1):
        strides[i] = strides[i + 1] * radix[i + 1]
    return exps @ strides, np.asarray(radix, dtype=np.int64)


def _unpack(keys, radix):
    n = radix.shape[0]
    out = np.zeros((keys.shape[0], n), dtype=np.int64)
    k = keys.copy()
    for i in range(n - 1, -1, -1):
        out[:, i] = k % radix[i]
        k //= radix[i]
    return out


def _group_sum(ctx: FieldCtx, keys, vals):
    if ctx.f == 1 and ctx.p < (1 << 31):
        return _kernels.group_sum_prime(np.ascontiguousarray(keys), np.ascontiguousarray(vals, dtype=np.int64), ctx.p)
    if ctx.tabled:
        t = ctx.tables
        return _kernels.group_sum_table(
            np.ascontiguousarray(keys), np.ascontiguousarray(vals, dtype=np.int64), t.add, t.digits, ctx.p
        )
    acc = {}
    for k, v in zip(keys.tolist(), vals):
        acc[k] = ctx.add(acc.get(k, 0), int(v))
    ks = sorted(k for k, v in acc.items() if v)
    return np.array(ks, dtype=np.int64), np.array([acc[k] for k in ks], dtype=vals.dtype)


def _outer_mul(ctx: FieldCtx, a, b):
    if ctx.f == 1 and ctx.p < (1 << 31):
        return (a[:, None] * b[None, :] % ctx.p).reshape(-1)
    if ctx.tabled:
        return ctx.tables.mul[a[:, None], b[None, :]].reshape(-1)
    return np.array([ctx.mul(int(x), int(y)) for x in a for y in b], dtype=a.dtype)


_PAIR_CHUNK = 1 << 22


def poly_mul(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    a._check(b)
    ctx, n = a.ctx, a.nvars
    if not len(a) or not len(b):
        return MultiPoly.zero(ctx, n)
    radix = a.exps.max(axis=0) + b.exps.max(axis=0) + 1
    ka, radix = _pack(a.exps, radix)
    if ka is None:
        return _poly_mul_dict(a, b)
    kb, _ = _pack(b.exps, radix)
    # chunk rows of a so the pairwise arrays stay bounded
    step = max(1, _PAIR_CHUNK // len(b))
    keys_parts, vals_parts = [], []
    for s in range(0, len(a), step):
        keys = (ka[s : s + step, None] + kb[None, :]).reshape(-1)
        vals = _outer_mul(ctx, a.coeffs[s : s + step], b.coeffs)
        uk, uv = _group_sum(ctx, keys, vals)
        keys_parts.append(uk)
        vals_parts.append(uv)
    if len(keys_parts) > 1:
        uk, uv = _group_sum(ctx, np.concatenate(keys_parts), np.concatenate(vals_parts))
    else:
        uk, uv = keys_parts[0], vals_parts[0]
    order = np.argsort(-uk, kind="stable")
    return MultiPoly(ctx, n, _unpack(uk[order], radix), uv[order], _canonical=True)


def _poly_mul_dict(a, b):
    ctx = a.ctx
    acc = {}
    for ea, ca in zip(a.exps.tolist(), a.coeffs):
        for eb, cb in zip(b.exps.tolist(), b.coeffs):
            e = tuple(x + y for x, y in zip(ea, eb))
            acc[e] = ctx.add(acc.get(e, 0), ctx.mul(int(ca), int(cb)))
    return MultiPoly.from_terms(ctx, a.nvars, {e: FieldElem(ctx, c) for e, c in acc.items()})


def frob_twist(a: MultiPoly, j: int = 1) -> MultiPoly:
    """a^(p^j) via exponent scaling and coefficient Frobenius."""
    if j == 0:
        return a
    ctx = a.ctx
    scale = ctx.p**j
    if len(a) and int(a.exps.max()) * scale >= EXP_LIMIT:
        raise ExponentOverflow(f"exponent {int(a.exps.max()) * scale} exceeds {EXP_LIMIT - 1}")
    coeffs = [ctx.frob(int(c), j) for c in a.coeffs]
    return MultiPoly(ctx, a.nvars, a.exps * scale, coeffs, _canonical=True)


def _pow_small(a: MultiPoly, e: int) -> MultiPoly:
    result = None
    base = a
    while e:
        if e & 1:
            result = base if result is None else poly_mul(result, base)
        e >>= 1
        if e:
            base = poly_mul(base, base)
    return result if result is not None else MultiPoly.constant(a.ctx, a.nvars, 1)


def poly_pow(a: MultiPoly, e: int) -> MultiPoly:
    """a^e using the base-p digits of e and the Frobenius shortcut for each digit."""
    e = int(e)
    if e < 0:
        raise ValueError("negative exponent")
    if e == 0:
        return MultiPoly.constant(a.ctx, a.nvars, 1)
    p = a.ctx.p
    result = None
    j = 0
    while e:
        e, d = divmod(e, p)
        if d:
            factor = frob_twist(_pow_small(a, d), j)
            result = factor if result is None else poly_mul(result, factor)
        j += 1
    return result


def coeff(a: MultiPoly, expvec) -> FieldElem:
    expvec = tuple(int(x) for x in expvec)
    if len(expvec) != a.nvars:
        raise ValueError(f"exponent vector of length {len(expvec)} for {a.nvars} variables")
    if len(a):
        hit = np.nonzero(np.all(a.exps == np.array(expvec, dtype=np.int64), axis=1))[0]
        if hit.size:
            return FieldElem(a.ctx, int(a.coeffs[hit[0]]))
    return a.ctx.zero


def partial_derivative(a: MultiPoly, i: int) -> MultiPoly:
    if not 0 <= i < a.nvars:
        raise IndexError(f"variable index {i} out of range")
    ctx = a.ctx
    keep = a.exps[:, i] % ctx.p != 0
    exps = a.exps[keep].copy()
    coeffs = [ctx.mul(int(c), int(e) % ctx.p) for c, e in zip(a.coeffs[keep], exps[:, i])]
    exps[:, i] -= 1
    return MultiPoly(ctx, a.nvars, exps, coeffs)


def change_ring(a: MultiPoly, emb: TowerEmbedding) -> MultiPoly:
    """Push coefficients through a field embedding."""
    if emb.sub != a.ctx:
        raise ContextMismatch(f"polynomial over {a.ctx!r}, embedding from {emb.sub!r}")
    coeffs = [emb.map_code(int(c)) for c in a.coeffs]
    return MultiPoly(emb.sup, a.nvars, a.exps, coeffs, _canonical=True)


def rotate(a: MultiPoly, shift: int = 1) -> MultiPoly:
    """Substitute X_i -> X_(i+shift), i.e. evaluate at the cyclically shifted point."""
    return MultiPoly(a.ctx, a.nvars, np.roll(a.exps, shift, axis=1), a.coeffs)


def evaluate(a: MultiPoly, point, emb: TowerEmbedding | None = None) -> FieldElem:
    """Value of ``a`` at ``point`` (in the extension when ``emb`` is given)."""
    if len(point) != a.nvars:
        raise ValueError(f"point of length {len(point)} for {a.nvars} variables")
    target = emb.sup if emb is not None else a.ctx
    if emb is not None and emb.sub != a.ctx:
        raise ContextMismatch(f"polynomial over {a.ctx!r}, embedding from {emb.sub!r}")
    xs = [target(x).code for x in point]
    total = 0
    for e, c in zip(a.exps.tolist(), a.coeffs):
        v = emb.map_code(int(c)) if emb is not None else int(c)
        for xi, ei in zip(xs, e):
            if ei:
                v = target.mul(v, target.pow(xi, ei))
                if not v:
                    break
        total = target.add(total, v)
    return FieldElem(target, total)


def evaluate_many(a: MultiPoly, points: np.ndarray, emb: TowerEmbedding | None = None) -> np.ndarray:
    """Vectorised evaluation at many points given as a (npts, nvars) code array."""
    target = emb.sup if emb is not None else a.ctx
    points = np.ascontiguousarray(points, dtype=np.int64)
    coeffs = a.coeffs if emb is None else np.array([emb.map_code(int(c)) for c in a.coeffs], dtype=np.int64)
    if not len(a):
        return np.zeros(points.shape[0], dtype=np.int64)
    if target.tabled:
        t = target.tables
        maxe = int(a.exps.max())
        return _kernels.eval_points(
            points,
            np.ascontiguousarray(a.exps),
            np.ascontiguousarray(coeffs, dtype=np.int64),
            t.add,
            t.mul,
            target.powtab(maxe),
        )
    out = np.zeros(points.shape[0], dtype=np.int64)
    for n, pt in enumerate(points):
        out[n] = evaluate(a, [FieldElem(target, int(x)) for x in pt], emb).code
    return out


def variables(ctx: FieldCtx, nvars: int) -> list[MultiPoly]:
    return [MultiPoly.monomial(ctx, nvars, [int(i == j) for j in range(nvars)]) for i in range(nvars)]


def build_fp(p: int) -> MultiPoly:
    """X0*X1*...*X(p-1) + sum_i X_i^(p-1) * X_(i+1), indices mod p, over GF(p)."""
    if p == 2:
        raise BadPrime("the construction needs an odd prime")
    ctx = make_field(p, 1)
    exps = [[1] * p]
    for i in range(p):
        e = [0] * p
        e[i] = p - 1
        e[(i + 1) % p] += 1
        exps.append(e)
    return MultiPoly(ctx, p, exps, [1] * (p + 1))


# ---------------------------------------------------------------------------
# text and JSON
# ---------------------------------------------------------------------------

_TERM_SPLIT = re.compile(r"([+-])")
_VAR = re.compile(r"^[Xx](\d+)(?:\^(\d+))?$")
_INT = re.compile(r"^\d+$")
_VEC = re.compile(r"^\[\s*\d+(?:\s*,\s*\d+)*\s*\]$")


def _coeff_text(ctx: FieldCtx, code: int) -> str:
    if ctx.f == 1:
        return str(code)
    return "[" + ",".join(str(c) for c in ctx.decode(code)) + "]"


def to_text(a: MultiPoly) -> str:
    if not len(a):
        return "0"
    out = []
    for e, c in zip(a.exps.tolist(), a.coeffs):
        factors = []
        if int(c) != 1 or not any(e):
            factors.append(_coeff_text(a.ctx, int(c)))
        for i, k in enumerate(e):
            if k == 1:
                factors.append(f"X{i}")
            elif k > 1:
                factors.append(f"X{i}^{k}")
        out.append("*".join(factors))
    return " + ".join(out)


def parse_poly(text: str, ctx: FieldCtx, nvars: int | None = None) -> MultiPoly:
    """Parse ``c*X0^e0*X1^e1 + ...``; coefficients are integers or ``[c0,c1,..]``.

    A leading '-' or a '-' between terms negates the following term.
    """
    src = re.sub(r"\s+", "", text or "")
    if not src:
        raise PolyParseError("empty polynomial")
    pieces = _TERM_SPLIT.split(src)
    terms = []
    sign, pending = 1, False
    for tok in pieces:
        if tok in ("+", "-"):
            if pending:
                raise PolyParseError("two operators in a row")
            sign, pending = (-1 if tok == "-" else 1), True
            continue
        if tok == "":
            continue
        pending = False
        c, exp = ctx.one, {}
        for fac in tok.split("*"):
            m = _VAR.match(fac)
            if m:
                i = int(m.group(1))
                exp[i] = exp.get(i, 0) + int(m.group(2) or 1)
            elif _INT.match(fac):
                c = c * int(fac)
            elif _VEC.match(fac):
                digits = [int(x) for x in fac[1:-1].split(",")]
                if len(digits) > ctx.f:
                    raise PolyParseError(f"coefficient {fac} has more than {ctx.f} coordinates")
                c = c * ctx(digits)
            else:
                raise PolyParseError(f"cannot parse factor {fac!r}")
        terms.append((exp, c if sign > 0 else -c))
        sign = 1
    if pending or not terms:
        raise PolyParseError("polynomial ends with an operator")
    top = max((max(e) for e, _ in terms if e), default=-1) + 1
    if nvars is None:
        nvars = max(top, 1)
    elif top > nvars:
        raise PolyParseError(f"variable X{top - 1} used with only {nvars} variables")
    exps = np.zeros((len(terms), nvars), dtype=np.int64)
    for r, (e, _) in enumerate(terms):
        for i, k in e.items():
            exps[r, i] = k
    try:
        return MultiPoly(ctx, nvars, exps, [c.code for _, c in terms])
    except ExponentOverflow as exc:
        raise PolyParseError(str(exc)) from exc


def to_json(a: MultiPoly) -> dict:
    return {
        "nvars": a.nvars,
        "terms": [
            {"exp": [int(x) for x in e], "coeff": list(a.ctx.decode(int(c)))} for e, c in zip(a.exps, a.coeffs)
        ],
    }


def from_json(obj, ctx: FieldCtx) -> MultiPoly:
    if isinstance(obj, str):
        obj = json.loads(obj)
    n = int(obj["nvars"])
    terms = []
    for t in obj["terms"]:
        c = t["coeff"]
        terms.append((t["exp"], ctx(c if isinstance(c, list) else int(c))))
    return MultiPoly.from_terms(ctx, n, terms)


def monomials(nvars: int, d: int):
    """All exponent vectors of total degree d, descending lex."""
    if nvars == 0:
        if d == 0:
            yield ()
        return
    for first in range(d, -1, -1):
        for rest in monomials(nvars - 1, d - first):
            yield (first, *rest)


def random_poly(ctx: FieldCtx, nvars: int, d: int, rng, density: float = 1.0) -> MultiPoly:
    """Random homogeneous polynomial of degree d (each monomial kept with prob. density)."""
    exps, coeffs = [], []
    for e in monomials(nvars, d):
        if density >= 1.0 or rng.random() < density:
            exps.append(e)
            coeffs.append(int(rng.integers(0, ctx.q)))
    return MultiPoly(ctx, nvars, np.array(exps, dtype=np.int64).reshape(-1, nvars), coeffs)

