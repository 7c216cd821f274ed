"""Elliptic curves y^2 = x^3 + a2 x^2 + a4 x + a6 over GF(q), p odd.

The Hasse invariant, the Frobenius trace from point counting, the mod-p
zeta factor of the projective cubic and the etale H^1 dimension (fixed
points of the semilinear Frobenius on H^1(O)) are computed independently
and cross-checked in ``mu_elliptic``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadPrime, BudgetExceeded, CapExceeded, Singular
from .ff import FieldCtx, FieldElem, make_field
from .hassewitt import hw_matrix, poly_eval, zeta_mod_p
from .polyring import MultiPoly
from .semilinear import DEFAULT_M_CAP, SemilinearOp, fixed_space
from .variety import Hypersurface, current_budget


class EllipticCurve:
    """y^2 = x^3 + a2*x^2 + a4*x + a6; the short form has a2 = 0."""

    def __init__(self, ctx: FieldCtx, a2=0, a4=0, a6=0):
        if ctx.p == 2:
            raise BadPrime("characteristic 2 is not supported")
        self.ctx = ctx
        self.a2, self.a4, self.a6 = ctx(a2), ctx(a4), ctx(a6)
        if not self.discriminant():
            raise Singular(f"curve {self} is singular")

    @classmethod
    def short(cls, ctx: FieldCtx, a, b):
        return cls(ctx, 0, a, b)

    @property
    def g(self) -> list[int]:
        """Codes of g(x) = x^3 + a2 x^2 + a4 x + a6, low degree first."""
        return [self.a6.code, self.a4.code, self.a2.code, 1]

    def discriminant(self) -> FieldElem:
        a2, a4, a6 = self.a2, self.a4, self.a6
        b2, b4, b6 = 4 * a2, 2 * a4, 4 * a6
        b8 = 4 * a2 * a6 - a4 * a4
        return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def __repr__(self):
        return f"y^2 = x^3 + {self.a2!r}x^2 + {self.a4!r}x + {self.a6!r} over {self.ctx!r}"

    def to_json(self):
        return {
            "field": self.ctx.to_json(),
            "a2": self.a2.to_json(),
            "a4": self.a4.to_json(),
            "a6": self.a6.to_json(),
        }


def _upoly_pow(ctx: FieldCtx, a: list[int], e: int) -> list[int]:
    out = [1]
    for _ in range(e):
        nxt = [0] * (len(out) + len(a) - 1)
        for i, x in enumerate(out):
            if x:
                for j, y in enumerate(a):
                    nxt[i + j] = ctx.add(nxt[i + j], ctx.mul(x, y))
        out = nxt
    return out


def hasse_invariant_p(E: EllipticCurve) -> FieldElem:
    """Coefficient of x^(p-1) in g(x)^((p-1)/2): the p-power Frobenius entry."""
    ctx = E.ctx
    h = _upoly_pow(ctx, E.g, (ctx.p - 1) // 2)
    return FieldElem(ctx, h[ctx.p - 1])


def hasse_invariant(E: EllipticCurve) -> FieldElem:
    """q-power Hasse invariant c * c^p * ... * c^(p^(f-1))."""
    c = hasse_invariant_p(E)
    out = E.ctx.one
    for j in range(E.ctx.f):
        out = out * c.frobenius(j)
    return out


def count_affine(E: EllipticCurve) -> int:
    ctx = E.ctx
    nsq = np.zeros(ctx.q, dtype=np.int64)
    for y in range(ctx.q):
        nsq[ctx.mul(y, y)] += 1
    return int(sum(nsq[poly_eval(ctx, E.g, x)] for x in range(ctx.q)))


def count_points(E: EllipticCurve, budget: int | None = None) -> int:
    """#E(GF(q)) including the point at infinity."""
    q = E.ctx.q
    b = current_budget(budget)
    if 2 * q > b:
        raise BudgetExceeded(2 * q, b)
    return count_affine(E) + 1


def trace_of_frobenius(E: EllipticCurve, budget: int | None = None) -> int:
    q = E.ctx.q
    a = q + 1 - count_points(E, budget)
    assert a * a <= 4 * q, f"Weil bound violated: a = {a}, q = {q}"
    return a


def projectivize(E: EllipticCurve) -> Hypersurface:
    """X1^2*X2 - (X0^3 + a2 X0^2 X2 + a4 X0 X2^2 + a6 X2^3) with (x, y, z) = (X0, X1, X2)."""
    ctx = E.ctx
    terms = {
        (0, 2, 1): ctx.one,
        (3, 0, 0): -ctx.one,
        (2, 0, 1): -E.a2,
        (1, 0, 2): -E.a4,
        (0, 0, 3): -E.a6,
    }
    return Hypersurface(MultiPoly.from_terms(ctx, 3, terms))


def etale_h1_dim(E: EllipticCurve, m_cap: int = DEFAULT_M_CAP, hw=None) -> int:
    """GF(q)-dimension of the Frobenius-fixed part of H^1(E, O_E)."""
    hw = hw or hw_matrix(projectivize(E))
    op = SemilinearOp(E.ctx, E.ctx, hw.A_q)
    fs = fixed_space(op, m_cap=m_cap, raise_on_cap=True)
    return fs.dim


@dataclass
class MuReport:
    curve: EllipticCurve
    c_p: FieldElem
    hw_entry: FieldElem
    a_trace: int
    count: int
    ordinary: bool
    mu: FieldElem | None
    deuring_ok: bool
    zeta1: list
    zeta1_zero_check: bool
    etale_h1_dim: int
    notes: list = field(default_factory=list)

    @property
    def inapplicable(self) -> bool:
        return not self.ordinary

    @property
    def passed(self) -> bool:
        three_way = self.ordinary == (self.etale_h1_dim == 1) == (self.zeta1 != [1])
        return (
            self.deuring_ok
            and self.zeta1_zero_check
            and three_way
            and self.hw_entry == self.c_p
            and (self.ordinary or self.etale_h1_dim == 0)
        )

    def to_json(self):
        ctx = self.curve.ctx
        return {
            "curve": self.curve.to_json(),
            "c_p": self.c_p.to_json(),
            "hw_entry": self.hw_entry.to_json(),
            "a_q": self.a_trace,
            "count": self.count,
            "ordinary": self.ordinary,
            "mu": self.mu.to_json() if self.mu is not None else None,
            "inapplicable": "supersingular" if self.inapplicable else None,
            "deuring_ok": self.deuring_ok,
            "zeta1": [list(ctx.decode(c)) for c in self.zeta1],
            "zeta1_zero_check": self.zeta1_zero_check,
            "etale_h1_dim": self.etale_h1_dim,
            "pass": self.passed,
        }


def mu_elliptic(E: EllipticCurve, m_cap: int = DEFAULT_M_CAP, budget: int | None = None) -> MuReport:
    ctx = E.ctx
    c = hasse_invariant(E)
    X = projectivize(E)
    z = zeta_mod_p(X)
    hw = z.hw
    hw_entry = FieldElem(ctx, int(hw.A_q[0, 0]))
    count = count_points(E, budget)
    a = ctx.q + 1 - count
    assert a * a <= 4 * ctx.q
    ordinary = bool(c)
    deuring = ctx.in_prime_field(c.code) and c.code == a % ctx.p
    notes = []
    if ordinary:
        mu = c
        zero_ok = z.value(1, mu.inverse()).code == 0
    else:
        mu = None
        zero_ok = z.zeta1 == [1]
        notes.append("supersingular: no etale Z/p-cover, the invariant is not defined")
    try:
        h1 = etale_h1_dim(E, m_cap, hw)
    except CapExceeded as exc:  # pragma: no cover - needs huge order
        h1 = exc.partial.dim
        notes.append(str(exc))
    return MuReport(E, c, hw_entry, a, count, ordinary, mu, deuring, list(z.zeta1), zero_ok, h1, notes)


@dataclass
class SweepReport:
    p: int
    f: int
    rows: list

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def failures(self) -> list:
        return [r for r in self.rows if not r.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self):
        return {
            "p": self.p,
            "f": self.f,
            "curves": self.total,
            "ordinary": sum(r.ordinary for r in self.rows),
            "supersingular": sum(not r.ordinary for r in self.rows),
            "failures": [r.to_json() for r in self.failures],
            "pass": self.passed,
        }


def all_curves(ctx: FieldCtx):
    """Every nonsingular model: short form for p >= 5, (a2, a4, a6) for p = 3."""
    q = ctx.q
    if ctx.p >= 5:
        for a in range(q):
            for b in range(q):
                try:
                    yield EllipticCurve(ctx, 0, FieldElem(ctx, a), FieldElem(ctx, b))
                except Singular:
                    pass
    else:
        for a2 in range(q):
            for a4 in range(q):
                for a6 in range(q):
                    try:
                        yield EllipticCurve(ctx, FieldElem(ctx, a2), FieldElem(ctx, a4), FieldElem(ctx, a6))
                    except Singular:
                        pass


def mu_sweep(p: int, f: int = 1, m_cap: int = DEFAULT_M_CAP) -> SweepReport:
    ctx = make_field(p, f)
    return SweepReport(p, f, [mu_elliptic(E, m_cap) for E in all_curves(ctx)])
