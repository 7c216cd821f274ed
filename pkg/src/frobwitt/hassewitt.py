"""Frobenius on the top cohomology H^(N-1)(X, O_X) of a hypersurface X in P^N.

Basis: monomials X^w with every w_i >= 1 and |w| = d. Matrices act on
column vectors: column w holds the image of the basis vector w, so

    A_p[u][w] = coeff of X^(p*w - u) in f^(p-1).

With this convention the q-power matrix of GF(q), q = p^f, is the twisted
product A_p * A_p^[p] * ... * A_p^[p^(f-1)], and agrees with the direct rule
coeff(f^(q-1), q*w - u).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import UnsupportedCohomologyProfile
from .ff import FieldCtx, FieldElem, make_field
from .polyring import poly_pow
from .semilinear import SemilinearOp, twisted_power
from .variety import Hypersurface, cohomology_dims, count_points, current_budget


@dataclass(frozen=True)
class HWBasis:
    monomials: tuple

    def __len__(self):
        return len(self.monomials)

    def index(self, w) -> int:
        return self.monomials.index(tuple(w))


def _compositions(n: int, k: int):
    """Compositions of n into k positive parts, descending lex."""
    if k == 1:
        if n >= 1:
            yield (n,)
        return
    for first in range(n - k + 1, 0, -1):
        for rest in _compositions(n - first, k - 1):
            yield (first, *rest)


def hw_basis(d: int, N: int) -> HWBasis:
    if d < 1:
        raise ValueError("degree must be >= 1")
    return HWBasis(tuple(_compositions(d, N + 1)))


def _extract(ctx: FieldCtx, g, basis: HWBasis, power: int) -> np.ndarray:
    terms = {tuple(int(x) for x in e): int(c) for e, c in zip(g.exps, g.coeffs)}
    n = len(basis)
    A = np.zeros((n, n), dtype=np.int64)
    for i, u in enumerate(basis.monomials):
        for j, w in enumerate(basis.monomials):
            A[i, j] = terms.get(tuple(power * wk - uk for wk, uk in zip(w, u)), 0)
    return A


@dataclass
class HWMatrix:
    ctx: FieldCtx
    basis: HWBasis
    A_p: np.ndarray
    A_q: np.ndarray

    def entry(self, i=0, j=0) -> FieldElem:
        return FieldElem(self.ctx, int(self.A_q[i, j]))

    def to_json(self):
        def js(M):
            return [[list(self.ctx.decode(int(c))) for c in row] for row in M]

        return {"basis": [list(w) for w in self.basis.monomials], "A_p": js(self.A_p), "A_q": js(self.A_q)}


def hw_matrix(X: Hypersurface) -> HWMatrix:
    """p-power matrix from f^(p-1); q-power matrix as its f-fold twisted product."""
    ctx = X.ctx
    basis = hw_basis(X.d, X.N)
    g = poly_pow(X.f, ctx.p - 1)
    A_p = _extract(ctx, g, basis, ctx.p)
    if ctx.f == 1 or len(basis) == 0:
        A_q = A_p.copy()
    else:
        A_q = twisted_power(SemilinearOp(ctx, make_field(ctx.p, 1), A_p), ctx.f)
    return HWMatrix(ctx, basis, A_p, A_q)


def hw_matrix_direct(X: Hypersurface) -> np.ndarray:
    """q-power matrix straight from the coefficients of f^(q-1)."""
    ctx = X.ctx
    basis = hw_basis(X.d, X.N)
    return _extract(ctx, poly_pow(X.f, ctx.q - 1), basis, ctx.q)


# ---------------------------------------------------------------------------
# zeta mod p
# ---------------------------------------------------------------------------


def _pmul(ctx, a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = ctx.add(out[i + j], ctx.mul(x, y))
    return out


def poly_eval(ctx: FieldCtx, coeffs, t: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = ctx.add(ctx.mul(acc, t), int(c))
    return acc


@dataclass
class ZetaModP:
    ctx: FieldCtx
    zeta0: list  # codes, low degree first
    zeta1: list
    hw: HWMatrix
    n: int

    def value(self, which: int, t) -> FieldElem:
        coeffs = self.zeta0 if which == 0 else self.zeta1
        return FieldElem(self.ctx, poly_eval(self.ctx, coeffs, self.ctx(t).code))

    def to_json(self):
        def js(cs):
            return [list(self.ctx.decode(int(c))) for c in cs]

        return {"zeta0": js(self.zeta0), "zeta1": js(self.zeta1), "hw": self.hw.to_json()["A_q"], "n": self.n}


def check_profile(X: Hypersurface) -> list[int]:
    dims = cohomology_dims(X)
    if X.N < 2 or dims[0] != 1 or any(dims[1:-1]):
        raise UnsupportedCohomologyProfile(f"cohomology dimensions {dims} are not of the form (1, 0, ..., 0, h)")
    return dims


def zeta_mod_p(X: Hypersurface) -> ZetaModP:
    """zeta0 / zeta1: products of det(1 - F T) over even / odd cohomological degree."""
    check_profile(X)
    ctx = X.ctx
    hw = hw_matrix(X)
    n = X.N - 1
    top = la.det_one_minus_tA(ctx, hw.A_q) if len(hw.basis) else [1]
    h0 = [1, ctx.neg(1)]
    if n % 2:
        return ZetaModP(ctx, h0, top, hw, n)
    return ZetaModP(ctx, _pmul(ctx, h0, top), [1], hw, n)


# ---------------------------------------------------------------------------
# trace congruence
# ---------------------------------------------------------------------------


@dataclass
class KatzRow:
    e: int
    count: int
    trace: int  # code of Tr(A_q^e) in GF(q)
    trace_in_prime_field: bool
    rhs: int  # 1 + (-1)^n Tr, as residue mod p (or -1 if the trace is not in GF(p))
    passed: bool

    def to_json(self, ctx: FieldCtx):
        return {
            "e": self.e,
            "N_e": self.count,
            "N_e_mod_p": self.count % ctx.p,
            "trace": list(ctx.decode(self.trace)),
            "trace_in_prime_field": self.trace_in_prime_field,
            "rhs": self.rhs,
            "pass": self.passed,
        }


@dataclass
class KatzReport:
    ctx: FieldCtx
    n: int
    rows: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_json(self):
        return {"n": self.n, "rows": [r.to_json(self.ctx) for r in self.rows], "pass": self.passed}


def trace_sequence(X: Hypersurface, e_max: int, hw: HWMatrix | None = None) -> list[int]:
    ctx = X.ctx
    hw = hw or hw_matrix(X)
    out = []
    M = la.identity(ctx, len(hw.basis))
    for _ in range(e_max):
        M = la.matmul(ctx, M, hw.A_q)
        tr = 0
        for i in range(M.shape[0]):
            tr = ctx.add(tr, int(M[i, i]))
        out.append(tr)
    return out


def katz_check(X: Hypersurface, e_max: int = 1, budget: int | None = None) -> KatzReport:
    """N_e mod p against 1 + (-1)^n Tr(A_q^e) for e = 1..e_max."""
    ctx, p = X.ctx, X.ctx.p
    check_profile(X)
    n = X.N - 1
    traces = trace_sequence(X, e_max)
    rows = []
    for e, tr in enumerate(traces, start=1):
        count = count_points(X, e, budget=current_budget(budget)).count
        in_fp = ctx.in_prime_field(tr)
        rhs = (1 + (-1) ** n * tr) % p if in_fp else -1
        rows.append(KatzRow(e, count, tr, in_fp, rhs, in_fp and count % p == rhs))
    return KatzReport(ctx, n, rows)
