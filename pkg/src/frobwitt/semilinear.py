"""q-semilinear operators x -> A * x^[q] and their Fitting/fixed-point structure.

``ctx`` is the coefficient field GF(q^m0) and ``twist`` is GF(q). Fixed
vectors are found by restricting scalars to GF(p): over an extension E of
ctx the map x -> A x^[q] is GF(p)-linear on E^r, so its fixed vectors form
the kernel of an ordinary matrix. Coordinates of E^r over GF(p) are ordered
(vector coordinate, field-basis coordinate), row major.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import CapExceeded, ContextMismatch, NotInvariant, ZeroVector
from .ff import FieldCtx, FieldElem, TowerEmbedding, make_field, tower

DEFAULT_M_CAP = 64


class SemilinearOp:
    """phi(x) = A * x^[q] on ctx^r, with q the order of ``twist``."""

    def __init__(self, ctx: FieldCtx, twist: FieldCtx, A):
        if twist.p != ctx.p or ctx.f % twist.f:
            raise ContextMismatch(f"{twist!r} is not a subfield of {ctx!r}")
        A = la.asmatrix(ctx, A)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"matrix must be square, got shape {A.shape}")
        self.ctx = ctx
        self.twist = twist
        self.A = A
        self.A.setflags(write=False)

    @property
    def r(self) -> int:
        return self.A.shape[0]

    @property
    def m0(self) -> int:
        """Degree of ctx over the twist field."""
        return self.ctx.f // self.twist.f

    def qpow(self, M, times: int = 1):
        """Entrywise x -> x^(q^times)."""
        return la.mfrob(self.ctx, M, self.twist.f * times)

    def apply(self, x) -> np.ndarray:
        x = np.asarray([getattr(c, "code", c) for c in x], dtype=self.A.dtype).reshape(-1, 1)
        return la.matmul(self.ctx, self.A, self.qpow(x))[:, 0]

    def compose(self, other: "SemilinearOp") -> "SemilinearOp":
        """Matrix of self o other."""
        if other.ctx != self.ctx or other.twist != self.twist:
            raise ContextMismatch("operators over different fields")
        return SemilinearOp(self.ctx, self.twist, la.matmul(self.ctx, self.A, self.qpow(other.A)))

    def to_json(self) -> dict:
        return {
            "ctx": self.ctx.to_json(),
            "twist_degree": self.twist.f,
            "rows": [[list(self.ctx.decode(int(c))) for c in row] for row in self.A],
        }

    @classmethod
    def from_json(cls, obj) -> "SemilinearOp":
        ctx = make_field(obj["ctx"]["p"], obj["ctx"]["f"])
        twist = make_field(ctx.p, obj["twist_degree"])
        rows = [[ctx(c).code for c in row] for row in obj["rows"]]
        return cls(ctx, twist, la.asmatrix(ctx, rows, ncols=0))


def twisted_power(op: SemilinearOp, e: int) -> np.ndarray:
    """Matrix M_e of phi^e: M_1 = A, M_(e+1) = A * M_e^[q]."""
    if e < 1:
        raise ValueError("power must be >= 1")
    M = op.A
    for _ in range(e - 1):
        M = la.matmul(op.ctx, op.A, op.qpow(M))
    return M


# ---------------------------------------------------------------------------
# Fitting decomposition
# ---------------------------------------------------------------------------


@dataclass
class FittingDecomp:
    stable_basis: np.ndarray  # columns
    nilpotent_basis: np.ndarray  # columns
    nilpotency_index: int
    fixed_basis: list = field(default_factory=list)
    extension_degree_used: int = 1
    fixed_complete: bool = True
    ext: FieldCtx | None = None

    @property
    def stable_dim(self) -> int:
        return self.stable_basis.shape[1]

    @property
    def nilpotent_dim(self) -> int:
        return self.nilpotent_basis.shape[1]


def _power_kills(op: SemilinearOp, n: int, B) -> bool:
    if B.shape[1] == 0 or n == 0:
        return B.shape[1] == 0
    M = twisted_power(op, n)
    return la.is_zero(la.matmul(op.ctx, M, op.qpow(B, n)))


def fitting_parts(op: SemilinearOp):
    """(V_s basis, V_eta basis, nilpotency index) without the fixed-point search."""
    ctx, r = op.ctx, op.r
    if r == 0:
        z = np.zeros((0, 0), dtype=op.A.dtype)
        return z, z.copy(), 0
    Mr = twisted_power(op, r)
    Vs = la.colspace(ctx, Mr)
    # phi^r(x) = M_r x^[q^r] vanishes iff x^[q^r] lies in ker M_r
    K = la.nullspace(ctx, Mr)
    shift = (-op.twist.f * r) % ctx.f
    Veta = la.mfrob(ctx, K, shift)
    nil = 0
    while not _power_kills(op, nil, Veta):
        nil += 1
    return Vs, Veta, nil


def fitting_decomposition(op: SemilinearOp, m_cap: int = DEFAULT_M_CAP, with_fixed: bool = True) -> FittingDecomp:
    Vs, Veta, nil = fitting_parts(op)
    out = FittingDecomp(Vs, Veta, nil)
    if with_fixed:
        fs = fixed_space(op, m_cap=m_cap)
        out.fixed_basis = fs.basis
        out.extension_degree_used = fs.extension_degree_used
        out.fixed_complete = fs.complete
        out.ext = fs.ext
    return out


# ---------------------------------------------------------------------------
# restriction of scalars to GF(p)
# ---------------------------------------------------------------------------


def linearize(op: SemilinearOp, emb: TowerEmbedding) -> np.ndarray:
    """GF(p)-matrix of x -> A x^[q] acting on E^r, E = emb.sup."""
    E = emb.sup
    F, r, p = E.f, op.r, E.p
    Phi = np.eye(F, dtype=np.int64)
    Fr = E.frobenius_matrix
    for _ in range(op.twist.f):
        Phi = (Fr @ Phi) % p
    L = np.zeros((r * F, r * F), dtype=np.int64)
    for i in range(r):
        for l in range(r):
            a = int(op.A[i, l])
            if a:
                L[i * F : (i + 1) * F, l * F : (l + 1) * F] = (E.mul_matrix(emb.map_code(a)) @ Phi) % p
    return L


def to_prime_coords(E: FieldCtx, vec) -> np.ndarray:
    return np.array([c for x in vec for c in E.decode(int(getattr(x, "code", x)))], dtype=np.int64)


def from_prime_coords(E: FieldCtx, coords) -> list[FieldElem]:
    F = E.f
    return [FieldElem(E, E.encode(int(c) for c in coords[i * F : (i + 1) * F])) for i in range(len(coords) // F)]


def apply_in_extension(op: SemilinearOp, emb: TowerEmbedding, vec) -> list[FieldElem]:
    """phi(vec) computed with extension-field arithmetic (no linearization)."""
    E = emb.sup
    xs = [E.frob(int(getattr(x, "code", x)), op.twist.f) for x in vec]
    out = []
    for i in range(op.r):
        acc = 0
        for l in range(op.r):
            a = int(op.A[i, l])
            if a and xs[l]:
                acc = E.add(acc, E.mul(emb.map_code(a), xs[l]))
        out.append(FieldElem(E, acc))
    return out


def _gfq_independent(op: SemilinearOp, emb: TowerEmbedding, vectors):
    """Greedy GF(q)-basis of the GF(p)-span of ``vectors`` (each closed under GF(q))."""
    E, p = emb.sup, emb.sup.p
    twist_emb = _twist_generator(op, emb)
    chosen, span = [], np.zeros((0, op.r * E.f), dtype=np.int64)
    Fp = make_field(p)
    for v in vectors:
        cand = to_prime_coords(E, v)
        if la.rank(Fp, np.vstack([span, cand])) == span.shape[0]:
            continue
        chosen.append(v)
        # add alpha * v for a GF(p)-basis alpha of the embedded GF(q)
        g, cur = twist_emb, [int(x.code) for x in v]
        rows = []
        for _ in range(op.twist.f):
            rows.append(to_prime_coords(E, cur))
            cur = [E.mul(g, c) for c in cur]
        span = np.vstack([span, np.array(rows)])
    return chosen


def _twist_generator(op: SemilinearOp, emb: TowerEmbedding) -> int:
    """Image in E of the generator of the twist field GF(q)."""
    to_ctx = tower(op.twist, op.m0) if op.twist != op.ctx else None
    g = op.twist.gen.code if op.twist.f > 1 else 1
    if to_ctx is not None:
        if to_ctx.sup != op.ctx:
            raise ContextMismatch("twist field does not sit canonically in ctx")
        g = to_ctx.map_code(g)
    return emb.map_code(g)


@dataclass
class FixedSpace:
    basis: list  # vectors over ext, each a list of FieldElem
    ext: FieldCtx
    extension_degree_used: int
    attempts: list
    complete: bool
    stable_dim: int
    order: int | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)


def stable_order(op: SemilinearOp, Vs=None, limit: int = DEFAULT_M_CAP) -> int | None:
    """Order of phi^m0 (a ctx-linear map) on V_s, or None if it exceeds ``limit``.

    Fixed vectors all become rational over the degree-k extension of ctx exactly
    when this order divides k.
    """
    ctx = op.ctx
    if Vs is None:
        Vs = fitting_parts(op)[0]
    s = Vs.shape[1]
    if s == 0:
        return 1
    N = twisted_power(op, op.m0)
    NB = la.matmul(ctx, N, Vs)
    C = np.zeros((s, s), dtype=Vs.dtype)
    for j in range(s):
        sol = la.solve_linear_system(ctx, Vs, NB[:, j])
        assert sol.consistent
        C[:, j] = sol.particular
    I = la.identity(ctx, s)
    P = C
    for k in range(1, limit + 1):
        if np.array_equal(P, I):
            return k
        P = la.matmul(ctx, P, C)
    return None


def fixed_at_level(op: SemilinearOp, k: int) -> tuple[list, TowerEmbedding]:
    """GF(q)-basis of the fixed vectors with coordinates in the degree-k extension of ctx."""
    emb = tower(op.ctx, k)
    E = emb.sup
    L = linearize(op, emb)
    K = la.nullspace_prime((L - np.eye(L.shape[0], dtype=np.int64)) % E.p, E.p)
    vectors = [from_prime_coords(E, K[:, j]) for j in range(K.shape[1])]
    basis = _gfq_independent(op, emb, vectors)
    for v in basis:
        if apply_in_extension(op, emb, v) != v:
            raise AssertionError("linearized fixed vector is not fixed")  # pragma: no cover
    return basis, emb


def fixed_space(op: SemilinearOp, m_cap: int = DEFAULT_M_CAP, raise_on_cap: bool = False) -> FixedSpace:
    """Fixed vectors of phi over GF(q), escalating the extension of ctx as needed.

    The first attempt is ctx itself; if it falls short the order of phi^m0 on
    V_s gives the least sufficient extension degree, which is tried directly
    when it is at most ``m_cap``.
    """
    if m_cap < 1:
        raise ValueError("m_cap must be >= 1")
    Vs, _, _ = fitting_parts(op)
    s = Vs.shape[1]
    basis, emb = fixed_at_level(op, 1)
    attempts = [{"k": 1, "dim": len(basis)}]
    if len(basis) == s:
        return FixedSpace(basis, emb.sup, 1, attempts, True, s, order=1 if s else 1)
    order = stable_order(op, Vs, limit=m_cap)
    if order is None:
        result = FixedSpace(basis, emb.sup, 1, attempts, False, s, order=None)
        if raise_on_cap:
            raise CapExceeded(f"fixed vectors need an extension of degree > {m_cap}", partial=result)
        return result
    basis, emb = fixed_at_level(op, order)
    attempts.append({"k": order, "dim": len(basis)})
    return FixedSpace(basis, emb.sup, order, attempts, len(basis) == s, s, order=order)


def artin_schreier_preimage(op: SemilinearOp, y, k: int):
    """Some x over the degree-k extension E of ctx with phi(x) - x = y, or None.

    ``y`` is given over E (list of FieldElem or codes in E).
    """
    emb = tower(op.ctx, k)
    E = emb.sup
    L = linearize(op, emb)
    M = (L - np.eye(L.shape[0], dtype=np.int64)) % E.p
    sol = la.solve_linear_system(make_field(E.p), M, to_prime_coords(E, y))
    if not sol.consistent:
        return None
    return from_prime_coords(E, sol.particular)


def rank_one_eigenvalue(op: SemilinearOp, v) -> FieldElem:
    """lambda with phi(v) = lambda * v, for v spanning a phi-stable line."""
    ctx = op.ctx
    v = [ctx(x).code if not isinstance(x, FieldElem) else ctx(x).code for x in v]
    if not any(v):
        raise ZeroVector("generator of the line is zero")
    w = op.apply(v)
    i = next(j for j, x in enumerate(v) if x)
    lam = ctx.mul(int(w[i]), ctx.inv(v[i]))
    if any(int(w[j]) != ctx.mul(lam, v[j]) for j in range(len(v))):
        raise NotInvariant("phi(v) is not a multiple of v")
    return FieldElem(ctx, lam)


def random_op(ctx: FieldCtx, twist: FieldCtx, r: int, rng) -> SemilinearOp:
    A = rng.integers(0, ctx.q, size=(r, r)).astype(np.int64)
    return SemilinearOp(ctx, twist, A)
