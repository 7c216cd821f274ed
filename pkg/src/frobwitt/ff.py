"""Finite fields GF(p^f) with Frobenius and subfield embeddings.

Elements are stored as integer codes ``sum(c_i * p**i)`` over the power basis
``1, t, ..., t^(f-1)`` of ``GF(p)[t]/(modulus)``. ``FieldElem`` wraps a code
for the public API; the linear-algebra and polynomial layers work on raw
codes. Fields with ``q <= TABLE_LIMIT`` get dense add/mul tables that the
compiled kernels consume directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .errors import ContextMismatch, DegreeZero, NonPrime

TABLE_LIMIT = 1024


# ---------------------------------------------------------------------------
# integers and GF(p)[x]
# ---------------------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, g, p):
    """Remainder of ``a`` by monic ``g`` (coefficient lists, low degree first)."""
    r = np.array(a, dtype=np.int64) % p
    n = len(g) - 1
    gg = np.array(g, dtype=np.int64)
    for k in range(len(r) - 1, n - 1, -1):
        c = r[k]
        if c:
            r[k - n : k + 1] = (r[k - n : k + 1] - c * gg) % p
    return r[:n] if len(r) >= n else np.concatenate([r, np.zeros(n - len(r), dtype=np.int64)])


def _pmulmod(a, b, g, p):
    return _pmod(np.convolve(a, b) % p, g, p)


def _pgcd(a, b, p):
    a, b = _trim(int(x) % p for x in a), _trim(int(x) % p for x in b)
    while b:
        inv = pow(b[-1], p - 2, p)
        while len(a) >= len(b):
            c = a[-1] * inv % p
            shift = len(a) - len(b)
            for i, bi in enumerate(b):
                a[shift + i] = (a[shift + i] - c * bi) % p
            a = _trim(a)
            if not a:
                break
        a, b = b, a
    return a


def _frobenius_columns(g, p):
    """Matrix Q over GF(p) whose column j is x^(p*j) mod g."""
    n = len(g) - 1
    xp = np.zeros(n, dtype=np.int64)
    # x^p mod g by square-and-multiply
    result = np.zeros(n, dtype=np.int64)
    result[0] = 1
    base = np.zeros(max(n, 2), dtype=np.int64)
    base[1] = 1
    base = _pmod(base, g, p)
    e = p
    while e:
        if e & 1:
            result = _pmulmod(result, base, g, p)
        base = _pmulmod(base, base, g, p)
        e >>= 1
    xp = result
    Q = np.zeros((n, n), dtype=np.int64)
    col = np.zeros(n, dtype=np.int64)
    col[0] = 1
    for j in range(n):
        Q[:, j] = col
        col = _pmulmod(col, xp, g, p)
    return Q


def _is_irreducible(g, p) -> bool:
    n = len(g) - 1
    if n <= 1:
        return n == 1
    if g[0] % p == 0:
        return False
    Q = _frobenius_columns(g, p)
    h = np.zeros(n, dtype=np.int64)
    h[1 % n] = 1
    x = h.copy()
    for _ in range(n // 2):
        h = (Q @ h) % p
        if len(_pgcd(list((h - x) % p), g, p)) > 1:
            return False
    return True


def _has_root_mod_p(g, p) -> bool:
    for a in range(p):
        v = 0
        for c in reversed(g):
            v = (v * a + c) % p
        if v == 0:
            return True
    return False


def smallest_irreducible(p: int, f: int) -> tuple[int, ...]:
    # coefficients c0..c_{f-1} compared low-degree-first: product() varies c0 slowest
    if f == 1:
        return (0, 1)
    # a zero constant term means x divides g
    for c0 in range(1, p):
        for rest in itertools.product(range(p), repeat=f - 1):
            g = [c0, *rest, 1]
            if p <= 64 and _has_root_mod_p(g, p):
                continue
            if _is_irreducible(g, p):
                return tuple(g)
    raise AssertionError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------
# field contexts
# ---------------------------------------------------------------------------


@dataclass
class _Tables:
    add: np.ndarray
    mul: np.ndarray
    neg: np.ndarray
    inv: np.ndarray
    frob: np.ndarray
    exp: np.ndarray
    log: np.ndarray
    digits: np.ndarray
    powtabs: dict = field(default_factory=dict)


class FieldCtx:
    """GF(p^f) presented as GF(p)[t]/(modulus)."""

    def __init__(self, p: int, f: int, modulus):
        self.p = p
        self.f = f
        self.modulus = tuple(int(c) for c in modulus)
        self.q = p**f

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and (self.p, self.f, self.modulus) == (
            other.p,
            other.f,
            other.modulus,
        )

    def __hash__(self):
        return hash((self.p, self.f, self.modulus))

    def __repr__(self):
        return f"GF({self.p}^{self.f})" if self.f > 1 else f"GF({self.p})"

    def to_json(self):
        return {"p": self.p, "f": self.f, "modulus": list(self.modulus)}

    @property
    def is_prime_field(self):
        return self.f == 1

    @property
    def tabled(self):
        return self.q <= TABLE_LIMIT

    # -- code <-> coefficients ------------------------------------------

    def encode(self, coeffs) -> int:
        coeffs = list(coeffs)
        if len(coeffs) > self.f:
            raise ContextMismatch(f"{len(coeffs)} coordinates for {self!r}")
        code = 0
        for c in reversed(coeffs):
            code = code * self.p + int(c) % self.p
        return code

    def decode(self, code: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.f):
            code, r = divmod(code, self.p)
            out.append(r)
        return tuple(out)

    def check_code(self, code: int) -> int:
        code = int(code)
        if not 0 <= code < self.q:
            raise ContextMismatch(f"code {code} out of range for {self!r}")
        return code

    # -- generic coefficient-vector arithmetic ---------------------------

    @cached_property
    def _reduction(self):
        """Rows: t^(f+i) mod modulus for i = 0..f-2."""
        f, p = self.f, self.p
        rows = np.zeros((max(f - 1, 0), f), dtype=np.int64)
        cur = np.array([(-c) % p for c in self.modulus[:f]], dtype=np.int64)  # t^f
        for i in range(f - 1):
            rows[i] = cur
            top = cur[-1]
            cur = np.concatenate(([0], cur[:-1]))
            if top:
                cur = (cur + top * rows[0]) % p
        return rows

    def _vec(self, code):
        return np.array(self.decode(code), dtype=np.int64)

    def _vmul(self, a, b):
        c = np.convolve(a, b) % self.p
        f = self.f
        if f == 1:
            return c[:1]
        return (c[:f] + c[f:] @ self._reduction) % self.p

    def _encode_vec(self, v) -> int:
        return self.encode(int(x) for x in v)

    @cached_property
    def frobenius_matrix(self) -> np.ndarray:
        """Matrix over GF(p) of x -> x^p in the power basis."""
        if self.f == 1:
            return np.ones((1, 1), dtype=np.int64)
        return _frobenius_columns(list(self.modulus), self.p)

    def mul_matrix(self, code: int) -> np.ndarray:
        """Matrix over GF(p) of multiplication by the element ``code``."""
        f, p = self.f, self.p
        M = np.zeros((f, f), dtype=np.int64)
        col = self._vec(code)
        for j in range(f):
            M[:, j] = col
            if f > 1:
                top = col[-1]
                col = np.concatenate(([0], col[:-1]))
                if top:
                    col = (col + top * self._reduction[0]) % p
        return M

    # -- tables -----------------------------------------------------------

    @cached_property
    def tables(self) -> _Tables:
        if not self.tabled:
            raise ValueError(f"{self!r} is too large for dense tables")
        p, q, f = self.p, self.q, self.f
        powers = p ** np.arange(f, dtype=np.int64)
        codes = np.arange(q, dtype=np.int64)
        digits = np.stack([(codes // p**i) % p for i in range(f)], axis=1)
        g = self.primitive_element()
        exp = np.zeros(q - 1, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        cur = 1
        for i in range(q - 1):
            exp[i] = cur
            log[cur] = i
            cur = self._mul_slow(cur, g)
        add = np.empty((q, q), dtype=np.int64)
        for a in range(q):
            add[a] = ((digits[a] + digits) % p) @ powers
        neg = ((-digits) % p) @ powers
        la = log[:, None] + log[None, :]
        mul = exp[la % (q - 1)]
        mul[0, :] = 0
        mul[:, 0] = 0
        inv = exp[(-log) % (q - 1)]
        inv[0] = 0
        frob = exp[(log * p) % (q - 1)]
        frob[0] = 0
        return _Tables(add, mul, neg, inv, frob, exp, log, digits)

    def powtab(self, maxe: int) -> np.ndarray:
        """``T[a, k] = a^k`` for all codes ``a`` and ``0 <= k <= maxe``."""
        t = self.tables
        cached = t.powtabs.get(maxe)
        if cached is not None:
            return cached
        q = self.q
        ks = np.arange(maxe + 1, dtype=np.int64)
        T = t.exp[(t.log[:, None] * ks[None, :]) % (q - 1)]
        T[0, :] = 0
        T[0, 0] = 1
        t.powtabs[maxe] = T
        return T

    def primitive_element(self) -> int:
        q = self.q
        if q == 2:
            return 1
        ells = prime_factors(q - 1)
        for g in range(2 if self.f == 1 else self.p, q):
            if all(self._pow_slow(g, (q - 1) // l) != 1 for l in ells):
                return g
        raise AssertionError("no primitive element")  # unreachable

    # -- scalar code arithmetic -------------------------------------------

    def _mul_slow(self, a, b):
        if self.f == 1:
            return a * b % self.p
        return self._encode_vec(self._vmul(self._vec(a), self._vec(b)))

    def _pow_slow(self, a, n):
        result = 1
        while n:
            if n & 1:
                result = self._mul_slow(result, a)
            a = self._mul_slow(a, a)
            n >>= 1
        return result

    def add(self, a: int, b: int) -> int:
        if self.f == 1:
            return (a + b) % self.p
        if self.tabled:
            return int(self.tables.add[a, b])
        return self._encode_vec((self._vec(a) + self._vec(b)) % self.p)

    def neg(self, a: int) -> int:
        if self.f == 1:
            return (-a) % self.p
        if self.tabled:
            return int(self.tables.neg[a])
        return self._encode_vec((-self._vec(a)) % self.p)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.f == 1:
            return a * b % self.p
        if self.tabled:
            return int(self.tables.mul[a, b])
        return self._mul_slow(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        if self.f == 1:
            return pow(a, self.p - 2, self.p)
        if self.tabled:
            return int(self.tables.inv[a])
        return self._pow_slow(a, self.q - 2)

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if self.f == 1:
            return pow(a, n, self.p)
        if self.tabled:
            if a == 0:
                return 1 if n == 0 else 0
            t = self.tables
            return int(t.exp[(int(t.log[a]) * n) % (self.q - 1)])
        return self._pow_slow(a, n)

    def frob(self, a: int, i: int = 1) -> int:
        """a^(p^i)."""
        i %= self.f
        if i == 0 or a == 0:
            return a
        if self.tabled:
            fr = self.tables.frob
            for _ in range(i):
                a = int(fr[a])
            return a
        v = self._vec(a)
        Fr = self.frobenius_matrix
        for _ in range(i):
            v = (Fr @ v) % self.p
        return self._encode_vec(v)

    def from_int(self, n: int) -> int:
        return n % self.p

    def in_prime_field(self, a: int) -> bool:
        return 0 <= a < self.p

    # -- elements ---------------------------------------------------------

    def __call__(self, x) -> FieldElem:
        if isinstance(x, FieldElem):
            if x.ctx != self:
                raise ContextMismatch(f"{x.ctx!r} element used in {self!r}")
            return x
        if isinstance(x, (list, tuple)):
            return FieldElem(self, self.encode(x))
        return FieldElem(self, self.from_int(int(x)))

    @property
    def zero(self) -> FieldElem:
        return FieldElem(self, 0)

    @property
    def one(self) -> FieldElem:
        return FieldElem(self, 1)

    @property
    def gen(self) -> FieldElem:
        """The class of t (zero in a prime field, whose modulus is x)."""
        return FieldElem(self, self.p if self.f > 1 else 0)

    def elements(self):
        for c in range(self.q):
            yield FieldElem(self, c)


class FieldElem:
    """An element of a FieldCtx; immutable."""

    __slots__ = ("ctx", "code")

    def __init__(self, ctx: FieldCtx, code: int):
        self.ctx = ctx
        self.code = ctx.check_code(code)

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.ctx.decode(self.code)

    def _other(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx!r} vs {other.ctx!r}")
            return other.code
        if isinstance(other, (int, np.integer)):
            return self.ctx.from_int(int(other))
        return NotImplemented

    def _wrap(self, code):
        return FieldElem(self.ctx, code)

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ctx.add(self.code, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ctx.sub(self.code, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ctx.sub(o, self.code))

    def __neg__(self):
        return self._wrap(self.ctx.neg(self.code))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ctx.mul(self.code, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ctx.mul(self.code, self.ctx.inv(o)))

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.ctx.mul(o, self.ctx.inv(self.code)))

    def __pow__(self, n: int):
        return self._wrap(self.ctx.pow(self.code, int(n)))

    def inverse(self):
        return self._wrap(self.ctx.inv(self.code))

    def frobenius(self, i: int = 1):
        return self._wrap(self.ctx.frob(self.code, i))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.ctx == other.ctx and self.code == other.code
        if isinstance(other, (int, np.integer)):
            return self.code == self.ctx.from_int(int(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, self.code))

    def __bool__(self):
        return self.code != 0

    def __int__(self):
        if not self.ctx.in_prime_field(self.code):
            raise ValueError(f"{self!r} is not in the prime field")
        return self.code

    def __repr__(self):
        if self.ctx.f == 1:
            return f"{self.code}"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                terms.append(str(c) if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> list[int]:
        return list(self.coeffs)


# ---------------------------------------------------------------------------
# construction, Frobenius, towers
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def make_field(p: int, f: int = 1) -> FieldCtx:
    """Canonical GF(p^f): modulus is the lexicographically smallest monic irreducible.

    Degree one uses modulus ``x`` so the generator is 0 and elements are residues.
    """
    if f < 1:
        raise DegreeZero(f"extension degree must be >= 1, got {f}")
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    return FieldCtx(p, f, smallest_irreducible(p, f))


def field_from_json(obj) -> FieldCtx:
    ctx = make_field(int(obj["p"]), int(obj.get("f", 1)))
    if "modulus" in obj and tuple(obj["modulus"]) != ctx.modulus:
        raise ContextMismatch("modulus is not the canonical one for this (p, f)")
    return ctx


def frobenius(ctx: FieldCtx, x: FieldElem, i: int = 1) -> FieldElem:
    """x^(p^i); the q-power map of GF(q), q = p^f, is ``i = f``."""
    if i < 0:
        raise ValueError("iteration count must be >= 0")
    return ctx(x).frobenius(i)


@dataclass(frozen=True, eq=False)
class TowerEmbedding:
    """Field homomorphism GF(p^f) -> GF(p^(f*m)) fixed by the image of t."""

    sub: FieldCtx
    sup: FieldCtx
    gen_image: FieldElem

    @cached_property
    def matrix(self) -> np.ndarray:
        """GF(p)-matrix (sup.f x sub.f) whose column j is the image of t^j."""
        cols = []
        cur = self.sup.one
        for _ in range(self.sub.f):
            cols.append(cur.coeffs)
            cur = cur * self.gen_image
        return np.array(cols, dtype=np.int64).T

    @property
    def degree(self) -> int:
        return self.sup.f // self.sub.f

    def map_code(self, code: int) -> int:
        if self.sub.f == 1:
            return code
        v = (self.matrix @ np.array(self.sub.decode(code), dtype=np.int64)) % self.sub.p
        return self.sup.encode(int(c) for c in v)

    @cached_property
    def code_map(self) -> np.ndarray:
        return np.array([self.map_code(c) for c in range(self.sub.q)], dtype=np.int64)


def _subfield_basis(sup: FieldCtx, d: int) -> np.ndarray:
    """GF(p)-basis (columns) of the degree-d subfield {y : y^(p^d) = y}."""
    p, n = sup.p, sup.f
    Fr = sup.frobenius_matrix
    P = np.eye(n, dtype=np.int64)
    for _ in range(d):
        P = (Fr @ P) % p
    from .linalg import nullspace_prime

    return nullspace_prime((P - np.eye(n, dtype=np.int64)) % p, p)


@lru_cache(maxsize=None)
def make_embedding(sub: FieldCtx, sup: FieldCtx) -> TowerEmbedding:
    """Deterministic embedding: the first root of sub.modulus in lexicographic order."""
    if sub.p != sup.p or sup.f % sub.f:
        raise ContextMismatch(f"{sub!r} does not embed in {sup!r}")
    if sub.f == 1:
        return TowerEmbedding(sub, sup, sup.zero)
    if sub == sup:
        return TowerEmbedding(sub, sup, sup.gen)
    B = _subfield_basis(sup, sub.f)
    p = sup.p
    for combo in itertools.product(range(p), repeat=B.shape[1]):
        if not any(combo):
            continue
        y = FieldElem(sup, sup.encode(int(c) for c in (B @ np.array(combo)) % p))
        v = sup.zero
        for c in reversed(sub.modulus):
            v = v * y + c
        if not v:
            return TowerEmbedding(sub, sup, y)
    raise AssertionError("modulus has no root in the extension")  # unreachable


def tower(sub: FieldCtx, m: int) -> TowerEmbedding:
    """Embedding of ``sub`` into its canonical degree-m extension."""
    return make_embedding(sub, make_field(sub.p, sub.f * m))


def embed(emb: TowerEmbedding, x: FieldElem) -> FieldElem:
    if x.ctx != emb.sub:
        raise ContextMismatch(f"element of {x.ctx!r} given to embedding of {emb.sub!r}")
    return FieldElem(emb.sup, emb.map_code(x.code))


__all__ = [
    "FieldCtx",
    "FieldElem",
    "TowerEmbedding",
    "make_field",
    "field_from_json",
    "frobenius",
    "embed",
    "make_embedding",
    "tower",
    "is_prime",
    "TABLE_LIMIT",
]
