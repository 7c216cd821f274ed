"""Gaussian elimination and friends over a FieldCtx.

Matrices are numpy arrays of element codes (int64, or object for fields too
large for machine integers). Pivoting is deterministic: the first nonzero
entry scanning rows top-down in the current column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .ff import FieldCtx

_SMALL_PRIME = 1 << 20


def _dtype(ctx: FieldCtx):
    return np.int64 if ctx.q < (1 << 62) else object


def asmatrix(ctx: FieldCtx, M, ncols=None) -> np.ndarray:
    """Coerce nested lists / FieldElems / arrays into a 2-d code array."""
    if isinstance(M, np.ndarray) and M.ndim == 2:
        return M.astype(_dtype(ctx), copy=False)
    rows = [[getattr(x, "code", x) for x in row] for row in M]
    if not rows:
        return np.zeros((0, ncols or 0), dtype=_dtype(ctx))
    return np.array(rows, dtype=_dtype(ctx)).reshape(len(rows), -1)


def _fast_prime(ctx):
    return ctx.f == 1 and ctx.p < _SMALL_PRIME


def _rref_generic(ctx: FieldCtx, M):
    R = np.array(M, dtype=object)
    nrows, ncols = R.shape
    pivots = []
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        piv = next((i for i in range(row, nrows) if R[i, col] != 0), None)
        if piv is None:
            continue
        if piv != row:
            R[[row, piv]] = R[[piv, row]]
        s = ctx.inv(int(R[row, col]))
        R[row] = [ctx.mul(s, int(x)) for x in R[row]]
        for i in range(nrows):
            fct = int(R[i, col])
            if i != row and fct:
                R[i] = [ctx.sub(int(a), ctx.mul(fct, int(b))) for a, b in zip(R[i], R[row])]
        pivots.append(col)
        row += 1
    return R.astype(_dtype(ctx)), np.array(pivots, dtype=np.int64)


def rref(ctx: FieldCtx, M):
    """Reduced row echelon form and pivot columns."""
    M = asmatrix(ctx, M)
    if M.size == 0:
        return M.copy(), np.zeros(0, dtype=np.int64)
    if _fast_prime(ctx):
        return _kernels.rref_prime(np.ascontiguousarray(M, dtype=np.int64), ctx.p)
    if ctx.tabled:
        t = ctx.tables
        return _kernels.rref_table(np.ascontiguousarray(M, dtype=np.int64), t.add, t.mul, t.neg, t.inv)
    return _rref_generic(ctx, M)


def rank(ctx: FieldCtx, M) -> int:
    return int(rref(ctx, M)[1].size)


def _kernel_from_rref(ctx, R, pivots, ncols):
    free = [c for c in range(ncols) if c not in set(pivots.tolist())]
    K = np.zeros((ncols, len(free)), dtype=_dtype(ctx))
    for k, fc in enumerate(free):
        K[fc, k] = 1
        for r, pc in enumerate(pivots):
            K[pc, k] = ctx.neg(int(R[r, fc]))
    return K


def nullspace(ctx: FieldCtx, M, ncols=None) -> np.ndarray:
    """Columns form a basis of {x : M x = 0}."""
    M = asmatrix(ctx, M, ncols)
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=_dtype(ctx))
    R, piv = rref(ctx, M)
    return _kernel_from_rref(ctx, R, piv, n)


def nullspace_prime(M, p: int) -> np.ndarray:
    """Kernel basis (columns) of an integer matrix reduced mod prime p."""
    M = np.asarray(M, dtype=np.int64) % p
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = _kernels.rref_prime(np.ascontiguousarray(M), p)
    free = [c for c in range(n) if c not in set(piv.tolist())]
    K = np.zeros((n, len(free)), dtype=np.int64)
    for k, fc in enumerate(free):
        K[fc, k] = 1
        K[piv, k] = (-R[: len(piv), fc]) % p
    return K


def colspace(ctx: FieldCtx, M) -> np.ndarray:
    """Basis of the column space: the pivot columns of M itself."""
    M = asmatrix(ctx, M)
    if M.size == 0:
        return M[:, :0].copy()
    _, piv = rref(ctx, M)
    return M[:, piv].copy()


def matmul(ctx: FieldCtx, A, B) -> np.ndarray:
    A, B = asmatrix(ctx, A), asmatrix(ctx, B)
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"shape mismatch {A.shape} x {B.shape}")
    if _fast_prime(ctx):
        if A.shape[1] * ctx.p * ctx.p < (1 << 62):
            return (A @ B) % ctx.p
        return ((A.astype(object) @ B.astype(object)) % ctx.p).astype(np.int64)
    if ctx.tabled:
        t = ctx.tables
        return _kernels.matmul_table(
            np.ascontiguousarray(A, dtype=np.int64), np.ascontiguousarray(B, dtype=np.int64), t.add, t.mul
        )
    C = np.zeros((A.shape[0], B.shape[1]), dtype=_dtype(ctx))
    for i in range(A.shape[0]):
        for j in range(B.shape[1]):
            acc = 0
            for k in range(A.shape[1]):
                acc = ctx.add(acc, ctx.mul(int(A[i, k]), int(B[k, j])))
            C[i, j] = acc
    return C


def madd(ctx: FieldCtx, A, B) -> np.ndarray:
    A, B = asmatrix(ctx, A), asmatrix(ctx, B)
    if _fast_prime(ctx):
        return (A + B) % ctx.p
    if ctx.tabled:
        return ctx.tables.add[A, B]
    return np.vectorize(ctx.add, otypes=[_dtype(ctx)])(A, B) if A.size else A.copy()


def mneg(ctx: FieldCtx, A) -> np.ndarray:
    A = asmatrix(ctx, A)
    if _fast_prime(ctx):
        return (-A) % ctx.p
    if ctx.tabled:
        return ctx.tables.neg[A]
    return np.vectorize(ctx.neg, otypes=[_dtype(ctx)])(A) if A.size else A.copy()


def msub(ctx: FieldCtx, A, B) -> np.ndarray:
    return madd(ctx, A, mneg(ctx, B))


def mscale(ctx: FieldCtx, c: int, A) -> np.ndarray:
    A = asmatrix(ctx, A)
    if _fast_prime(ctx):
        return (c * A) % ctx.p
    if ctx.tabled:
        return ctx.tables.mul[c, A]
    return np.vectorize(lambda x: ctx.mul(c, x), otypes=[_dtype(ctx)])(A) if A.size else A.copy()


def mfrob(ctx: FieldCtx, A, i: int = 1) -> np.ndarray:
    """Entrywise x -> x^(p^i)."""
    A = asmatrix(ctx, A)
    i %= ctx.f
    if i == 0:
        return A.copy()
    if ctx.tabled:
        fr = ctx.tables.frob
        out = A
        for _ in range(i):
            out = fr[out]
        return out
    return np.vectorize(lambda x: ctx.frob(x, i), otypes=[_dtype(ctx)])(A) if A.size else A.copy()


def identity(ctx: FieldCtx, n: int) -> np.ndarray:
    return np.eye(n, dtype=_dtype(ctx))


def inverse(ctx: FieldCtx, A) -> np.ndarray:
    A = asmatrix(ctx, A)
    n = A.shape[0]
    R, piv = rref(ctx, np.concatenate([A, identity(ctx, n)], axis=1))
    if piv.size < n or piv[n - 1] != n - 1:
        raise ZeroDivisionError("matrix is singular")
    return R[:, n:].copy()


@dataclass
class LinearSolution:
    rank: int
    consistent: bool
    particular: np.ndarray | None
    kernel: np.ndarray


def solve_linear_system(ctx: FieldCtx, M, b) -> LinearSolution:
    """All solutions of M x = b: a particular solution (if any) plus a kernel basis.

    An inconsistent system is reported through ``consistent=False``.
    """
    M = asmatrix(ctx, M)
    b = np.array([getattr(x, "code", x) for x in b], dtype=_dtype(ctx)).reshape(-1, 1)
    nrows, n = M.shape
    if b.shape[0] != nrows:
        raise ValueError("right-hand side has wrong length")
    if nrows == 0:
        return LinearSolution(0, True, np.zeros(n, dtype=_dtype(ctx)), identity(ctx, n))
    R, piv = rref(ctx, np.concatenate([M, b], axis=1))
    consistent = not (piv.size and piv[-1] == n)
    pivA = piv[piv < n]
    kernel = _kernel_from_rref(ctx, R[:, :n], pivA, n)
    particular = None
    if consistent:
        particular = np.zeros(n, dtype=_dtype(ctx))
        for r, pc in enumerate(pivA):
            particular[pc] = R[r, n]
    return LinearSolution(int(pivA.size), consistent, particular, kernel)


def intersect(ctx: FieldCtx, U, V) -> np.ndarray:
    """Basis (columns) of colspace(U) ∩ colspace(V)."""
    U, V = asmatrix(ctx, U), asmatrix(ctx, V)
    if U.shape[1] == 0 or V.shape[1] == 0:
        return np.zeros((U.shape[0], 0), dtype=_dtype(ctx))
    K = nullspace(ctx, np.concatenate([U, mneg(ctx, V)], axis=1))
    if K.shape[1] == 0:
        return np.zeros((U.shape[0], 0), dtype=_dtype(ctx))
    return colspace(ctx, matmul(ctx, U, K[: U.shape[1]]))


def in_span(ctx: FieldCtx, U, v) -> bool:
    U = asmatrix(ctx, U)
    v = np.asarray(v, dtype=_dtype(ctx)).reshape(-1, 1)
    return rank(ctx, np.concatenate([U, v], axis=1)) == rank(ctx, U)


def is_zero(A) -> bool:
    return not np.any(np.asarray(A) != 0)


def hessenberg_charpoly(ctx: FieldCtx, A) -> list[int]:
    """Characteristic polynomial det(x I - A), coefficients low degree first."""
    H = [[int(x) for x in row] for row in asmatrix(ctx, A)]
    n = len(H)
    add, sub, mul = ctx.add, ctx.sub, ctx.mul
    for j in range(n - 2):
        r = next((i for i in range(j + 1, n) if H[i][j]), None)
        if r is None:
            continue
        if r != j + 1:
            H[r], H[j + 1] = H[j + 1], H[r]
            for row in H:
                row[r], row[j + 1] = row[j + 1], row[r]
        pinv = ctx.inv(H[j + 1][j])
        for i in range(j + 2, n):
            u = mul(H[i][j], pinv)
            if not u:
                continue
            H[i] = [sub(a, mul(u, b)) for a, b in zip(H[i], H[j + 1])]
            for row in H:
                row[j + 1] = add(row[j + 1], mul(u, row[i]))

    def padd(a, b):
        out = [0] * max(len(a), len(b))
        for k, c in enumerate(a):
            out[k] = c
        for k, c in enumerate(b):
            out[k] = add(out[k], c)
        return out

    def pscale(c, a):
        return [mul(c, x) for x in a]

    polys = [[1]]
    for m in range(1, n + 1):
        hmm = H[m - 1][m - 1]
        cur = padd([0] + polys[m - 1], pscale(ctx.neg(hmm), polys[m - 1]))
        prod = 1
        for i in range(m - 1, 0, -1):
            prod = mul(prod, H[i][i - 1])
            c = mul(H[i - 1][m - 1], prod)
            if c:
                cur = padd(cur, pscale(ctx.neg(c), polys[i - 1]))
        polys.append(cur)
    return polys[n]


def det_one_minus_tA(ctx: FieldCtx, A) -> list[int]:
    """Coefficients (low degree first, codes) of det(1 - T A)."""
    chi = hessenberg_charpoly(ctx, A)
    out = list(reversed(chi))
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def determinant(ctx: FieldCtx, A) -> int:
    """Determinant by elimination (independent of the charpoly route)."""
    R = [[int(x) for x in row] for row in asmatrix(ctx, A)]
    n = len(R)
    det = 1
    for c in range(n):
        r = next((i for i in range(c, n) if R[i][c]), None)
        if r is None:
            return 0
        if r != c:
            R[r], R[c] = R[c], R[r]
            det = ctx.neg(det)
        det = ctx.mul(det, R[c][c])
        inv = ctx.inv(R[c][c])
        for i in range(c + 1, n):
            u = ctx.mul(R[i][c], inv)
            if u:
                R[i] = [ctx.sub(a, ctx.mul(u, b)) for a, b in zip(R[i], R[c])]
    return det
