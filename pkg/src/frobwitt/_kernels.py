"""Hot inner loops over small finite fields.

Each kernel exists twice: a loop version compiled with numba ``@njit`` and a
vectorised pure-numpy version. Field elements are integer codes; arithmetic
in non-prime fields goes through precomputed ``add``/``mul``/``neg``/``inv``
tables indexed by code.

Set ``FROBWITT_DISABLE_NUMBA=1`` to force the numpy path (numba is also
skipped when it cannot be imported). Both paths must agree bit for bit.
"""

import os

import numpy as np

DISABLE_NUMBA = os.environ.get("FROBWITT_DISABLE_NUMBA", "").strip() not in ("", "0")

try:
    if DISABLE_NUMBA:
        raise ImportError("numba disabled by FROBWITT_DISABLE_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def _np_rref_prime(M, p):
    R = np.array(M, dtype=np.int64) % p
    nrows, ncols = R.shape
    pivots = []
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        nz = np.nonzero(R[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + nz[0]
        if piv != row:
            R[[row, piv]] = R[[piv, row]]
        inv = pow(int(R[row, col]), p - 2, p)
        R[row] = (R[row] * inv) % p
        factors = R[:, col].copy()
        factors[row] = 0
        rows = np.nonzero(factors)[0]
        if rows.size:
            R[rows] = (R[rows] - factors[rows, None] * R[row][None, :]) % p
        pivots.append(col)
        row += 1
    return R, np.array(pivots, dtype=np.int64)


def _np_rref_table(M, add, mul, neg, inv):
    R = np.array(M, dtype=np.int64)
    nrows, ncols = R.shape
    pivots = []
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        nz = np.nonzero(R[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + nz[0]
        if piv != row:
            R[[row, piv]] = R[[piv, row]]
        R[row] = mul[inv[R[row, col]], R[row]]
        factors = R[:, col].copy()
        factors[row] = 0
        rows = np.nonzero(factors)[0]
        if rows.size:
            prod = mul[factors[rows, None], R[row][None, :]]
            R[rows] = add[R[rows], neg[prod]]
        pivots.append(col)
        row += 1
    return R, np.array(pivots, dtype=np.int64)


def _np_matmul_table(A, B, add, mul):
    n, k = A.shape
    m = B.shape[1]
    C = np.zeros((n, m), dtype=np.int64)
    for j in range(k):
        C = add[C, mul[A[:, j, None], B[None, j, :]]]
    return C


def _np_eval_points(points, exps, coeffs, add, mul, powtab):
    npts, nvars = points.shape
    out = np.zeros(npts, dtype=np.int64)
    for t in range(exps.shape[0]):
        acc = np.full(npts, coeffs[t], dtype=np.int64)
        for i in range(nvars):
            e = exps[t, i]
            if e:
                acc = mul[acc, powtab[points[:, i], e]]
        out = add[out, acc]
    return out


def _np_group_sum_table(keys, vals, add, digits, p):
    if keys.size == 0:
        return keys.copy(), vals.copy()
    order = np.argsort(keys, kind="stable")
    ks = keys[order]
    starts = np.concatenate(([0], np.nonzero(np.diff(ks))[0] + 1))
    dig = digits[vals[order]]
    summed = np.add.reduceat(dig, starts, axis=0) % p
    powers = p ** np.arange(digits.shape[1], dtype=np.int64)
    codes = summed @ powers
    uk = ks[starts]
    keep = codes != 0
    return uk[keep], codes[keep]


def _np_group_sum_prime(keys, vals, p):
    if keys.size == 0:
        return keys.copy(), vals.copy()
    order = np.argsort(keys, kind="stable")
    ks = keys[order]
    starts = np.concatenate(([0], np.nonzero(np.diff(ks))[0] + 1))
    summed = np.add.reduceat(vals[order] % p, starts) % p
    uk = ks[starts]
    keep = summed != 0
    return uk[keep], summed[keep]


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------


@njit(cache=True)
def _nb_rref_prime(M, p):
    R = M.copy()
    nrows, ncols = R.shape
    for i in range(nrows):
        for j in range(ncols):
            R[i, j] = R[i, j] % p
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    npiv = 0
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        piv = -1
        for i in range(row, nrows):
            if R[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != row:
            for j in range(ncols):
                tmp = R[row, j]
                R[row, j] = R[piv, j]
                R[piv, j] = tmp
        # modular inverse by Fermat
        a = R[row, col]
        inv = 1
        e = p - 2
        while e > 0:
            if e & 1:
                inv = (inv * a) % p
            a = (a * a) % p
            e >>= 1
        for j in range(col, ncols):
            R[row, j] = (R[row, j] * inv) % p
        for i in range(nrows):
            if i != row:
                fct = R[i, col]
                if fct != 0:
                    for j in range(col, ncols):
                        R[i, j] = (R[i, j] - fct * R[row, j]) % p
        pivots[npiv] = col
        npiv += 1
        row += 1
    return R, pivots[:npiv].copy()


@njit(cache=True)
def _nb_rref_table(M, add, mul, neg, inv):
    R = M.copy()
    nrows, ncols = R.shape
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    npiv = 0
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        piv = -1
        for i in range(row, nrows):
            if R[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != row:
            for j in range(ncols):
                tmp = R[row, j]
                R[row, j] = R[piv, j]
                R[piv, j] = tmp
        s = inv[R[row, col]]
        for j in range(col, ncols):
            R[row, j] = mul[s, R[row, j]]
        for i in range(nrows):
            if i != row:
                fct = R[i, col]
                if fct != 0:
                    for j in range(col, ncols):
                        R[i, j] = add[R[i, j], neg[mul[fct, R[row, j]]]]
        pivots[npiv] = col
        npiv += 1
        row += 1
    return R, pivots[:npiv].copy()


@njit(cache=True)
def _nb_matmul_table(A, B, add, mul):
    n, k = A.shape
    m = B.shape[1]
    C = np.zeros((n, m), dtype=np.int64)
    for i in range(n):
        for j in range(m):
            acc = 0
            for l in range(k):
                acc = add[acc, mul[A[i, l], B[l, j]]]
            C[i, j] = acc
    return C


@njit(cache=True)
def _nb_eval_points(points, exps, coeffs, add, mul, powtab):
    npts, nvars = points.shape
    nterms = exps.shape[0]
    out = np.zeros(npts, dtype=np.int64)
    for n in range(npts):
        total = 0
        for t in range(nterms):
            acc = coeffs[t]
            for i in range(nvars):
                e = exps[t, i]
                if e != 0:
                    acc = mul[acc, powtab[points[n, i], e]]
                    if acc == 0:
                        break
            total = add[total, acc]
        out[n] = total
    return out


@njit(cache=True)
def _nb_group_sum_table(keys, vals, add, digits, p):
    n = keys.size
    if n == 0:
        return keys.copy(), vals.copy()
    kmax = keys.max()
    if kmax < 4 * n + 1024:
        # dense buckets: linear time, keys come out sorted
        acc = np.zeros(kmax + 1, dtype=np.int64)
        for i in range(n):
            k = keys[i]
            acc[k] = add[acc[k], vals[i]]
        nz = np.nonzero(acc)[0]
        return nz.astype(np.int64), acc[nz]
    order = np.argsort(keys)
    uk = np.empty(n, dtype=np.int64)
    uv = np.empty(n, dtype=np.int64)
    m = 0
    i = 0
    while i < n:
        k = keys[order[i]]
        acc = 0
        while i < n and keys[order[i]] == k:
            acc = add[acc, vals[order[i]]]
            i += 1
        if acc != 0:
            uk[m] = k
            uv[m] = acc
            m += 1
    return uk[:m].copy(), uv[:m].copy()


@njit(cache=True)
def _nb_group_sum_prime(keys, vals, p):
    n = keys.size
    if n == 0:
        return keys.copy(), vals.copy()
    kmax = keys.max()
    if kmax < 4 * n + 1024:
        # dense buckets: linear time, keys come out sorted
        acc = np.zeros(kmax + 1, dtype=np.int64)
        for i in range(n):
            k = keys[i]
            acc[k] = (acc[k] + vals[i]) % p
        nz = np.nonzero(acc)[0]
        return nz.astype(np.int64), acc[nz]
    order = np.argsort(keys)
    uk = np.empty(n, dtype=np.int64)
    uv = np.empty(n, dtype=np.int64)
    m = 0
    i = 0
    while i < n:
        k = keys[order[i]]
        acc = 0
        while i < n and keys[order[i]] == k:
            acc = (acc + vals[order[i]]) % p
            i += 1
        if acc != 0:
            uk[m] = k
            uv[m] = acc
            m += 1
    return uk[:m].copy(), uv[:m].copy()


NUMPY_IMPL = {
    "rref_prime": _np_rref_prime,
    "rref_table": _np_rref_table,
    "matmul_table": _np_matmul_table,
    "eval_points": _np_eval_points,
    "group_sum_table": _np_group_sum_table,
    "group_sum_prime": _np_group_sum_prime,
}

NUMBA_IMPL = {
    "rref_prime": _nb_rref_prime,
    "rref_table": _nb_rref_table,
    "matmul_table": _nb_matmul_table,
    "eval_points": _nb_eval_points,
    "group_sum_table": _nb_group_sum_table,
    "group_sum_prime": _nb_group_sum_prime,
}

_ACTIVE = NUMBA_IMPL if HAS_NUMBA else NUMPY_IMPL

rref_prime = _ACTIVE["rref_prime"]
rref_table = _ACTIVE["rref_table"]
matmul_table = _ACTIVE["matmul_table"]
eval_points = _ACTIVE["eval_points"]
group_sum_table = _ACTIVE["group_sum_table"]
group_sum_prime = _ACTIVE["group_sum_prime"]


def backend():
    return "numba" if HAS_NUMBA else "numpy"
