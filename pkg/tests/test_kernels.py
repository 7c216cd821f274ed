import os
import subprocess
import sys

import numpy as np
import pytest

from frobwitt import _kernels as K
from frobwitt.ff import make_field

needs_numba = pytest.mark.skipif(not K.HAS_NUMBA, reason="numba disabled or missing")


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def _cases(rng):
    F9, F25 = make_field(3, 2), make_field(5, 2)
    t9, t25 = F9.tables, F25.tables
    out = []
    for _ in range(5):
        n, m = (int(x) for x in rng.integers(1, 12, size=2))
        out.append(("rref_prime", (rng.integers(0, 7, size=(n, m)).astype(np.int64), 7)))
        out.append(("rref_table", (rng.integers(0, 9, size=(n, m)).astype(np.int64), t9.add, t9.mul, t9.neg, t9.inv)))
        out.append(("matmul_table", (rng.integers(0, 25, size=(n, m)).astype(np.int64),
                                     rng.integers(0, 25, size=(m, 4)).astype(np.int64), t25.add, t25.mul)))
        pts = rng.integers(0, 25, size=(40, 3)).astype(np.int64)
        exps = rng.integers(0, 4, size=(6, 3)).astype(np.int64)
        coeffs = rng.integers(1, 25, size=6).astype(np.int64)
        out.append(("eval_points", (pts, exps, coeffs, t25.add, t25.mul, F25.powtab(3))))
        for hi in (50, 10**9):  # dense-bucket and sort paths
            keys = rng.integers(0, hi, size=300).astype(np.int64)
            keys[::3] = keys[0]
            out.append(("group_sum_table", (keys, rng.integers(0, 9, size=300).astype(np.int64), t9.add, t9.digits, 3)))
            out.append(("group_sum_prime", (keys, rng.integers(0, 7, size=300).astype(np.int64), 7)))
    empty = np.zeros(0, dtype=np.int64)
    out.append(("group_sum_prime", (empty, empty, 7)))
    out.append(("group_sum_table", (empty, empty, t9.add, t9.digits, 3)))
    return out


def test_numba_numpy_parity(rng):
    for name, args in _cases(rng):
        assert _same(K.NUMPY_IMPL[name](*args), K.NUMBA_IMPL[name](*args)), name


@needs_numba
def test_backend_reports_numba():
    assert K.backend() == "numba"


def test_disable_flag_selects_numpy():
    env = dict(os.environ, FROBWITT_DISABLE_NUMBA="1")
    code = "from frobwitt import _kernels as K; print(K.backend(), K.rref_prime is K.NUMPY_IMPL['rref_prime'])"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "True"]


def test_group_sum_semantics():
    keys = np.array([5, 1, 5, 3, 1], dtype=np.int64)
    vals = np.array([3, 4, 5, 0, 3], dtype=np.int64)
    uk, uv = K.NUMPY_IMPL["group_sum_prime"](keys, vals, 7)
    # key 1: 4+3 = 0 mod 7 (dropped); key 3: 0 (dropped); key 5: 8 = 1
    assert uk.tolist() == [5] and uv.tolist() == [1]
