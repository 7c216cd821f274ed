"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat 5] [--json]

Each kernel is called on the same inputs through both implementations; the
outputs are compared before any timing is reported. The first numba call
(compilation) is excluded.
"""

import argparse
import json
import statistics
import time

import numpy as np

from frobwitt import _kernels as K
from frobwitt.ff import make_field


def _inputs(rng):
    F9 = make_field(3, 2)
    F25 = make_field(5, 2)
    t9, t25 = F9.tables, F25.tables
    pts = rng.integers(0, 25, size=(20000, 5)).astype(np.int64)
    exps = rng.integers(0, 5, size=(60, 5)).astype(np.int64)
    coeffs = rng.integers(1, 25, size=60).astype(np.int64)
    keys = rng.integers(0, 5000, size=200000).astype(np.int64)
    return {
        "rref_prime": (rng.integers(0, 7, size=(160, 200)).astype(np.int64), 7),
        "rref_table": (rng.integers(0, 9, size=(120, 150)).astype(np.int64), t9.add, t9.mul, t9.neg, t9.inv),
        "matmul_table": (
            rng.integers(0, 9, size=(120, 120)).astype(np.int64),
            rng.integers(0, 9, size=(120, 120)).astype(np.int64),
            t9.add,
            t9.mul,
        ),
        "eval_points": (pts, exps, coeffs, t25.add, t25.mul, F25.powtab(4)),
        "group_sum_table": (keys, rng.integers(0, 9, size=keys.size).astype(np.int64), t9.add, t9.digits, 3),
        "group_sum_prime": (keys, rng.integers(0, 7, size=keys.size).astype(np.int64), 7),
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def _time(fn, args, repeat):
    out = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        out.append(time.perf_counter() - t0)
    return statistics.median(out)


def run(repeat=5, seed=0):
    rng = np.random.default_rng(seed)
    rows = []
    for name, args in _inputs(rng).items():
        nb, npy = K.NUMBA_IMPL[name], K.NUMPY_IMPL[name]
        ref = npy(*args)
        got = nb(*args)  # also triggers compilation
        if not _same(ref, got):
            raise SystemExit(f"{name}: numba and numpy disagree")
        t_np = _time(npy, args, repeat)
        t_nb = _time(nb, args, repeat)
        rows.append({"kernel": name, "numpy_s": t_np, "numba_s": t_nb, "speedup": t_np / t_nb if t_nb else None})
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    if not K.HAS_NUMBA:
        print("numba unavailable or disabled; both columns time the same pure-Python/numpy code")
    rows = run(args.repeat, args.seed)
    if args.json:
        print(json.dumps({"backend": K.backend(), "rows": rows}, indent=2))
        return
    print(f"{'kernel':<18}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for r in rows:
        print(f"{r['kernel']:<18}{1e3 * r['numpy_s']:>12.2f}{1e3 * r['numba_s']:>12.2f}{r['speedup']:>9.1f}x")


if __name__ == "__main__":
    main()
