import numpy as np
import pytest

from frobwitt import linalg as la
from frobwitt.errors import DecompositionMismatch, NotExact, NotOrderP
from frobwitt.ff import make_field
from frobwitt.modrep import (
    CyclicModule,
    add_free_summand,
    build_periodic_complex,
    change_bases,
    compute_L_Lprime,
    conjugate,
    direct_sum,
    dual,
    ext_dim,
    ext_dim_resolution,
    free_resolution,
    injective_hull,
    is_free,
    jordan_type,
    quotient,
    random_complex,
    random_invertible,
    random_module,
    tate_cohomology,
    verify_prop34_35,
)

F3, F5 = make_field(3), make_field(5)


def _mod_tr(ctx):
    """k[C] / k*Tr."""
    R = CyclicModule.regular(ctx)
    return quotient(R, la.colspace(ctx, R.trace))[0]


def _naive_jordan(M):
    """Block sizes from the ranks of u^j by the standard recurrence."""
    ctx, p = M.ctx, M.p
    r = [M.dim]
    P = la.identity(ctx, M.dim)
    for _ in range(p + 1):
        P = la.matmul(ctx, P, M.u)
        r.append(la.rank(ctx, P))
    blocks = []
    for s in range(1, p + 1):
        n_s = r[s - 1] - 2 * r[s] + r[s + 1]
        blocks += [s] * n_s
    return sorted(blocks, reverse=True)


def test_jordan_examples():
    assert jordan_type(CyclicModule.regular(F3)) == [3]
    assert jordan_type(CyclicModule.trivial(F3)) == [1]
    assert jordan_type(_mod_tr(F3)) == [2]
    assert is_free(CyclicModule.free(F5, 2))


def test_not_order_p():
    with pytest.raises(NotOrderP):
        CyclicModule(F3, [[2]])
    with pytest.raises(ValueError):
        CyclicModule.jordan_block(F3, 4)


def test_trace_is_power_of_u():
    for ctx in (F3, F5, make_field(3, 2)):
        M = random_module(ctx, np.random.default_rng(3))
        assert np.array_equal(M.trace, M.trace_by_sum())


@pytest.mark.parametrize("ctx", [F3, F5])
def test_jordan_invariant_under_conjugation(ctx, rng):
    for _ in range(20):
        sizes = sorted((int(s) for s in rng.integers(1, ctx.p + 1, size=int(rng.integers(1, 5)))), reverse=True)
        M = CyclicModule.from_jordan(ctx, sizes)
        N = conjugate(M, random_invertible(ctx, M.dim, rng))
        assert jordan_type(N) == sizes == _naive_jordan(N)


def test_tate_examples():
    for i in range(-3, 4):
        assert tate_cohomology(CyclicModule.free(F3, 2), i).dim == 0
        assert tate_cohomology(CyclicModule.trivial(F3), i).dim == 1
        assert tate_cohomology(_mod_tr(F3), i).dim == 1


@pytest.mark.parametrize("ctx", [F3, F5])
def test_tate_periodicity(ctx, rng):
    for _ in range(100):
        M = random_module(ctx, rng)
        d = [tate_cohomology(M, i).dim for i in range(-2, 4)]
        assert d[0] == d[2] == d[4] and d[1] == d[3] == d[5]
        # for Z/p both groups count the non-free blocks
        assert d[0] == d[1] == sum(1 for s in jordan_type(M) if s != ctx.p)


def test_ext_examples():
    M = direct_sum(F3, CyclicModule.trivial(F3), CyclicModule.free(F3, 2))
    for n in range(1, 4):
        assert ext_dim(M, n + 1) == 1
    assert all(ext_dim(CyclicModule.free(F3, 2), m) == 0 for m in range(1, 4))
    assert all(ext_dim(_mod_tr(F3), m) == 1 for m in range(1, 4))
    assert jordan_type(dual(_mod_tr(F3))) == [2]
    with pytest.raises(ValueError):
        ext_dim(M, 0)


@pytest.mark.parametrize("ctx", [F3, F5, make_field(3, 2)])
def test_ext_matches_resolution(ctx, rng):
    for _ in range(25):
        M = random_module(ctx, rng)
        for m in (1, 2, 3):
            assert ext_dim(M, m) == ext_dim_resolution(M, m)


def test_free_resolution_is_exact(rng):
    M = random_module(F3, rng)
    ranks, bounds = free_resolution(M, 3)
    for a, b in zip(bounds, bounds[1:]):
        assert la.is_zero(la.matmul(F3, a, b))
    # minimal resolution of Z/p-modules: rank = number of non-free blocks after step 0
    nonfree = sum(1 for s in jordan_type(M) if s != 3)
    assert ranks[1:] == [nonfree] * 3


def test_dual_convention():
    M = random_module(F5, np.random.default_rng(7))
    D = dual(M)
    assert np.array_equal(la.matmul(F5, D.sigma, M.sigma.T), la.identity(F5, M.dim))


def test_periodic_complex_examples():
    for p, ctx in [(3, F3), (5, F5)]:
        for n in range(1, 5):
            Cx = build_periodic_complex(p, ctx, n)
            info = Cx.verify()
            assert info["kernel_dim"] == 1
            assert jordan_type(Cx.end) == ([1] if n % 2 else [p - 1])
            for a, b in zip(info["ranks"], info["ranks"][1:]):
                assert a + b == p
    with pytest.raises(ValueError):
        build_periodic_complex(5, F3, 1)


def test_L_Lprime_examples():
    assert (lambda r: (r.dim_L, r.dim_Lprime))(compute_L_Lprime(build_periodic_complex(3, F3, 1))) == (1, 1)
    assert (lambda r: (r.dim_L, r.dim_Lprime))(compute_L_Lprime(build_periodic_complex(3, F3, 2))) == (1, 1)
    Cx = add_free_summand(build_periodic_complex(3, F3, 2), 0)
    Cx.verify()
    r = compute_L_Lprime(Cx)
    assert (r.dim_L, r.dim_Lprime) == (1, 1)


@pytest.mark.parametrize("p,ctx", [(3, F3), (5, F5), (3, make_field(3, 2))])
def test_L_Lprime_random(p, ctx, rng):
    for _ in range(10):
        n = int(rng.integers(1, 5))
        Cx = random_complex(p, ctx, n, rng)
        Cx.verify()
        r = compute_L_Lprime(Cx)
        assert (r.dim_L, r.dim_Lprime) == (1, 1)


def test_broken_complex_detected(rng):
    Cx = build_periodic_complex(3, F3, 2)
    Cx.maps[1] = Cx.maps[0]  # u after u is not zero
    with pytest.raises(NotExact):
        Cx.verify()
    with pytest.raises(NotExact):
        compute_L_Lprime(Cx)


def test_injective_hull(rng):
    for _ in range(10):
        M = random_module(F3, rng)
        I, j = injective_hull(M)
        assert is_free(I)
        assert la.rank(F3, j) == M.dim
        assert np.array_equal(la.matmul(F3, j, M.sigma), la.matmul(F3, I.sigma, j))


def test_change_bases_preserves_exactness(rng):
    Cx = change_bases(build_periodic_complex(5, F5, 3), rng)
    Cx.verify()


def test_prop_reports():
    odd = verify_prop34_35(direct_sum(F3, CyclicModule.trivial(F3), CyclicModule.free(F3, 2)), 1)
    assert odd.passed and odd.parity == "odd"
    even = verify_prop34_35(direct_sum(F3, _mod_tr(F3), CyclicModule.regular(F3)), 2)
    assert even.passed and even.parity == "even"
    names = {c.name: c.value for c in even.checks}
    assert names["ext_n_plus_1"] == 1 and names["Mn_coinvariants"] == 1
    free = verify_prop34_35(CyclicModule.free(F3, 2), 1)
    assert free.passed and all(not c.value or isinstance(c.value, bool) for c in free.checks)
    with pytest.raises(DecompositionMismatch):
        verify_prop34_35(CyclicModule.trivial(F3), 2)
