import numpy as np
import pytest

from _helpers import dict_power, random_smooth
from frobwitt import linalg as la
from frobwitt.errors import UnsupportedCohomologyProfile
from frobwitt.ff import make_field
from frobwitt.hassewitt import (
    _extract,
    hw_basis,
    hw_matrix,
    hw_matrix_direct,
    katz_check,
    trace_sequence,
    zeta_mod_p,
)
from frobwitt.polyring import build_fp, parse_poly, poly_pow
from frobwitt.semilinear import SemilinearOp, twisted_power
from frobwitt.variety import Hypersurface, cohomology_dims, count_points

F3, F5, F9 = make_field(3), make_field(5), make_field(3, 2)


def _cubic(ctx, a4, a6):
    """y^2 z = x^3 + a4 x z^2 + a6 z^3 as a form in (x, y, z)."""
    return Hypersurface(parse_poly(f"X1^2*X2 - X0^3 - {a4}*X0*X2^2 - {a6}*X2^3", ctx, 3))


def test_basis_examples():
    assert hw_basis(3, 2).monomials == ((1, 1, 1),)
    assert hw_basis(5, 4).monomials == ((1, 1, 1, 1, 1),)
    assert hw_basis(4, 2).monomials == ((2, 1, 1), (1, 2, 1), (1, 1, 2))
    assert len(hw_basis(2, 3)) == 0
    with pytest.raises(ValueError):
        hw_basis(0, 2)


@pytest.mark.parametrize("N,d", [(2, 3), (2, 4), (2, 5), (3, 4), (3, 6), (4, 5)])
def test_basis_size_matches_top_cohomology(N, d):
    from frobwitt.variety import cohomology_dims_nd

    assert len(hw_basis(d, N)) == cohomology_dims_nd(N, d)[-1]


def test_hw_examples():
    E = _cubic(F5, 1, 0)
    assert hw_matrix(E).A_q.tolist() == [[2]]
    # oracle: coefficient of (xyz)^4 in f^4 by dict expansion
    assert dict_power(E.f, 4)[(4, 4, 4)] == F5(2)
    assert hw_matrix(_cubic(F5, 0, 1)).A_q.tolist() == [[0]]
    X3 = Hypersurface(build_fp(3))
    assert hw_matrix(X3).A_q.tolist() == [[1]]
    assert dict_power(X3.f, 2)[(2, 2, 2)] == F3.one


def test_hw_p_entries_match_dict_oracle(rng):
    X = random_smooth(F5, 3, 4, rng)
    g = dict_power(X.f, 4)
    hw = hw_matrix(X)
    for i, u in enumerate(hw.basis.monomials):
        for j, w in enumerate(hw.basis.monomials):
            want = g.get(tuple(5 * b - a for a, b in zip(u, w)), F5.zero)
            assert int(hw.A_p[i, j]) == want.code


def test_twisted_equals_direct_gf9(rng):
    # 20 instances: plane cubics and quartics over GF(9)
    for k in range(20):
        d = 3 if k % 2 == 0 else 4
        X = random_smooth(F9, 3, d, rng)
        assert np.array_equal(hw_matrix(X).A_q, hw_matrix_direct(X))


def test_row_rule_disagrees_with_direct(rng):
    # the transposed entry rule A[u][w] = coeff(f^(p-1), p*u - w) does not
    # reproduce the q-power matrix extracted from f^(q-1) once q > p
    mismatches = 0
    for _ in range(6):
        X = random_smooth(F9, 3, 4, rng)
        g = poly_pow(X.f, 2)
        basis = hw_basis(4, 2)
        A_rows = _extract(F9, g, basis, 3).T.copy()
        A_q_rows = twisted_power(SemilinearOp(F9, F3, A_rows), 2)
        mismatches += not np.array_equal(A_q_rows, hw_matrix_direct(X))
    assert mismatches > 0


def test_zeta_examples():
    z = zeta_mod_p(_cubic(F5, 1, 0))
    assert z.zeta1 == [1, 3] and z.zeta0 == [1, 4]  # 1 - 2T and 1 - T
    assert z.value(1, 3).code == 0  # zero at 2^-1 = 3
    z = zeta_mod_p(_cubic(F5, 0, 1))
    assert z.zeta1 == [1] and z.zeta0 == [1, 4]
    X5 = Hypersurface(build_fp(5))
    c = dict_power(X5.f, 4).get((4,) * 5, F5.zero)
    z = zeta_mod_p(X5)
    assert z.n == 3
    assert z.zeta1 == ([1, (-c).code] if c else [1])
    assert z.zeta0 == [1, 4]


def test_zeta_even_dimension_goes_to_zeta0(rng):
    # quartic surface in P^3: n = 2, the top factor lands in zeta0
    X = Hypersurface(parse_poly("X0^4 + X1^4 + X2^4 + X3^4", F5, 4))
    z = zeta_mod_p(X)
    assert z.zeta1 == [1]
    assert len(z.zeta0) >= 2


def test_zeta_degree_bounds(rng):
    for ctx, d in [(F3, 3), (F5, 4), (F9, 4)]:
        X = random_smooth(ctx, 3, d, rng)
        z = zeta_mod_p(X)
        h = cohomology_dims(X)
        assert z.zeta0[0] == 1 and z.zeta1[0] == 1
        assert len(z.zeta1) - 1 <= h[1]
        assert len(z.zeta0) - 1 <= 1


def test_profile_rejected():
    with pytest.raises(UnsupportedCohomologyProfile):
        zeta_mod_p(Hypersurface(parse_poly("X0^2 + X1^2", F3, 2)))


def test_katz_examples():
    r = katz_check(_cubic(F5, 1, 0), 2)
    assert r.passed and r.rows[0].count == 4 and r.rows[0].rhs == 4
    r = katz_check(Hypersurface(build_fp(3)), 3)
    assert r.passed and [row.count for row in r.rows] == [6, 12, 18]


@pytest.mark.parametrize("ctx,d", [(F3, 3), (F3, 4), (F5, 3), (F5, 4), (F9, 3)])
def test_katz_random(ctx, d, rng):
    for _ in range(3):
        X = random_smooth(ctx, 3, d, rng)
        r = katz_check(X, 2)
        assert r.passed, r.to_json()
        assert all(row.trace_in_prime_field for row in r.rows)


def test_trace_sequence_matches_power(rng):
    X = random_smooth(F5, 3, 4, rng)
    hw = hw_matrix(X)
    tr = trace_sequence(X, 3, hw)
    M = la.matmul(F5, la.matmul(F5, hw.A_q, hw.A_q), hw.A_q)
    assert tr[2] == sum(int(M[i, i]) for i in range(3)) % 5


def test_counts_match_katz_rows():
    X = _cubic(F5, 1, 0)
    r = katz_check(X, 2)
    assert [row.count for row in r.rows] == [count_points(X, e).count for e in (1, 2)]
