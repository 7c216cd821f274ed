import numpy as np
import pytest

from frobwitt.errors import BudgetExceeded, ContextMismatch
from frobwitt.ff import FieldElem, make_field, tower
from frobwitt.polyring import build_fp, evaluate, monomials, parse_poly, random_poly
from frobwitt.variety import (
    CyclicAction,
    Hypersurface,
    ambient_fixed_points,
    ambient_fixed_points_brute,
    cohomology_dims,
    cohomology_dims_nd,
    count_points,
    count_points_cone,
    iter_projective_chunks,
    orbit_sizes_ok,
    projective_size,
    sigma_fixed_points,
    smoothness_probe,
    subfield_points,
)

F3, F5 = make_field(3), make_field(5)
X3 = Hypersurface(build_fp(3))


def _naive_count(X, e):
    """Loop over normalized representatives with scalar evaluation."""
    emb = tower(X.ctx, e)
    E = emb.sup
    n = 0
    for chunk in iter_projective_chunks(E.q, X.N):
        for pt in chunk:
            if not evaluate(X.f, [FieldElem(E, int(c)) for c in pt], emb):
                n += 1
    return n


def test_enumeration_covers_projective_space():
    for Q, N in [(3, 1), (3, 2), (4, 2), (5, 2)]:
        pts = np.concatenate(list(iter_projective_chunks(Q, N, chunk=7)))
        assert len(pts) == projective_size(Q, N)
        assert len({tuple(p) for p in pts}) == len(pts)
        for p in pts:
            assert p[np.nonzero(p)[0][0]] == 1


def test_simple_counts():
    assert count_points(Hypersurface(parse_poly("X0", F5, 2)), 1).count == 1
    assert count_points(Hypersurface(parse_poly("X0*X1", F5, 2)), 1).count == 2


def test_fp3_counts_golden():
    # frozen after agreement of three enumerators (vectorised, cone, scalar loop)
    golden = {1: 6, 2: 12, 3: 18}
    for e, n in golden.items():
        assert count_points(X3, e).count == n
        assert count_points_cone(X3, e).count == n
        assert _naive_count(X3, e) == n


@pytest.mark.parametrize("pf,d", [((3, 1), 3), ((5, 1), 3), ((3, 2), 2), ((5, 1), 4)])
def test_two_strategies_agree(pf, d, rng):
    F = make_field(*pf)
    for _ in range(3):
        X = Hypersurface(random_poly(F, 3, d, rng))
        assert count_points(X, 1).count == count_points_cone(X, 1).count == _naive_count(X, 1)


def test_subfield_monotonicity(rng):
    X = Hypersurface(random_poly(F3, 3, 3, rng))
    n1 = count_points(X, 1).count
    assert subfield_points(X, 1, 2) == n1 <= count_points(X, 2).count
    assert subfield_points(X3, 1, 3) == count_points(X3, 1).count


def test_budget():
    with pytest.raises(BudgetExceeded) as exc:
        count_points(X3, 3, budget=100)
    assert exc.value.required == 757 and exc.value.budget == 100
    with pytest.raises(BudgetExceeded):
        smoothness_probe(X3, 3, budget=100)


def test_budget_env(monkeypatch):
    monkeypatch.setenv("FROBWITT_BUDGET", "10")
    with pytest.raises(BudgetExceeded):
        count_points(X3, 1)


def test_smoothness_examples():
    r = smoothness_probe(Hypersurface(parse_poly("X0^2", F3, 2)), 1)
    assert r.witness == (1, (0, 1))
    r = smoothness_probe(X3, 3)
    assert not r.singular_found and r.probed == [1, 2, 3] and r.bounded
    r = smoothness_probe(Hypersurface(parse_poly("X0^3+X1^3+X2^3", F3, 3)), 1)
    assert r.singular_found
    pt = [FieldElem(F3, c) for c in r.witness[1]]
    assert not evaluate(parse_poly("X0^3+X1^3+X2^3", F3, 3), pt)


def test_fp5_smooth_at_e1():
    r = smoothness_probe(Hypersurface(build_fp(5)), 1)
    assert not r.singular_found and r.e_max == 1


def test_ambient_fixed_points():
    for e in (1, 2, 3):
        E = make_field(3, e)
        assert ambient_fixed_points(3, E) == ambient_fixed_points_brute(3, E) == [(1, 1, 1)]
    E = make_field(5, 2)
    assert ambient_fixed_points(3, E) == ambient_fixed_points_brute(3, E)
    assert len(ambient_fixed_points(3, E)) == 3  # cube roots of unity in GF(25)


def test_sigma_fixed_points():
    r = sigma_fixed_points(X3, CyclicAction(3), 3)
    assert r.on_X == [] and all(v == [(1, 1, 1)] for v in r.ambient.values())
    fermat = Hypersurface(parse_poly("X0^3+X1^3+X2^3", F3, 3))
    assert sigma_fixed_points(fermat, CyclicAction(3), 1).on_X == [(1, (1, 1, 1))]
    with pytest.raises(ValueError):
        sigma_fixed_points(Hypersurface(parse_poly("X0^3+X1^3", F3, 3)), CyclicAction(3), 1)
    with pytest.raises(ContextMismatch):
        sigma_fixed_points(X3, CyclicAction(4), 1)


def test_orbit_counting():
    for e in (1, 2, 3):
        n, fixed = orbit_sizes_ok(X3, e)
        assert n == count_points(X3, e).count
        assert fixed == 0 and n % 3 == fixed % 3


def test_cohomology_examples():
    assert cohomology_dims(X3) == [1, 1]
    assert cohomology_dims(Hypersurface(build_fp(5))) == [1, 0, 0, 1]
    assert cohomology_dims_nd(3, 2) == [1, 0, 0]
    assert cohomology_dims_nd(2, 4) == [1, 3]


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("d", [1, 2, 3, 4, 5, 6, 7])
def test_serre_duality_count(N, d):
    # h^(N-1)(O_X) = h^0(O_X(d-N-1)) = number of monomials of degree d-N-1
    h = cohomology_dims_nd(N, d)
    assert h[0] == 1 and not any(h[1:-1])
    top = len(list(monomials(N + 1, d - N - 1))) if d >= N + 1 else 0
    assert h[-1] == top


def test_points_on_line():
    # a degree-d form on P^1 cuts out d points: h^0 = d
    for d in (1, 2, 3, 5):
        assert cohomology_dims_nd(1, d) == [d]


def test_hypersurface_validation():
    with pytest.raises(ValueError):
        Hypersurface(parse_poly("X0^2 + X1", F3, 2))
    with pytest.raises(ValueError):
        Hypersurface(parse_poly("X0 - X0", F3, 2))
