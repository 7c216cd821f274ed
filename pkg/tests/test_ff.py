import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frobwitt import linalg as la
from frobwitt.errors import ContextMismatch, DegreeZero, NonPrime
from frobwitt.ff import (
    FieldElem,
    embed,
    field_from_json,
    frobenius,
    is_prime,
    make_embedding,
    make_field,
    smallest_irreducible,
    tower,
)

# (p, f) pairs covering prime fields, tabled extensions and the untabled path
FIELDS = [(2, 1), (3, 1), (5, 1), (2, 3), (3, 2), (5, 2), (7, 2), (2, 8), (3, 5), (3, 8)]


# -- naive oracles ---------------------------------------------------------


def _polymulmod(a, b, mod, p):
    """Schoolbook product of coefficient lists modulo a monic polynomial."""
    f = len(mod) - 1
    out = [0] * (2 * f)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    for k in range(len(out) - 1, f - 1, -1):
        c = out[k]
        if c:
            for j in range(f + 1):
                out[k - f + j] = (out[k - f + j] - c * mod[j]) % p
    return tuple(out[:f])


def _has_factor(g, p):
    """Trial division by every monic polynomial of degree 1..deg/2."""
    n = len(g) - 1
    for d in range(1, n // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            h = list(low) + [1]
            r = list(g)
            for k in range(n, d - 1, -1):
                c = r[k]
                if c:
                    for j in range(d + 1):
                        r[k - d + j] = (r[k - d + j] - c * h[j]) % p
            if not any(r[:d]):
                return True
    return False


# -- construction ----------------------------------------------------------


def test_is_prime_small():
    naive = [n for n in range(2, 500) if all(n % k for k in range(2, int(n**0.5) + 1))]
    assert [n for n in range(500) if is_prime(n)] == naive


def test_prime_field_modulus_is_x():
    assert make_field(3, 1).modulus == (0, 1)
    assert make_field(5).q == 5


def test_gf9_modulus():
    assert make_field(3, 2).modulus == (1, 0, 1)


@pytest.mark.parametrize("p,f", [(2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2)])
def test_modulus_matches_exhaustive_search(p, f):
    # c0 compared first: enumerate tuples (c0, ..., c_{f-1}) in lex order
    for cand in itertools.product(range(p), repeat=f):
        g = list(cand) + [1]
        if not _has_factor(g, p) and g[0] != 0:
            break
    assert smallest_irreducible(p, f) == tuple(g)


def test_make_field_deterministic():
    a, b = make_field(3, 7), make_field(3, 7)
    assert a.modulus == b.modulus
    assert smallest_irreducible(3, 7) == a.modulus


def test_make_field_errors():
    with pytest.raises(NonPrime):
        make_field(9, 1)
    with pytest.raises(NonPrime):
        make_field(1, 1)
    with pytest.raises(DegreeZero):
        make_field(3, 0)


def test_json_roundtrip():
    F = make_field(5, 2)
    assert field_from_json(F.to_json()) is F
    bad = dict(F.to_json(), modulus=[2, 0, 1])  # irreducible, but not the smallest
    with pytest.raises(ContextMismatch):
        field_from_json(bad)
    assert F(7).to_json() == [2, 0]


# -- arithmetic ------------------------------------------------------------


@pytest.mark.parametrize("p,f", FIELDS)
def test_mul_matches_schoolbook(p, f, rng):
    F = make_field(p, f)
    mod = F.modulus
    for _ in range(200):
        a, b = (int(x) for x in rng.integers(0, F.q, size=2))
        want = _polymulmod(F.decode(a), F.decode(b), mod, p)
        assert F.decode(F.mul(a, b)) == want


@pytest.mark.parametrize("p,f", FIELDS)
def test_inverse_and_pow(p, f, rng):
    F = make_field(p, f)
    for a in rng.integers(1, F.q, size=50):
        a = int(a)
        assert F.mul(a, F.inv(a)) == 1
        assert F.pow(a, F.q - 1) == 1
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


@pytest.mark.parametrize("p,f", [(3, 2), (5, 2), (2, 4), (3, 8)])
@given(data=st.data())
def test_field_axioms(p, f, data):
    F = make_field(p, f)
    x, y, z = (F(data.draw(st.integers(0, F.q - 1))) for _ in range(3))
    assert (x + y) + z == x + (y + z)
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z
    assert x - x == F.zero
    if x:
        assert x * x.inverse() == F.one


@pytest.mark.parametrize("p,f", FIELDS)
def test_freshman_dream(p, f, rng):
    F = make_field(p, f)
    xs = rng.integers(0, F.q, size=(1000, 2))
    for a, b in xs:
        a, b = int(a), int(b)
        assert F.pow(F.add(a, b), p) == F.add(F.pow(a, p), F.pow(b, p))


# -- Frobenius -------------------------------------------------------------


def test_frobenius_examples():
    F9 = make_field(3, 2)
    t = F9.gen
    assert frobenius(F9, t, 1) == 2 * t
    assert frobenius(F9, t, 1) == t**3  # direct exponentiation oracle
    for i in range(5):
        assert frobenius(F9, F9.one, i) == F9.one
    F5 = make_field(5)
    assert frobenius(F5, F5(2), 1) == F5(2)


@pytest.mark.parametrize("p,f", FIELDS)
def test_frobenius_is_power_map(p, f, rng):
    F = make_field(p, f)
    for a in rng.integers(0, F.q, size=30):
        x = F(int(a))
        for i in range(3):
            assert x.frobenius(i) == x ** (p**i)
        assert x.frobenius(f) == x


@pytest.mark.parametrize("p,f,m", [(3, 1, 2), (3, 2, 2), (2, 2, 3), (5, 1, 3), (3, 1, 4)])
def test_frobenius_fixed_field_dimension(p, f, m):
    E = make_field(p, f * m)
    Fr = E.frobenius_matrix
    P = np.eye(E.f, dtype=np.int64)
    for _ in range(f):
        P = (Fr @ P) % p
    K = la.nullspace_prime((P - np.eye(E.f, dtype=np.int64)) % p, p)
    assert K.shape[1] == f
    P_all = np.eye(E.f, dtype=np.int64)
    for _ in range(f * m):
        P_all = (Fr @ P_all) % p
    assert np.array_equal(P_all, np.eye(E.f, dtype=np.int64))


# -- embeddings ------------------------------------------------------------


@pytest.mark.parametrize("sub,m", [((3, 1), 2), ((3, 2), 2), ((3, 2), 3), ((2, 2), 3), ((5, 2), 2), ((2, 3), 2)])
def test_embedding_is_homomorphism(sub, m, rng):
    S = make_field(*sub)
    emb = tower(S, m)
    E = emb.sup
    assert E.f == S.f * m
    # generator image is a root of the modulus
    v = E.zero
    for c in reversed(S.modulus):
        v = v * emb.gen_image + c
    assert not v
    assert embed(emb, S.zero) == E.zero and embed(emb, S.one) == E.one
    for a, b in rng.integers(0, S.q, size=(100, 2)):
        x, y = S(int(a)), S(int(b))
        assert embed(emb, x + y) == embed(emb, x) + embed(emb, y)
        assert embed(emb, x * y) == embed(emb, x) * embed(emb, y)
        assert embed(emb, x.frobenius(1)) == embed(emb, x).frobenius(1)
        assert embed(emb, x).frobenius(S.f) == embed(emb, x)


def test_prime_subfield_embeds_coordinatewise():
    emb = tower(make_field(3), 2)
    assert embed(emb, make_field(3)(2)) == emb.sup(2)
    assert emb.sup(2).coeffs == (2, 0)


def test_embedding_errors():
    with pytest.raises(ContextMismatch):
        make_embedding(make_field(3, 2), make_field(3, 3))
    with pytest.raises(ContextMismatch):
        embed(tower(make_field(3), 2), make_field(5)(1))


def test_elem_cross_context_rejected():
    with pytest.raises(ContextMismatch):
        make_field(3)(1) + make_field(5)(1)


def test_large_field_generic_path():
    # beyond the table limit arithmetic goes through reduction matrices
    F = make_field(3, 8)
    assert not F.tabled
    x = F.gen
    assert x ** F.q == x
    assert (x + 1) ** 3 == x**3 + 1
