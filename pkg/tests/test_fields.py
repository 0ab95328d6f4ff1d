import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_mul, gf_rem

from gqkit.errors import NotPrime, TooLarge
from gqkit.fields import embedding, field_of_order, gf, is_prime, prime_power

ORDERS = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]


def test_small_fields():
    assert gf(2, 1).q == 2 and gf(3, 1).q == 3
    F4 = gf(2, 2)
    assert F4.modulus == [1, 1, 1]
    with pytest.raises(NotPrime):
        gf(4, 1)
    with pytest.raises(TooLarge):
        gf(2, 13)


def test_prime_helpers():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert prime_power(16) == (2, 4) and prime_power(12) is None


@pytest.mark.parametrize("q", ORDERS)
def test_field_axioms_exhaustive(q):
    F = field_of_order(q)
    E = list(F.elements)
    for a in E:
        assert F.add(a, 0) == a and F.mul(a, 1) == a
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
        for b in E:
            assert F.add(a, b) == F.add(b, a)
            assert F.mul(a, b) == F.mul(b, a)
            for c in E[: min(q, 5)]:
                assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
                assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))


@pytest.mark.parametrize("q", ORDERS)
def test_modulus_irreducible_and_least(q):
    F = field_of_order(q)
    high_first = [c % F.p for c in reversed(F.modulus)]
    assert gf_irreducible_p(high_first, F.p, ZZ)


@pytest.mark.parametrize("q", [4, 8, 9, 16])
def test_multiplication_matches_polynomial_oracle(q):
    F = field_of_order(q)
    mod = list(reversed(F.modulus))
    for a in F.elements:
        for b in F.elements:
            pa = list(reversed(F.digits[a]))
            pb = list(reversed(F.digits[b]))
            r = gf_rem(gf_mul(pa, pb, F.p, ZZ), mod, F.p, ZZ)
            digits = list(reversed(r)) + [0] * (F.k - len(r))
            assert F.digits[F.mul(a, b)] == digits


@pytest.mark.parametrize("q", ORDERS)
def test_frobenius_is_automorphism(q):
    F = field_of_order(q)
    img = [F.frob(a) for a in F.elements]
    assert sorted(img) == list(F.elements)
    for a in F.elements:
        for b in F.elements:
            assert F.frob(F.mul(a, b)) == F.mul(F.frob(a), F.frob(b))
            assert F.frob(F.add(a, b)) == F.add(F.frob(a), F.frob(b))
    assert all(F.frob(a, F.k) == a for a in F.elements)


@pytest.mark.parametrize("small,big", [(2, 4), (2, 8), (4, 16), (2, 16), (3, 9)])
def test_embedding_is_homomorphism(small, big):
    S, B = field_of_order(small), field_of_order(big)
    e = embedding(S, B)
    assert len(set(e)) == small
    for a in S.elements:
        for b in S.elements:
            assert e[S.add(a, b)] == B.add(e[a], e[b])
            assert e[S.mul(a, b)] == B.mul(e[a], e[b])


@given(st.sampled_from(ORDERS), st.integers(0, 10**6), st.integers(0, 40))
def test_power_rule(q, a, e):
    F = field_of_order(q)
    a %= q
    acc = 1
    for _ in range(e):
        acc = F.mul(acc, a)
    assert F.pow(a, e) == acc
