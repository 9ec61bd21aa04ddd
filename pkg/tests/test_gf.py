"""Field contexts: frozen tables, algebraic laws, validation."""

import random

import pytest

from kinderlab.gf import FieldError, make_field

# GF(4) with modulus x^2 + x + 1; elements 0, 1, x=2, x+1=3.
F4_MUL = {
    (0, 0): 0, (0, 1): 0, (0, 2): 0, (0, 3): 0,
    (1, 1): 1, (1, 2): 2, (1, 3): 3,
    (2, 2): 3, (2, 3): 1,
    (3, 3): 2,
}


def test_f4_hand_table():
    F = make_field(2, 2, modulus=(1, 1, 1))
    for (a, b), c in F4_MUL.items():
        assert F.mul(a, b) == c
        assert F.mul(b, a) == c
    assert F.inv(2) == 3 and F.inv(3) == 2 and F.inv(1) == 1


def test_f9_squares():
    # GF(9) = F_3[x]/(x^2 + m1 x + m0): x*x must reduce to -m0 - m1 x
    F = make_field(3, 2)
    m0, m1, m2 = F.modulus
    assert m2 == 1
    x = 3  # digits (0, 1)
    want = F.from_vector(((-m0) % 3, (-m1) % 3))
    assert F.mul(x, x) == want


@pytest.mark.parametrize("p,e", [(2, 1), (3, 1), (2, 3), (5, 2), (3, 3), (2, 10)])
def test_field_laws(p, e):
    F = make_field(p, e)
    rng = random.Random(1000 * p + e)
    for _ in range(200):
        a, b, c = (F.random_element(rng) for _ in range(3))
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.add(a, F.neg(a)) == 0
        assert F.sub(a, b) == F.add(a, F.neg(b))
        if b:
            assert F.mul(F.div(a, b), b) == a
            assert F.mul(b, F.inv(b)) == 1


@pytest.mark.parametrize("p,e", [(2, 4), (3, 2), (5, 2)])
def test_frobenius_and_trace(p, e):
    F = make_field(p, e)
    rng = random.Random(p * e)
    for _ in range(100):
        a, b = F.random_element(rng), F.random_element(rng)
        assert F.frobenius(a) == F.pow(a, p)
        assert F.frobenius(F.add(a, b)) == F.add(F.frobenius(a), F.frobenius(b))
        assert F.frobenius(a, e) == a
        t = F.trace(a)
        assert t < p  # lands in the prime field
        assert F.trace(F.add(a, b)) == (F.trace(a) + F.trace(b)) % p


def test_vector_roundtrip_and_elements():
    F = make_field(3, 2)
    assert list(F.elements()) == list(range(9))
    for a in F.elements():
        v = F.to_vector(a)
        assert len(v) == 2 and all(0 <= x < 3 for x in v)
        assert F.from_vector(v) == a


def test_primitive_order():
    for p, e in ((2, 3), (3, 2), (7, 1)):
        F = make_field(p, e)
        g = F.primitive
        seen = set()
        x = 1
        for _ in range(F.order - 1):
            seen.add(x)
            x = F.mul(x, g)
        assert x == 1 and len(seen) == F.order - 1


def test_pow_matches_repeated_mul():
    F = make_field(2, 5)
    rng = random.Random(3)
    for _ in range(30):
        a = F.random_nonzero(rng)
        k = rng.randrange(0, 40)
        acc = 1
        for _ in range(k):
            acc = F.mul(acc, a)
        assert F.pow(a, k) == acc


def test_modulus_validation():
    with pytest.raises(FieldError):
        make_field(2, 2, modulus=(1, 1))  # wrong length
    with pytest.raises(FieldError):
        make_field(2, 2, modulus=(1, 1, 2))  # not monic
    with pytest.raises(FieldError):
        make_field(2, 3, modulus=(1, 0, 0, 1))  # x^3+1 reducible
    with pytest.raises(FieldError):
        make_field(4, 1)  # not a prime


def test_cache_identity():
    assert make_field(2, 3) is make_field(2, 3)
    assert make_field(2, 3) is not make_field(2, 3, modulus=(1, 1, 0, 1)) or (
        make_field(2, 3).modulus == (1, 1, 0, 1)
    )


def test_validate_report():
    for p, e in ((2, 1), (2, 8), (3, 4), (13, 2)):
        rep = make_field(p, e).validate()
        assert rep and all(rep.values()), (p, e, rep)


def test_large_binary_field():
    F = make_field(2, 257)
    rng = random.Random(0)
    for _ in range(10):
        a = F.random_nonzero(rng)
        assert F.mul(a, F.inv(a)) == 1
        assert F.frobenius(a, 257) == a
