"""Exact integer polynomial arithmetic: multiplication, division, CRT,
resultants, primality."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from certgal.bigarith import (
    IntPoly,
    balanced,
    crt_reconstruct,
    discriminant,
    is_prime,
    mul_z,
    power_sums,
    power_sums_to_monic,
    prime_pool,
    resultant,
    root_bound,
    subresultant_prs,
)
from certgal.errors import InsufficientModulus, NonMonic

coeff = st.integers(min_value=-(10**9), max_value=10**9)
small_poly = st.lists(coeff, min_size=1, max_size=8)


def naive_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@settings(max_examples=60, deadline=None)
@given(small_poly, small_poly)
def test_mul_z_matches_schoolbook(a, b):
    assert mul_z(a, b) == naive_mul(a, b) or (
        IntPoly(mul_z(a, b)) == IntPoly(naive_mul(a, b))
    )


def test_mul_z_large_coefficients():
    # Kronecker packing must survive 200-digit coefficients and sign mixes.
    a = [(-10) ** 100 + 7, 3, -(10**200)]
    b = [10**150, -5]
    assert mul_z(a, b) == naive_mul(a, b)


def test_intpoly_basics():
    f = IntPoly([1, 2, 3])
    assert f.degree == 2 and f.lc() == 3 and not f.is_monic()
    assert IntPoly([0, 0]).is_zero()
    assert IntPoly([1, 0, 0]).degree == 0  # trailing zeros trimmed
    g = IntPoly([0, 1])
    assert (f * g).coeffs == (0, 1, 2, 3)
    assert (f + g).coeffs == (1, 3, 3)
    assert (f - f).is_zero()
    assert f.eval_int(2) == 1 + 4 + 12
    assert f.eval_frac(Fraction(1, 2)) == Fraction(11, 4)
    assert f.derivative().coeffs == (2, 6)
    with pytest.raises(AttributeError):
        f.coeffs = (1,)


def test_divmod_exact_roundtrip():
    rng = random.Random(5)
    for _ in range(40):
        d = IntPoly([rng.randrange(-9, 10) for _ in range(rng.randrange(1, 5))] + [1])
        q = IntPoly([rng.randrange(-9, 10) for _ in range(rng.randrange(1, 6))])
        r = IntPoly([rng.randrange(-9, 10) for _ in range(d.degree)] or [0])
        f = d * q + r
        q2, r2 = f.divmod_exact(d)
        assert q2 == q and r2 == r
    with pytest.raises(NonMonic):
        IntPoly([1, 2]).divmod_exact(IntPoly([1, 3]))


def test_divides_gate():
    d = IntPoly([2, 1])
    assert d.divides(d * IntPoly([5, -3, 1]))
    assert not d.divides(IntPoly([1, 1]))


def test_compose_linear_shift():
    f = IntPoly([1, 0, 1])  # x^2 + 1
    g = f.compose_linear_shift(3)  # (x+3)^2 + 1 = x^2 + 6x + 10
    assert g.coeffs == (10, 6, 1)
    h = g.compose_linear_shift(-3)
    assert h == f


@settings(max_examples=80, deadline=None)
@given(st.integers(-(10**12), 10**12), st.integers(2, 10**9))
def test_balanced_representative(x, m):
    b = balanced(x, m)
    assert (b - x) % m == 0
    assert -m < 2 * b <= m


def test_crt_reconstruct_roundtrip():
    primes = prime_pool(6)
    rng = random.Random(11)
    coeffs = [rng.randrange(-(10**40), 10**40) for _ in range(5)]
    residues = [(p, [c % p for c in coeffs]) for p in primes]
    got = crt_reconstruct(residues, 10**40)
    assert got == IntPoly(coeffs)
    with pytest.raises(InsufficientModulus):
        crt_reconstruct(residues[:2], 10**40)


def test_prime_pool_contract():
    ps = prime_pool(50)
    assert len(ps) == len(set(ps)) == 50
    assert all(is_prime(p) and 9520 < p < (1 << 31) for p in ps)
    assert ps == sorted(ps, reverse=True)  # deterministic descent


def test_is_prime_knowns():
    assert [is_prime(n) for n in (0, 1, 2, 3, 4)] == [False, False, True, True, False]
    assert not is_prime(561)  # Carmichael
    assert is_prime((1 << 31) - 1)
    assert not is_prime((1 << 31) - 3)
    assert is_prime(2380 + 3)  # 2383, used by the held-out residue check


def test_resultant_and_discriminant_knowns():
    # disc(x^2 + bx + c) = b^2 - 4c
    assert discriminant(IntPoly([7, 4, 1])) == 16 - 28
    # disc(x^3 + px + q) = -4p^3 - 27q^2
    assert discriminant(IntPoly([2, -1, 0, 1])) == -4 * (-1) ** 3 - 27 * 4
    # Res(x - a, g) = g(a)
    g = IntPoly([3, 1, 2])
    assert resultant(IntPoly([-5, 1]), g) == g.eval_int(5)
    # multiplicativity Res(f, g*h) = Res(f, g) Res(f, h)
    f = IntPoly([1, 3, 1])
    h = IntPoly([-2, 0, 1])
    assert resultant(f, g * h) == resultant(f, g) * resultant(f, h)


def test_subresultant_matches_modular_resultant():
    rng = random.Random(3)
    for _ in range(10):
        f = IntPoly([rng.randrange(-20, 21) for _ in range(5)] + [1])
        g = IntPoly([rng.randrange(-20, 21) for _ in range(4)] + [1])
        assert subresultant_prs(f, g) == resultant(f, g)


def test_disc_P_factorization(P):
    d = discriminant(P)
    assert d == (2**64) * (137**8) * (2211**2)
    assert 2211 == 3 * 11 * 67


def test_root_bound_dominates_roots():
    # real roots of (x-3)(x+5)(x-1) must land inside the bound
    f = IntPoly([15, -13, -3, 1])
    rb = root_bound(f)
    assert rb.kind in ("cauchy", "fujiwara")
    assert rb.bound >= 5


def test_power_sums_newton_roundtrip():
    p = 10007
    f = IntPoly([6, 11, 6, 1])  # (x+1)(x+2)(x+3), roots -1, -2, -3
    ps = power_sums(f, 5)
    assert ps == [-6, 14, -36, 98, -276]
    back = power_sums_to_monic([x % p for x in ps[:3]], 3, p)
    assert back == [c % p for c in f.coeffs]
