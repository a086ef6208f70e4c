"""Finite-field factorization, degree patterns, and the Dedekind index test."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from certgal.bigarith import IntPoly
from certgal.errors import LeadingVanishes, Ramified, Reducible
from certgal.ffield import (
    FqField,
    FqPoly,
    dedekind_maximal_at_p,
    f16,
    factor_degree_pattern,
    fq_factor,
    frobenius_order,
    irreducible_mod_p,
)


def test_f16_field_structure():
    K = f16()
    assert K.q == 16 and K.p == 2 and K.k == 4
    one = K.one()
    a = K.gen()
    # the generator t has multiplicative order 15
    x = a
    for _ in range(14):
        assert x != one
        x = x * a
    assert x == one
    assert len(list(K.elements())) == 16


def test_reducible_modulus_rejected():
    with pytest.raises(Reducible):
        FqField(2, 4, [1, 0, 0, 0, 1])  # t^4 + 1 = (t+1)^4 mod 2


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=2, max_size=9))
def test_fq_factor_multiplicative_and_deterministic(tail):
    F = FqField(7)
    f = FqPoly.make(F, tail + [1])
    fac = fq_factor(f)
    prod = FqPoly.make(F, [1])
    for g, e in fac:
        assert g.coeffs[-1] == F.one()
        for _ in range(e):
            prod = prod * g
    assert prod == f
    assert fq_factor(f) == fac


def test_fq_factor_known_splitting():
    # x^4 + 1 mod 7 = (x^2 + 3x + 1)(x^2 + 4x + 1)
    F = FqField(7)
    fac = fq_factor(FqPoly.make(F, [1, 0, 0, 0, 1]))
    got = sorted(tuple(c.rep[0] for c in g.coeffs) for g, _ in fac)
    assert got == [(1, 3, 1), (1, 4, 1)]


def test_fq_factor_extension_field():
    # over F16, x^2 + x + t is either split or irreducible; its product check
    K = f16()
    f = FqPoly.make(K, [K.gen(), K.one(), K.one()])
    fac = fq_factor(f)
    prod = FqPoly.make(K, [1])
    for g, e in fac:
        for _ in range(e):
            prod = prod * g
    assert prod == f.monic()


def test_factor_degree_pattern_examples():
    f = IntPoly([1, 0, 1])  # x^2 + 1
    assert factor_degree_pattern(f, 5).degrees() == [1, 1]
    assert factor_degree_pattern(f, 7).degrees() == [2]
    pat = factor_degree_pattern(IntPoly([1, 2, 1]), 2)  # (x+1)^2 mod 2
    assert not pat.squarefree and pat.degrees() == [1, 1]
    with pytest.raises(Ramified):
        frobenius_order(pat)
    with pytest.raises(LeadingVanishes):
        factor_degree_pattern(IntPoly([1, 0, 5]), 5)


def test_pattern_large_prime_path(P):
    # the generic fq_factor path (p >= 2^20) agrees with the numpy path shape
    pat = factor_degree_pattern(P, (1 << 31) - 1)
    assert pat.total_degree == 17 and sum(pat.degrees()) == 17


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 10), min_size=2, max_size=7))
def test_pattern_consistent_with_factorization(tail):
    p = 11
    f = IntPoly(tail + [1])
    pat = factor_degree_pattern(f, p)
    fac = fq_factor(FqPoly.make(FqField(p), [c % p for c in f.coeffs]))
    got = sorted(g.degree for g, e in fac for _ in range(e))
    assert pat.degrees() == got
    assert pat.squarefree == all(e == 1 for _g, e in fac)


def test_P_mod5_irreducible(P):
    assert irreducible_mod_p(P, 5)
    assert factor_degree_pattern(P, 5).degrees() == [17]


def test_P_mod7_pattern_and_roots(P):
    pat = factor_degree_pattern(P, 7)
    assert pat.degrees() == [1, 1, 15] and pat.squarefree
    roots = sorted(a for a in range(7) if P.eval_int(a) % 7 == 0)
    assert roots == [3, 5]
    assert frobenius_order(pat) == 15


def test_P_mod137_splitting(P):
    fac = fq_factor(FqPoly.make(FqField(137), [c % 137 for c in P.coeffs]))
    degs = sorted((g.degree, e) for g, e in fac)
    assert degs == [(1, 1), (2, 2), (2, 2), (2, 2), (2, 2)]


def test_dedekind_verdicts(P, R):
    assert dedekind_maximal_at_p(P, 137)
    # v2(disc P) = 64 but v2(disc O_K) = 30: P's equation order is far from
    # maximal at 2, which is why the 2-adic work runs on R instead
    assert not dedekind_maximal_at_p(P, 2)
    assert dedekind_maximal_at_p(R, 2)
    for q in (3, 11, 67):
        assert not dedekind_maximal_at_p(P, q)


def test_dedekind_textbook_cases():
    assert not dedekind_maximal_at_p(IntPoly([-5, 0, 1]), 2)  # Z[sqrt 5] at 2
    assert dedekind_maximal_at_p(IntPoly([-2, 0, 1]), 2)  # Eisenstein
    assert dedekind_maximal_at_p(IntPoly([1, 0, 1]), 3)  # unramified
