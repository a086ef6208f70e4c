"""Exact LLL and the van Hoeij-style factor search used as the fallback
route when no factor files are supplied."""

import random
from fractions import Fraction

import pytest

from certgal.bigarith import IntPoly
from certgal.errors import Inconclusive, Inconsistent
from certgal.ffield import irreducible_mod_p
from certgal.resolvent import lattice


def gram_schmidt_invariants(b, delta=Fraction(99, 100)):
    """Exact-rational Lovasz and size-reduction conditions."""
    n = len(b)
    mu = [[Fraction(0)] * n for _ in range(n)]
    B = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            num = Fraction(sum(x * y for x, y in zip(b[i], b[j])))
            for m in range(j):
                num -= mu[j][m] * mu[i][m] * B[m]
            mu[i][j] = num / B[j]
        B[i] = Fraction(sum(x * x for x in b[i])) - sum(
            mu[i][j] ** 2 * B[j] for j in range(i)
        )
    for i in range(n):
        for j in range(i):
            assert abs(mu[i][j]) <= Fraction(1, 2)
    for k in range(1, n):
        assert B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]


def det3(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def rand_irreducible(deg, rng):
    while True:
        c = [rng.randrange(-9, 10) for _ in range(deg)] + [1]
        if c[0] == 0:
            continue
        f = IntPoly(c)
        for p in (2, 3, 5, 7, 11, 13, 17, 19, 23):
            if irreducible_mod_p(f, p):
                return f


def test_lll_classic_example():
    basis = [[1, 1, 1], [-1, 0, 2], [3, 5, 6]]
    red = lattice.lll_reduce(basis)
    norms = [sum(x * x for x in r) for r in red]
    assert norms[0] <= min(norms)
    assert abs(det3(red)) == abs(det3(basis))
    gram_schmidt_invariants(red)


def test_lll_random_invariants():
    rng = random.Random(42)
    done = 0
    while done < 5:
        dim = rng.randrange(2, 9)
        m = [[rng.randrange(-50, 51) for _ in range(dim)] for _ in range(dim)]
        try:
            red = lattice.lll_reduce(m)
        except Inconsistent:
            continue  # singular sample
        gram_schmidt_invariants(red)
        done += 1


def test_search_two_factor_synthetic():
    rng = random.Random(20260814)
    f30 = rand_irreducible(30, rng)
    f50 = rand_irreducible(50, rng)
    cert = lattice.factor_search_vanhoeij(f30 * f50)
    assert sorted(cert.degrees) == [30, 50]
    got = sorted(cert.factors, key=lambda f: f.degree)
    assert got[0] == f30 and got[1] == f50


def test_search_three_factor_synthetic():
    rng = random.Random(7)
    f10 = rand_irreducible(10, rng)
    f12 = rand_irreducible(12, rng)
    f8 = rand_irreducible(8, rng)
    cert = lattice.factor_search_vanhoeij(f10 * f12 * f8)
    assert sorted(cert.degrees) == [8, 10, 12]


def test_search_irreducible_quartic():
    cert = lattice.factor_search_vanhoeij(IntPoly([2, 0, 0, 0, 1]))  # Eisenstein
    assert cert.degrees == (4,)


def test_search_degree_budget():
    with pytest.raises(Inconclusive):
        lattice.factor_search_vanhoeij(IntPoly([1] + [0] * 600 + [1]))
