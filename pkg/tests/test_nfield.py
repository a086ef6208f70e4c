"""Number-field layer: characteristic polynomials, minimal polynomials of
field elements, and the discriminant bookkeeping that pins disc(O_K)."""

import pytest

from certgal import nfield
from certgal.bigarith import IntPoly
from certgal.errors import Inconsistent, RationalElement


def test_berkowitz_small_matrices():
    assert nfield._charpoly_berkowitz([[2]]) == [1, -2]
    assert nfield._charpoly_berkowitz([[1, 2], [3, 4]]) == [1, -5, -2]
    companion = [[0, 1, 0], [0, 0, 1], [6, -11, 6]]
    assert nfield._charpoly_berkowitz(companion) == [1, -6, 11, -6]


def test_minpoly_of_root_is_P(P):
    alpha = nfield.ElementExpr(IntPoly([0, 1]), 1)
    assert nfield.minpoly_of_element(alpha, P) == P


def test_minpoly_of_shifted_root(P):
    alpha1 = nfield.ElementExpr(IntPoly([1, 1]), 1)
    assert nfield.minpoly_of_element(alpha1, P) == P.compose_linear_shift(-1)


def test_rational_element_rejected(P):
    with pytest.raises(RationalElement):
        nfield.minpoly_of_element(nfield.ElementExpr(IntPoly([7]), 2), P)


def test_gamma_minpoly_is_R(cfg, P, R):
    assert nfield.minpoly_of_element(cfg.gamma(), P) == R


def test_gamma_matrix_annihilated_by_R(cfg, P, R):
    # R(N/den) * den^17 = 0 for the multiplication-by-gamma matrix N
    gamma = cfg.gamma()
    N = nfield._mult_matrix(gamma.numerator, P)
    n = len(N)
    den = gamma.denominator
    acc = [[0] * n for _ in range(n)]
    power = [[int(i == j) for j in range(n)] for i in range(n)]
    for i, c in enumerate(R.coeffs):
        scale = c * den ** (17 - i)
        for a in range(n):
            for b in range(n):
                acc[a][b] += scale * power[a][b]
        if i < 17:
            power = [
                [sum(power[a][k] * N[k][b] for k in range(n)) for b in range(n)]
                for a in range(n)
            ]
    assert all(all(x == 0 for x in row) for row in acc)


def test_discriminant_report(cfg, P, R):
    rep = nfield.discriminant_report(P, R, cfg.gamma())
    assert rep.v2_disc_P == 64 and rep.v137_disc_P == 8
    assert rep.v2_disc_R == 30 and rep.v137_disc_R == 8
    assert rep.cofactor_root == 2211 and rep.cofactor_primes == (3, 11, 67)
    assert rep.cofactor_unfactored == 1
    assert rep.disc_field == 2**30 * 137**8
    assert rep.status == "certified"
    assert ("P", 137, True) in rep.dedekind_verdicts
    assert ("R", 2, True) in rep.dedekind_verdicts
    for q in (3, 11, 67):
        assert ("P", q, False) in rep.dedekind_verdicts


def test_discriminant_report_wrong_element(P, R):
    bad = nfield.ElementExpr(IntPoly([1, 2, 3]), 1)
    with pytest.raises(Inconsistent):
        nfield.discriminant_report(P, R, bad)
