"""2-adic and 137-adic analysis: Newton polygons, the unit-root/Eisenstein
split, the Ore irreducibility certificate, and the local invariants."""

from fractions import Fraction

import pytest

from certgal import localpadic as lp
from certgal.bigarith import IntPoly, discriminant
from certgal.errors import HenselObstruction, Inconsistent, ValueMismatch, ZeroInput


def v2(n: int) -> int:
    n = abs(n)
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    return v


def test_newton_polygon_basics(R):
    npg = lp.newton_polygon(R, 2)
    assert dict(npg.root_valuations()) == {Fraction(1, 16): 16, Fraction(0): 1}
    assert npg.total_length() == 17
    assert dict(lp.newton_polygon(IntPoly([-2, 0, 1]), 2).root_valuations()) == {
        Fraction(1, 2): 2
    }
    assert dict(lp.newton_polygon(IntPoly([-1, 0, 1]), 3).root_valuations()) == {
        Fraction(0): 2
    }
    with pytest.raises(ZeroInput):
        lp.newton_polygon(IntPoly([0, 1, 1]), 2)


def test_newton_polygon_unit_scale_invariance():
    # f(x) and f(cx) share slopes when c is a p-adic unit
    f = IntPoly([-6, 4, 8, 1])
    g = IntPoly([(-6) * 27, 4 * 9, 8 * 3, 1])
    assert sorted(lp.newton_polygon(f, 5).slopes) == sorted(
        lp.newton_polygon(g, 5).slopes
    )


def test_split_R_at_2(R):
    u, E = lp.split_R_at_2(R, 96)
    assert u % 16 == 13  # odd unit root, pinned residue
    assert E.degree == 16 and E.coeffs[-1] == 1
    # Eisenstein: all lower coefficients even, constant term exactly v2 = 1
    assert all(c % 2 == 0 for c in E.coeffs[:-1])
    assert E.coeffs[0] % 4 == 2
    assert v2(discriminant(E.to_int_poly())) == 30
    # the factorization explains all of v2(disc R): Res(x - u, E) = E(u) is odd
    Eu = sum(c * pow(u, i, 1 << 96) for i, c in enumerate(E.coeffs)) % (1 << 96)
    assert Eu % 2 == 1
    assert v2(discriminant(R)) == 30


def test_split_precision_monotone(R):
    u, E = lp.split_R_at_2(R, 96)
    u2, E2 = lp.split_R_at_2(R, 192)
    assert (u2 - u) % (1 << 96) == 0
    assert all((a - b) % (1 << 96) == 0 for a, b in zip(E2.coeffs, E.coeffs))


def test_split_rejects_wrong_shape():
    with pytest.raises(HenselObstruction):
        lp.split_R_at_2(IntPoly([-4, 0, 0, 0, 1]), 32)


def test_ore_certificate(R):
    _u, E = lp.split_R_at_2(R, 96)
    cert = lp.ore_irreducible_over_Q2beta(E)
    assert cert.taylor_valuations == (
        30, 28, 28, 26, 26, 24, 24, 22, 22, 20, 20, 18, 18, 16, 16, 0,
    )
    assert cert.polygon.vertices == ((0, 30), (15, 0))
    assert cert.residual.lattice_length == 15
    # residual z^15 + z + 1 over F2, certified irreducible
    assert cert.residual.coeffs == (1, 1) + (0,) * 13 + (1,)
    assert cert.residual_irreducible and cert.cofactor_degree == 15
    assert cert.ext_degree_lower_bound == 240


def test_ore_trivial_and_guard():
    c2 = lp.ore_irreducible_over_Q2beta(lp.PadicPoly.make(2, 32, [-2, 0, 1]))
    assert c2.cofactor_degree == 1 and c2.residual_irreducible
    with pytest.raises(Inconsistent):
        lp.ore_irreducible_over_Q2beta(lp.PadicPoly.make(2, 32, [-4, 0, 0, 0, 1]))


def test_level_at_137(P):
    rep = lp.level_at_137(P)
    assert rep.splitting == ((1, 1), (2, 2), (2, 2), (2, 2), (2, 2))
    assert rep.inertia_order == 2 and rep.tame and not rep.wild
    assert rep.disc_valuation == 8
    assert rep.fixed_points_on_p1 == 1
    assert rep.level_contribution == 137


def test_weight_dichotomy():
    assert lp.weight_from_disc_valuation(30).weight == 2
    si570 = lp.weight_from_disc_valuation(38)
    assert si570.weight is None and "570" in si570.detail
    with pytest.raises(ValueMismatch):
        lp.weight_from_disc_valuation(31)


def test_weight_chain(R):
    ro = lp.weight_chain_at_2(R)
    assert ro.serre.weight == 2
    assert ro.v2_disc_E == 30
    assert ro.unit_root % 16 == 13
