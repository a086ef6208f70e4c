"""Degree-2380 sum resolvent: modular images, induced-degree predictions,
poly-file round trips, and exact factorization verification."""

import pathlib
import tempfile

import pytest

from certgal import resolvent as rv
from certgal.bigarith import IntPoly
from certgal.errors import (
    BadReduction,
    DegreeTooSmall,
    Fatal,
    NonMonic,
    SmallPrime,
    UnknownType,
)
from certgal.pipeline import _resolve_path, load_config


@pytest.fixture(scope="module")
def shipped():
    cfg = load_config()
    qpath = _resolve_path(cfg.resolvent_file)
    Q, fields = rv.read_poly_file(qpath)
    factors = []
    for spec in cfg.factor_files:
        f, _ = rv.read_poly_file(_resolve_path(spec))
        factors.append(f)
    return cfg, Q, fields, factors


def test_guards(P):
    with pytest.raises(DegreeTooSmall):
        rv.resolvent_mod_p(IntPoly([1, 0, 1]), 101)
    with pytest.raises(SmallPrime):
        rv.resolvent_mod_p(P, 2380)
    with pytest.raises(BadReduction):
        # x^4 - 2*5003*x^2 + 5003*x + 5003^2 is x^4 mod 5003: repeated roots
        rv.resolvent_mod_p(IntPoly([5003**2, 5003, -2 * 5003, 0, 1]), 5003)
    with pytest.raises(NonMonic):
        rv.resolvent_mod_p(IntPoly([1, 0, 0, 0, 2]), 5003)


def test_tiny_closed_forms():
    # x^4 - 1: the one 4-subset of roots sums to 0, so Q = x
    q = rv.resolvent_mod_p(IntPoly([-1, 0, 0, 0, 1]), 101)
    assert q.coeffs == (0, 1)
    # x^5 - 1: each 4-subset sums to minus the left-out root, so Q = x^5 + 1
    q5 = rv.resolvent_mod_p(IntPoly([-1, 0, 0, 0, 0, 1]), 101)
    assert q5.coeffs == (1, 0, 0, 0, 0, 1)


def test_resolvent_mod_p_shape(P):
    p = 9539
    qp = rv.resolvent_mod_p(P, p)
    assert qp.degree == 2380 and qp.coeffs[-1] == 1
    # p1(Q) = C(16,3) p1(P) = 560 * 5 = 2800, read off the top coefficient
    assert qp.coeffs[2379] == (-2800) % p


def test_predicted_degrees_identity_and_17cycle():
    pd_id = rv.predicted_factor_degrees((1,) * 17)
    assert pd_id.total_as_dict() == {1: 2380}
    pd_17 = rv.predicted_factor_degrees((17,))
    assert pd_17.total_as_dict() == {17: 140}
    assert pd_17.orbit_multiset(340) == [{17: 20}]
    assert pd_17.orbit_multiset(1020) == [{17: 60}, {17: 60}]


def test_predicted_degrees_frobenius_15():
    pd = rv.predicted_factor_degrees((1, 1, 15))
    assert pd.orbit_multiset(340) == [{5: 2, 15: 22}]
    assert pd.orbit_multiset(1020) == [{15: 68}, {15: 68}]
    total = pd.total_as_dict()
    assert sum(d * m for d, m in total.items()) == 2380


def test_predicted_degrees_rejects_foreign_type():
    with pytest.raises(UnknownType):
        rv.predicted_factor_degrees((2, 2, 13))


def test_poly_file_roundtrip_and_checksum(P):
    with tempfile.TemporaryDirectory() as td:
        f = pathlib.Path(td) / "q.txt"
        rv.write_poly_file(f, P, primes=7)
        back, fields = rv.read_poly_file(f)
        assert back == P and fields["primes"] == "7"
        f.write_text(f.read_text().replace("-5", "-6", 1))
        with pytest.raises(Fatal):
            rv.read_poly_file(f)


def test_shipped_resolvent_replay(shipped, P):
    cfg, Q, fields, _factors = shipped
    assert Q.degree == 2380 and int(fields["primes"]) == 426
    rp = rv.load_cached_resolvent(_resolve_path(cfg.resolvent_file), P)
    assert rp.poly == Q
    assert len(rp.holdout_primes) >= 2


def test_shipped_factors_verify(shipped):
    _cfg, Q, _fields, factors = shipped
    R = rv.ResolventPoly(Q, (), (), 0)
    assert sorted(f.degree for f in factors) == [340, 1020, 1020]
    assert rv.verify_factorization(R, factors)
    assert rv.verify_factorization(R, [Q])  # trivial cover


def test_verify_factorization_rejects_bad_input(shipped):
    _cfg, Q, _fields, factors = shipped
    R = rv.ResolventPoly(Q, (), (), 0)
    f340, f1a, f1b = sorted(factors, key=lambda f: f.degree)
    assert not rv.verify_factorization(R, [])
    # wrong degree
    bad = IntPoly(list(f340.coeffs[:-2]) + [1])
    assert not rv.verify_factorization(R, [bad, f1a, f1b])
    # one coefficient off
    pert = list(f340.coeffs)
    pert[0] += 1
    assert not rv.verify_factorization(R, [IntPoly(pert), f1a, f1b])
    # degree multiset that cannot cover the orbit sizes
    assert not rv.verify_factorization(
        R, [IntPoly([0] * 300 + [1]), IntPoly([0] * 2080 + [1])]
    )
