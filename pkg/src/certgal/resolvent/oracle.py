"""Brute-force 4-set resolvent over an extension field.

Independent check for the generating-series path: when P mod p has factor
pattern {1, 1, 15}, all 17 roots live in F_{p^15}, so Q mod p can be built
literally as the product of (X - sum(S)) over the 2380 subsets.  Elements of
F_{p^15} are length-15 int64 vectors; polynomials in X with such coefficients
are (n, 15) arrays, and the product tree multiplies them pairwise with a
single bigint per product (Kronecker packing in both variables at once).

Slower and completely different code from resolvent_mod_p, which is the
point.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from ..bigarith import IntPoly, ModPoly, _bigmul
from ..errors import Inconsistent, PatternMismatch, SmallPrime
from ..ffield import (
    FqField,
    fq_factor,
    _np_divmod,
    _np_mul,
    _np_powmod,
    _np_trim,
)

_EXT_DEG = 15
_SLOT = 2 * _EXT_DEG - 1  # y-slots per X-slot after one row convolution


def _fq_red(w: np.ndarray, h: np.ndarray, p: int) -> np.ndarray:
    """Reduce a length-<=29 vector mod monic h of degree 15."""
    w = w.copy()
    for j in range(len(w) - 1, _EXT_DEG - 1, -1):
        c = int(w[j])
        if c:
            w[j - _EXT_DEG : j] = (w[j - _EXT_DEG : j] - c * h[:_EXT_DEG]) % p
    out = np.zeros(_EXT_DEG, dtype=np.int64)
    k = min(_EXT_DEG, len(w))
    out[:k] = w[:k]
    return out


def _fq_mul(u: np.ndarray, v: np.ndarray, h: np.ndarray, p: int) -> np.ndarray:
    return _fq_red(_np_mul(u, v, p), h, p)


def _fq_pow(u: np.ndarray, e: int, h: np.ndarray, p: int) -> np.ndarray:
    res = np.zeros(_EXT_DEG, dtype=np.int64)
    res[0] = 1
    base = u.copy()
    while e:
        if e & 1:
            res = _fq_mul(res, base, h, p)
        e >>= 1
        if e:
            base = _fq_mul(base, base, h, p)
    return res


def _biv_mul(A: np.ndarray, B: np.ndarray, h: np.ndarray, p: int) -> np.ndarray:
    """(nA, 15) x (nB, 15) -> (nA+nB-1, 15), all rows reduced mod h."""
    nA, nB = A.shape[0], B.shape[0]
    bound = min(nA, nB) * _EXT_DEG * (p - 1) ** 2
    sb = (bound.bit_length() + 8) // 8

    def pack(M: np.ndarray) -> int:
        buf = np.zeros((M.shape[0], _SLOT), dtype=np.int64)
        buf[:, :_EXT_DEG] = M
        flat = buf.reshape(-1)
        return int.from_bytes(
            b"".join(int(x).to_bytes(sb, "little") for x in flat), "little"
        )

    C = _bigmul(pack(A), pack(B))
    n = nA + nB - 1
    raw = C.to_bytes(n * _SLOT * sb + 16, "little")
    buf = np.frombuffer(raw[: n * _SLOT * sb], dtype=np.uint8)
    buf = buf.reshape(n * _SLOT, sb).astype(np.int64)
    acc = np.zeros(n * _SLOT, dtype=np.int64)
    mult = 1
    for i in range(sb):
        acc = (acc + buf[:, i] * mult) % p
        mult = mult * 256 % p
    R = acc.reshape(n, _SLOT)
    for j in range(_SLOT - 1, _EXT_DEG - 1, -1):
        col = R[:, j].copy()
        if (col != 0).any():
            R[:, j - _EXT_DEG : j] = (R[:, j - _EXT_DEG : j] - np.outer(col, h[:_EXT_DEG])) % p
            R[:, j] = 0
    return R[:, :_EXT_DEG] % p


def _product_tree(leaves: list[np.ndarray], h: np.ndarray, p: int) -> np.ndarray:
    level = leaves
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            nxt.append(_biv_mul(level[i], level[i + 1], h, p))
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def extension_field_resolvent(P: IntPoly, p: int) -> ModPoly:
    """Q mod p as an honest product over 4-subsets of the roots of P.

    Requires P mod p to factor with pattern {1, 1, 15}: two rational roots
    and one degree-15 factor whose root generates F_{p^15}.  Everything else
    raises PatternMismatch.
    """
    if p < 5 or p.bit_length() > 20:
        raise SmallPrime("oracle wants 5 <= p < 2^20 for int64 row products")
    n = P.degree
    field = FqField(p, 1)
    fac = fq_factor(list(P.reduce_mod(p).coeffs), field)
    if any(m > 1 for _g, m in fac):
        raise PatternMismatch(f"P mod {p} is not squarefree (bad reduction)")
    degs = sorted(g.degree for g, _m in fac)
    if degs != [1, 1, _EXT_DEG]:
        raise PatternMismatch(f"P mod {p} has pattern {degs}, need [1, 1, 15]")
    rats = []
    h = None
    for g, _m in fac:
        if g.degree == 1:
            rats.append((-g.coeffs[0].rep[0]) % p)
        else:
            h = np.array([c.rep[0] % p for c in g.coeffs], dtype=np.int64)
    roots = []
    for r in rats:
        v = np.zeros(_EXT_DEG, dtype=np.int64)
        v[0] = r
        roots.append(v)
    beta = np.zeros(_EXT_DEG, dtype=np.int64)
    beta[1] = 1
    cur = beta
    for k in range(_EXT_DEG):
        roots.append(cur)
        if k < _EXT_DEG - 1:
            cur = _fq_pow(cur, p, h, p)
    tot = np.zeros(_EXT_DEG, dtype=np.int64)
    for v in roots:
        tot = (tot + v) % p
    p1 = (-P.coeffs[n - 1]) % p
    if int(tot[0]) != p1 or tot[1:].any():
        raise Inconsistent("root list fails the trace check")
    leaves = []
    for S in combinations(range(n), 4):
        tau = np.zeros(_EXT_DEG, dtype=np.int64)
        for i in S:
            tau = (tau + roots[i]) % p
        L = np.zeros((2, _EXT_DEG), dtype=np.int64)
        L[0] = (-tau) % p
        L[1, 0] = 1
        leaves.append(L)
    Q = _product_tree(leaves, h, p)
    if Q[:, 1:].any():
        raise Inconsistent("resolvent product has non-rational coefficients")
    return ModPoly(p, [int(x) for x in Q[:, 0]])


def squarefree_pattern_mod(q: ModPoly) -> dict[int, int]:
    """Distinct-degree pattern of a squarefree q; small helper for tests."""
    p = q.modulus
    f = np.array(q.coeffs, dtype=np.int64)
    from ..ffield import _np_gcd, _np_deriv

    if len(_np_gcd(f, _np_deriv(f, p), p)) != 1:
        raise Inconsistent("input is not squarefree")
    out: dict[int, int] = {}
    x = np.array([0, 1], dtype=np.int64)
    cur = _np_powmod(x, p, f, p)
    d = 1
    while len(f) > 1:
        if 2 * d > len(f) - 1:
            out[len(f) - 1] = out.get(len(f) - 1, 0) + 1
            break
        diff = cur.copy()
        if len(diff) < 2:
            diff = np.concatenate([diff, np.zeros(2 - len(diff), dtype=np.int64)])
        diff[1] = (diff[1] - 1) % p
        g = _np_gcd(f, _np_trim(diff), p)
        if len(g) > 1:
            out[d] = out.get(d, 0) + (len(g) - 1) // d
            f = _np_trim(_np_divmod(f, g, p)[0])
            cur = _np_divmod(cur, f, p)[1]
        d += 1
        if len(f) > 1 and 2 * d <= len(f) - 1:
            cur = _np_powmod(cur, p, f, p)
    return out
