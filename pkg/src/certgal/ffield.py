"""Finite fields, polynomial factorization over them, Dedekind maximality.

Two arithmetic layers live here.  `FqField`/`FqElem` give correct, immutable
arithmetic in F_{p^k} for any explicit irreducible modulus; they are meant
for small degrees.  Prime-field polynomial work at degree up to a few
thousand runs through int64 numpy kernels instead (`_np_*`), which is what
`factor_degree_pattern` uses on every call that matters.

Factorization is the classical squarefree / distinct-degree / equal-degree
chain.  Equal-degree splitting is randomized but seeded, so every run of the
suite sees identical factor ordering.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import gcd as igcd
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .bigarith import IntPoly, ModPoly, is_prime
from .errors import (
    LeadingVanishes,
    NonMonic,
    Ramified,
    Reducible,
    ZeroInput,
)

DEFAULT_SEED = 0x5EED


# ---------------------------------------------------------------------------
# int64 numpy kernels over F_p (p < 2^20 keeps convolution sums in range)
# ---------------------------------------------------------------------------

def _np_trim(a: np.ndarray) -> np.ndarray:
    nz = np.nonzero(a)[0]
    return a[: nz[-1] + 1] if len(nz) else a[:1]


def _np_mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return np.convolve(a, b) % p


def _np_divmod(a: np.ndarray, b: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    a = _np_trim(a % p)
    b = _np_trim(b % p)
    da, db = len(a) - 1, len(b) - 1
    if da < db or (da == 0 and a[0] == 0):
        return np.zeros(1, np.int64), a
    inv = pow(int(b[db]), -1, p)
    r = a.copy()
    q = np.zeros(da - db + 1, np.int64)
    for i in range(da - db, -1, -1):
        c = r[i + db] * inv % p
        q[i] = c
        if c:
            r[i : i + db + 1] = (r[i : i + db + 1] - c * b) % p
    return q, _np_trim(r[:db] if db else r[:1] * 0)


def _np_gcd(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    a, b = _np_trim(a % p), _np_trim(b % p)
    while not (len(b) == 1 and b[0] == 0):
        _, r = _np_divmod(a, b, p)
        a, b = b, r
    if len(a) == 1 and a[0] == 0:
        return a
    return a * pow(int(a[-1]), -1, p) % p


def _np_powmod(base: np.ndarray, e: int, f: np.ndarray, p: int) -> np.ndarray:
    _, acc = _np_divmod(base, f, p)
    out = np.ones(1, np.int64)
    while e:
        if e & 1:
            _, out = _np_divmod(_np_mul(out, acc, p), f, p)
        e >>= 1
        if e:
            _, acc = _np_divmod(_np_mul(acc, acc, p), f, p)
    return out


def _np_deriv(a: np.ndarray, p: int) -> np.ndarray:
    if len(a) == 1:
        return np.zeros(1, np.int64)
    return _np_trim(a[1:] * np.arange(1, len(a), dtype=np.int64) % p)


def _frob_matrix(f: np.ndarray, p: int) -> np.ndarray:
    """Matrix of c -> c^p on F_p[x]/(f), columns are x^{ip} mod f."""
    n = len(f) - 1
    xp = _np_powmod(np.array([0, 1], np.int64), p, f, p)
    M = np.zeros((n, n), np.int64)
    cur = np.ones(1, np.int64)
    M[0, 0] = 1
    for i in range(1, n):
        _, cur = _np_divmod(_np_mul(cur, xp, p), f, p)
        M[: len(cur), i] = cur
    return M


# ---------------------------------------------------------------------------
# FqField / FqElem
# ---------------------------------------------------------------------------

class FqField:
    """F_{p^k} = F_p[t]/(modulus); the modulus is checked irreducible."""

    __slots__ = ("p", "k", "modulus")

    def __init__(self, p: int, k: int = 1, modulus: Sequence[int] | None = None):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        if modulus is None:
            if k != 1:
                raise ValueError("extension field needs an explicit modulus")
            modulus = [0, 1]
        m = ModPoly(p, modulus)
        if m.degree != k:
            raise ValueError("modulus degree != k")
        if k > 1 and not _modpoly_irreducible(m):
            raise Reducible("modulus is not irreducible")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "modulus", m)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("FqField is immutable")

    @property
    def q(self) -> int:
        return self.p ** self.k

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FqField)
            and (self.p, self.k, self.modulus.coeffs) == (other.p, other.k, other.modulus.coeffs)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus.coeffs))

    def __repr__(self) -> str:
        return f"FqField(p={self.p}, k={self.k})"

    def __call__(self, rep) -> "FqElem":
        if isinstance(rep, FqElem):
            if rep.field != self:
                raise ValueError("element of a different field")
            return rep
        if isinstance(rep, int):
            rep = [rep]
        return FqElem(self, rep)

    def zero(self) -> "FqElem":
        return self([0])

    def one(self) -> "FqElem":
        return self([1])

    def gen(self) -> "FqElem":
        if self.k == 1:
            raise ValueError("prime field has no generator element t")
        return self([0, 1])

    def elements(self) -> Iterable["FqElem"]:
        if self.q > 1 << 20:
            raise ValueError("field too large to enumerate")
        for code in range(self.q):
            digits = []
            c = code
            for _ in range(self.k):
                digits.append(c % self.p)
                c //= self.p
            yield self(digits)


def f16() -> FqField:
    """The one F16 model used everywhere: F_2[t]/(t^4 + t + 1)."""
    return FqField(2, 4, [1, 1, 0, 0, 1])


class FqElem:
    __slots__ = ("field", "rep")

    def __init__(self, field: FqField, rep: Sequence[int]):
        p = field.p
        c = [int(x) % p for x in rep]
        if len(c) > field.k:
            c = _reduce_by_modulus(c, field.modulus.coeffs, p)
        c = c + [0] * (field.k - len(c))
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rep", tuple(c))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("FqElem is immutable")

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.rep)

    def __eq__(self, other) -> bool:
        return isinstance(other, FqElem) and self.field == other.field and self.rep == other.rep

    def __hash__(self) -> int:
        return hash((self.field.p, self.field.k, self.rep))

    def __repr__(self) -> str:
        return f"FqElem{self.rep}"

    def __add__(self, other: "FqElem") -> "FqElem":
        p = self.field.p
        return FqElem(self.field, [(a + b) % p for a, b in zip(self.rep, other.rep)])

    def __sub__(self, other: "FqElem") -> "FqElem":
        p = self.field.p
        return FqElem(self.field, [(a - b) % p for a, b in zip(self.rep, other.rep)])

    def __neg__(self) -> "FqElem":
        p = self.field.p
        return FqElem(self.field, [(-a) % p for a in self.rep])

    def __mul__(self, other: "FqElem") -> "FqElem":
        F = self.field
        out = [0] * (2 * F.k - 1)
        for i, a in enumerate(self.rep):
            if a:
                for j, b in enumerate(other.rep):
                    out[i + j] += a * b
        return FqElem(F, _reduce_by_modulus([x % F.p for x in out], F.modulus.coeffs, F.p))

    def __pow__(self, e: int) -> "FqElem":
        if e < 0:
            return self.inverse() ** (-e)
        acc = self.field.one()
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def inverse(self) -> "FqElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self ** (self.field.q - 2)

    def frobenius(self) -> "FqElem":
        return self ** self.field.p


def _reduce_by_modulus(c: list[int], mod: Sequence[int], p: int) -> list[int]:
    k = len(mod) - 1
    c = list(c)
    for i in range(len(c) - 1, k - 1, -1):
        t = c[i] % p
        if t:
            for j in range(k):
                c[i - k + j] = (c[i - k + j] - t * mod[j]) % p
        c[i] = 0
    return [x % p for x in c[:k]]


def _modpoly_irreducible(m: ModPoly) -> bool:
    p, k = m.modulus, m.degree
    if k == 1:
        return True
    f = np.array(m.coeffs, np.int64)
    if int(f[-1]) != 1:
        inv = pow(int(f[-1]), -1, p)
        f = f * inv % p
    x = np.array([0, 1], np.int64)
    M = _frob_matrix(f, p)
    # x^{p^k} == x and gcd(x^{p^{k/l}} - x, m) = 1 for prime l | k
    v = np.zeros(k, np.int64)
    v[1] = 1
    pows = [v]
    for _ in range(k):
        pows.append(M.dot(pows[-1]) % p)
    if not np.array_equal(_np_trim(pows[k]), x):
        return False
    for ell in range(2, k + 1):
        if k % ell == 0 and is_prime(ell):
            w = _np_trim(pows[k // ell].copy())
            w0 = w.copy()
            if len(w0) < 2:
                w0 = np.concatenate([w0, np.zeros(2 - len(w0), np.int64)])
            w0[1] = (w0[1] - 1) % p
            g = _np_gcd(w0, f, p)
            if len(g) > 1:
                return False
    return True


# ---------------------------------------------------------------------------
# factorization over F_q, generic coefficient layer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FqPoly:
    """Dense polynomial over an FqField, trimmed, possibly zero."""

    field: FqField
    coeffs: tuple

    @staticmethod
    def make(field: FqField, coeffs: Sequence) -> "FqPoly":
        c = [field(x) for x in coeffs] or [field.zero()]
        while len(c) > 1 and c[-1].is_zero():
            c.pop()
        return FqPoly(field, tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0].is_zero()

    def monic(self) -> "FqPoly":
        lc = self.coeffs[-1]
        if lc == self.field.one():
            return self
        inv = lc.inverse()
        return FqPoly.make(self.field, [c * inv for c in self.coeffs])

    def __mul__(self, other: "FqPoly") -> "FqPoly":
        F = self.field
        if self.is_zero() or other.is_zero():
            return FqPoly.make(F, [0])
        out = [F.zero() for _ in range(self.degree + other.degree + 1)]
        for i, a in enumerate(self.coeffs):
            if not a.is_zero():
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
        return FqPoly.make(F, out)

    def __pow__(self, e: int) -> "FqPoly":
        acc = FqPoly.make(self.field, [1])
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def int_coeffs(self) -> list[int]:
        if self.field.k != 1:
            raise ValueError("int_coeffs only on prime fields")
        return [c.rep[0] for c in self.coeffs]


def _fq_divmod(a: FqPoly, b: FqPoly) -> tuple[FqPoly, FqPoly]:
    F = a.field
    if b.is_zero():
        raise ZeroDivisionError
    r = list(a.coeffs)
    db = b.degree
    binv = b.coeffs[-1].inverse()
    q = [F.zero()] * max(len(r) - db, 1)
    for i in range(len(r) - db - 1, -1, -1):
        c = r[i + db] * binv
        q[i] = c
        if not c.is_zero():
            for j in range(db + 1):
                r[i + j] = r[i + j] - c * b.coeffs[j]
    return FqPoly.make(F, q), FqPoly.make(F, r[:db] or [0])


def _fq_gcd(a: FqPoly, b: FqPoly) -> FqPoly:
    while not b.is_zero():
        _, r = _fq_divmod(a, b)
        a, b = b, r
    return a.monic() if not a.is_zero() else a


def _fq_powmod(base: FqPoly, e: int, f: FqPoly) -> FqPoly:
    _, acc = _fq_divmod(base, f)
    out = FqPoly.make(base.field, [1])
    while e:
        if e & 1:
            _, out = _fq_divmod(out * acc, f)
        e >>= 1
        if e:
            _, acc = _fq_divmod(acc * acc, f)
    return out


def _fq_deriv(f: FqPoly) -> FqPoly:
    F = f.field
    return FqPoly.make(F, [F(i) * f.coeffs[i] for i in range(1, len(f.coeffs))] or [0])


def _fq_pth_root(f: FqPoly) -> FqPoly:
    """f assumed of the form g(x^p); returns g with p-th roots of coefficients."""
    F = f.field
    p = F.p
    e = F.q // p  # a^(q/p) is the p-th root in F_q
    return FqPoly.make(F, [f.coeffs[i] ** e for i in range(0, len(f.coeffs), p)])


def _sqf_decompose(f: FqPoly) -> list[tuple[FqPoly, int]]:
    """Monic squarefree decomposition, char-p aware."""
    F = f.field
    p = F.p
    out: list[tuple[FqPoly, int]] = []
    df = _fq_deriv(f)
    if df.is_zero():
        for g, m in _sqf_decompose(_fq_pth_root(f)):
            out.append((g, m * p))
        return out
    g = _fq_gcd(f, df)
    w, _ = _fq_divmod(f, g)
    i = 1
    while w.degree > 0:
        y = _fq_gcd(w, g)
        z, _ = _fq_divmod(w, y)
        if z.degree > 0:
            out.append((z.monic(), i))
        w = y
        g, _ = _fq_divmod(g, y)
        i += 1
    if g.degree > 0:
        for h, m in _sqf_decompose(_fq_pth_root(g)):
            out.append((h, m * p))
    return out


def _fq_sub(a: FqPoly, b: FqPoly) -> FqPoly:
    F = a.field
    n = max(len(a.coeffs), len(b.coeffs))
    za, zb = F.zero(), F.zero()
    return FqPoly.make(F, [
        (a.coeffs[i] if i < len(a.coeffs) else za) - (b.coeffs[i] if i < len(b.coeffs) else zb)
        for i in range(n)
    ])


def _ddf(f: FqPoly) -> list[tuple[int, FqPoly]]:
    """Distinct-degree split of a monic squarefree f."""
    F = f.field
    q = F.q
    out = []
    x = FqPoly.make(F, [0, 1])
    h = x
    rest = f
    d = 0
    while rest.degree >= 2 * (d + 1):
        d += 1
        h = _fq_powmod(h, q, rest)
        g = _fq_gcd(_fq_sub(h, x), rest)
        if g.degree > 0:
            out.append((d, g))
            rest, _ = _fq_divmod(rest, g)
            if rest.degree == 0:
                break
            _, h = _fq_divmod(h, rest)
    if rest.degree > 0:
        out.append((rest.degree, rest))
    return out


def _edf(f: FqPoly, d: int, rng: random.Random) -> list[FqPoly]:
    """Split monic f = product of irreducibles, all of degree d."""
    F = f.field
    if f.degree == d:
        return [f]
    n = f.degree
    while True:
        a = FqPoly.make(F, [[rng.randrange(F.p) for _ in range(F.k)] for _ in range(n)])
        if a.degree < 1:
            continue
        if F.p == 2:
            # trace map over F_2: a + a^2 + ... + a^(2^(kd-1))
            t = a
            acc = a
            for _ in range(F.k * d - 1):
                _, t = _fq_divmod(t * t, f)
                acc = FqPoly.make(F, [
                    (acc.coeffs[i] if i < len(acc.coeffs) else F.zero())
                    + (t.coeffs[i] if i < len(t.coeffs) else F.zero())
                    for i in range(max(len(acc.coeffs), len(t.coeffs)))
                ])
            g = _fq_gcd(acc, f)
        else:
            b = _fq_powmod(a, (F.q ** d - 1) // 2, f)
            bm1 = FqPoly.make(F, [b.coeffs[0] - F.one()] + list(b.coeffs[1:]))
            g = _fq_gcd(bm1, f)
        if 0 < g.degree < f.degree:
            rest, _ = _fq_divmod(f, g)
            return _edf(g.monic(), d, rng) + _edf(rest.monic(), d, rng)


def fq_factor(f: FqPoly | Sequence, field: FqField | None = None, seed: int = DEFAULT_SEED) -> list[tuple[FqPoly, int]]:
    """Full factorization over F_q into (monic irreducible, multiplicity).

    Deterministic for a fixed seed.  Sorted by (degree, coefficient reps).
    """
    if not isinstance(f, FqPoly):
        if field is None:
            raise ValueError("field required when f is a raw sequence")
        f = FqPoly.make(field, f)
    if f.is_zero():
        raise ZeroInput("cannot factor the zero polynomial")
    rng = random.Random(seed)
    out: list[tuple[FqPoly, int]] = []
    f = f.monic()
    if f.degree == 0:
        return []
    for g, mult in _sqf_decompose(f):
        for d, h in _ddf(g):
            if h.degree == d:
                out.append((h, mult))
            else:
                for piece in _edf(h, d, rng):
                    out.append((piece, mult))
    out.sort(key=lambda t: (t[0].degree, [c.rep for c in t[0].coeffs]))
    return out


# ---------------------------------------------------------------------------
# degree patterns, Frobenius order, Dedekind criterion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FactorPattern:
    factors: tuple[tuple[int, int], ...]  # (degree, multiplicity), sorted
    squarefree: bool

    @property
    def total_degree(self) -> int:
        return sum(d * m for d, m in self.factors)

    def degrees(self) -> list[int]:
        out = []
        for d, m in self.factors:
            out.extend([d] * m)
        return sorted(out)

    def as_multiset(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for d, m in self.factors:
            out[d] = out.get(d, 0) + m
        return out


def factor_degree_pattern(f: IntPoly, p: int) -> FactorPattern:
    """Pattern of f mod p.  Fast numpy path; full SQF when not squarefree."""
    if f.lc() % p == 0:
        raise LeadingVanishes(f"leading coefficient vanishes mod {p}")
    if p < (1 << 20):
        return _pattern_np(f, p)
    field = FqField(p)
    fac = fq_factor(FqPoly.make(field, [c % p for c in f.coeffs]))
    sq = all(m == 1 for _g, m in fac)
    pat = sorted((g.degree, m) for g, m in fac)
    return FactorPattern(tuple(pat), sq)


def _pattern_np(f: IntPoly, p: int) -> FactorPattern:
    fp = np.array([c % p for c in f.coeffs], np.int64)
    fp = fp * pow(int(fp[-1]), -1, p) % p
    d1 = _np_gcd(fp, _np_deriv(fp, p), p)
    squarefree = len(d1) == 1
    if squarefree:
        counts = _ddf_pattern_np(fp, p)
        pat: list[tuple[int, int]] = []
        for d in sorted(counts):
            pat.extend([(d, 1)] * counts[d])
        return FactorPattern(tuple(pat), True)
    # fall back to the generic machinery for multiplicities
    field = FqField(p)
    fac = fq_factor(FqPoly.make(field, [int(x) for x in fp]))
    pairs = sorted((g.degree, m) for g, m in fac)
    return FactorPattern(tuple(pairs), False)


def _ddf_pattern_np(f: np.ndarray, p: int) -> dict[int, int]:
    """degree -> count for monic squarefree f over F_p, Frobenius-matrix DDF."""
    n = len(f) - 1
    counts: dict[int, int] = {}
    if n == 0:
        return counts
    if n == 1:
        return {1: 1}
    # x^{p^d} tracked mod the original f via the Frobenius matrix; gcd against
    # the shrinking cofactor is still valid since it divides f
    M = _frob_matrix(f, p)
    xq = np.zeros(n, np.int64)
    xq[1] = 1
    rest = f
    d = 0
    while len(rest) - 1 >= 2 * (d + 1):
        d += 1
        xq = M.dot(xq) % p
        w = xq.copy()
        w[1] = (w[1] - 1) % p
        g = _np_gcd(_np_trim(w), rest, p)
        if len(g) > 1:
            counts[d] = (len(g) - 1) // d
            rest = _np_divmod(rest, g, p)[0]
            if len(rest) == 1:
                break
    if len(rest) - 1 > 0:
        dd = len(rest) - 1
        counts[dd] = counts.get(dd, 0) + 1
    return counts


def frobenius_order(pattern: FactorPattern) -> int:
    """lcm of the factor degrees; defined only in the unramified case."""
    if not pattern.squarefree:
        raise Ramified("pattern has repeated factors")
    return lcm(*pattern.degrees()) if pattern.factors else 1


def irreducible_mod_p(f: IntPoly, p: int) -> bool:
    pat = factor_degree_pattern(f, p)
    return pat.squarefree and pat.factors == ((f.degree, 1),)


def dedekind_maximal_at_p(f: IntPoly, p: int, check_irreducible: bool = False) -> bool:
    """Dedekind criterion: is Z[x]/(f) maximal at p?

    With f = prod g_i^{e_i} mod p, set g = prod g_i, pick monic lifts g*, h*
    of g and f/g, and let M = (f - g*h*)/p.  Maximal iff
    gcd(M, g, h) = 1 over F_p.
    """
    if not f.is_monic():
        raise NonMonic("Dedekind criterion needs a monic polynomial")
    if check_irreducible:
        import sympy

        x = sympy.symbols("x")
        expr = sum(c * x**i for i, c in enumerate(f.coeffs))
        if not sympy.Poly(expr, x).is_irreducible:
            raise Reducible("polynomial is reducible over the rationals")
    field = FqField(p)
    fbar = FqPoly.make(field, [c % p for c in f.coeffs])
    fac = fq_factor(fbar)
    g = FqPoly.make(field, [1])
    for gi, _m in fac:
        g = g * gi
    h, rem = _fq_divmod(fbar, g)
    assert rem.is_zero()
    glift = IntPoly(g.int_coeffs())
    hlift = IntPoly(h.int_coeffs())
    diff = f - glift * hlift
    Mc = []
    for c in diff.coeffs:
        q, r = divmod(c, p)
        assert r == 0, "f - g*h must vanish mod p"
        Mc.append(q)
    Mbar = FqPoly.make(field, [c % p for c in Mc])
    d = _fq_gcd(_fq_gcd(Mbar, g), h)
    return d.degree == 0
