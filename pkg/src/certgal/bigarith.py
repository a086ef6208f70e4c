"""Exact integer / residue-ring polynomial kernels.

Dense univariate polynomials with arbitrary-precision coefficients,
ascending order (``coeffs[i]`` is the x^i coefficient).  Everything here
is pure and deterministic; the heavy multiplications go through Kronecker
substitution so a single big-integer product does the work (gmpy2 is used
for that product when importable, plain ints otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    Inconsistent,
    InsufficientModulus,
    NonMonic,
    SmallPrime,
    ZeroInput,
)

try:
    import gmpy2

    def _bigmul(a: int, b: int) -> int:
        return int(gmpy2.mpz(a) * gmpy2.mpz(b))

except ImportError:  # pragma: no cover - exercised only without gmpy2

    def _bigmul(a: int, b: int) -> int:
        return a * b


# ---------------------------------------------------------------------------
# raw list kernels (ascending int lists, not necessarily normalized)
# ---------------------------------------------------------------------------

def _trim(c: list[int]) -> list[int]:
    n = len(c)
    while n > 1 and c[n - 1] == 0:
        n -= 1
    return c[:n]


def _kron_pack(c: Sequence[int], slot_bytes: int) -> int:
    return int.from_bytes(
        b"".join(int(x).to_bytes(slot_bytes, "little") for x in c), "little"
    )


def _mul_nonneg(a: Sequence[int], b: Sequence[int], slot_bytes: int) -> list[int]:
    # all entries nonnegative and products fitting their slots
    prod = _bigmul(_kron_pack(a, slot_bytes), _kron_pack(b, slot_bytes))
    n = len(a) + len(b) - 1
    raw = prod.to_bytes(n * slot_bytes + slot_bytes, "little")
    return [
        int.from_bytes(raw[i * slot_bytes : (i + 1) * slot_bytes], "little")
        for i in range(n)
    ]


def mul_z(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Product over Z.  Sign-split Kronecker above a size cutoff."""
    if not a or not b:
        return [0]
    if len(a) * len(b) <= 1024:
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return out
    ap = [x if x > 0 else 0 for x in a]
    am = [-x if x < 0 else 0 for x in a]
    bp = [x if x > 0 else 0 for x in b]
    bm = [-x if x < 0 else 0 for x in b]
    hb = max(max(ap), max(am)).bit_length() + max(max(bp), max(bm)).bit_length()
    sb = (hb + min(len(a), len(b)).bit_length() + 8) // 8
    pos = _mul_nonneg(ap, bp, sb)
    pos2 = _mul_nonneg(am, bm, sb)
    neg = _mul_nonneg(ap, bm, sb)
    neg2 = _mul_nonneg(am, bp, sb)
    return [p + q - r - s for p, q, r, s in zip(pos, pos2, neg, neg2)]


def mul_mod(a: Sequence[int], b: Sequence[int], m: int) -> list[int]:
    """Product of polynomials with coefficients reduced into [0, m)."""
    if not a or not b:
        return [0]
    if len(a) * len(b) <= 1024 and m.bit_length() <= 63:
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] = (out[i + j] + x * y) % m
        return out
    sb = (2 * m.bit_length() + min(len(a), len(b)).bit_length() + 8) // 8
    return [x % m for x in _mul_nonneg(a, b, sb)]


def series_inv_mod(u: Sequence[int], n: int, m: int) -> list[int]:
    """Inverse of u mod (x^n, m); u[0] must be a unit mod m."""
    v = [pow(u[0], -1, m)]
    k = 1
    while k < n:
        k = min(2 * k, n)
        uv = mul_mod(list(u[:k]), v, m)[:k]
        corr = [(-x) % m for x in uv]
        corr[0] = (2 - uv[0]) % m
        v = mul_mod(v, corr, m)[:k]
    return v


def divmod_monic_mod(a: Sequence[int], b: Sequence[int], m: int) -> tuple[list[int], list[int]]:
    """Quotient/remainder by monic b, coefficients mod m (reversal + Newton)."""
    a = _trim([x % m for x in a])
    b = [x % m for x in b]
    da, db = len(a) - 1, len(b) - 1
    if da < db:
        return [0], a
    nq = da - db + 1
    binv = series_inv_mod(b[::-1], nq, m)
    q = mul_mod(a[::-1][:nq], binv, m)[:nq][::-1]
    bq = mul_mod(b, q, m)
    r = [(x - y) % m for x, y in zip(a, bq)][:db]
    return q, _trim(r)


def hensel_lift_pair(
    f: Sequence[int],
    a0: Sequence[int],
    b0: Sequence[int],
    s0: Sequence[int],
    t0: Sequence[int],
    p: int,
    target: int,
) -> tuple[list[int], list[int]]:
    """Quadratic Hensel lift of a monic coprime pair.

    f ≡ a0·b0 (mod p) with s0·a0 + t0·b0 ≡ 1 (mod p); all of a0, b0 monic.
    Returns (A, B) with f ≡ A·B (mod p^target), A ≡ a0, B ≡ b0 (mod p).
    Polynomial lengths are pinned every round: the Bezout multipliers are
    only correct modulo the current precision above their true degree, and
    letting those pseudo-zeros accumulate makes the Kronecker packs blow up.
    """
    la, lb = len(_trim(list(a0))), len(_trim(list(b0)))
    A, B, s, t = list(a0), list(b0), list(s0), list(t0)
    k = 1
    while k < target:
        k2 = min(2 * k, target)
        m = p ** k2
        fm = [c % m for c in f]
        ab = mul_mod(A, B, m)
        e = _trim([(x - y) % m for x, y in zip(fm, ab + [0] * len(fm))])
        q, _r = divmod_monic_mod(mul_mod(s, e, m), B, m)
        te = mul_mod(t, e, m)
        qa = mul_mod(q, A, m)
        A = [
            ((A[i] if i < len(A) else 0) + (te[i] if i < len(te) else 0) + (qa[i] if i < len(qa) else 0)) % m
            for i in range(la)
        ]
        A[la - 1] = 1
        B = [
            ((B[i] if i < len(B) else 0) + (_r[i] if i < len(_r) else 0)) % m
            for i in range(lb)
        ]
        B[lb - 1] = 1
        if k2 < target:
            sa = mul_mod(s, A, m)
            tb = mul_mod(t, B, m)
            bez = _trim([(x + y) % m for x, y in zip(sa, tb)])
            bez[0] = (bez[0] - 1) % m
            c, d = divmod_monic_mod(mul_mod(s, bez, m), B, m)
            s = _trim([(x - y) % m for x, y in zip(s, d + [0] * len(s))])[:lb - 1 or 1]
            tbz = mul_mod(t, bez, m)
            ca = mul_mod(c, A, m)
            nt = max(len(t), len(tbz), len(ca))
            t = _trim(
                [
                    ((t[i] if i < len(t) else 0) - (tbz[i] if i < len(tbz) else 0) - (ca[i] if i < len(ca) else 0)) % m
                    for i in range(nt)
                ]
            )[:la - 1 or 1]
        k = k2
    return A, B


def balanced(x: int, m: int) -> int:
    """Representative of x mod m in (-m/2, m/2]."""
    x %= m
    return x - m if 2 * x > m else x


# ---------------------------------------------------------------------------
# IntPoly / ModPoly
# ---------------------------------------------------------------------------

class IntPoly:
    """Immutable dense polynomial over Z."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int]):
        c = _trim([int(x) for x in coeffs] or [0])
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("IntPoly is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def is_monic(self) -> bool:
        return self.coeffs[-1] == 1

    def lc(self) -> int:
        return self.coeffs[-1]

    def __eq__(self, other) -> bool:
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"IntPoly(deg={self.degree})"

    def __add__(self, other: "IntPoly") -> "IntPoly":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return IntPoly(
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
        )

    def __sub__(self, other: "IntPoly") -> "IntPoly":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return IntPoly(
            (a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)
        )

    def __mul__(self, other: "IntPoly") -> "IntPoly":
        if self.is_zero() or other.is_zero():
            return IntPoly([0])
        return IntPoly(mul_z(self.coeffs, other.coeffs))

    def scale(self, k: int) -> "IntPoly":
        return IntPoly(k * c for c in self.coeffs)

    def shift(self, n: int) -> "IntPoly":
        """Multiply by x^n."""
        return IntPoly([0] * n + list(self.coeffs))

    def derivative(self) -> "IntPoly":
        return IntPoly(i * c for i, c in enumerate(self.coeffs) if i > 0) if self.degree else IntPoly([0])

    def eval_int(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_frac(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod_exact(self, d: "IntPoly") -> tuple["IntPoly", "IntPoly"] | None:
        """Integer-coefficient division by monic d; None if not exact over Z.

        Remainder is returned (degree < deg d); quotient coefficients stay
        integral because d is monic.
        """
        if not d.is_monic():
            raise NonMonic("divisor must be monic")
        num = list(self.coeffs)
        dn = d.degree
        dc = d.coeffs
        if len(num) - 1 < dn:
            return IntPoly([0]), self
        q = [0] * (len(num) - dn)
        for i in range(len(num) - dn - 1, -1, -1):
            c = num[i + dn]
            q[i] = c
            if c:
                for j in range(dn):
                    num[i + j] -= c * dc[j]
                num[i + dn] = 0
        return IntPoly(q), IntPoly(num[:dn] or [0])

    def divides(self, other: "IntPoly") -> bool:
        """Exact-division gate: self monic, does self | other over Z?"""
        _q, r = other.divmod_exact(self)
        return r.is_zero()

    def content(self) -> int:
        from math import gcd

        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    def reduce_mod(self, m: int) -> "ModPoly":
        return ModPoly(m, [c % m for c in self.coeffs])

    def compose_linear_shift(self, a: int) -> "IntPoly":
        """f(x + a), Horner-style Taylor shift."""
        c = list(self.coeffs)
        n = len(c)
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                c[j] += a * c[j + 1]
        return IntPoly(c)


class ModPoly:
    """Dense polynomial with coefficients reduced into [0, modulus)."""

    __slots__ = ("modulus", "coeffs")

    def __init__(self, modulus: int, coeffs: Iterable[int]):
        if modulus < 2:
            raise ValueError("modulus must be >= 2")
        object.__setattr__(self, "modulus", int(modulus))
        c = _trim([int(x) % modulus for x in coeffs] or [0])
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("ModPoly is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModPoly)
            and self.modulus == other.modulus
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.modulus, self.coeffs))

    def __repr__(self) -> str:
        return f"ModPoly(mod={self.modulus}, deg={self.degree})"


@dataclass(frozen=True)
class CrtBasis:
    """Pairwise-distinct word-size primes with their running product."""

    primes: tuple[int, ...]
    product: int

    @staticmethod
    def build(primes: Sequence[int]) -> "CrtBasis":
        ps = tuple(primes)
        if len(set(ps)) != len(ps):
            raise Inconsistent("duplicate primes in basis")
        prod = 1
        for p in ps:
            prod *= p
        return CrtBasis(ps, prod)


@dataclass(frozen=True)
class RootBound:
    bound: Fraction
    kind: str  # "cauchy" or "fujiwara"


# ---------------------------------------------------------------------------
# primality / prime pool
# ---------------------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24 (covers all uses here)."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_pool(count: int, below: int = 1 << 31, above: int = 9520) -> list[int]:
    """`count` largest primes below `below`, all > `above`, descending."""
    out: list[int] = []
    p = below - 1
    while len(out) < count and p > above:
        if is_prime(p):
            out.append(p)
        p -= 1
    if len(out) < count:
        raise InsufficientModulus("prime pool exhausted")
    return out


# ---------------------------------------------------------------------------
# resultants, discriminants, reconstruction, bounds
# ---------------------------------------------------------------------------

def _resultant_mod(f: Sequence[int], g: Sequence[int], p: int) -> int:
    """Res(f, g) over F_p by the Euclidean remainder sequence."""
    a = _trim([c % p for c in f])
    b = _trim([c % p for c in g])
    res = 1
    if len(a) < len(b):
        a, b = b, a
        if ((len(a) - 1) * (len(b) - 1)) % 2 == 1:
            res = p - 1
    while len(b) > 1:
        da, db = len(a) - 1, len(b) - 1
        inv = pow(b[-1], -1, p)
        r = list(a)
        for i in range(da - db, -1, -1):
            c = r[i + db] * inv % p
            if c:
                for j in range(db + 1):
                    r[i + j] = (r[i + j] - c * b[j]) % p
        r = _trim(r[:db] or [0])
        dr = len(r) - 1 if r != [0] else -1
        if r == [0]:
            return 0
        res = res * pow(b[-1], da - dr, p) % p
        if (da * db) % 2 == 1:
            res = (-res) % p
        a, b = b, r
    return res * pow(b[0], len(a) - 1, p) % p


def _pseudo_rem(a: list[int], b: list[int]) -> list[int]:
    """prem(a, b): remainder of lc(b)^(deg a - deg b + 1) * a by b, over Z."""
    db = len(b) - 1
    lb = b[-1]
    r = list(a)
    e = len(a) - 1 - db + 1
    while len(r) - 1 >= db and r != [0]:
        d = len(r) - 1 - db
        lr = r[-1]
        r = [lb * x for x in r]
        for j in range(db + 1):
            r[d + j] -= lr * b[j]
        r = _trim(r)
        e -= 1
    return _trim([x * lb ** e for x in r])


def _h_step(h: int, g: int, delta: int) -> int:
    """h^(1-delta) * g^delta, exact in Z for the subresultant recurrence."""
    if delta == 0:
        return h
    if delta == 1:
        return g
    q, r = divmod(g ** delta, h ** (delta - 1))
    assert r == 0
    return q


def subresultant_prs(f: IntPoly, g: IntPoly) -> int:
    """Res(f, g) over Z via the subresultant PRS (small-degree oracle)."""
    if f.is_zero() or g.is_zero():
        raise ZeroInput("resultant of zero polynomial")
    a, b = list(f.coeffs), list(g.coeffs)
    s = 1
    if len(a) < len(b):
        if ((len(a) - 1) * (len(b) - 1)) % 2 == 1:
            s = -1
        a, b = b, a
    if len(b) == 1:
        return s * b[0] ** (len(a) - 1)
    gg, h = 1, 1
    while True:
        da, db = len(a) - 1, len(b) - 1
        delta = da - db
        if da % 2 == 1 and db % 2 == 1:
            s = -s
        r = _pseudo_rem(a, b)
        if r == [0]:
            return 0
        a = b
        div = gg * h ** delta
        b = [x // div for x in r]
        gg = a[-1]
        h = _h_step(h, gg, delta)
        if len(b) == 1:
            break
    return s * _h_step(h, b[0], len(a) - 1)


def _resultant_exact_smalldeg(f: IntPoly, g: IntPoly) -> int:
    """Direct Sylvester determinant (Bareiss), for cross-checks only."""
    n, m = f.degree, g.degree
    if n == 0:
        return f.coeffs[0] ** m
    if m == 0:
        return g.coeffs[0] ** n
    size = n + m
    M = [[0] * size for _ in range(size)]
    fc = list(reversed(f.coeffs))
    gc = list(reversed(g.coeffs))
    for i in range(m):
        for j, c in enumerate(fc):
            M[i][i + j] = c
    for i in range(n):
        for j, c in enumerate(gc):
            M[m + i][i + j] = c
    # Bareiss fraction-free elimination
    denom = 1
    sign = 1
    for k in range(size - 1):
        if M[k][k] == 0:
            piv = next((r for r in range(k + 1, size) if M[r][k]), None)
            if piv is None:
                return 0
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // denom
            M[i][k] = 0
        denom = M[k][k]
    return sign * M[size - 1][size - 1]


def resultant(f: IntPoly, g: IntPoly) -> int:
    """Res(f, g), exact: modular CRT against a Hadamard-type bound."""
    if f.is_zero() or g.is_zero():
        raise ZeroInput("resultant of zero polynomial")
    n, m = f.degree, g.degree
    if n == 0:
        return f.coeffs[0] ** m
    if m == 0:
        return g.coeffs[0] ** n
    nf = sum(c * c for c in f.coeffs)
    ng = sum(c * c for c in g.coeffs)
    # |Res| <= ||f||_2^m * ||g||_2^n  (Hadamard on the Sylvester matrix)
    bound_sq = nf ** m * ng ** n
    bits = (bound_sq.bit_length() + 1) // 2 + 2
    lf, lg = f.coeffs[-1], g.coeffs[-1]
    primes = []
    p = (1 << 31) - 1
    acc = 1
    while acc.bit_length() <= bits + 1:
        if is_prime(p) and lf % p and lg % p:
            primes.append(p)
            acc *= p
        p -= 2
    residues = [_resultant_mod(f.coeffs, g.coeffs, q) for q in primes]
    x, mprod = 0, 1
    for q, r in zip(primes, residues):
        t = (r - x) % q * pow(mprod % q, -1, q) % q
        x += mprod * t
        mprod *= q
    return balanced(x, mprod)


def discriminant(f: IntPoly) -> int:
    """disc(f) = (-1)^(n(n-1)/2) Res(f, f') / lc(f)."""
    if f.is_zero() or f.degree < 1:
        raise ZeroInput("discriminant needs degree >= 1")
    n = f.degree
    r = resultant(f, f.derivative())
    s = -1 if (n * (n - 1) // 2) % 2 else 1
    val, rem = divmod(s * r, f.lc())
    assert rem == 0
    return val


def crt_reconstruct(
    residues: Sequence[tuple[int, Sequence[int]]], bound: int
) -> IntPoly:
    """Balanced coefficient-wise CRT of per-prime value sequences.

    Every |output coefficient| is guaranteed <= bound; requires
    prod(primes) > 2*bound.
    """
    if not residues:
        raise Inconsistent("no residues")
    length = len(residues[0][1])
    if any(len(v) != length for _p, v in residues):
        raise Inconsistent("residue sequences of different lengths")
    prod = 1
    for p, _v in residues:
        prod *= p
    if prod <= 2 * bound:
        raise InsufficientModulus(f"prime product {prod.bit_length()}b too small")
    # Garner-style incremental accumulation, coefficientwise
    x = [0] * length
    m = 1
    for p, vals in residues:
        inv = pow(m % p, -1, p)
        for i in range(length):
            t = (int(vals[i]) - x[i]) % p * inv % p
            x[i] += m * t
        m *= p
    out = [balanced(c, m) for c in x]
    if any(abs(c) > bound for c in out):
        raise Inconsistent("reconstructed coefficient exceeds stated bound")
    return IntPoly(out)


def _iroot_ceil(n: int, k: int) -> int:
    """Smallest r with r^k >= n (n >= 0)."""
    if n <= 0:
        return 0
    r = int(round(n ** (1.0 / k)))
    while r ** k >= n:
        r -= 1
    while r ** k < n:
        r += 1
    return r


def root_bound(f: IntPoly) -> RootBound:
    """min(Cauchy, Fujiwara) upper bound on |complex roots|."""
    if f.is_zero() or f.degree < 1:
        raise ZeroInput("root bound needs degree >= 1")
    c = f.coeffs
    n = f.degree
    lead = abs(c[-1])
    cauchy = Fraction(1) + Fraction(max(abs(x) for x in c[:-1]), lead)
    fuji = Fraction(0)
    for k in range(1, n + 1):
        a = abs(c[n - k])
        if a == 0:
            continue
        # exact rational >= (a/lead)^(1/k): ceil of integer k-th root of ceil(a/lead)
        ratio = -(-a // lead)
        fuji = max(fuji, Fraction(_iroot_ceil(ratio, k)))
    fuji *= 2
    if fuji and fuji < cauchy:
        return RootBound(fuji, "fujiwara")
    return RootBound(cauchy, "cauchy")


def power_sums(f: IntPoly | ModPoly, m: int) -> list[int]:
    """p_1..p_m of the roots via Newton's identities (monic f).

    IntPoly: exact over Z.  ModPoly: modulo a prime > m (SMALL_PRIME guard:
    the inverse direction divides by k <= m, and we keep both directions on
    the same contract).
    """
    if isinstance(f, ModPoly):
        p = f.modulus
        if p <= m:
            raise SmallPrime(f"modulus {p} <= requested index {m}")
        if f.coeffs[-1] != 1:
            raise NonMonic("power sums need a monic polynomial")
        red = lambda x: x % p
    else:
        if not f.is_monic():
            raise NonMonic("power sums need a monic polynomial")
        red = lambda x: x
    n = f.degree
    c = f.coeffs
    ps = [0] * (m + 1)
    for k in range(1, m + 1):
        acc = k * c[n - k] if k <= n else 0
        for i in range(1, min(k - 1, n) + 1):
            acc += c[n - i] * ps[k - i]
        ps[k] = red(-acc)
    return ps[1:]


def power_sums_to_monic(ps: Sequence[int], n: int, p: int) -> list[int]:
    """Inverse Newton mod prime p: first n power sums -> monic degree-n poly."""
    if p <= n:
        raise SmallPrime(f"modulus {p} <= degree {n}")
    c = [0] * (n + 1)
    c[n] = 1
    for k in range(1, n + 1):
        acc = ps[k - 1] % p
        for i in range(1, k):
            acc += c[n - i] * ps[k - i - 1]
        c[n - k] = -acc * pow(k, -1, p) % p
    return c
