"""Number-field layer over K = Q[x]/(P), kept deliberately small.

Two jobs: minimal polynomials of explicit elements (via the exact 17x17
multiplication matrix and a division-free characteristic polynomial), and
the discriminant bookkeeping that certifies disc(O_K) = 2^30 * 137^8 from
four machine-checkable facts:

  * the P-order is maximal at 137 and v_137(disc P) = 8,
  * the R-order is maximal at 2 and v_2(disc R) = 30,
  * gcd(disc P, disc R) carries no prime outside {2, 137},
  * the {2,137}-free part of disc P is a perfect square whose prime
    divisors all fail Dedekind maximality (each one must divide the index,
    not the field discriminant).

No maximal-order algorithm is run; the four facts above pin the same
conclusion for this field.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from .bigarith import IntPoly, discriminant, is_prime
from .errors import Inconsistent, MaximalityFails, NonMonic, RationalElement
from .ffield import dedekind_maximal_at_p


# ---------------------------------------------------------------------------
# elements and their minimal polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ElementExpr:
    """numerator(alpha) / denominator inside Q[x]/(P)."""

    numerator: IntPoly
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")


def _charpoly_berkowitz(A: list[list[int]]) -> list[int]:
    """Coefficients of det(x*I - A), descending, for an integer matrix."""
    n = len(A)
    p = [1]
    for r in range(1, n + 1):
        a = A[r - 1][r - 1]
        row = A[r - 1][: r - 1]
        col = [A[i][r - 1] for i in range(r - 1)]
        sub = [Ai[: r - 1] for Ai in A[: r - 1]]
        v = [1, -a]
        vec = col
        for _k in range(2, r + 1):
            v.append(-sum(x * y for x, y in zip(row, vec)))
            vec = [sum(sub[i][j] * vec[j] for j in range(r - 1)) for i in range(r - 1)]
        p = [
            sum(v[i - j] * p[j] for j in range(len(p)) if 0 <= i - j < len(v))
            for i in range(r + 1)
        ]
    return p


def _mult_matrix(num: IntPoly, P: IntPoly) -> list[list[int]]:
    """Matrix of multiplication by num(alpha) on the basis 1..alpha^(n-1)."""
    n = P.degree
    cols: list[list[int]] = []
    cur = list(num.coeffs)
    for _j in range(n):
        red = list(cur)
        for i in range(len(red) - 1, n - 1, -1):
            c = red[i]
            if c:
                red[i] = 0
                for k in range(n):
                    red[i - n + k] -= c * P.coeffs[k]
        col = red[:n] + [0] * max(0, n - len(red))
        cols.append(col)
        cur = [0] + col  # next basis vector: multiply by x
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def minpoly_of_element(e: ElementExpr, P: IntPoly) -> IntPoly:
    """Characteristic polynomial of multiplication by e on Q[x]/(P).

    The field degree 17 is prime, so for any non-rational e the
    characteristic polynomial is already the minimal polynomial.
    """
    if not P.is_monic():
        raise NonMonic("P must be monic")
    n = P.degree
    num = e.numerator
    if num.degree >= n:
        _q, num = num.divmod_exact(P)
    if num.degree < 1:
        raise RationalElement("element lies in Q; no degree-17 minimal polynomial")
    N = _mult_matrix(num, P)
    cp = _charpoly_berkowitz(N)  # det(y I - N), descending, degree n
    den = e.denominator
    out = []
    for j, c in enumerate(cp):  # coefficient of y^(n-j); y = den * x
        q, r = divmod(c, den ** j)
        if r:
            raise Inconsistent("element is not an algebraic integer; minpoly not in Z[x]")
        out.append(q)
    return IntPoly(out[::-1])


# ---------------------------------------------------------------------------
# discriminant certification
# ---------------------------------------------------------------------------

def _vp(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _pollard_rho(n: int, budget: int = 200_000) -> int | None:
    """One Brent-cycle factor attempt; None when the budget runs out."""
    if n % 2 == 0:
        return 2
    x, c, count = 2, 1, 0
    while count < budget:
        y, d = x, 1
        power, lam = 1, 1
        while d == 1 and count < budget:
            if power == lam:
                x = y
                power *= 2
                lam = 0
            y = (y * y + c) % n
            lam += 1
            count += 1
            d = gcd(abs(x - y), n)
        if 1 < d < n:
            return d
        c += 1
        x = 2
    return None


def _factor_bounded(n: int, trial_bound: int = 1_000_000) -> tuple[list[int], int]:
    """(sorted prime factors, unfactored cofactor) with a bounded budget."""
    primes: list[int] = []
    d = 2
    while d * d <= n and d <= trial_bound:
        while n % d == 0:
            if d not in primes:
                primes.append(d)
            n //= d
        d += 1 if d == 2 else 2
    stack = [n] if n > 1 else []
    leftover = 1
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            if m not in primes:
                primes.append(m)
            continue
        f = _pollard_rho(m)
        if f is None:
            leftover *= m
            continue
        stack.append(f)
        stack.append(m // f)
    return sorted(primes), leftover


@dataclass(frozen=True)
class DiscReport:
    disc_P: int
    v2_disc_P: int
    v137_disc_P: int
    v2_disc_R: int
    v137_disc_R: int
    cofactor_root: int
    cofactor_primes: tuple[int, ...]
    cofactor_unfactored: int
    dedekind_verdicts: tuple[tuple[str, int, bool], ...]
    gcd_P_R_extra: int  # gcd(disc P, disc R) with 2- and 137-parts removed
    disc_field: int
    status: str


def discriminant_report(
    P: IntPoly,
    R: IntPoly,
    element: ElementExpr | None = None,
) -> DiscReport:
    """Certify disc(O_K) = 2^30 * 137^8 from P- and R-order data.

    element, when given, is the change of generator; its minimal polynomial
    must reproduce R (same field).
    """
    if element is not None and minpoly_of_element(element, P) != R:
        raise Inconsistent("element's minimal polynomial is not R")
    dP = discriminant(P)
    dR = discriminant(R)
    if dP == 0 or dR == 0:
        raise Inconsistent("inputs are not squarefree")
    v2P, v137P = _vp(abs(dP), 2), _vp(abs(dP), 137)
    v2R, v137R = _vp(abs(dR), 2), _vp(abs(dR), 137)
    verdicts: list[tuple[str, int, bool]] = []

    ok137 = dedekind_maximal_at_p(P, 137)
    verdicts.append(("P", 137, ok137))
    if not ok137:
        raise MaximalityFails("P-order not maximal at 137")
    ok2R = dedekind_maximal_at_p(R, 2)
    verdicts.append(("R", 2, ok2R))
    if not ok2R:
        raise MaximalityFails("R-order not maximal at 2")

    # ramified primes divide both polynomial discriminants
    g = gcd(abs(dP), abs(dR))
    g_extra = g // (2 ** _vp(g, 2)) // (137 ** _vp(g, 137))
    if g_extra != 1:
        raise MaximalityFails(
            f"gcd(disc P, disc R) has an unexpected common part {g_extra}"
        )

    rest = abs(dP) // (2 ** v2P) // (137 ** v137P)
    root = isqrt(rest)
    if root * root != rest:
        raise MaximalityFails("non-square cofactor contradicts the index identity")
    primes, leftover = _factor_bounded(root)
    for q in primes:
        if q in (2, 137):
            continue
        okq = dedekind_maximal_at_p(P, q)
        verdicts.append(("P", q, okq))
        if okq:
            # maximal at q would put q^2 into the field discriminant
            raise MaximalityFails(f"P-order maximal at {q} contradicts disc(O_K)")
    status = "certified" if leftover == 1 else "certified modulo factoring"
    return DiscReport(
        disc_P=dP,
        v2_disc_P=v2P,
        v137_disc_P=v137P,
        v2_disc_R=v2R,
        v137_disc_R=v137R,
        cofactor_root=root,
        cofactor_primes=tuple(primes),
        cofactor_unfactored=leftover,
        dedekind_verdicts=tuple(verdicts),
        gcd_P_R_extra=g_extra,
        disc_field=2 ** v2R * 137 ** v137P,
        status=status,
    )
