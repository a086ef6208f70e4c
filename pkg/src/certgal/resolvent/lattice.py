"""Knapsack-lattice factor search (van Hoeij style) with exact verification.

The search machinery is heuristic; nothing it produces is trusted until the
candidate factor divides Q exactly over Z.  That division is the whole
certificate, so a search failure is reported as INCONCLUSIVE rather than as
a weaker answer, and the caller may fall back to an externally supplied
factor file which goes through the same division gate.

Pipeline: pick the reduction prime with the fewest modular factors among
the first 50 of good reduction, Hensel-lift the factorization to p^a past
a Mignotte-type coefficient bound, attach to each lifted factor the vector
of its first few power sums (traces), and reduce the lattice

    [ W*I_r | traces ]
    [   0   | p^a*I_s ]

with LLL at quality 0.99.  Subset indicator vectors of true factors are
the short vectors with 0/W head pattern; each extracted subset is tested
by exact division.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import numpy as np

from ..bigarith import IntPoly, ModPoly, balanced, is_prime, mul_mod, power_sums
from ..errors import (
    HenselObstruction,
    Inconclusive,
    Inconsistent,
    NonMonic,
    ZeroInput,
)
from ..ffield import FqField, fq_factor, _np_deriv, _np_gcd
from . import FactorCertificate
from .oracle import squarefree_pattern_mod


# ---------------------------------------------------------------------------
# exact LLL, Fractions throughout; dimensions here never exceed a few dozen
# ---------------------------------------------------------------------------

def lll_reduce(basis: list[list[int]], delta: Fraction = Fraction(99, 100)) -> list[list[int]]:
    """Textbook LLL with exact rational Gram-Schmidt data."""
    if not Fraction(1, 4) < delta < 1:
        raise ValueError("delta out of range")
    b = [list(map(int, row)) for row in basis]
    n = len(b)
    if n <= 1:
        return b

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    mu = [[Fraction(0)] * n for _ in range(n)]
    B = [Fraction(0)] * n

    def gs_row(i: int) -> None:
        for j in range(i):
            num = Fraction(dot(b[i], b[j]))
            for m in range(j):
                num -= mu[j][m] * mu[i][m] * B[m]
            mu[i][j] = num / B[j]
        B[i] = Fraction(dot(b[i], b[i])) - sum(mu[i][j] ** 2 * B[j] for j in range(i))
        if B[i] <= 0:
            raise Inconsistent("LLL input rows are linearly dependent")

    for i in range(n):
        gs_row(i)

    def red(k: int, l: int) -> None:
        if abs(mu[k][l]) * 2 > 1:
            q = int(round(mu[k][l]))
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[l])]
                mu[k][l] -= q
                for i in range(l):
                    mu[k][i] -= q * mu[l][i]

    k = 1
    while k < n:
        red(k, k - 1)
        if B[k] < (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            # swap b_{k-1}, b_k and patch the GS data in place
            m_ = mu[k][k - 1]
            B_ = B[k] + m_ * m_ * B[k - 1]
            mu_new = m_ * B[k - 1] / B_
            B[k] = B[k - 1] * B[k] / B_
            B[k - 1] = B_
            b[k - 1], b[k] = b[k], b[k - 1]
            for j in range(k - 1):
                mu[k - 1][j], mu[k][j] = mu[k][j], mu[k - 1][j]
            mu[k][k - 1] = mu_new
            for i in range(k + 1, n):
                t = mu[i][k]
                mu[i][k] = mu[i][k - 1] - m_ * t
                mu[i][k - 1] = t + mu_new * mu[i][k]
            k = max(k - 1, 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return b


# ---------------------------------------------------------------------------
# Hensel lifting of a multi-factor modular factorization
# ---------------------------------------------------------------------------

def _poly_xgcd_mod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    """s, t with s*a + t*b === 1 mod p; raises if gcd is not a unit."""

    def trim(u):
        while len(u) > 1 and u[-1] % p == 0:
            u = u[:-1]
        return [c % p for c in u]

    def dm(u, v):
        u = u[:]
        dv = len(v) - 1
        inv = pow(v[dv], -1, p)
        q = [0] * max(len(u) - dv, 1)
        for i in range(len(u) - dv - 1, -1, -1):
            c = u[i + dv] * inv % p
            q[i] = c
            if c:
                for j in range(dv + 1):
                    u[i + j] = (u[i + j] - c * v[j]) % p
        return trim(q), trim(u[:dv] or [0])

    r0, r1 = trim(a), trim(b)
    s0, s1 = [1], [0]
    t0, t1 = [0], [1]

    def sub_scaled(u, q, v):
        qv = mul_mod(q, v, p)
        n = max(len(u), len(qv))
        return trim([(u[i] if i < len(u) else 0) - (qv[i] if i < len(qv) else 0) for i in range(n)])

    while len(r1) > 1 or r1[0] != 0:
        q, r = dm(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub_scaled(s0, q, s1)
        t0, t1 = t1, sub_scaled(t0, q, t1)
    if len(r0) != 1 or r0[0] == 0:
        raise Inconsistent("modular factors are not coprime")
    inv = pow(r0[0], -1, p)
    return [c * inv % p for c in s0], [c * inv % p for c in t0]


def hensel_lift_factors(f: IntPoly, facs: list[list[int]], p: int, target: int) -> list[list[int]]:
    """Lift f === prod(facs) (mod p), all monic, to a factorization mod p^target."""
    from ..bigarith import hensel_lift_pair

    m = p ** target

    def rec(fnode: list[int], group: list[list[int]]) -> list[list[int]]:
        if len(group) == 1:
            return [[c % m for c in fnode]]
        mid = len(group) // 2
        left, right = group[:mid], group[mid:]
        a0, b0 = [1], [1]
        for g in left:
            a0 = mul_mod(a0, g, p)
        for g in right:
            b0 = mul_mod(b0, g, p)
        s0, t0 = _poly_xgcd_mod(a0, b0, p)
        A, B = hensel_lift_pair(fnode, a0, b0, s0, t0, p, target)
        return rec(A, left) + rec(B, right)

    lifted = rec(list(f.coeffs), facs)
    check = [1]
    for g in lifted:
        check = mul_mod(check, g, m)
    want = [c % m for c in f.coeffs]
    if check != want:
        raise HenselObstruction("lifted factors do not multiply back to f")
    return lifted


# ---------------------------------------------------------------------------
# the search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KnapsackInstance:
    prime: int
    precision: int
    modular_factors: tuple[tuple[int, ...], ...]
    traces: tuple[tuple[int, ...], ...]
    basis_dim: int


def _factor_count_mod(q: IntPoly, p: int) -> int | None:
    """Number of irreducible factors of q mod p, or None for bad reduction."""
    f = np.array([c % p for c in q.coeffs], dtype=np.int64)
    if len(f) < 2 or int(f[-1]) == 0:
        return None
    if len(_np_gcd(f, _np_deriv(f, p), p)) != 1:
        return None
    pat = squarefree_pattern_mod(ModPoly(p, [int(x) for x in f]))
    return sum(pat.values())


def _choose_prime(q: IntPoly, n_candidates: int = 50) -> tuple[int, int]:
    best: tuple[int, int] | None = None
    found = 0
    p = 3
    while found < n_candidates:
        if is_prime(p):
            cnt = _factor_count_mod(q, p)
            if cnt is not None:
                found += 1
                if best is None or cnt < best[0]:
                    best = (cnt, p)
                if best[0] == 1:
                    break
        p += 2
    if best is None:
        raise Inconclusive("no prime of good reduction found")
    return best[1], best[0]


def _norm2_bits(q: IntPoly) -> int:
    return (isqrt(sum(c * c for c in q.coeffs)) + 1).bit_length()


def factor_search_vanhoeij(
    Q,
    target: int | None = None,
    max_factors: int = 48,
    max_degree: int = 600,
) -> FactorCertificate:
    """Find the irreducible-over-Z split of Q, certified by exact division.

    Raises INCONCLUSIVE when the instance exceeds the lattice budget or the
    knapsack extraction fails; callers fall back to a supplied factor file,
    which verify_factorization certifies through the same division check.
    """
    from . import ResolventPoly

    qpoly: IntPoly = Q.poly if isinstance(Q, ResolventPoly) else Q
    n = qpoly.degree
    if n < 1:
        raise ZeroInput("nothing to factor")
    if not qpoly.is_monic():
        raise NonMonic("search expects a monic polynomial")
    if n > max_degree:
        raise Inconclusive(
            f"degree {n} exceeds the lattice search budget (max {max_degree}); "
            "supply a factor file and run the verification path"
        )
    p, count = _choose_prime(qpoly)
    if count == 1:
        return FactorCertificate((qpoly,), (), f"irreducible mod {p}")
    if count > max_factors:
        raise Inconclusive(
            f"{count} modular factors at the best prime {p} exceed the "
            f"lattice dimension budget ({max_factors})"
        )
    fac = fq_factor(list(qpoly.reduce_mod(p).coeffs), FqField(p, 1))
    mods = [[c.rep[0] % p for c in g.coeffs] for g, _m in fac]
    r = len(mods)
    # Mignotte-type coefficient bound for a factor of degree <= half
    half = target if target is not None else (n + 1) // 2
    mig_bits = half + _norm2_bits(qpoly) + 2

    tau = 1 + max(abs(c) for c in qpoly.coeffs)  # crude root bound is fine here

    s_traces = min(r, 6)
    for attempt in range(2):
        tb = [n * tau ** j for j in range(1, s_traces + 1)]
        W = max(tb)
        lat_bits = (r + s_traces + 1) // 2 + (W * isqrt(r + s_traces) + 1).bit_length() + 32
        need_bits = max(mig_bits, lat_bits) + 32 * attempt
        a = -(-need_bits // (p.bit_length() - 1)) + 1
        pa = p ** a
        lifted = hensel_lift_factors(qpoly, mods, p, a)
        traces = []
        for g in lifted:
            ps = power_sums(ModPoly(pa, g), s_traces)
            traces.append([balanced(x, pa) for x in ps])
        rows = []
        for i in range(r):
            rows.append([W if j == i else 0 for j in range(r)] + traces[i])
        for j in range(s_traces):
            rows.append([0] * r + [pa if i == j else 0 for i in range(s_traces)])
        red = lll_reduce(rows)
        bound2 = r * W * W + sum(t * t for t in tb)
        cands: list[tuple[int, ...]] = []
        for row in red:
            if sum(x * x for x in row) > bound2:
                continue
            head = row[:r]
            nz = [x for x in head if x]
            if not nz:
                continue
            if nz[0] < 0:
                head = [-x for x in head]
            if any(x not in (0, W) for x in head):
                continue
            sub = tuple(i for i, x in enumerate(head) if x)
            if 0 < len(sub) and sub not in cands:
                cands.append(sub)
        cands.sort(key=len)
        used: set[int] = set()
        found: list[tuple[tuple[int, ...], IntPoly]] = []

        def try_subset(sub: tuple[int, ...]) -> IntPoly | None:
            prod = [1]
            for i in sub:
                prod = mul_mod(prod, lifted[i], pa)
            cand = IntPoly([balanced(c, pa) for c in prod])
            if cand.degree < 1 or not cand.is_monic():
                return None
            return cand if cand.divides(qpoly) else None

        for sub in cands:
            if used & set(sub):
                continue
            got = try_subset(sub)
            if got is not None:
                found.append((sub, got))
                used |= set(sub)
        leftover = tuple(sorted(set(range(r)) - used))
        if leftover:
            got = try_subset(leftover)
            if got is not None:
                found.append((leftover, got))
                used |= set(leftover)
        if len(used) == r and found:
            prod = IntPoly([1])
            for _sub, f in found:
                prod = prod * f
            if prod == qpoly:
                return FactorCertificate(
                    tuple(f for _sub, f in found),
                    (),
                    f"vanhoeij p={p} precision={a} traces={s_traces}",
                )
        s_traces = min(r, s_traces * 2 + 2)
    raise Inconclusive("knapsack extraction failed; supply a factor file")
