"""Four-set sum resolvent: exact computation, predictions, factorization.

Q(X) = prod over 4-element subsets S of the roots of P of (X - sum(S)),
degree C(17,4) = 2380 for the target polynomial.  Q mod p is computed with
no root-finding at all: from the power sums of P one forms the truncated
exponential generating series f_d(z) = sum_m d^m p_m z^m / m!, combines
them by

    e4 = (f1^4 - 6 f2 f1^2 + 3 f2^2 + 8 f3 f1 - 6 f4) / 24

termwise, reads off the power sums of Q, and inverts Newton's identities.
The exact Q is then CRT-reconstructed from enough word-size primes and
cross-checked against held-out primes plus (in tests) a brute-force
extension-field oracle.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from pathlib import Path

import numpy as np

from .. import sl2p1
from ..bigarith import (
    IntPoly,
    ModPoly,
    crt_reconstruct,
    discriminant,
    is_prime,
    mul_z,
    root_bound,
    _bigmul,
)
from ..errors import (
    BadReduction,
    DegreeTooSmall,
    Fatal,
    Inconsistent,
    NonMonic,
    SmallPrime,
    UnknownType,
)
from ..ffield import _np_deriv, _np_gcd

DEG17_RESOLVENT_DEGREE = comb(17, 4)


# ---------------------------------------------------------------------------
# truncated power series mod p, numpy int64 coefficients
# ---------------------------------------------------------------------------

def _kron_mulmod(a: np.ndarray, b: np.ndarray, p: int, out_len: int) -> np.ndarray:
    """Truncated series product via Kronecker packing; one bigint multiply."""
    n = max(len(a), len(b))
    slot = (n * (p - 1) * (p - 1)).bit_length() + 1
    sb = (slot + 7) // 8
    A = int.from_bytes(b"".join(int(x).to_bytes(sb, "little") for x in a), "little")
    B = int.from_bytes(b"".join(int(x).to_bytes(sb, "little") for x in b), "little")
    C = _bigmul(A, B)
    full = len(a) + len(b) - 1
    need = min(out_len, full)
    raw = C.to_bytes(full * sb + sb, "little")[: need * sb]
    buf = np.frombuffer(raw, dtype=np.uint8).reshape(need, sb).astype(np.int64)
    acc = np.zeros(need, dtype=np.int64)
    mult = 1
    for i in range(sb):
        acc = (acc + buf[:, i] * mult) % p
        mult = mult * 256 % p
    return acc


def _inverses_upto(n: int, p: int) -> np.ndarray:
    inv = np.zeros(n + 1, dtype=np.int64)
    if n >= 1:
        inv[1] = 1
    for i in range(2, n + 1):
        inv[i] = (-(p // i) * int(inv[p % i])) % p
    return inv


def _series_inv(a: np.ndarray, p: int, n: int) -> np.ndarray:
    g = np.array([pow(int(a[0]), -1, p)], dtype=np.int64)
    ln = 1
    while ln < n:
        ln2 = min(2 * ln, n)
        ag = _kron_mulmod(a[:ln2], g, p, ln2)
        t = (-ag) % p
        t[0] = (t[0] + 2) % p
        g = _kron_mulmod(g, t, p, ln2)
        ln = ln2
    return g


def _series_log(a: np.ndarray, p: int, n: int) -> np.ndarray:
    da = (np.arange(1, len(a), dtype=np.int64) * a[1:]) % p
    inva = _series_inv(a, p, n)
    t = _kron_mulmod(da, inva, p, n - 1) if n > 1 else np.zeros(0, np.int64)
    out = np.zeros(n, dtype=np.int64)
    invs = _inverses_upto(n, p)
    out[1:] = (t[: n - 1] * invs[1:n]) % p
    return out


def _series_exp(a: np.ndarray, p: int, n: int) -> np.ndarray:
    g = np.array([1], dtype=np.int64)
    ln = 1
    while ln < n:
        ln2 = min(2 * ln, n)
        lg = _series_log(np.concatenate([g, np.zeros(ln2 - len(g), np.int64)]), p, ln2)
        t = (a[:ln2] - lg) % p
        t[0] = (t[0] + 1) % p
        g = _kron_mulmod(g, t, p, ln2)
        ln = ln2
    return g


# ---------------------------------------------------------------------------
# resolvent mod p
# ---------------------------------------------------------------------------

def _power_sums_np(f: IntPoly, p: int, m_max: int) -> np.ndarray:
    """p_0..p_m_max of the roots of monic f, mod p, Newton forward."""
    n = f.degree
    c = [f.coeffs[n - i] % p for i in range(1, n + 1)]  # c_i = a_{n-i}
    ps = np.zeros(m_max + 1, dtype=np.int64)
    ps[0] = n % p
    for k in range(1, m_max + 1):
        s = 0
        for i in range(1, min(k - 1, n) + 1):
            s = (s + c[i - 1] * int(ps[k - i])) % p
        if k <= n:
            s = (s + k * c[k - 1]) % p
        ps[k] = (-s) % p
    return ps


def resolvent_mod_p(P: IntPoly, p: int, disc: int | None = None) -> ModPoly:
    """Q mod p by the generating-series method; no root extraction.

    Needs p > deg Q so the Newton-identity divisions stay invertible, and
    good reduction (p coprime to disc P) so Q mod p is squarefree.
    """
    n = P.degree
    if n < 4:
        raise DegreeTooSmall("4-set resolvent needs degree >= 4")
    if not P.is_monic():
        raise NonMonic("resolvent input must be monic")
    deg_q = comb(n, 4)
    if p <= deg_q:
        raise SmallPrime(f"prime {p} <= resolvent degree {deg_q}")
    if disc is None:
        disc = discriminant(P)
    if disc % p == 0:
        raise BadReduction(f"{p} divides disc(P); skip this prime")
    m = deg_q + 1
    ps = _power_sums_np(P, p, deg_q)
    fact = np.zeros(m, dtype=np.int64)
    fact[0] = 1
    for i in range(1, m):
        fact[i] = fact[i - 1] * i % p
    invfact = np.zeros(m, dtype=np.int64)
    invfact[m - 1] = pow(int(fact[m - 1]), -1, p)
    for i in range(m - 1, 0, -1):
        invfact[i - 1] = invfact[i] * i % p
    f = {}
    for d in (1, 2, 3, 4):
        arr = np.zeros(m, dtype=np.int64)
        dm = 1
        for k in range(m):
            arr[k] = dm * int(ps[k]) % p * int(invfact[k]) % p
            dm = dm * d % p
        f[d] = arr
    f1 = f[1]
    f1sq = _kron_mulmod(f1, f1, p, m)
    f1_4 = _kron_mulmod(f1sq, f1sq, p, m)
    f2f1sq = _kron_mulmod(f[2], f1sq, p, m)
    f2sq = _kron_mulmod(f[2], f[2], p, m)
    f3f1 = _kron_mulmod(f[3], f1, p, m)
    e4 = (f1_4 - 6 * f2f1sq + 3 * f2sq + 8 * f3f1 - 6 * f[4]) % p
    e4 = e4 * pow(24, -1, p) % p
    pk = e4 * fact % p  # P_k(Q) = k! [z^k] e4
    if int(pk[0]) != deg_q % p:
        raise Inconsistent("resolvent power-sum seed mismatch")
    invs = _inverses_upto(deg_q, p)
    s = np.zeros(m, dtype=np.int64)
    s[1:] = (-(pk[1:] * invs[1:])) % p
    qrev = _series_exp(s, p, m)
    return ModPoly(p, [int(x) for x in qrev[::-1]])


# ---------------------------------------------------------------------------
# exact resolvent via CRT
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResolventPoly:
    poly: IntPoly
    primes: tuple[int, ...]
    holdout_primes: tuple[int, ...]
    bound_bits: int

    @property
    def degree(self) -> int:
        return self.poly.degree


@dataclass(frozen=True)
class FactorCertificate:
    factors: tuple[IntPoly, ...]
    degrees: tuple[int, ...]
    method: str

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(f.degree for f in self.factors))


def _good_prime_stream(P: IntPoly, disc: int, floor: int):
    p = (1 << 31) - 1
    while p > floor:
        if is_prime(p) and disc % p != 0:
            yield p
        p -= 2


def resolvent_exact(P: IntPoly, progress=None) -> ResolventPoly:
    """Exact Q over Z: per-prime images, Garner CRT, held-out verification."""
    n = P.degree
    if n < 4:
        raise DegreeTooSmall("4-set resolvent needs degree >= 4")
    if not P.is_monic():
        raise NonMonic("resolvent input must be monic")
    disc = discriminant(P)
    if disc == 0:
        raise Inconsistent("P is not squarefree")
    deg_q = comb(n, 4)
    rb = root_bound(P).bound
    tau = 4 * rb  # |subset sum| <= 4 * root bound
    tau_ceil = int(tau) + (0 if tau.denominator == 1 else 1)
    bound = (1 + tau_ceil) ** deg_q  # prod (1 + |s|) coefficientwise
    need_bits = bound.bit_length() + 2
    primes: list[int] = []
    acc_bits = 0
    stream = _good_prime_stream(P, disc, deg_q)
    while acc_bits <= need_bits:
        p = next(stream)
        primes.append(p)
        acc_bits += p.bit_length() - 1
    holdout = [next(stream), next(stream)]
    residues = []
    for i, p in enumerate(primes):
        q = resolvent_mod_p(P, p, disc)
        coeffs = list(q.coeffs) + [0] * (deg_q + 1 - len(q.coeffs))
        residues.append((p, coeffs))
        if progress and (i + 1) % 50 == 0:
            progress(i + 1, len(primes))
    Q = crt_reconstruct(residues, bound)
    if Q.degree != deg_q or not Q.is_monic():
        raise Fatal("reconstructed resolvent has wrong shape")
    for p in holdout:
        want = resolvent_mod_p(P, p, disc)
        if Q.reduce_mod(p) != want:
            raise Fatal(f"held-out prime {p} disagrees with reconstruction")
    # squarefreeness: unit gcd(Q, Q') modulo a good prime certifies gcd = 1 over Q
    qa = np.array([c % holdout[0] for c in Q.coeffs], dtype=np.int64)
    g = _np_gcd(qa, _np_deriv(qa, holdout[0]), holdout[0])
    if len(g) != 1:
        raise Fatal("resolvent failed the squarefreeness check")
    return ResolventPoly(Q, tuple(primes), tuple(holdout), need_bits)


# ---------------------------------------------------------------------------
# induced-orbit degree predictions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InducedDegrees:
    cycle_type: tuple[int, ...]
    per_orbit: tuple[tuple[int, tuple[tuple[int, int], ...]], ...]  # (orbit size, {deg: count})
    total: tuple[tuple[int, int], ...]

    def total_as_dict(self) -> dict[int, int]:
        return dict(self.total)

    def orbit_multiset(self, orbit_size: int) -> list[dict[int, int]]:
        return [dict(ms) for size, ms in self.per_orbit if size == orbit_size]


@lru_cache(maxsize=1)
def _sl2_perms_and_orbits():
    perms = sl2p1.enumerate_group(sl2p1.SL2)
    table = sl2p1.orbits_on_4subsets(sl2p1.SL2)
    types = {}
    for pm in perms:
        t = sl2p1._cycle_type(pm)
        if t not in types:
            types[t] = pm
    return types, table


def predicted_factor_degrees(cycle_type, table=None) -> InducedDegrees:
    """Induced cycle lengths on 4-subsets, refined by SL2-orbit.

    For an unramified prime, the factor degrees of Q mod p (and of each true
    factor of Q mod p) equal the orbit lengths of Frobenius on 4-subsets.
    """
    ct = tuple(sorted(cycle_type))
    types, default_table = _sl2_perms_and_orbits()
    if table is None:
        table = default_table
    if ct not in types:
        raise UnknownType(f"cycle type {ct} does not occur in SL2(F16)")
    perm = types[ct]
    subs = sl2p1.four_subsets()
    idx = {s: i for i, s in enumerate(subs)}
    seen = [False] * len(subs)
    per_orbit: dict[int, dict[int, int]] = {}
    total: dict[int, int] = {}
    for s0 in subs:
        i0 = idx[s0]
        if seen[i0]:
            continue
        ln = 0
        cur = s0
        while True:
            seen[idx[cur]] = True
            cur = tuple(sorted(perm[i] for i in cur))
            ln += 1
            if cur == s0:
                break
        oid = table.orbit_ids[i0]
        per_orbit.setdefault(oid, {})
        per_orbit[oid][ln] = per_orbit[oid].get(ln, 0) + 1
        total[ln] = total.get(ln, 0) + 1
    rows = []
    for oid in sorted(per_orbit):
        ms = tuple(sorted(per_orbit[oid].items()))
        rows.append((table.sizes[oid], ms))
    return InducedDegrees(ct, tuple(rows), tuple(sorted(total.items())))


def verify_factorization(Q: ResolventPoly | IntPoly, factors: list[IntPoly], table=None) -> bool:
    """The certificate: exact product identity plus orbit-size degree check."""
    qpoly = Q.poly if isinstance(Q, ResolventPoly) else Q
    if not factors:
        return False
    degs = sorted(f.degree for f in factors)
    if sum(degs) != qpoly.degree:
        return False
    if table is None:
        _types, table = _sl2_perms_and_orbits()
    sizes = sorted(table.sizes)
    if sorted(degs) != sizes:
        # any factor must still be a sum of whole orbits
        if not _subset_sum_cover(degs, sizes):
            return False
    prod = [1]
    for f in factors:
        prod = mul_z(prod, list(f.coeffs))
    return prod == list(qpoly.coeffs)


def _subset_sum_cover(degs: list[int], sizes: list[int]) -> bool:
    """Can the orbit sizes be partitioned into groups summing to the degrees?"""
    if not degs:
        return not sizes
    target = degs[0]
    m = len(sizes)
    for mask in range(1, 1 << m):
        chosen = [sizes[i] for i in range(m) if mask >> i & 1]
        if sum(chosen) == target:
            rest = [sizes[i] for i in range(m) if not mask >> i & 1]
            if _subset_sum_cover(degs[1:], rest):
                return True
    return False


# ---------------------------------------------------------------------------
# cache files
# ---------------------------------------------------------------------------

def poly_file_body(poly: IntPoly) -> str:
    return "".join(f"{c}\n" for c in poly.coeffs)


def write_poly_file(path: str | Path, poly: IntPoly, primes: int = 0) -> None:
    body = poly_file_body(poly)
    digest = hashlib.sha256(body.encode()).hexdigest()
    header = f"degree={poly.degree} primes={primes} checksum={digest}\n"
    Path(path).write_text(header + body)


def read_poly_file(path: str | Path) -> tuple[IntPoly, dict]:
    """Parse and integrity-check a coefficient file; returns (poly, header)."""
    text = Path(path).read_text()
    nl = text.index("\n")
    header_line, body = text[:nl], text[nl + 1 :]
    fields = {}
    for tok in header_line.split():
        k, _, v = tok.partition("=")
        fields[k] = v
    digest = hashlib.sha256(body.encode()).hexdigest()
    if fields.get("checksum") != digest:
        raise Fatal(f"checksum mismatch in {path}")
    coeffs = [int(line) for line in body.splitlines()]
    poly = IntPoly(coeffs)
    if poly.degree != int(fields["degree"]):
        raise Fatal(f"degree mismatch in {path}")
    return poly, fields


def load_cached_resolvent(path: str | Path, P: IntPoly) -> ResolventPoly:
    """Load Q from cache; trust only after held-out residues replay."""
    poly, fields = read_poly_file(path)
    disc = discriminant(P)
    deg_q = comb(P.degree, 4)
    stream = _good_prime_stream(P, disc, deg_q)
    n_primes = int(fields.get("primes", 0))
    for _ in range(n_primes):
        next(stream)
    holdout = [next(stream), next(stream)]
    for p in holdout:
        if poly.reduce_mod(p) != resolvent_mod_p(P, p, disc):
            raise Fatal(f"cached resolvent fails held-out prime {p}")
    return ResolventPoly(poly, (), tuple(holdout), 0)
