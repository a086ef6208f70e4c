"""Local certificates at 2 and 137: polygons, the Eisenstein split, Ore.

At 2 the chain is: Newton polygon of R forces (unit root) x (degree-16
totally ramified piece); Hensel splits R = (x - u) * E to working precision;
E is checked Eisenstein; the degree-15 cofactor of (x - beta) inside
Z_2[x]/(E) gets a beta-adic Newton polygon whose residual polynomial over
F_2, when irreducible, certifies a local extension of degree >= 240; the
discriminant valuation then decides the weight through the 450/570
dichotomy.  At 137 everything is tame and the splitting pattern is read
off P mod 137 once Dedekind maximality transfers it.

Precision is explicit everywhere: operations take and return mod-2^K data
and raise PRECISION_LOSS instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import sl2p1
from .bigarith import IntPoly, discriminant, hensel_lift_pair
from .errors import (
    HenselObstruction,
    Inconclusive,
    Inconsistent,
    NotMaximal,
    PatternMismatch,
    PrecisionLoss,
    ValueMismatch,
    ZeroInput,
)
from .ffield import FqField, dedekind_maximal_at_p, fq_factor, irreducible_mod_p

MAX_PRECISION_BITS = 768


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PadicPoly:
    """Polynomial over Z_p known modulo p^precision, ascending coefficients."""

    p: int
    precision: int
    coeffs: tuple[int, ...]

    @staticmethod
    def make(p: int, precision: int, coeffs) -> "PadicPoly":
        if precision < 1:
            raise ValueError("precision must be >= 1")
        m = p ** precision
        return PadicPoly(p, precision, tuple(int(c) % m for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def modulus(self) -> int:
        return self.p ** self.precision

    def to_int_poly(self) -> IntPoly:
        return IntPoly(list(self.coeffs))

    def at_precision(self, k: int) -> "PadicPoly":
        if k > self.precision:
            raise PrecisionLoss(f"cannot raise precision {self.precision} to {k}")
        return PadicPoly.make(self.p, k, self.coeffs)


@dataclass(frozen=True)
class NewtonPolygon:
    vertices: tuple[tuple[int, int], ...]
    slopes: tuple[tuple[Fraction, int], ...]  # (slope, horizontal length)

    def root_valuations(self) -> tuple[tuple[Fraction, int], ...]:
        return tuple((-s, l) for s, l in self.slopes)

    def total_length(self) -> int:
        return sum(l for _s, l in self.slopes)

    def slope_multiset(self) -> dict[Fraction, int]:
        out: dict[Fraction, int] = {}
        for s, l in self.slopes:
            out[s] = out.get(s, 0) + l
        return out


@dataclass(frozen=True)
class ResidualPoly:
    slope: Fraction
    lattice_length: int
    coeffs: tuple[int, ...]  # over F_p, ascending, degree = lattice_length


@dataclass(frozen=True)
class OreCertificate:
    taylor_valuations: tuple[int, ...]
    polygon: NewtonPolygon
    residual: ResidualPoly
    residual_irreducible: bool
    cofactor_degree: int
    ext_degree_lower_bound: int


@dataclass(frozen=True)
class LocalReport:
    prime: int
    splitting: tuple[tuple[int, int], ...]  # (e, f) pairs
    inertia_order: int
    tame: bool
    wild: bool
    disc_valuation: int
    fixed_points_on_p1: int | None
    level_contribution: int | None

    def __post_init__(self):
        if sum(e * f for e, f in self.splitting) != 17:
            raise Inconsistent("sum of e*f over places must be 17")


@dataclass(frozen=True)
class SerreInvariants:
    level: int | None
    weight: int | None
    detail: str = ""


# ---------------------------------------------------------------------------
# Newton polygons
# ---------------------------------------------------------------------------

def _vp(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _lower_hull(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    hull: list[tuple[int, int]] = []
    for pt in sorted(points):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_polygon(f: IntPoly | PadicPoly, p: int | None = None) -> NewtonPolygon:
    """Lower hull of (i, v_p(a_i)); root valuations are the negated slopes."""
    if isinstance(f, PadicPoly):
        p = f.p
        cap: int | None = f.precision
        coeffs = list(f.coeffs)
    else:
        if p is None:
            raise ValueError("p required for exact input")
        cap = None
        coeffs = list(f.coeffs)
    if not coeffs or coeffs[-1] == 0:
        raise ZeroInput("leading coefficient vanishes")
    if coeffs[0] == 0:
        if cap is not None:
            raise PrecisionLoss("constant term is 0 at working precision")
        raise ZeroInput("f(0) = 0; divide out the power of x first")
    pts = [(i, _vp(c, p)) for i, c in enumerate(coeffs) if c != 0]
    unknown = [i for i, c in enumerate(coeffs) if c == 0]
    hull = _lower_hull(pts)
    if cap is not None:
        # a coefficient still 0 at precision cap could dip below the hull
        for i in unknown:
            for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
                if x1 <= i <= x2:
                    line = Fraction(y1 * (x2 - i) + y2 * (i - x1), x2 - x1)
                    if cap <= line:
                        raise PrecisionLoss(
                            f"coefficient {i} is 0 mod p^{cap}, hull needs v >= {line}"
                        )
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slopes.append((Fraction(y2 - y1, x2 - x1), x2 - x1))
    return NewtonPolygon(tuple(hull), tuple(slopes))


# ---------------------------------------------------------------------------
# the split of R at 2
# ---------------------------------------------------------------------------

def split_R_at_2(R: IntPoly, K: int = 96) -> tuple[int, PadicPoly]:
    """Hensel split R = (x - u) * E mod 2^K, u odd, E Eisenstein.

    Requires the Newton polygon at 2 to consist of exactly one unit root
    and one totally ramified segment of slope -1/(n-1).
    """
    n = R.degree
    if n < 2 or not R.is_monic():
        raise Inconsistent("expected a monic polynomial of degree >= 2")
    np2 = newton_polygon(R, 2)
    want = {Fraction(-1, n - 1): n - 1, Fraction(0): 1}
    if np2.slope_multiset() != want:
        raise HenselObstruction(
            f"polygon {np2.slopes} does not split as unit root + Eisenstein"
        )
    # mod 2 the factorization must be x^(n-1) * (x + 1), a coprime pair
    if any(c % 2 == 0 for c in (R.coeffs[n], R.coeffs[n - 1])) or any(
        c % 2 for c in R.coeffs[: n - 1]
    ):
        raise HenselObstruction("R mod 2 is not x^(n-1) * (x+1)")
    g0 = [1, 1]
    h0 = [0] * (n - 1) + [1]
    s0 = [1] * (n - 1)  # (x+1) * sum x^i = x^(n-1) + 1, so s*g0 + 1*h0 = 1 mod 2
    t0 = [1]
    A, B = hensel_lift_pair(list(R.coeffs), g0, h0, s0, t0, 2, K)
    m = 1 << K
    u = (-A[0]) % m
    if u % 2 == 0:
        raise HenselObstruction("lifted rational root is even")
    E = PadicPoly.make(2, K, B)
    if E.degree != n - 1 or E.coeffs[-1] != 1:
        raise HenselObstruction("cofactor has wrong shape")
    if any(c % 2 for c in E.coeffs[:-1]) or E.coeffs[0] % 4 != 2:
        raise HenselObstruction("cofactor is not Eisenstein at 2")
    prod = [0] * (n + 1)
    for i, c in enumerate(B):
        prod[i] = (prod[i] - u * c) % m
        prod[i + 1] = (prod[i + 1] + c) % m
    if any((prod[i] - R.coeffs[i]) % m for i in range(n + 1)):
        raise HenselObstruction("(x-u)*E does not reproduce R at precision")
    return u, E


# ---------------------------------------------------------------------------
# Ore certificate over Q_2(beta)
# ---------------------------------------------------------------------------

def _is_eisenstein(E: PadicPoly) -> bool:
    p = E.p
    return (
        E.coeffs[-1] == 1
        and all(c % p == 0 for c in E.coeffs[:-1])
        and E.coeffs[0] % (p * p) != 0
    )


class _RamifiedRing:
    """Z_p[x]/(E) for Eisenstein E; elements are length-n coefficient lists."""

    def __init__(self, E: PadicPoly):
        self.p = E.p
        self.K = E.precision
        self.mod = E.modulus
        self.n = E.degree
        self.e = list(E.coeffs)
        # beta^n = p * U with U a unit; keep U and U^-1 for divisions by beta
        self.unit = [(-c // self.p) % self.mod for c in self.e[: self.n]]
        self.unit_inv = self._invert_unit(self.unit)

    def mul(self, x: list[int], y: list[int]) -> list[int]:
        n, mod = self.n, self.mod
        r = [0] * (2 * n - 1)
        for i, ai in enumerate(x):
            if ai:
                for j, bj in enumerate(y):
                    r[i + j] = (r[i + j] + ai * bj) % mod
        for i in range(2 * n - 2, n - 1, -1):
            c = r[i]
            if c:
                r[i] = 0
                for j in range(n):
                    r[i - n + j] = (r[i - n + j] - c * self.e[j]) % mod
        return r[:n]

    def _invert_unit(self, u: list[int]) -> list[int]:
        v = [0] * self.n
        v[0] = pow(u[0], -1, self.mod)  # unit: constant coordinate odd
        prec = 1
        while prec < self.K * self.n:
            uv = self.mul(u, v)
            t = [(-c) % self.mod for c in uv]
            t[0] = (t[0] + 2) % self.mod
            v = self.mul(v, t)
            prec *= 2
        return v

    def valuation(self, c: list[int]) -> int | None:
        """beta-adic valuation; None when 0 at precision."""
        best: int | None = None
        for i, ci in enumerate(c):
            ci %= self.mod
            if ci == 0:
                continue
            val = self.n * _vp(ci, self.p) + i
            if best is None or val < best:
                best = val
        return best

    def div_beta(self, c: list[int]) -> list[int]:
        btop = [0] * (self.n - 1) + [1]
        t = self.mul(self.mul(c, btop), self.unit_inv)
        if any(x % self.p for x in t):
            raise Inconsistent("division by beta of a unit element")
        return [x // self.p for x in t]

    def residue(self, c: list[int], val: int) -> int:
        t = c
        for _ in range(val):
            t = self.div_beta(t)
        return t[0] % self.p


def ore_irreducible_over_Q2beta(E: PadicPoly) -> OreCertificate:
    """Irreducibility certificate for the cofactor of (x - beta) in O[y].

    Builds E_1 = E / (y - beta) over O = Z_2[x]/(E), develops it in powers
    of (y - beta), takes the beta-adic lower hull, and reads the residual
    polynomial along the single segment.  Residual irreducible over F_2 of
    degree = lattice length certifies E_1 irreducible over Q_2(beta).
    """
    if not _is_eisenstein(E):
        raise Inconsistent("input is not Eisenstein")
    ring = _RamifiedRing(E)
    n, mod = ring.n, ring.mod
    beta = [0] * n
    if n >= 2:
        beta[1] = 1
    one = [0] * n
    one[0] = 1
    # synthetic division of E by (y - beta); remainder E(beta) = 0 in O
    cof: list[list[int]] = [one]
    cur = one
    for i in range(n - 2, -1, -1):
        cur = ring.mul(beta, cur)
        cur = cur[:]
        cur[0] = (cur[0] + E.coeffs[i + 1]) % mod
        cof.append(cur)
    cof.reverse()  # E1 ascending in y, degree n-1, leading coeff 1
    # Taylor development of E1 at beta
    poly = [c[:] for c in cof]
    taylor: list[list[int]] = []
    while poly:
        deg = len(poly) - 1
        if deg == 0:
            taylor.append(poly[0])
            break
        q: list[list[int]] = [None] * deg  # type: ignore[list-item]
        curq = poly[deg]
        for i in range(deg - 1, -1, -1):
            q[i] = curq
            nxt = ring.mul(beta, curq)
            curq = [(nxt[s] + poly[i][s]) % mod for s in range(n)]
        taylor.append(curq)
        poly = q
    vals = [ring.valuation(c) for c in taylor]
    if vals[0] is None:
        raise PrecisionLoss("constant Taylor coefficient vanishes at precision")
    pts = [(i, v) for i, v in enumerate(vals) if v is not None]
    hull = _lower_hull(pts)
    slopes = tuple(
        (Fraction(y2 - y1, x2 - x1), x2 - x1) for (x1, y1), (x2, y2) in zip(hull, hull[1:])
    )
    polygon = NewtonPolygon(tuple(hull), slopes)
    m_deg = n - 1
    single = (
        len(hull) == 2
        and hull[0][0] == 0
        and hull[-1] == (m_deg, 0)
    )
    if not single:
        raise Inconclusive(f"cofactor polygon is not a single segment: {hull}")
    height = hull[0][1]
    lat = gcd(m_deg, height)
    e_seg, h_seg = m_deg // lat, height // lat
    res = []
    for k in range(lat + 1):
        i = k * e_seg
        need = height - k * h_seg
        v = vals[i] if i < len(vals) else None
        if v is not None and v < need:
            raise Inconsistent("valuation below its own hull")
        if v == need:
            res.append(ring.residue(taylor[i], need))
        else:
            res.append(0)
    residual = ResidualPoly(Fraction(-height, m_deg), lat, tuple(res))
    irr = irreducible_mod_p(IntPoly(res), ring.p)
    if not irr:
        raise Inconclusive(
            f"residual polynomial {res} is reducible over F_{ring.p}"
        )
    return OreCertificate(
        taylor_valuations=tuple(v if v is not None else -1 for v in vals),
        polygon=polygon,
        residual=residual,
        residual_irreducible=True,
        cofactor_degree=m_deg,
        ext_degree_lower_bound=n * lat,
    )


# ---------------------------------------------------------------------------
# level at 137
# ---------------------------------------------------------------------------

def level_at_137(P: IntPoly) -> LocalReport:
    """Splitting of 137 via Dedekind transfer; tame inertia of order 2.

    The group side (order-2 elements of SL2(F16) are unipotent and fix
    exactly one point of P^1) is re-verified here by enumeration.
    """
    p = 137
    if not dedekind_maximal_at_p(P, p):
        raise NotMaximal(f"Z[x]/(P) is not maximal at {p}")
    fac = fq_factor(list(P.reduce_mod(p).coeffs), FqField(p, 1))
    splitting = tuple(sorted((mult, g.degree) for g, mult in fac))
    if sorted(splitting) != [(1, 1), (2, 2), (2, 2), (2, 2), (2, 2)]:
        raise PatternMismatch(f"splitting at {p} is {splitting}")
    inertia_order = 1
    for e, _f in splitting:
        inertia_order = inertia_order * e // gcd(inertia_order, e)
    if inertia_order % p == 0:
        raise PatternMismatch("p divides the inertia order; not tame")
    perms = sl2p1.enumerate_group(sl2p1.SL2)
    ident = tuple(range(17))
    fixed_counts = {
        sum(1 for i, x in enumerate(pm) if x == i)
        for pm in perms
        if pm != ident and sl2p1._compose(pm, pm) == ident
    }
    if fixed_counts != {1}:
        raise PatternMismatch(
            f"order-2 elements fix {sorted(fixed_counts)} points, expected exactly 1"
        )
    d = abs(discriminant(P))
    return LocalReport(
        prime=p,
        splitting=splitting,
        inertia_order=inertia_order,
        tame=True,
        wild=False,
        disc_valuation=_vp(d, p),
        fixed_points_on_p1=1,
        level_contribution=p,
    )


# ---------------------------------------------------------------------------
# weight at 2
# ---------------------------------------------------------------------------

def weight_from_disc_valuation(v2_disc_E: int, residue_degree: int = 15) -> SerreInvariants:
    """The 450/570 dichotomy: disc valuation of the full local field vs k."""
    v_total = residue_degree * v2_disc_E
    if v_total == 450:
        return SerreInvariants(None, 2, f"v2(disc L_v) = {residue_degree}*{v2_disc_E} = 450")
    if v_total == 570:
        return SerreInvariants(
            None, None, f"v2(disc L_v) = {residue_degree}*{v2_disc_E} = 570 rules out k = 2"
        )
    raise ValueMismatch(f"v2(disc L_v) = {v_total} is outside the 450/570 table")


def weight_at_2(
    E: PadicPoly,
    cert: OreCertificate,
    filtration: sl2p1.InertiaSolution,
) -> SerreInvariants:
    """Weight from v2(disc E) once the local degree and filtration are pinned."""
    if not cert.residual_irreducible or cert.cofactor_degree != E.degree - 1:
        raise Inconsistent("ore certificate does not match E")
    if cert.ext_degree_lower_bound != E.degree * (E.degree - 1):
        raise Inconsistent("certificate bounds a different extension")
    if filtration.inertia_order != 16 or filtration.wild_order != 16:
        raise Inconsistent("inertia filtration is not I = I2 of order 16")
    d = discriminant(E.to_int_poly())
    v2 = _vp(abs(d), 2)
    if v2 >= E.precision - 2:
        raise PrecisionLoss(f"v2(disc E) = {v2} too close to precision {E.precision}")
    return weight_from_disc_valuation(v2, residue_degree=E.degree - 1)


@dataclass(frozen=True)
class WeightReadout:
    unit_root: int
    E: PadicPoly
    v2_disc_E: int
    certificate: OreCertificate
    serre: SerreInvariants


def weight_chain_at_2(R: IntPoly, K: int = 96) -> WeightReadout:
    """split -> Ore -> dichotomy, doubling precision on PRECISION_LOSS.

    A reducible-looking residual gets one retry at doubled precision (it
    could be a precision artifact); a second failure is reported as is.
    """
    k = K
    inconclusive_retry = True
    last: Exception | None = None
    while k <= MAX_PRECISION_BITS:
        try:
            u, E = split_R_at_2(R, k)
            cert = ore_irreducible_over_Q2beta(E)
            filt = sl2p1.inertia_filtration_solve()
            serre = weight_at_2(E, cert, filt)
            v2 = _vp(abs(discriminant(E.to_int_poly())), 2)
            return WeightReadout(u, E, v2, cert, serre)
        except PrecisionLoss as exc:
            last = exc
            k *= 2
        except Inconclusive:
            if not inconclusive_retry:
                raise
            inconclusive_retry = False
            k *= 2
    raise PrecisionLoss(f"gave up at {MAX_PRECISION_BITS} bits: {last}")
