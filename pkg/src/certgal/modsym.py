"""Weight-2 modular symbols for Gamma0(N), all arithmetic over Q.

The space is presented on Manin symbols indexed by P^1(Z/N).  Quotienting
by the two-term and three-term relations, cutting out the kernel of the
boundary map to cusps and then the +1 eigenspace of the star involution
leaves a Q-vector space of dimension genus(X_0(N)) carrying exact Hecke
and Atkin-Lehner matrices.  Hecke operators T_n come from Merel's
universal coset family (determinant-n integer matrices), so the same code
path yields U_p at p | N.  Eigenform orbits are split off the
characteristic polynomial of a separating operator and their a_n are
recovered by Krylov solves in the orbit's field, then extended
multiplicatively.  Nothing is ever floated; every linear solve is checked
by exact back-substitution.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .bigarith import IntPoly, balanced, is_prime
from .errors import (
    Inconsistent,
    NoTwistWorks,
    NotInert,
    RationalElement,
    ShapeMismatch,
    SplitDegenerate,
)
from .ffield import FqField, dedekind_maximal_at_p, fq_factor, irreducible_mod_p
from .nfield import ElementExpr, _charpoly_berkowitz, minpoly_of_element
from .sl2p1 import MUL as _F16_MUL

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _gcdex(a: int, b: int) -> tuple[int, int, int]:
    """(x, y, g) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -x0, -y0, -a
    return x0, y0, a


# ---------------------------------------------------------------------------
# P^1(Z/N) with O(1) lookup
# ---------------------------------------------------------------------------

class P1Table:
    """Canonical representatives of P^1(Z/N) plus a full (c, d) -> index table."""

    __slots__ = ("N", "reps", "_tab")

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("level must be >= 1")
        self.N = N
        seen: dict[tuple[int, int], int] = {}
        reps: list[tuple[int, int]] = []
        tab = [[-1] * N for _ in range(N)]
        for c in range(N):
            row = tab[c]
            for d in range(N):
                t = self.reduce((c, d))
                if t is None:
                    continue
                if t not in seen:
                    seen[t] = len(reps)
                    reps.append(t)
                row[d] = seen[t]
        self.reps = tuple(reps)
        self._tab = tab

    def __len__(self) -> int:
        return len(self.reps)

    def reduce(self, pt: tuple[int, int]) -> tuple[int, int] | None:
        """Canonical representative of (c:d), or None if gcd(c, d, N) > 1."""
        N = self.N
        u, v = pt[0] % N, pt[1] % N
        if u == 0:
            return (0, 1) if gcd(N, v) == 1 else None
        _, s, g = _gcdex(N, u)
        if gcd(g, v) > 1:
            return None
        # make s a unit mod N that scales u down to g
        u1, v1 = 1, N
        gg = gcd(v1, N // g)
        while gg > 1:
            u1 *= gg
            v1 //= gg
            gg = gcd(v1, gg)
        x, y, _ = _gcdex(u1, v1)
        s = (u1 * x + s * y * v1) % N
        v = (s * v) % N
        if g == 1:
            return (1, v)
        v = min((v * t) % N for t in range(1, N, N // g) if gcd(N, t) == 1)
        return (g, v)

    def index(self, c: int, d: int) -> int:
        """Index of (c:d), or -1 when the pair is not in P^1."""
        N = self.N
        return self._tab[c % N][d % N]


# ---------------------------------------------------------------------------
# sparse exact row reduction
# ---------------------------------------------------------------------------

def _rref(rows: list[dict[int, Fraction]]) -> list[tuple[int, dict[int, Fraction]]]:
    """Reduced row echelon form of sparse Fraction rows; [(pivot_col, row)]."""
    piv: list[tuple[int, dict[int, Fraction]]] = []
    for raw in rows:
        r = dict(raw)
        for pc, pr in piv:
            c = r.get(pc)
            if c:
                for k, v in pr.items():
                    nv = r.get(k, _ZERO) - c * v
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
        if not r:
            continue
        pc = min(r)
        c = r[pc]
        r = {k: v / c for k, v in r.items()}
        for j, (pc2, pr2) in enumerate(piv):
            c2 = pr2.get(pc)
            if c2:
                nr = dict(pr2)
                for k, v in r.items():
                    nv = nr.get(k, _ZERO) - c2 * v
                    if nv:
                        nr[k] = nv
                    else:
                        nr.pop(k, None)
                piv[j] = (pc2, nr)
        piv.append((pc, r))
    piv.sort()
    return piv


def solve_in_basis(basis: list, target: list) -> list[Fraction]:
    """Coordinates of target in the given spanning vectors, exact.

    Raises Inconsistent when target is outside the span.  The solution is
    verified by back-substitution before returning, so a degenerate basis
    cannot smuggle in a wrong answer.
    """
    m = len(target)
    n = len(basis)
    rows = []
    for i in range(m):
        r = {j: basis[j][i] for j in range(n) if basis[j][i]}
        if target[i]:
            r[n] = -Fraction(target[i])
        if r:
            rows.append(r)
    sol = [_ZERO] * n
    for pc, r in _rref(rows):
        if pc == n:
            raise Inconsistent("target vector is outside the span")
        sol[pc] = -r.get(n, _ZERO)
    for i in range(m):
        if sum(sol[j] * basis[j][i] for j in range(n)) != target[i]:
            raise Inconsistent("solve_in_basis residual is nonzero")
    return sol


# ---------------------------------------------------------------------------
# genus / index bookkeeping
# ---------------------------------------------------------------------------

def _euler_phi(n: int) -> int:
    out = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            out -= out // p
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out -= out // m
    return out


def _prime_divisors(n: int) -> list[int]:
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


def gamma0_index(N: int) -> int:
    """Index of Gamma0(N) in SL2(Z)."""
    mu = N
    for p in _prime_divisors(N):
        mu = mu // p * (p + 1)
    return mu


def genus_x0(N: int) -> int:
    """Genus of the modular curve X_0(N)."""
    mu = gamma0_index(N)
    if N % 4 == 0:
        nu2 = 0
    else:
        nu2 = 1
        for p in _prime_divisors(N):
            if p == 2:
                continue
            nu2 *= 1 + (1 if p % 4 == 1 else -1)
    if N % 9 == 0:
        nu3 = 0
    else:
        nu3 = 1
        for p in _prime_divisors(N):
            if p == 3:
                continue
            nu3 *= 1 + (1 if p % 3 == 1 else -1)
    ninf = sum(_euler_phi(gcd(d, N // d)) for d in range(1, N + 1) if N % d == 0)
    g4 = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * ninf
    if g4 % 12:
        raise Inconsistent("genus formula did not give an integer")
    return g4 // 12


# ---------------------------------------------------------------------------
# cusps
# ---------------------------------------------------------------------------

def _cusp_equivalent(N: int, a: tuple[int, int], b: tuple[int, int]) -> bool:
    """Gamma0(N)-equivalence of the cusps a and b (numerator, denominator)."""
    u1, v1 = a
    u2, v2 = b
    s1 = _gcdex(u1, v1)[0]
    s2 = _gcdex(u2, v2)[0]
    g = gcd(N, (v1 * v2) % N)
    if g:
        return (s1 * v2 - s2 * v1) % g == 0
    return s1 * v2 - s2 * v1 == 0


class _CuspClasses:
    """Interns cusps up to Gamma0(N)-equivalence; linear scan, small lists."""

    __slots__ = ("N", "reps")

    def __init__(self, N: int):
        self.N = N
        self.reps: list[tuple[int, int]] = []

    def index(self, cusp: tuple[int, int]) -> int:
        for i, r in enumerate(self.reps):
            if _cusp_equivalent(self.N, cusp, r):
                return i
        self.reps.append(cusp)
        return len(self.reps) - 1


# ---------------------------------------------------------------------------
# the space
# ---------------------------------------------------------------------------

class ManinSpace:
    """Weight-2 modular symbols for Gamma0(N) on the +1 cuspidal quotient.

    Attributes of interest:
      dim          dimension of the relation quotient
      free         generator indices (into p1.reps) spanning the quotient
      cuspidal     basis of ker(boundary), vectors in quotient coordinates
      plus         integer-primitive basis of the +1 star eigenspace of
                   the cuspidal subspace; len(plus) == genus_x0(N)
    """

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("level must be >= 1")
        self.N = N
        self.p1 = P1Table(N)
        self._quotient()
        self._boundary()
        self._star_plus()
        self._hecke_cache: dict[str, HeckeMatrix] = {}

    # -- relation quotient --------------------------------------------------

    def _quotient(self) -> None:
        idx = self.p1.index
        rows: list[dict[int, Fraction]] = []
        for i, (c, d) in enumerate(self.p1.reps):
            j = idx(d, -c)
            r: dict[int, Fraction] = {}
            for t in (i, j):
                r[t] = r.get(t, _ZERO) + 1
            rows.append(r)
            j1 = idx(d, -c - d)
            j2 = idx(-c - d, c)
            r = {}
            for t in (i, j1, j2):
                r[t] = r.get(t, _ZERO) + 1
            rows.append(r)
        piv = _rref(rows)
        pivcols = {pc for pc, _ in piv}
        n = len(self.p1.reps)
        self.free: tuple[int, ...] = tuple(k for k in range(n) if k not in pivcols)
        expr: dict[int, dict[int, Fraction]] = {k: {k: _ONE} for k in self.free}
        for pc, r in piv:
            expr[pc] = {k: -v for k, v in r.items() if k != pc}
        self._expr = expr
        self.dim = len(self.free)
        self._pos = {k: t for t, k in enumerate(self.free)}

    def proj(self, symdict: dict[int, Fraction]) -> list[Fraction]:
        """Image of a formal sum of Manin symbols in quotient coordinates."""
        out = [_ZERO] * self.dim
        pos = self._pos
        for k, v in symdict.items():
            if v:
                for fk, fv in self._expr[k].items():
                    out[pos[fk]] += v * fv
        return out

    def relation_defects(self, i: int) -> tuple[list[Fraction], list[Fraction]]:
        """Projected two-term and three-term relation sums at symbol i (both zero)."""
        c, d = self.p1.reps[i]
        idx = self.p1.index
        two: dict[int, Fraction] = {}
        for t in (i, idx(d, -c)):
            two[t] = two.get(t, _ZERO) + 1
        three: dict[int, Fraction] = {}
        for t in (i, idx(d, -c - d), idx(-c - d, c)):
            three[t] = three.get(t, _ZERO) + 1
        return self.proj(two), self.proj(three)

    # -- boundary and cuspidal subspace --------------------------------------

    def symbol_boundary(self, i: int) -> dict[int, int]:
        """Boundary of the Manin symbol i as a formal sum of cusp classes."""
        c, d = self.p1.reps[i]
        a, b, g = _gcdex(d, -c)
        if g != 1:
            raise Inconsistent("P^1 representative with gcd(c, d) > 1")
        out: dict[int, int] = {}
        i1 = self._cusps.index((a, c))
        i2 = self._cusps.index((b, d))
        out[i1] = out.get(i1, 0) + 1
        out[i2] = out.get(i2, 0) - 1
        return {k: v for k, v in out.items() if v}

    def boundary_of_quotient(self, vec: list[Fraction]) -> dict[int, Fraction]:
        """Boundary of a quotient-coordinate vector."""
        out: dict[int, Fraction] = {}
        for t, v in enumerate(vec):
            if v:
                for ci, cv in self._bmap[t].items():
                    out[ci] = out.get(ci, _ZERO) + v * cv
        return {k: v for k, v in out.items() if v}

    def _boundary(self) -> None:
        self._cusps = _CuspClasses(self.N)
        self._bmap: list[dict[int, int]] = [self.symbol_boundary(k) for k in self.free]
        ncusp = len(self._cusps.reps)
        rows = []
        for ci in range(ncusp):
            r = {
                j: Fraction(self._bmap[j][ci])
                for j in range(self.dim)
                if self._bmap[j].get(ci)
            }
            rows.append(r)
        piv = _rref(rows)
        pivcols = {pc for pc, _ in piv}
        basis: list[list[Fraction]] = []
        for fc in range(self.dim):
            if fc in pivcols:
                continue
            v = [_ZERO] * self.dim
            v[fc] = _ONE
            for pc, r in piv:
                if fc in r:
                    v[pc] = -r[fc]
            basis.append(v)
        self.cuspidal = basis
        self.n_cusps = ncusp

    # -- star involution and the +1 subspace ---------------------------------

    def star_on_quotient(self, vec: list[Fraction]) -> list[Fraction]:
        """Action of the star involution (c:d) -> -(-c:d) in quotient coords."""
        out = [_ZERO] * self.dim
        cols = self._star_cols
        for i, v in enumerate(vec):
            if v:
                col = cols[i]
                for t in range(self.dim):
                    out[t] += v * col[t]
        return out

    def _star_plus(self) -> None:
        idx = self.p1.index
        cols = []
        for k in self.free:
            c, d = self.p1.reps[k]
            j = idx(-c, d)
            cols.append([-x for x in self.proj({j: _ONE})])
        self._star_cols = cols
        # lambda-coordinates of the kernel of (star - 1) on the cuspidal basis
        nb = len(self.cuspidal)
        diff_cols = []
        for b in self.cuspidal:
            sb = self.star_on_quotient(b)
            diff_cols.append([sb[i] - b[i] for i in range(self.dim)])
        rows = []
        for i in range(self.dim):
            r = {j: diff_cols[j][i] for j in range(nb) if diff_cols[j][i]}
            if r:
                rows.append(r)
        piv = _rref(rows)
        pivcols = {pc for pc, _ in piv}
        plus: list[list[Fraction]] = []
        for fc in range(nb):
            if fc in pivcols:
                continue
            lam = [_ZERO] * nb
            lam[fc] = _ONE
            for pc, r in piv:
                if fc in r:
                    lam[pc] = -r[fc]
            vec = [
                sum(lam[j] * self.cuspidal[j][i] for j in range(nb))
                for i in range(self.dim)
            ]
            den = 1
            for x in vec:
                den = den * x.denominator // gcd(den, x.denominator)
            ivec = [x * den for x in vec]
            g0 = 0
            for x in ivec:
                g0 = gcd(g0, x.numerator)
            if g0 > 1:
                ivec = [x / g0 for x in ivec]
            plus.append(ivec)
        self.plus = plus

    @property
    def plus_dim(self) -> int:
        return len(self.plus)

    # -- Hecke action ---------------------------------------------------------

    def _symdict_of_plus(self, vec: list[Fraction]) -> dict[int, Fraction]:
        """Plus-coordinates -> formal sum of Manin symbols (free generators)."""
        quot = [_ZERO] * self.dim
        for j, v in enumerate(vec):
            if v:
                b = self.plus[j]
                for i in range(self.dim):
                    quot[i] += v * b[i]
        return {self.free[i]: quot[i] for i in range(self.dim) if quot[i]}

    def _act_int(self, sym: dict[int, int], mats: list[tuple[int, int, int, int]]) -> list[int]:
        """Merel-matrix action on an integer symbol sum; dense symbol output."""
        out = [0] * len(self.p1.reps)
        reps = self.p1.reps
        N = self.N
        tab = self.p1._tab
        items = [(reps[k], v) for k, v in sym.items()]
        for a, b, c, d in mats:
            for (cc, dd), v in items:
                j = tab[(a * cc + c * dd) % N][(b * cc + d * dd) % N]
                if j >= 0:
                    out[j] += v
        return out

    def _hecke_symdict(self, sym: dict[int, Fraction], n: int) -> list[Fraction]:
        den = 1
        for v in sym.values():
            den = den * v.denominator // gcd(den, v.denominator)
        isym = {k: int(v * den) for k, v in sym.items()}
        acted = self._act_int(isym, _merel_matrices(n))
        img = self.proj({k: Fraction(acted[k]) for k in range(len(acted)) if acted[k]})
        return [c / den for c in img]

    def hecke_image_quotient(self, n: int, vec: list[Fraction]) -> list[Fraction]:
        """T_n (U_p when p | N) applied to a quotient-coordinate vector."""
        sym = {self.free[i]: vec[i] for i in range(self.dim) if vec[i]}
        return self._hecke_symdict(sym, n)

    def hecke_image_plus(self, n: int, vec: list[Fraction]) -> list[Fraction]:
        """T_n (U_p when p | N) applied to a plus-coordinate vector."""
        img = self._hecke_symdict(self._symdict_of_plus(vec), n)
        return solve_in_basis(self.plus, img)

    def hecke(self, n: int) -> "HeckeMatrix":
        """Matrix of T_n on the plus-cuspidal basis, cached and cross-checked."""
        tag = (f"U{n}" if gcd(n, self.N) > 1 else f"T{n}") if n > 1 else "T1"
        got = self._hecke_cache.get(tag)
        if got is not None:
            return got
        cols = []
        for j in range(self.plus_dim):
            e = [_ZERO] * self.plus_dim
            e[j] = _ONE
            cols.append(tuple(self.hecke_image_plus(n, e)))
        mat = HeckeMatrix(tag=tag, level=self.N, cols=tuple(cols))
        for other in self._hecke_cache.values():
            if not mat.commutes_with(other):
                raise Inconsistent(f"{tag} does not commute with {other.tag}")
        self._hecke_cache[tag] = mat
        return mat

    def atkin_lehner(self) -> "HeckeMatrix":
        """w_N on the plus-cuspidal basis (prime N only); checked w^2 = 1."""
        N = self.N
        if not is_prime(N):
            raise ValueError("Atkin-Lehner operator implemented for prime level only")
        tag = f"w{N}"
        got = self._hecke_cache.get(tag)
        if got is not None:
            return got
        cols = []
        for j in range(self.plus_dim):
            sym = self._symdict_of_plus(
                [_ONE if t == j else _ZERO for t in range(self.plus_dim)]
            )
            out: dict[int, Fraction] = {}
            for k, v in sym.items():
                for jj, w in self._al_on_symbol(k).items():
                    out[jj] = out.get(jj, _ZERO) + v * w
            img = self.proj(out)
            cols.append(tuple(solve_in_basis(self.plus, img)))
        mat = HeckeMatrix(tag=tag, level=N, cols=tuple(cols))
        for j in range(self.plus_dim):
            e = [_ONE if t == j else _ZERO for t in range(self.plus_dim)]
            if mat.apply(mat.apply(e)) != e:
                raise Inconsistent("w_N squared is not the identity")
        for other in self._hecke_cache.values():
            if not mat.commutes_with(other):
                raise Inconsistent(f"{tag} does not commute with {other.tag}")
        self._hecke_cache[tag] = mat
        return mat

    def _al_on_symbol(self, k: int) -> dict[int, Fraction]:
        """w_N image of one Manin symbol, via Manin's continued-fraction trick.

        The symbol (c:d) lifts to [[a, b], [c, d]] in SL2(Z) and denotes the
        geodesic {b/d, a/c}; w_N sends it to {-d/(Nb), -c/(Na)}, which is
        unfolded into paths from infinity.
        """
        N = self.N
        c, d = self.p1.reps[k]
        a, b, g = _gcdex(d, -c)
        if g != 1:
            raise Inconsistent("P^1 representative with gcd(c, d) > 1")
        out: dict[int, Fraction] = {}

        def add_path(num: int, den: int, sign: int) -> None:
            if den == 0:
                return
            for cc, dd in _manin_path(num, den):
                j = self.p1.index(cc, dd)
                if j < 0:
                    raise Inconsistent("Manin path left P^1 at prime level")
                out[j] = out.get(j, _ZERO) + sign

        if b == 0:
            add_path(-c, N * a, 1)
        elif a == 0:
            add_path(-d, N * b, -1)
        else:
            add_path(-c, N * a, 1)
            add_path(-d, N * b, -1)
        return {k2: v for k2, v in out.items() if v}


def _manin_path(p: int, q: int) -> list[tuple[int, int]]:
    """Manin symbols expressing {oo, p/q} through continued-fraction convergents."""
    if q == 0:
        return []
    a_list = []
    pp, qq = p, q
    while True:
        a, r = divmod(pp, qq)
        a_list.append(a)
        if r == 0:
            break
        pp, qq = qq, r
    qs = [0, 1]
    cq = 1
    for a in a_list[1:]:
        cq = a * cq + qs[-2]
        qs.append(cq)
    out = []
    for k in range(len(a_list)):
        sgn = -1 if k % 2 == 0 else 1
        out.append((sgn * qs[k + 1], qs[k]))
    return out


def _merel_matrices(n: int) -> list[tuple[int, int, int, int]]:
    """Merel's universal T_n family: ad - bc = n, a > b >= 0, d > c >= 0."""
    if n < 1:
        raise ValueError("T_n needs n >= 1")
    out = []
    for a in range(1, n + 1):
        for d in range((n + a - 1) // a, n + 2 - a):
            bc = a * d - n
            if bc == 0:
                for b in range(a):
                    out.append((a, b, 0, d))
                for c in range(1, d):
                    out.append((a, 0, c, d))
            else:
                for b in range((bc - 1) // (d - 1) + 1, a):
                    if bc % b == 0:
                        out.append((a, b, bc // b, d))
    return out


def build_space(N: int) -> ManinSpace:
    """Build the level-N space and check the +1 cuspidal dimension formula."""
    sp = ManinSpace(N)
    g = genus_x0(N)
    if sp.plus_dim != g:
        raise Inconsistent(
            f"+1 cuspidal dimension {sp.plus_dim} differs from genus {g} at level {N}"
        )
    return sp


# ---------------------------------------------------------------------------
# Hecke matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeckeMatrix:
    """Exact matrix of T_n / U_p / w_N on the plus-cuspidal basis.

    cols[j] is the image of basis vector j; apply() is matrix-vector from
    that column layout.
    """

    tag: str
    level: int
    cols: tuple[tuple[Fraction, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.cols)

    def apply(self, vec: list[Fraction]) -> list[Fraction]:
        out = [_ZERO] * self.dim
        for j, v in enumerate(vec):
            if v:
                col = self.cols[j]
                for i in range(self.dim):
                    out[i] += v * col[i]
        return out

    def rows(self) -> list[list[Fraction]]:
        return [[self.cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def compose(self, other: "HeckeMatrix") -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(self.apply(list(col))) for col in other.cols)

    def commutes_with(self, other: "HeckeMatrix") -> bool:
        return self.compose(other) == other.compose(self)

    def charpoly(self) -> IntPoly:
        """det(xI - T), coefficients checked integral (T preserves a lattice)."""
        cp = _charpoly_berkowitz(self.rows())
        out = []
        for c in cp:
            f = Fraction(c)
            if f.denominator != 1:
                raise Inconsistent(f"charpoly of {self.tag} is not integral")
            out.append(f.numerator)
        return IntPoly(out[::-1])


# ---------------------------------------------------------------------------
# small-degree integer polynomial factorization (Zassenhaus)
# ---------------------------------------------------------------------------

def _q_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    """Monic gcd over Q, dense descending-free (ascending lists)."""

    def trim(u):
        u = list(u)
        while u and not u[-1]:
            u.pop()
        return u

    a, b = trim(a), trim(b)
    while b:
        # a mod b
        r = list(a)
        while len(r) >= len(b) and r:
            c = r[-1] / b[-1]
            sh = len(r) - len(b)
            for i, x in enumerate(b):
                r[sh + i] -= c * x
            r = trim(r)
        a, b = b, r
    if a:
        lc = a[-1]
        a = [x / lc for x in a]
    return a


def _is_squarefree_q(coeffs_asc: list[int]) -> bool:
    a = [Fraction(c) for c in coeffs_asc]
    d = [Fraction(i * coeffs_asc[i]) for i in range(1, len(coeffs_asc))]
    return len(_q_gcd(a, d)) <= 1


def factor_integer_poly(f: IntPoly, seed: int = 2137) -> list[IntPoly]:
    """Irreducible factors over Z of a monic squarefree poly of degree <= 22.

    Mod-p factorization, Hensel lift past the coefficient bound, then
    brute-force recombination; every accepted factor passes exact division,
    and the product of all factors is checked against f.
    """
    from .resolvent.lattice import _norm2_bits, hensel_lift_factors

    if not f.is_monic():
        raise Inconsistent("factor_integer_poly expects a monic polynomial")
    if f.degree > 22:
        raise ValueError("small-degree factorizer capped at degree 22")
    if not _is_squarefree_q(list(f.coeffs)):
        raise Inconsistent("factor_integer_poly expects a squarefree polynomial")
    if f.degree <= 1:
        return [f]

    best: tuple[int, list[list[int]]] | None = None
    p = 2
    tried = 0
    while tried < 8:
        p += 1
        while not is_prime(p):
            p += 1
        fb = [c % p for c in f.coeffs]
        field = FqField(p)
        fac = fq_factor(fb, field=field, seed=seed)
        if any(m > 1 for _g, m in fac):
            continue
        tried += 1
        mods = [g.int_coeffs() for g, _m in fac]
        if best is None or len(mods) < len(best[1]):
            best = (p, mods)
        if len(mods) == 1:
            break
    if best is None:
        raise Inconsistent("no squarefree reduction among the scanned primes")
    p, mods = best
    if len(mods) == 1:
        return [f]

    bits = f.degree + _norm2_bits(f) + 3
    target = 1
    while (p ** target).bit_length() <= bits:
        target += 1
    lifted = hensel_lift_factors(f, mods, p, target)
    pa = p ** target

    def subset_poly(idxs: tuple[int, ...]) -> IntPoly:
        prod = [1]
        for i in idxs:
            g = lifted[i]
            out = [0] * (len(prod) + len(g) - 1)
            for s, x in enumerate(prod):
                if x:
                    for t, y in enumerate(g):
                        out[s + t] = (out[s + t] + x * y) % pa
            prod = out
        return IntPoly([balanced(c, pa) for c in prod])

    remaining = list(range(len(lifted)))
    found: list[IntPoly] = []
    rest = f
    size = 1
    while remaining and 2 * size <= len(remaining):
        hit = None
        for combo in itertools.combinations(remaining, size):
            cand = subset_poly(combo)
            if cand.coeffs[0] != 0 and rest.coeffs[0] % cand.coeffs[0] != 0:
                continue
            q, r = rest.divmod_exact(cand)
            if r.is_zero():
                hit = (combo, cand, q)
                break
        if hit is None:
            size += 1
            continue
        combo, cand, q = hit
        found.append(cand)
        rest = q
        remaining = [i for i in remaining if i not in combo]
    if remaining:
        found.append(rest)
    elif rest.degree > 0:
        raise Inconsistent("recombination left a nontrivial cofactor")

    prod = IntPoly([1])
    for g in found:
        prod = prod * g
    if prod != f:
        raise Inconsistent("factor product does not reproduce the input")
    found.sort(key=lambda g: (g.degree, g.coeffs))
    return found


# ---------------------------------------------------------------------------
# eigenform orbits
# ---------------------------------------------------------------------------

def _kmul(a: list[Fraction], b: list[Fraction], h: IntPoly) -> list[Fraction]:
    """Product in Q[x]/(h), h monic; inputs and output in the power basis."""
    n = h.degree
    out = [_ZERO] * (2 * n - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    hc = h.coeffs
    for i in range(2 * n - 2, n - 1, -1):
        c = out[i]
        if c:
            out[i] = _ZERO
            for j in range(n):
                out[i - n + j] -= c * hc[j]
    return out[:n]


@dataclass(frozen=True)
class EigenformOrbit:
    """One Galois orbit of newforms: field, a_n table, Atkin-Lehner sign.

    a_n values are coordinate tuples in the power basis of the generator
    (the eigenvalue of the splitting operator); minpoly is that
    generator's minimal polynomial.
    """

    minpoly: IntPoly
    dimension: int
    an: dict[int, tuple[Fraction, ...]]
    atkin_lehner: int | None
    split_operator: str
    krylov: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if self.minpoly.degree != self.dimension:
            raise Inconsistent("orbit dimension differs from its field degree")
        one = tuple([_ONE] + [_ZERO] * (self.dimension - 1))
        if self.an.get(1) != one:
            raise Inconsistent("a_1 is not 1")

    def ap(self, p: int) -> tuple[Fraction, ...]:
        return self.an[p]


_SPLIT_CANDIDATES: tuple[tuple[str, tuple[tuple[int, int], ...]], ...] = (
    ("T2", ((2, 1),)),
    ("T2+2*T3", ((2, 1), (3, 2))),
    ("T2+3*T5", ((2, 1), (5, 3))),
)


def _first_separating(
    cands: list[tuple[str, list[list[Fraction]]]],
) -> tuple[str, list[list[Fraction]], IntPoly]:
    """First candidate matrix whose charpoly is squarefree; else SplitDegenerate."""
    for tag, rows in cands:
        cp = _charpoly_berkowitz(rows)
        out = []
        ok = True
        for c in cp:
            fc = Fraction(c)
            if fc.denominator != 1:
                ok = False
                break
            out.append(fc.numerator)
        if not ok:
            raise Inconsistent(f"charpoly of {tag} is not integral")
        poly = IntPoly(out[::-1])
        if _is_squarefree_q(list(poly.coeffs)):
            return tag, rows, poly
    raise SplitDegenerate("no squarefree splitting operator among the candidates")


def eigen_decomposition(space: ManinSpace, nmax: int = 30, seed: int = 2137) -> list[EigenformOrbit]:
    """Split the +1 cuspidal space into Hecke orbits and extract a_n, n <= nmax.

    T2 is tried first as the splitting operator, then T2 + 2*T3, then
    T2 + 3*T5; SplitDegenerate if none has a squarefree characteristic
    polynomial.  Each orbit's a_p come from one exact Krylov solve per
    prime, the rest by the Hecke recursions.
    """
    d = space.plus_dim
    if d == 0:
        return []
    cands = []
    for tag, combo in _SPLIT_CANDIDATES:
        rows = [[_ZERO] * d for _ in range(d)]
        for n, cmult in combo:
            t = space.hecke(n)
            for i in range(d):
                for j in range(d):
                    rows[i][j] += cmult * t.cols[j][i]
        cands.append((tag, rows))
    tag, rows, cp = _first_separating(cands)

    def apply_rows(vec: list[Fraction]) -> list[Fraction]:
        return [
            sum(rows[i][j] * vec[j] for j in range(d) if vec[j]) for i in range(d)
        ]

    factors = factor_integer_poly(cp, seed=seed)
    primes = [p for p in range(2, nmax + 1) if is_prime(p)]
    w_mat = space.atkin_lehner() if is_prime(space.N) else None
    rng = random.Random(seed)
    orbits = []
    for h in factors:
        k = h.degree
        cof, rem = cp.divmod_exact(h)
        if not rem.is_zero():
            raise Inconsistent("charpoly factor does not divide the charpoly")
        v0 = None
        for _attempt in range(8):
            w = [Fraction(rng.randint(-9, 9)) for _ in range(d)]
            # v0 = cofactor(A) w lands in ker h(A)
            acc = [_ZERO] * d
            for c in reversed(cof.coeffs):
                acc = apply_rows(acc)
                if c:
                    for i in range(d):
                        acc[i] += c * w[i]
            if any(acc):
                v0 = acc
                break
        if v0 is None:
            raise Inconsistent("projector image vanished on every attempt")
        kry = [v0]
        for _ in range(k - 1):
            kry.append(apply_rows(kry[-1]))
        aps: dict[int, tuple[Fraction, ...]] = {}
        for p in primes:
            u = space.hecke(p).apply(v0)
            try:
                c = solve_in_basis(kry, u)
            except Inconsistent as e:
                raise Inconsistent(
                    f"T{p} does not act on the Krylov span of the {tag} factor "
                    f"of degree {k}: {e}"
                ) from e
            aps[p] = tuple(c)
        al = None
        if w_mat is not None:
            wv = w_mat.apply(v0)
            if wv == v0:
                al = 1
            elif wv == [-x for x in v0]:
                al = -1
            else:
                raise Inconsistent("w_N is not a scalar on an orbit vector")
        an = _an_from_primes(h, aps, nmax, space.N)
        orbits.append(
            EigenformOrbit(
                minpoly=h,
                dimension=k,
                an=an,
                atkin_lehner=al,
                split_operator=tag,
                krylov=tuple(tuple(v) for v in kry),
            )
        )
    orbits.sort(key=lambda o: (o.dimension, o.minpoly.coeffs))
    if sum(o.dimension for o in orbits) != d:
        raise Inconsistent("orbit dimensions do not add up to the space dimension")
    return orbits


def _an_from_primes(
    h: IntPoly,
    aps: dict[int, tuple[Fraction, ...]],
    nmax: int,
    level: int,
) -> dict[int, tuple[Fraction, ...]]:
    """Extend a_p to all n <= nmax by the standard Hecke recursions."""
    k = h.degree
    one = [_ONE] + [_ZERO] * (k - 1)
    a: dict[int, list[Fraction]] = {1: one}
    for p, v in aps.items():
        a[p] = list(v)
    for m in range(2, nmax + 1):
        if m in a:
            continue
        p = 2
        while m % p:
            p += 1
        pe = p
        mm = m // p
        while mm % p == 0:
            pe *= p
            mm //= p
        if pe not in a:
            prev2, prev1 = one, a[p]
            q = p * p
            while q <= pe:
                if level % p == 0:
                    cur = _kmul(a[p], prev1, h)
                else:
                    cur = _kmul(a[p], prev1, h)
                    for i in range(k):
                        cur[i] -= p * prev2[i]
                prev2, prev1 = prev1, cur
                q *= p
            a[pe] = prev1
        if mm > 1:
            a[m] = _kmul(a[pe], a[mm], h)
        else:
            a[m] = a[pe]
    return {n: tuple(v) for n, v in a.items() if n <= nmax}


def atkin_lehner_check(
    space: ManinSpace,
    orbit_f: EigenformOrbit,
    others: tuple[EigenformOrbit, ...] = (),
) -> bool:
    """True iff the w_N-fixed cuspidal subspace is exactly orbit_f's span.

    Also requires w_N = -1 pointwise on every orbit passed in others.
    """
    w = space.atkin_lehner()
    d = space.plus_dim
    rows = []
    for i in range(d):
        r = {}
        for j in range(d):
            x = w.cols[j][i] - (_ONE if i == j else _ZERO)
            if x:
                r[j] = x
        if r:
            rows.append(r)
    fixed_dim = d - len(_rref(rows))
    if fixed_dim != orbit_f.dimension:
        return False
    for v in orbit_f.krylov:
        if w.apply(list(v)) != list(v):
            return False
    for og in others:
        for v in og.krylov:
            if w.apply(list(v)) != [-x for x in v]:
                return False
    return True


# ---------------------------------------------------------------------------
# F16 embeddings, the mod-2 trace table, the Sturm congruence
# ---------------------------------------------------------------------------

def _gpow(a: int, e: int) -> int:
    r = 1
    while e:
        if e & 1:
            r = _F16_MUL[r][a]
        a = _F16_MUL[a][a]
        e >>= 1
    return r


def _f16_eval(bits_asc: list[int], c: int) -> int:
    acc = 0
    for b in reversed(bits_asc):
        acc = _F16_MUL[acc][c] ^ b
    return acc


def _f16_roots(bits_asc: list[int]) -> list[int]:
    return [c for c in range(16) if _f16_eval(bits_asc, c) == 0]


def _embed_bits(bits: list[int], root: int) -> int:
    acc = 0
    for i, b in enumerate(bits):
        if b:
            acc ^= _gpow(root, i)
    return acc


def _coords_mod2(coords: tuple[Fraction, ...]) -> list[int]:
    out = []
    for c in coords:
        if c.denominator % 2 == 0:
            raise Inconsistent("eigenvalue coordinate is not 2-integral")
        out.append((c.numerator * c.denominator) % 2)
    return out


@dataclass(frozen=True)
class TraceTable:
    """a_p mod 2 for p <= pmax, p not dividing N, embedded in F16 codes.

    Codes live in F2[t]/(t^4+t+1); embedding_root is the chosen root of the
    orbit's minpoly mod 2 (lowest code).  covers_f16 records whether all 16
    values occur; generates_f16 whether the values generate F16 over F2.
    """

    level: int
    pmax: int
    embedding_root: int
    table: dict[int, int]
    covers_f16: bool
    generates_f16: bool


def _quartic_embedding(minpoly: IntPoly) -> tuple[list[int], int]:
    """(minpoly mod 2 bits, lowest F16 root); NotInert unless inert quartic."""
    if minpoly.degree != 4:
        raise NotInert(
            f"residue field is F_2^{minpoly.degree}, not F16; no inert quartic"
        )
    if not irreducible_mod_p(minpoly, 2):
        raise NotInert("field generator's minimal polynomial factors mod 2")
    bits = [c % 2 for c in minpoly.coeffs]
    roots = _f16_roots(bits)
    if len(roots) != 4:
        raise Inconsistent("irreducible quartic without 4 roots in F16")
    return bits, min(roots)


def mod2_trace_table(
    space: ManinSpace,
    orbit: EigenformOrbit,
    pmax: int,
) -> TraceTable:
    """Reduce a_p mod the inert prime 2 of the orbit's quartic field.

    For p <= 30 the orbit table is used; beyond that each a_p is one
    Merel action on the stored seed vector plus one exact Krylov solve.
    Primes dividing N are excluded.
    """
    _bits, root = _quartic_embedding(orbit.minpoly)
    kry = [list(v) for v in orbit.krylov]
    v0 = kry[0]
    table: dict[int, int] = {}
    for p in range(2, pmax + 1):
        if not is_prime(p) or space.N % p == 0:
            continue
        if p in orbit.an:
            coords = orbit.an[p]
        else:
            u = space.hecke_image_plus(p, v0)
            coords = tuple(solve_in_basis(kry, u))
        table[p] = _embed_bits(_coords_mod2(coords), root)
    values = set(table.values())
    return TraceTable(
        level=space.N,
        pmax=pmax,
        embedding_root=root,
        table=table,
        covers_f16=len(values) == 16,
        generates_f16=any(_gpow(c, 4) != c for c in values),
    )


@dataclass(frozen=True)
class SturmReport:
    """Outcome of the mod-2 comparison of two orbits up to the Sturm bound."""

    bound: int
    twist: int
    verdicts: tuple[tuple[int, bool], ...]
    theta_minpoly: IntPoly
    shape: str
    congruent: bool


_THETA_CANDIDATES: tuple[tuple[int, ...], ...] = (
    (3,),
    (5,),
    (7,),
    (2, 3),
    (2, 5),
    (3, 5),
    (2, 7),
    (5, 7),
    (2, 3, 5),
)


def _orbit_mod2_side(
    orbit: EigenformOrbit,
) -> tuple[list[int], IntPoly, str, list[list[Fraction]] | None]:
    """Data reducing the orbit's a_n at its inertial-degree-4 prime above 2.

    Returns (quartic bits, theta minpoly, shape tag, theta power basis),
    the last None when the orbit generator itself is used (inert quartic
    case).  For wider fields a 2-maximal generator theta is searched among
    small sums of a_p; ShapeMismatch if none is found or the splitting of
    2 does not show exactly one inertial-degree-4 prime with the linear
    degrees filling the rest.
    """
    h = orbit.minpoly
    k = h.degree
    if k == 4 and irreducible_mod_p(h, 2):
        return [c % 2 for c in h.coeffs], h, "mu inert", None
    hit = None
    for combo in _THETA_CANDIDATES:
        theta = [_ZERO] * k
        ok = True
        for p in combo:
            if p not in orbit.an:
                ok = False
                break
            for i in range(k):
                theta[i] += orbit.an[p][i]
        if not ok or not any(theta):
            continue
        den = 1
        for c in theta:
            den = den * c.denominator // gcd(den, c.denominator)
        num = IntPoly([int(c * den) for c in theta])
        try:
            mp = minpoly_of_element(ElementExpr(num, den), h)
        except RationalElement:
            continue
        if mp.degree != k or not _is_squarefree_q(list(mp.coeffs)):
            continue
        if not dedekind_maximal_at_p(mp, 2):
            continue
        hit = (theta, mp)
        break
    if hit is None:
        raise ShapeMismatch(
            "no 2-maximal primitive generator among the candidate a_p sums"
        )
    theta, mp = hit
    fac = fq_factor([c % 2 for c in mp.coeffs], field=FqField(2))
    quartics = [(g, m) for g, m in fac if g.degree == 4]
    linear_mult = sum(m for g, m in fac if g.degree == 1)
    if len(quartics) != 1 or quartics[0][1] != 1 or linear_mult != k - 4:
        shape = ", ".join(f"deg {g.degree}^({m})" for g, m in fac)
        raise ShapeMismatch(
            f"splitting of 2 is [{shape}], want one plain quartic and "
            f"linears of total multiplicity {k - 4}"
        )
    nlin = len([g for g, _m in fac if g.degree == 1])
    exps = sorted(m for g, m in fac if g.degree == 1)
    if nlin == 1 and exps == [k - 4]:
        shape = f"lambda^{k - 4} mu"
    else:
        shape = "mu * " + " * ".join(f"lambda_{i + 1}^{e}" for i, e in enumerate(exps))
    qbits = [c.rep[0] for c in quartics[0][0].coeffs]
    pows = [[_ONE] + [_ZERO] * (k - 1)]
    for _ in range(1, k):
        pows.append(_kmul(pows[-1], theta, h))
    return qbits, mp, shape, pows


def _reduce_at_quartic(
    coords: tuple[Fraction, ...],
    pows: list[list[Fraction]] | None,
    qbits: list[int],
) -> list[int]:
    """Coordinates -> residue mod (2, quartic), as 4 bits over F2."""
    if pows is not None:
        coords = tuple(solve_in_basis(pows, list(coords)))
    bits = _coords_mod2(coords)
    for i in range(len(bits) - 1, 3, -1):
        if bits[i]:
            bits[i] = 0
            for j in range(5):
                if qbits[j]:
                    bits[i - 4 + j] ^= 1
    return bits[:4]


def sturm_congruence(
    space: ManinSpace,
    orbit_f: EigenformOrbit,
    orbit_g: EigenformOrbit,
) -> SturmReport:
    """Check a_n(f) = a_n(g) mod 2 at the degree-4 primes, n up to the bound.

    The bound is index(Gamma0(N))/6.  Both reductions land in F16 only up
    to Frobenius, so all four twists of the identification are tried;
    NoTwistWorks if none matches on every n.
    """
    bound = gamma0_index(space.N) // 6
    nmax = max(orbit_f.an)
    if bound > nmax or bound > max(orbit_g.an):
        raise Inconsistent(
            f"Sturm bound {bound} exceeds the stored a_n range {nmax}"
        )
    fbits, froot_poly = [c % 2 for c in orbit_f.minpoly.coeffs], orbit_f.minpoly
    if froot_poly.degree != 4 or not irreducible_mod_p(froot_poly, 2):
        raise NotInert("left orbit's field is not inert quartic at 2")
    froot = min(_f16_roots(fbits))
    qbits, theta_mp, shape, pows = _orbit_mod2_side(orbit_g)
    groot = min(_f16_roots(qbits))
    codes_f = {}
    codes_g = {}
    for n in range(1, bound + 1):
        codes_f[n] = _embed_bits(_coords_mod2(orbit_f.an[n]), froot)
        codes_g[n] = _embed_bits(
            _reduce_at_quartic(orbit_g.an[n], pows, qbits), groot
        )
    for k in range(4):
        tw = {n: codes_g[n] for n in codes_g}
        for _ in range(k):
            tw = {n: _F16_MUL[c][c] for n, c in tw.items()}
        verdicts = tuple((n, codes_f[n] == tw[n]) for n in range(1, bound + 1))
        if all(v for _n, v in verdicts):
            return SturmReport(
                bound=bound,
                twist=k,
                verdicts=verdicts,
                theta_minpoly=theta_mp,
                shape=shape,
                congruent=True,
            )
    raise NoTwistWorks(
        f"no Frobenius twist aligns the two mod-2 systems up to n = {bound}"
    )


# ---------------------------------------------------------------------------
# eigenvalue bound via Sturm chains
# ---------------------------------------------------------------------------

def _sturm_chain(c: list[Fraction]) -> list[list[Fraction]]:
    def trim(u):
        while u and not u[-1]:
            u.pop()
        return u

    chain = [trim(list(c))]
    d = [Fraction(i) * c[i] for i in range(1, len(c))]
    chain.append(trim(d))
    while len(chain[-1]) > 1:
        a, b = chain[-2], chain[-1]
        r = list(a)
        while len(r) >= len(b) and r:
            q = r[-1] / b[-1]
            sh = len(r) - len(b)
            for i, x in enumerate(b):
                r[sh + i] -= q * x
            r = trim(r)
        if not r:
            break
        chain.append([-x for x in r])
    return chain


def _sign_changes(vals: list[int]) -> int:
    signs = [v for v in vals if v]
    return sum(1 for i in range(len(signs) - 1) if signs[i] * signs[i + 1] < 0)


def _sturm_count_ge(c: list[Fraction], a: Fraction) -> int:
    """Number of distinct real roots of c in (a, +infinity)."""
    chain = _sturm_chain(c)
    at_a = []
    at_inf = []
    for q in chain:
        v = _ZERO
        for x in reversed(q):
            v = v * a + x
        at_a.append(1 if v > 0 else (-1 if v < 0 else 0))
        at_inf.append(1 if q[-1] > 0 else -1)
    return _sign_changes(at_a) - _sign_changes(at_inf)


def _real_root_count(c: list[Fraction]) -> int:
    chain = _sturm_chain(c)
    at_neg = []
    at_pos = []
    for q in chain:
        lc = q[-1]
        deg = len(q) - 1
        at_pos.append(1 if lc > 0 else -1)
        s = 1 if lc > 0 else -1
        at_neg.append(s if deg % 2 == 0 else -s)
    return _sign_changes(at_neg) - _sign_changes(at_pos)


def _squarefree_part_q(c: list[Fraction]) -> list[Fraction]:
    d = [Fraction(i) * c[i] for i in range(1, len(c))]
    g = _q_gcd(list(c), d)
    if len(g) <= 1:
        return list(c)
    out = list(c)
    res = []
    while len(out) >= len(g):
        q = out[-1] / g[-1]
        res.append(q)
        sh = len(out) - len(g)
        for i, x in enumerate(g):
            out[sh + i] -= q * x
        while out and not out[-1]:
            out.pop()
    res.reverse()
    return res


def ramanujan_bound_ok(orbit: EigenformOrbit, pmax: int = 30) -> bool:
    """|a_p| <= 2*sqrt(p) in every embedding, certified without floats.

    The multiplication-by-a_p matrix is formed in the orbit's field; its
    characteristic polynomial must be totally real with every root r
    satisfying r^2 < 4p, checked on the Graeffe transform with a Sturm
    chain at the rational point 4p.
    """
    h = orbit.minpoly
    k = h.degree
    basis = [[_ONE if i == j else _ZERO for i in range(k)] for j in range(k)]
    for p in sorted(orbit.an):
        if not is_prime(p) or p > pmax:
            continue
        ap = list(orbit.an[p])
        rows = [[_ZERO] * k for _ in range(k)]
        for j in range(k):
            col = _kmul(ap, basis[j], h)
            for i in range(k):
                rows[i][j] = col[i]
        cp_desc = _charpoly_berkowitz(rows)
        c = [Fraction(x) for x in cp_desc[::-1]]
        c = _squarefree_part_q(c)
        deg = len(c) - 1
        if _real_root_count(c) != deg:
            return False
        # Graeffe: g(x^2) = (-1)^deg c(x) c(-x)
        cm = [(-1) ** i * c[i] for i in range(len(c))]
        prod = [_ZERO] * (2 * deg + 1)
        for i, x in enumerate(c):
            if x:
                for j, y in enumerate(cm):
                    prod[i + j] += x * y
        if deg % 2:
            prod = [-x for x in prod]
        g = [prod[2 * i] for i in range(deg + 1)]
        if any(prod[2 * i + 1] for i in range(deg)):
            return False
        g = _squarefree_part_q(g)
        fourp = Fraction(4 * p)
        val = _ZERO
        for x in reversed(g):
            val = val * fourp + x
        if val == 0:
            return False
        if _sturm_count_ge(g, fourp) != 0:
            return False
    return True
