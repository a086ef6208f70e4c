"""SL2(F16) on the projective line: orbits, traces, inertia filtration.

The group is small enough (4080 elements, 16320 with field automorphisms)
that everything is done by full enumeration; no permutation-group machinery.

Point order on P^1(F16) is fixed once and for all: index 0 is [1:0], and
index 1+code(a) is [a:1] where code() reads the 4-bit vector of a over the
basis {1, t, t^2, t^3} of F_2[t]/(t^4+t+1).  Orbit ids on 4-subsets and the
resolvent bookkeeping both depend on this ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import factorial

from .errors import (
    ConstructionFailed,
    InconsistentFacts,
    MultipleSolutions,
    NoSolution,
)

MODULUS_BITS = 0b10011  # t^4 + t + 1


def _gmul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & 16:
            a ^= MODULUS_BITS
    return r


MUL = tuple(tuple(_gmul(a, b) for b in range(16)) for a in range(16))
INV = [0] * 16
for _a in range(1, 16):
    for _b in range(1, 16):
        if MUL[_a][_b] == 1:
            INV[_a] = _b
            break
INV = tuple(INV)


@dataclass(frozen=True)
class F16Elem:
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < 16:
            raise ValueError("F16 element out of range")

    def __add__(self, other: "F16Elem") -> "F16Elem":
        return F16Elem(self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other: "F16Elem") -> "F16Elem":
        return F16Elem(MUL[self.bits][other.bits])

    def inverse(self) -> "F16Elem":
        if self.bits == 0:
            raise ZeroDivisionError
        return F16Elem(INV[self.bits])

    def is_zero(self) -> bool:
        return self.bits == 0


@dataclass(frozen=True)
class SL2Mat:
    a: F16Elem
    b: F16Elem
    c: F16Elem
    d: F16Elem

    def __post_init__(self):
        det = MUL[self.a.bits][self.d.bits] ^ MUL[self.b.bits][self.c.bits]
        if det != 1:
            raise ValueError("determinant is not 1")

    @staticmethod
    def of(a: int, b: int, c: int, d: int) -> "SL2Mat":
        return SL2Mat(F16Elem(a), F16Elem(b), F16Elem(c), F16Elem(d))

    @property
    def trace(self) -> F16Elem:
        return F16Elem(self.a.bits ^ self.d.bits)

    def tup(self) -> tuple[int, int, int, int]:
        return (self.a.bits, self.b.bits, self.c.bits, self.d.bits)


@dataclass(frozen=True)
class ProjPoint:
    index: int

    def __post_init__(self):
        if not 0 <= self.index < 17:
            raise ValueError("P^1(F16) has 17 points")


@dataclass(frozen=True)
class GroupSpec:
    tag: str
    order: int


SL2 = GroupSpec("SL2", 4080)
SL2_2 = GroupSpec("SL2_2", 8160)
SL2_4 = GroupSpec("SL2_4", 16320)
_SPECS = {s.tag: s for s in (SL2, SL2_2, SL2_4)}


def spec_by_tag(tag: str) -> GroupSpec:
    return _SPECS[tag]


@dataclass(frozen=True)
class OrbitTable:
    tag: str
    orbit_ids: tuple[int, ...]  # one id per 4-subset, lex order
    sizes: tuple[int, ...]

    def to_text(self) -> str:
        lines = [f"# subsets={len(self.orbit_ids)} sizes={','.join(map(str, self.sizes))}"]
        lines += [f"{i} {oid}" for i, oid in enumerate(self.orbit_ids)]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ClassDistribution:
    tag: str
    counts: tuple[tuple[tuple[int, ...], int], ...]  # (sorted cycle type, count)

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.counts)

    @property
    def total(self) -> int:
        return sum(n for _t, n in self.counts)


@dataclass(frozen=True)
class TransitiveDeg17Table:
    """The transitive permutation groups of degree 17.

    Classification data, embedded as an external input; any conclusion that
    uses it is flagged as relying on this table.
    """

    records: tuple[tuple[str, int], ...]


def default_deg17_table() -> TransitiveDeg17Table:
    return TransitiveDeg17Table(
        (
            ("C17", 17),
            ("D17", 34),
            ("C17:C4", 68),
            ("C17:C8", 136),
            ("C17:C16", 272),
            ("SL2(F16)", 4080),
            ("SL2(F16):2", 8160),
            ("SL2(F16):4", 16320),
            ("A17", factorial(17) // 2),
            ("S17", factorial(17)),
        )
    )


# ---------------------------------------------------------------------------
# raw action machinery (int tuples internally, wrapped types at the API edge)
# ---------------------------------------------------------------------------

def _act(mat: tuple[int, int, int, int], pt: int) -> int:
    a, b, c, d = mat
    x, z = (1, 0) if pt == 0 else (pt - 1, 1)
    nx = MUL[a][x] ^ MUL[b][z]
    nz = MUL[c][x] ^ MUL[d][z]
    return 0 if nz == 0 else 1 + MUL[nx][INV[nz]]


def act(mat: SL2Mat, pt: ProjPoint) -> ProjPoint:
    return ProjPoint(_act(mat.tup(), pt.index))


def _perm_of(mat: tuple[int, int, int, int]) -> tuple[int, ...]:
    return tuple(_act(mat, p) for p in range(17))


_FROB_PERM = tuple(0 if p == 0 else 1 + MUL[p - 1][p - 1] for p in range(17))


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(p[q[i]] for i in range(17))


def _cycle_type(perm: tuple[int, ...]) -> tuple[int, ...]:
    seen = [False] * 17
    out = []
    for s in range(17):
        if seen[s]:
            continue
        ln, cur = 0, s
        while not seen[cur]:
            seen[cur] = True
            cur = perm[cur]
            ln += 1
        out.append(ln)
    return tuple(sorted(out))


def _sl2_matrices() -> list[tuple[int, int, int, int]]:
    out = []
    for a in range(16):
        for b in range(16):
            for c in range(16):
                for d in range(16):
                    if MUL[a][d] ^ MUL[b][c] == 1:
                        out.append((a, b, c, d))
    return out


_MATRICES: list[tuple[int, int, int, int]] | None = None


def _matrices() -> list[tuple[int, int, int, int]]:
    global _MATRICES
    if _MATRICES is None:
        _MATRICES = _sl2_matrices()
    return _MATRICES


GENERATORS = (SL2Mat.of(1, 1, 0, 1), SL2Mat.of(1, 0, 1, 1), SL2Mat.of(2, 0, 0, INV[2]))


def _aut_powers(tag: str) -> tuple[int, ...]:
    if tag == "SL2":
        return (0,)
    if tag == "SL2_2":
        return (0, 2)
    if tag == "SL2_4":
        return (0, 1, 2, 3)
    raise ValueError(f"unknown group tag {tag!r}")


def enumerate_group(spec: GroupSpec) -> list[tuple[int, ...]]:
    """All permutations of the 17 points induced by the chosen group.

    Semilinear elements are (matrix, automorphism power) pairs acting by
    x -> M . frob^e(x); the permutation list is their faithful image.
    """
    mats = _matrices()
    frob_pows = [tuple(range(17))]
    for _ in range(3):
        frob_pows.append(_compose(_FROB_PERM, frob_pows[-1]))
    out = []
    for e in _aut_powers(spec.tag):
        fe = frob_pows[e]
        for m in mats:
            pm = _perm_of(m)
            out.append(_compose(pm, fe))
    if len(set(out)) != spec.order:
        raise ConstructionFailed(
            f"{spec.tag}: {len(set(out))} distinct permutations, wanted {spec.order}"
        )
    return out


def _gen_perms(tag: str) -> list[tuple[int, ...]]:
    gens = [_perm_of(g.tup()) for g in GENERATORS]
    if tag == "SL2_2":
        gens.append(_compose(_FROB_PERM, _FROB_PERM))
    elif tag == "SL2_4":
        gens.append(_FROB_PERM)
    return gens


def four_subsets() -> list[tuple[int, int, int, int]]:
    """All C(17,4) subsets in lexicographic order; the resolvent indexing."""
    return list(combinations(range(17), 4))


def orbits_on_4subsets(spec: GroupSpec) -> OrbitTable:
    subs = four_subsets()
    idx = {s: i for i, s in enumerate(subs)}
    gens = _gen_perms(spec.tag)
    ids = [-1] * len(subs)
    sizes = []
    for start in subs:
        if ids[idx[start]] >= 0:
            continue
        oid = len(sizes)
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for p in gens:
                t = tuple(sorted(p[i] for i in u))
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        for t in seen:
            ids[idx[t]] = oid
        sizes.append(len(seen))
    if sum(sizes) != 2380:
        raise ConstructionFailed("orbit sizes do not sum to 2380")
    for s in sizes:
        if spec.order % s:
            raise ConstructionFailed(f"orbit size {s} does not divide {spec.order}")
    return OrbitTable(spec.tag, tuple(ids), tuple(sizes))


def trace_set(generators: list[SL2Mat]) -> set[F16Elem]:
    """Trace set of the subgroup generated, by breadth-first closure."""
    gens = [g.tup() for g in generators]
    ident = (1, 0, 0, 1)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                prod = (
                    MUL[m[0]][g[0]] ^ MUL[m[1]][g[2]],
                    MUL[m[0]][g[1]] ^ MUL[m[1]][g[3]],
                    MUL[m[2]][g[0]] ^ MUL[m[3]][g[2]],
                    MUL[m[2]][g[1]] ^ MUL[m[3]][g[3]],
                )
                if prod not in seen:
                    seen.add(prod)
                    nxt.append(prod)
        frontier = nxt
    return {F16Elem(m[0] ^ m[3]) for m in seen}


def class_distribution(spec: GroupSpec) -> ClassDistribution:
    perms = enumerate_group(spec)
    counts: dict[tuple[int, ...], int] = {}
    for p in perms:
        t = _cycle_type(p)
        counts[t] = counts.get(t, 0) + 1
    if spec.tag == "SL2":
        expected = {
            (1,) * 17,
            tuple(sorted([1] + [2] * 8)),
            tuple(sorted([1, 1] + [3] * 5)),
            tuple(sorted([1, 1] + [5] * 3)),
            tuple(sorted([1, 1, 15])),
            (17,),
        }
        if set(counts) != expected:
            raise ConstructionFailed("unexpected cycle type in SL2 enumeration")
    dist = ClassDistribution(spec.tag, tuple(sorted(counts.items())))
    if dist.total != spec.order:
        raise ConstructionFailed("class counts do not sum to the group order")
    return dist


def trace_cycle_types() -> dict[int, tuple[tuple[int, ...], ...]]:
    """Cycle types on P^1 attainable by SL2 elements of each trace value.

    Trace 0 covers the identity and the involutions; every nonzero trace
    pins the eigenvalue pair and hence a single cycle type.
    """
    seen: dict[int, set[tuple[int, ...]]] = {t: set() for t in range(16)}
    for m in _matrices():
        seen[m[0] ^ m[3]].add(_cycle_type(_perm_of(m)))
    out = {t: tuple(sorted(s)) for t, s in seen.items()}
    if len(out[0]) != 2 or any(len(v) != 1 for t, v in out.items() if t):
        raise ConstructionFailed("trace-to-cycle-type map has unexpected fibers")
    return out


# ---------------------------------------------------------------------------
# maximal subgroup audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubgroupAudit:
    name: str
    order: int
    trace_values: tuple[int, ...]
    missing_traces: int


@dataclass(frozen=True)
class TraceAuditReport:
    families: tuple[SubgroupAudit, ...]
    full_trace_count: int
    point_stabilizers_conjugate_borels: bool
    borel_is_sylow2_normalizer: bool
    external_facts: tuple[str, ...]

    @property
    def every_family_misses_a_trace(self) -> bool:
        return all(f.missing_traces >= 1 for f in self.families)


def _subgroup_closure(gens: list[tuple[int, int, int, int]]) -> set:
    ident = (1, 0, 0, 1)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                prod = (
                    MUL[m[0]][g[0]] ^ MUL[m[1]][g[2]],
                    MUL[m[0]][g[1]] ^ MUL[m[1]][g[3]],
                    MUL[m[2]][g[0]] ^ MUL[m[3]][g[2]],
                    MUL[m[2]][g[1]] ^ MUL[m[3]][g[3]],
                )
                if prod not in seen:
                    seen.add(prod)
                    nxt.append(prod)
        frontier = nxt
    return seen


def _mat_mul(m, g):
    return (
        MUL[m[0]][g[0]] ^ MUL[m[1]][g[2]],
        MUL[m[0]][g[1]] ^ MUL[m[1]][g[3]],
        MUL[m[2]][g[0]] ^ MUL[m[3]][g[2]],
        MUL[m[2]][g[1]] ^ MUL[m[3]][g[3]],
    )


def _mat_inv(m):
    a, b, c, d = m  # det = 1, char 2: inverse is (d, b, c, a)
    return (d, b, c, a)


def maximal_subgroup_trace_audit() -> TraceAuditReport:
    """One representative per maximal-subgroup family, with its trace set.

    Families: Borel (240), split torus normalizer D30, nonsplit torus
    normalizer D34, subfield subgroup SL2(F4) (60).  Each must miss at
    least one trace value; completeness of the family list is an external
    classification fact and is flagged as such in the report.
    """
    full = _matrices()
    families = []

    def audit(name: str, elems: set, want_order: int) -> SubgroupAudit:
        if len(elems) != want_order:
            raise ConstructionFailed(f"{name}: order {len(elems)}, wanted {want_order}")
        traces = {m[0] ^ m[3] for m in elems}
        return SubgroupAudit(name, len(elems), tuple(sorted(traces)), 16 - len(traces))

    borel = {m for m in full if m[2] == 0}
    families.append(audit("borel", borel, 240))

    split = _subgroup_closure([(2, 0, 0, INV[2]), (0, 1, 1, 0)])
    families.append(audit("split_torus_normalizer_D30", split, 30))

    seventeen = next(m for m in full if _cycle_type(_perm_of(m)) == (17,))
    inverter = None
    inv17 = _mat_inv(seventeen)
    for w in full:
        if _mat_mul(_mat_mul(w, seventeen), _mat_inv(w)) == inv17:
            inverter = w
            break
    if inverter is None:
        raise ConstructionFailed("no inverting element for the order-17 torus")
    nonsplit = _subgroup_closure([seventeen, inverter])
    families.append(audit("nonsplit_torus_normalizer_D34", nonsplit, 34))

    f4 = {0, 1, 6, 7}  # the subfield F4 inside the canonical F16 model
    sub = {m for m in full if all(x in f4 for x in m)}
    families.append(audit("subfield_SL2_F4", sub, 60))
    if not set(families[-1].trace_values) <= f4:
        raise ConstructionFailed("SL2(F4) traces escape the subfield")

    full_traces = {m[0] ^ m[3] for m in full}

    # point stabilizers: Stab([1:0]) is the Borel itself, and transitivity
    # witnesses conjugate it onto every other stabilizer
    perms = {m: _perm_of(m) for m in full}
    stab0 = {m for m in full if perms[m][0] == 0}
    stabs_ok = stab0 == borel
    for pt in range(17):
        h = next(m for m in full if perms[m][0] == pt)
        hin = _mat_inv(h)
        conj = {_mat_mul(_mat_mul(h, s), hin) for s in stab0}
        if conj != {m for m in full if perms[m][pt] == pt}:
            stabs_ok = False
            break

    unipotent = {m for m in borel if m[0] == 1 and m[3] == 1}
    normalizer = set()
    for g in full:
        gin = _mat_inv(g)
        if all(_mat_mul(_mat_mul(g, u), gin) in unipotent for u in unipotent):
            normalizer.add(g)
    borel_norm = normalizer == borel

    return TraceAuditReport(
        families=tuple(families),
        full_trace_count=len(full_traces),
        point_stabilizers_conjugate_borels=stabs_ok,
        borel_is_sylow2_normalizer=borel_norm,
        external_facts=(
            "completeness of the maximal-subgroup families of SL2(F16) "
            "(Dickson's classification, external input)",
            "index-17 subgroups are not enumerated; only stabilizer "
            "conjugacy and the Sylow-2 normalizer identity are verified",
        ),
    )


# ---------------------------------------------------------------------------
# inertia filtration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InertiaSolution:
    inertia_order: int
    wild_order: int
    index_in_decomposition: int
    equals_commutator: bool
    candidates_checked: tuple[int, ...]
    unipotent_fixed_point_check: bool


def inertia_filtration_solve() -> InertiaSolution:
    """Solve for (I, I2) inside the decomposition group H (a Borel).

    Constraints: I2 is the Sylow-2 of I; I contains [H,H] (the quotient by
    inertia is cyclic, generated by a Frobenius); [I:I2] divides
    2^[H:I] - 1 (tame quotient embeds in the residue units).  Subgroups
    between [H,H] and H correspond to divisors of 15; the solver checks
    every divisor and demands a unique survivor.
    """
    full = _matrices()
    borel = [m for m in full if m[2] == 0]
    bset = set(borel)
    comm = set()
    for x in borel:
        xin = _mat_inv(x)
        for y in borel:
            comm.add(_mat_mul(_mat_mul(x, y), _mat_mul(xin, _mat_inv(y))))
    commgrp = _subgroup_closure(list(comm))
    unipotent = {m for m in bset if m[0] == 1 and m[3] == 1}
    if commgrp != unipotent:
        raise NoSolution("[H,H] is not the unipotent subgroup")
    # unique Sylow-2: every element of 2-power order lies in it
    for m in bset:
        # order of m
        o, cur = 1, m
        while cur != (1, 0, 0, 1):
            cur = _mat_mul(cur, m)
            o += 1
        if o & (o - 1) == 0 and m not in unipotent and o > 1:
            raise MultipleSolutions("a 2-element of the Borel escapes the unipotents")

    survivors = []
    checked = []
    for d in (1, 3, 5, 15):
        checked.append(d)
        # I_d = preimage of the order-d subgroup of H/[H,H] = C15
        e = 15 // d
        idx = {m for m in bset if _diag_power_in(m, e)}
        if len(idx) != 16 * d:
            raise NoSolution(f"candidate subgroup for d={d} has wrong order")
        tame = d
        if (2 ** (240 // len(idx)) - 1) % tame == 0:
            survivors.append(d)
    if not survivors:
        raise NoSolution("no (I, I2) candidate satisfies the constraints")
    if len(survivors) > 1:
        raise MultipleSolutions(f"divisors {survivors} all satisfy the constraints")
    d = survivors[0]
    inertia = unipotent if d == 1 else None
    assert d == 1 and inertia is not None

    fixed_ok = True
    for m in inertia:
        if m == (1, 0, 0, 1):
            continue
        p = _perm_of(m)
        if sum(1 for i in range(17) if p[i] == i) != 1:
            fixed_ok = False
    for m in full:
        if _cycle_type(_perm_of(m)) == (17,):
            if any(_perm_of(m)[i] == i for i in range(17)):
                fixed_ok = False
            break

    return InertiaSolution(
        inertia_order=16,
        wild_order=16,
        index_in_decomposition=15,
        equals_commutator=True,
        candidates_checked=tuple(checked),
        unipotent_fixed_point_check=fixed_ok,
    )


def _diag_power_in(m: tuple[int, int, int, int], e: int) -> bool:
    """Is the diagonal part of the Borel element m an e-th power in F16*?"""
    a = m[0]
    # F16* is cyclic of order 15; a is an e-th power iff a^(15/gcd(e,15)) = 1
    from math import gcd

    k = 15 // gcd(e, 15)
    cur = 1
    for _ in range(k):
        cur = MUL[cur][a]
    return cur == 1


# ---------------------------------------------------------------------------
# squeeze report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SqueezeReport:
    candidates: tuple[str, ...]
    excluded_by_order: tuple[str, ...]
    excluded_by_transitivity: tuple[str, ...]
    index_a17_over_sl2_4: int
    external_facts: tuple[str, ...]


def squeeze_report(
    divisible_by_5: bool,
    four_transitive: bool,
    table: TransitiveDeg17Table | None = None,
) -> SqueezeReport:
    """Apply the degree-17 classification to the established facts.

    5 | #G keeps only the five groups of order divisible by 5; failing
    4-transitivity removes A17 and S17.  The residual ambiguity
    {SL2, SL2_2, SL2_4} is reported, never silently resolved.
    """
    table = table or default_deg17_table()
    if not divisible_by_5:
        raise InconsistentFacts(
            "group order not divisible by 5 contradicts the mod-7 pattern"
        )
    by_order = [(n, o) for n, o in table.records if o % 5 == 0]
    dropped_order = tuple(n for n, o in table.records if o % 5)
    if four_transitive:
        cands = [(n, o) for n, o in by_order if o >= factorial(17) // 2]
        dropped_trans = tuple(n for n, o in by_order if o < factorial(17) // 2)
    else:
        cands = [(n, o) for n, o in by_order if o < factorial(17) // 2]
        dropped_trans = tuple(n for n, o in by_order if o >= factorial(17) // 2)
    if not cands:
        raise InconsistentFacts("no degree-17 transitive group satisfies the facts")
    return SqueezeReport(
        candidates=tuple(n for n, _o in cands),
        excluded_by_order=dropped_order,
        excluded_by_transitivity=dropped_trans,
        index_a17_over_sl2_4=factorial(17) // 2 // 16320,
        external_facts=(
            "classification of the transitive permutation groups of degree 17 "
            "(external input)",
        ),
    )
