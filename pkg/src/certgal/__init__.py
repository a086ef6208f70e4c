"""certgal: exact-arithmetic verification of a degree-17 Galois certificate.

The package certifies, from scratch and over exact arithmetic only, that
the shipped degree-17 polynomial has Galois group SL2(F16) in its natural
action on P^1(F16) (up to one statistically supported exclusion that is
always declared), and that the attached mod-2 representation has Serre
level 137 and weight 2, matching the 4-dimensional Hecke orbit of weight-2
newforms at that level.

Submodules
    bigarith    integer polynomials, CRT, primality, discriminants
    errors      the exception taxonomy shared by every module
    ffield      finite fields F_q, factorization, Dedekind criterion
    sl2p1       SL2(F16) acting on the 17-point projective line
    resolvent   the degree-2380 4-set sum resolvent and its factorization
    localpadic  Newton polygons, Ore certificates, level and weight at p
    nfield      number-field elements, minimal polynomials, discriminants
    modsym      weight-2 modular symbols, Hecke eigenforms, Sturm checks
    pipeline    the end-to-end certificate runner and report writer
    cli         the `certgal` command line entry point
"""

__version__ = "0.1.0"

__all__ = [
    "bigarith",
    "cli",
    "errors",
    "ffield",
    "localpadic",
    "modsym",
    "nfield",
    "pipeline",
    "resolvent",
    "sl2p1",
]
