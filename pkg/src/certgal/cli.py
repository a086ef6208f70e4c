"""Command line interface: `certgal verify-all` plus one verb per layer.

Every subcommand exits 0 on PASS, 1 on FAIL (or any hard error), and 2 on
INCONCLUSIVE, so shell pipelines can gate on the certificate outcome.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace

from . import __version__
from . import pipeline as pl
from . import resolvent as rsv
from .errors import CertgalError, Inconclusive

_VERDICT_CODE = {"PASS": 0, "FAIL": 1, "INCONCLUSIVE": 2}


def _emit(doc: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(pl._jsonable(doc), sort_keys=True, indent=2))
        return
    for step in doc.get("steps", ()):
        print(f"{step['verdict']:<13}{step['name']:<22}{step['detail']}")
    for key, val in doc.items():
        if key == "steps":
            continue
        print(f"{key}: {val}")


def _run_steps(names: list[str], cfg, cache=None) -> tuple[dict, int]:
    """Run a sub-chain of pipeline steps against a shared context."""
    by_name = {name: fn for name, _deps, fn in pl._STEPS}
    ctx: dict = {"input_checksums": {"config": cfg.checksum()}}
    steps = []
    code = 0
    for nm in names:
        try:
            detail, evidence = by_name[nm](ctx, cfg, cache)
            verdict = "PASS"
        except Inconclusive as exc:
            verdict, detail, evidence = "INCONCLUSIVE", str(exc), {}
        except CertgalError as exc:
            verdict, detail, evidence = "FAIL", f"{type(exc).__name__}: {exc}", {}
        steps.append({"name": nm, "verdict": verdict, "detail": detail, "evidence": evidence})
        if verdict == "FAIL":
            code = 1
            break
        if verdict == "INCONCLUSIVE" and code == 0:
            code = 2
    return {"steps": steps}, code


def _cmd_verify_all(args) -> int:
    cfg = pl.load_config(args.config)
    report = pl.run_certificate(
        cfg,
        cache_dir=args.cache,
        skip=tuple(args.skip),
        progress=(None if args.quiet else lambda msg: print(f"  .. {msg}", file=sys.stderr)),
    )
    if args.report:
        pl.emit_report(report, "json", args.report)
    print(pl.emit_report(report, "json" if args.json else "text"), end="")
    return pl.exit_code(report)


def _cmd_galois(args) -> int:
    cfg = pl.load_config(args.config)
    doc, code = _run_steps(["mod5-irreducible", "mod7-pattern", "group-squeeze"], cfg)
    _emit(doc, args.json)
    return code


def _cmd_resolvent(args) -> int:
    cfg = pl.load_config(args.config)
    if args.action == "compute":
        rp = rsv.resolvent_exact(
            cfg.P,
            progress=(None if args.json else lambda i, n: print(f"  .. prime {i}/{n}", file=sys.stderr)),
        )
        if args.out:
            rsv.write_poly_file(args.out, rp.poly, primes=len(rp.primes))
        doc = {
            "degree": rp.degree,
            "crt_primes": len(rp.primes),
            "holdout_primes": list(rp.holdout_primes),
            "p1": -rp.poly.coeffs[-2],
            "written_to": args.out,
        }
        _emit(doc, args.json)
        return 0
    if args.action == "check":
        if not args.file:
            print("error: resolvent check needs --file", file=sys.stderr)
            return 1
        rp = rsv.load_cached_resolvent(args.file, cfg.P)
        doc = {
            "degree": rp.degree,
            "holdout_primes": list(rp.holdout_primes),
            "verdict": "PASS",
            "detail": "held-out prime residues replay exactly",
        }
        _emit(doc, args.json)
        return 0
    # action == "factor"
    if args.search:
        cfg = replace(cfg, factor_files=())
    elif args.factor_file:
        cfg = replace(cfg, factor_files=tuple(args.factor_file))
    doc, code = _run_steps(["resolvent", "factorization"], cfg)
    _emit(doc, args.json)
    return code


def _cmd_local(args) -> int:
    cfg = pl.load_config(args.config)
    chain = ["field-R", "level-137"] if args.p == 137 else ["field-R", "weight-2"]
    doc, code = _run_steps(chain, cfg)
    _emit(doc, args.json)
    return code


def _cmd_field(args) -> int:
    cfg = pl.load_config(args.config)
    doc, code = _run_steps(["field-R"], cfg)
    _emit(doc, args.json)
    return code


def _cmd_modsym(args) -> int:
    cfg = pl.load_config(args.config)
    if args.pmax:
        cfg = replace(cfg, trace_pmax=args.pmax)
    ctx: dict = {"input_checksums": {"config": cfg.checksum()}}
    steps = []
    code = 0
    for nm, fn in (("eigenform-match", pl._step_eigenform), ("sturm-congruence", pl._step_sturm)):
        try:
            detail, evidence = fn(ctx, cfg, None)
            verdict = "PASS"
        except Inconclusive as exc:
            verdict, detail, evidence = "INCONCLUSIVE", str(exc), {}
        except CertgalError as exc:
            verdict, detail, evidence = "FAIL", f"{type(exc).__name__}: {exc}", {}
        steps.append({"name": nm, "verdict": verdict, "detail": detail, "evidence": evidence})
        if verdict == "FAIL":
            code = 1
            break
        if verdict == "INCONCLUSIVE" and code == 0:
            code = 2
    if args.an_csv and "orbit_f" in ctx:
        with open(args.an_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["orbit", "n"] + [f"c{i}" for i in range(7)])
            for tag in ("orbit_f", "orbit_g"):
                orbit = ctx[tag]
                for n in sorted(orbit.an):
                    coords = [str(c) for c in orbit.an[n]]
                    coords += [""] * (7 - len(coords))
                    writer.writerow([tag.split("_")[1], n] + coords)
    _emit({"steps": steps}, args.json)
    return code


def _cmd_evidence(args) -> int:
    cfg = pl.load_config(args.config)
    if args.pmax:
        cfg = replace(cfg, chebotarev_pmax=args.pmax)
    doc, code = _run_steps(["chebotarev-evidence"], cfg)
    _emit(doc, args.json)
    return code


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="certgal",
        description="exact re-verification of the degree-17 SL2(F16) Galois "
        "certificate and its level-137 weight-2 modular counterpart",
    )
    ap.add_argument("--version", action="version", version=f"certgal {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="TOML config (default: shipped)")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("verify-all", help="run the full twelve-step certificate")
    common(p)
    p.add_argument("--cache", default=None, help="artifact cache directory")
    p.add_argument(
        "--skip",
        action="append",
        default=[],
        metavar="STEP",
        help=f"mark a step inconclusive without running it; one of: {', '.join(pl.STEP_NAMES)}",
    )
    p.add_argument("--report", default=None, help="also write the JSON report to this path")
    p.add_argument("--quiet", action="store_true", help="no progress lines on stderr")
    p.set_defaults(func=_cmd_verify_all)

    p = sub.add_parser("galois", help="mod-p irreducibility facts and the group squeeze")
    common(p)
    p.set_defaults(func=_cmd_galois)

    p = sub.add_parser("resolvent", help="compute, check, or factor the degree-2380 resolvent")
    common(p)
    p.add_argument("action", choices=["compute", "check", "factor"])
    p.add_argument("--out", default=None, help="compute: write the coefficient file here")
    p.add_argument("--file", default=None, help="check: coefficient file to replay")
    p.add_argument(
        "--factor-file",
        action="append",
        default=[],
        help="factor: use these coefficient files instead of the configured ones",
    )
    p.add_argument(
        "--search",
        action="store_true",
        help="factor: run the lattice search instead of reading factor files",
    )
    p.set_defaults(func=_cmd_resolvent)

    p = sub.add_parser("local", help="local analysis: level at 137 or weight at 2")
    common(p)
    p.add_argument("--p", type=int, choices=[2, 137], required=True)
    p.set_defaults(func=_cmd_local)

    p = sub.add_parser("field", help="generator change gamma, minimal polynomial R, discriminant")
    common(p)
    p.set_defaults(func=_cmd_field)

    p = sub.add_parser("modsym", help="modular symbols: eigenform orbits, traces, Sturm check")
    common(p)
    p.add_argument("--pmax", type=int, default=None, help="trace-table prime bound override")
    p.add_argument("--an-csv", default=None, help="export exact a_n coordinates as CSV")
    p.set_defaults(func=_cmd_modsym)

    p = sub.add_parser("evidence", help="Chebotarev cycle-type statistics against the SL2 model")
    common(p)
    p.add_argument("--pmax", type=int, default=None, help="prime bound override")
    p.set_defaults(func=_cmd_evidence)

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except CertgalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
