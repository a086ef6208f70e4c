"""Pipeline orchestration: config handling, artifact cache, report assembly,
step verdict semantics, and the negative control."""

import dataclasses
import json
import pathlib

import pytest

import certgal.pipeline as pl
from certgal.bigarith import IntPoly
from certgal.errors import CertgalError, NonMonic, UnknownType


def test_load_default_config(cfg):
    assert cfg.level == 137 and cfg.sturm_bound == 23
    assert cfg.P.degree == 17 and cfg.P.is_monic()
    assert cfg.R.degree == 17 and cfg.R.is_monic()
    assert cfg.trace_pmax == 1000 and cfg.chebotarev_pmax == 50000
    assert cfg.resolvent_file.startswith("pkg:")
    assert len(cfg.factor_files) == 3


def test_config_checksum_stability(cfg):
    c1 = cfg.checksum()
    assert c1 == pl.load_config().checksum()
    assert len(c1) == 64 and int(c1, 16) >= 0
    pert = cfg.with_p_coefficient(0, 1)
    assert pert.checksum() != c1
    assert pert.P.coeffs[0] == cfg.P.coeffs[0] + 1
    assert pert.P.coeffs[1:] == cfg.P.coeffs[1:]


def test_config_validation_rejects_nonmonic(cfg):
    with pytest.raises(NonMonic):
        dataclasses.replace(cfg, p_coeffs=cfg.p_coeffs[:-1] + (2,))


def test_load_config_explicit_path(tmp_path, cfg):
    src = pl._resolve_path("pkg:default_config.toml")
    dst = tmp_path / "c.toml"
    dst.write_text(src.read_text())
    assert pl.load_config(dst).checksum() == cfg.checksum()


def test_resolve_path_pkg_prefix():
    p = pl._resolve_path("pkg:q2380.txt")
    assert p.exists()
    q = pl._resolve_path("/etc/hosts")
    assert str(q) == "/etc/hosts"


def test_primes_upto():
    assert pl._primes_upto(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert pl._primes_upto(1) == []


def test_jsonable():
    from fractions import Fraction

    doc = {"a": Fraction(3, 7), "b": IntPoly([1, 2]), "c": (1, 2), "d": [True]}
    out = pl._jsonable(doc)
    assert out == {"a": "3/7", "b": [1, 2], "c": [1, 2], "d": [True]}
    json.dumps(out)


def test_artifact_cache_roundtrip(tmp_path, cfg):
    cache = pl.ArtifactCache(tmp_path, cfg.checksum())
    path = cache.path_for("thing", ".json")
    assert cfg.checksum()[:16] in path.name
    cache.store_json("thing", {"x": [1, 2, 3]})
    assert cache.load_json("thing") == {"x": [1, 2, 3]}
    # corruption is detected and the entry treated as absent (cache is
    # disposable; only configured inputs are allowed to hard-fail)
    raw = json.loads(path.read_text())
    raw["payload"]["x"] = [9]
    path.write_text(json.dumps(raw))
    assert cache.load_json("thing") is None
    assert cache.load_json("never-stored") is None


def test_fast_steps_pass(cfg):
    ctx = {"input_checksums": {}}
    for name in ("mod5-irreducible", "mod7-pattern", "group-squeeze",
                 "field-R", "level-137", "weight-2"):
        fn = dict((n, f) for n, _deps, f in pl._STEPS)[name]
        detail, evidence = fn(ctx, cfg, None)
        assert detail and isinstance(evidence, dict)


def test_step_names_and_dependencies():
    names = [n for n, _d, _f in pl._STEPS]
    assert names == list(pl.STEP_NAMES)
    assert len(names) == 12
    seen = set()
    for name, deps, _fn in pl._STEPS:
        assert all(d in seen for d in deps), (name, deps)
        seen.add(name)


def test_unknown_skip_rejected(cfg):
    with pytest.raises(UnknownType):
        pl.run_certificate(cfg, skip=("no-such-step",))


def test_resolvent_check_skips_uninformative_prime(cfg):
    # seed 3 lands the extra residue check on 2393, which divides disc(Q)
    # (collided subset sums); the scan must move on to the next informative
    # prime, 2399, rather than fail a true certificate
    shifted = dataclasses.replace(cfg, crt_pool_seed=3)
    fn = dict((n, f) for n, _d, f in pl._STEPS)["resolvent"]
    detail, _evidence = fn({"input_checksums": {}}, shifted, None)
    assert "p = 2399" in detail


def test_negative_control_fails_fast(cfg):
    bad = cfg.with_p_coefficient(0, 1)
    rep = pl.run_certificate(bad)
    assert rep.verdict == "FAIL"
    assert rep.step("mod5-irreducible").verdict == "FAIL"
    later = rep.step("sturm-congruence")
    assert later.verdict == "INCONCLUSIVE"
    assert "not executed" in later.detail
    assert pl.exit_code(rep) == 1


def test_skip_produces_inconclusive_cascade(cfg):
    skips = ("resolvent", "chebotarev-evidence", "eigenform-match")
    rep = pl.run_certificate(cfg, skip=skips)
    assert rep.verdict == "INCONCLUSIVE"
    assert pl.exit_code(rep) == 2
    assert rep.step("resolvent").detail == "skipped by request"
    fact = rep.step("factorization")
    assert fact.verdict == "INCONCLUSIVE" and "dependency" in fact.detail
    sturm = rep.step("sturm-congruence")
    assert sturm.verdict == "INCONCLUSIVE" and "eigenform-match" in sturm.detail
    # independent steps still run to PASS
    assert rep.step("mod5-irreducible").verdict == "PASS"
    assert rep.step("weight-2").verdict == "PASS"
    # a skip never improves the overall verdict
    bad = cfg.with_p_coefficient(0, 1)
    rep_bad = pl.run_certificate(bad, skip=skips)
    assert rep_bad.verdict == "FAIL"


def test_report_serialization_roundtrip(cfg):
    rep = pl.run_certificate(
        cfg, skip=("resolvent", "chebotarev-evidence", "eigenform-match")
    )
    doc = pl.report_to_dict(rep)
    assert doc["schema"] == pl.SCHEMA
    blob = pl.emit_report(rep, format="json")
    assert blob.endswith("\n")
    assert json.loads(blob) == json.loads(blob)  # valid json
    text = pl.emit_report(rep, format="text")
    for name in pl.STEP_NAMES:
        assert name in text
    with pytest.raises(CertgalError):
        pl.emit_report(rep, format="yaml")


def test_report_determinism_modulo_timings(cfg):
    skips = ("resolvent", "chebotarev-evidence", "eigenform-match")
    r1 = pl.run_certificate(cfg, skip=skips)
    r2 = pl.run_certificate(cfg, skip=skips)
    d1 = json.dumps(pl.report_to_dict(r1, include_timings=False), sort_keys=True)
    d2 = json.dumps(pl.report_to_dict(r2, include_timings=False), sort_keys=True)
    assert d1 == d2


def test_gaps_and_external_data_always_reported(cfg):
    rep = pl.run_certificate(
        cfg, skip=("resolvent", "chebotarev-evidence", "eigenform-match")
    )
    assert any("Geissler" in g for g in rep.gaps)
    assert any("classification" in g for g in rep.gaps)
    joined = " ".join(rep.external_data)
    assert "degree 17" in joined
    # the weight step ran, so the Moon-Taguchi dichotomy must be cited
    assert "Moon" in joined and "Taguchi" in joined


def test_progress_callback(cfg):
    seen = []
    pl.run_certificate(
        cfg,
        skip=("resolvent", "chebotarev-evidence", "eigenform-match"),
        progress=seen.append,
    )
    # one message per step actually executed: 12 minus 3 skipped minus the
    # 3 steps whose dependency the skips knocked out
    assert len(seen) == 6
    assert seen[0] == "running mod5-irreducible"


def test_stop_on_fail_false_keeps_running(cfg):
    bad = cfg.with_p_coefficient(0, 1)
    skips = ("resolvent", "chebotarev-evidence", "eigenform-match")
    rep = pl.run_certificate(bad, stop_on_fail=False, skip=skips)
    # later independent steps still execute and fail on their own merits
    assert rep.step("mod5-irreducible").verdict == "FAIL"
    assert rep.step("field-R").verdict == "FAIL"
    # dependents report the unmet dependency, not "not executed"
    w = rep.step("weight-2")
    assert w.verdict == "INCONCLUSIVE" and "dependency" in w.detail
    assert rep.verdict == "FAIL"
    # contrast: with stop_on_fail=True the later failure is never reached
    rep2 = pl.run_certificate(bad, stop_on_fail=True, skip=skips)
    assert "not executed" in rep2.step("field-R").detail
