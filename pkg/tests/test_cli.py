"""Command-line interface: subcommands, exit codes, JSON mode, file outputs."""

import csv
import json
import shutil
import subprocess

import pytest

from certgal.cli import main
from certgal.pipeline import _resolve_path


@pytest.fixture()
def bad_config(tmp_path):
    """Shipped config with P's constant term changed: a certificate that
    must fail at the first step."""
    text = _resolve_path("pkg:default_config.toml").read_text()
    assert '"-1",' in text
    out = tmp_path / "bad.toml"
    out.write_text(text.replace('"-1",', '"0",', 1))
    return out


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "certgal" in capsys.readouterr().out


def test_missing_subcommand_errors():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_galois_text(capsys):
    assert main(["galois"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 3
    assert "mod5-irreducible" in out and "group-squeeze" in out


def test_galois_json(capsys):
    assert main(["galois", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    names = [s["name"] for s in doc["steps"]]
    assert names == ["mod5-irreducible", "mod7-pattern", "group-squeeze"]
    assert all(s["verdict"] == "PASS" for s in doc["steps"])


def test_galois_failure_exit_code(bad_config, capsys):
    assert main(["galois", "--config", str(bad_config)]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out


def test_field_json(capsys):
    assert main(["field", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["steps"][0]["evidence"]["status"] == "certified"


def test_local_both_primes(capsys):
    assert main(["local", "--p", "137"]) == 0
    assert "level-137" in capsys.readouterr().out
    assert main(["local", "--p", "2"]) == 0
    assert "weight-2" in capsys.readouterr().out


def test_local_rejects_other_primes(capsys):
    with pytest.raises(SystemExit):
        main(["local", "--p", "5"])


def test_evidence_small_budget(capsys):
    assert main(["evidence", "--pmax", "2000", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    ev = doc["steps"][0]["evidence"]
    assert ev["pmax"] == 2000 and ev["ramified_skipped"] == [3, 11, 67]
    freqs = ev["frequencies"]
    assert len(freqs) == 6
    assert all(row["within_3_sigma"] for row in freqs.values())
    assert sum(row["observed"] for row in freqs.values()) == ev["primes_sampled"]


def test_resolvent_check_needs_file(capsys):
    assert main(["resolvent", "check"]) == 1
    assert "--file" in capsys.readouterr().err


def test_resolvent_check_shipped(capsys):
    path = _resolve_path("pkg:q2380.txt")
    assert main(["resolvent", "check", "--file", str(path)]) == 0
    out = capsys.readouterr().out
    assert "2380" in out


def test_resolvent_check_corrupt_file(tmp_path, capsys):
    src = _resolve_path("pkg:q2380.txt")
    dst = tmp_path / "q.txt"
    shutil.copy(src, dst)
    data = dst.read_text()
    dst.write_text(data.replace("2800", "2801", 1))
    assert main(["resolvent", "check", "--file", str(dst)]) == 1
    assert capsys.readouterr().err


def test_verify_all_with_skips(capsys):
    rc = main([
        "verify-all", "--quiet", "--json",
        "--skip", "resolvent",
        "--skip", "chebotarev-evidence",
        "--skip", "eigenform-match",
    ])
    assert rc == 2
    doc = json.loads(capsys.readouterr().out)
    assert doc["verdict"] == "INCONCLUSIVE"
    assert doc["schema"] == "certgal-report-v1"


def test_verify_all_unknown_skip(capsys):
    assert main(["verify-all", "--quiet", "--skip", "bogus"]) == 1
    assert "bogus" in capsys.readouterr().err


def test_verify_all_report_file(tmp_path, capsys):
    rep = tmp_path / "r.json"
    rc = main([
        "verify-all", "--quiet", "--report", str(rep),
        "--skip", "resolvent",
        "--skip", "chebotarev-evidence",
        "--skip", "eigenform-match",
    ])
    assert rc == 2
    doc = json.loads(rep.read_text())
    assert len(doc["steps"]) == 12 and doc["gaps"]


def test_modsym_csv_export(tmp_path, capsys):
    out = tmp_path / "an.csv"
    rc = main(["modsym", "--pmax", "250", "--an-csv", str(out)])
    assert rc == 0
    with out.open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["orbit", "n"] + [f"c{i}" for i in range(7)]
    by_orbit = {}
    for row in rows[1:]:
        by_orbit.setdefault(row[0], []).append(row)
    assert set(by_orbit) == {"f", "g"}
    # a_2(f) = (0, 1, 0, 0) in the power basis of its quartic field
    f2 = next(r for r in by_orbit["f"] if r[1] == "2")
    assert f2[2:6] == ["0", "1", "0", "0"] and f2[6:] == ["", "", ""]
    # g lives in a degree-7 field: all seven coordinate columns populated
    g2 = next(r for r in by_orbit["g"] if r[1] == "2")
    assert all(c != "" for c in g2[2:9])


def test_installed_entry_point():
    proc = subprocess.run(
        ["certgal", "--version"], capture_output=True, text=True, timeout=60
    )
    assert proc.returncode == 0 and "certgal" in proc.stdout
